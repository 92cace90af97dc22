"""
Structured Logging System

JSON (or plain text) logging for the CLI and the scenario runner. Every line
inside a run carries the scenario hash as its correlation id and the active
subcommand, so logs of concurrent runs can be told apart.

Logs are written to stderr only; stdout and the artifact files never see them.
"""

import json
import logging
import sys
import time
import traceback
from contextvars import ContextVar
from datetime import datetime, timezone
from typing import Any, Dict, Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class LoggingConfig(BaseSettings):
    """Logging configuration settings"""

    model_config = SettingsConfigDict(env_prefix="RISYNTH_LOG_", env_file=".env", case_sensitive=False, extra="ignore")

    level: str = Field(default="WARNING")
    root_level: str = Field(default="WARNING")
    format: str = Field(default="json")  # json or text

    service_name: str = Field(default="risynth")
    service_version: str = Field(default="0.1.0")
    environment: str = Field(default="development")

    slow_operation_ms: float = Field(default=5000.0)


correlation_id_var: ContextVar[Optional[str]] = ContextVar("correlation_id", default=None)
command_var: ContextVar[Optional[str]] = ContextVar("command", default=None)

_RESERVED = {
    "name", "msg", "args", "levelname", "levelno", "pathname", "filename", "module",
    "lineno", "funcName", "created", "msecs", "relativeCreated", "thread", "threadName",
    "processName", "process", "message", "exc_info", "exc_text", "stack_info", "taskName",
}


class StructuredFormatter(logging.Formatter):
    """Formats records as one JSON object per line"""

    def __init__(self, config: LoggingConfig):
        super().__init__()
        self.config = config

    def format(self, record: logging.LogRecord) -> str:
        log_entry: Dict[str, Any] = {
            "timestamp": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "service": {
                "name": self.config.service_name,
                "version": self.config.service_version,
                "environment": self.config.environment,
            },
        }

        correlation_id = correlation_id_var.get()
        if correlation_id:
            log_entry["correlation_id"] = correlation_id
        command = command_var.get()
        if command:
            log_entry["command"] = command

        log_entry["source"] = {
            "file": record.filename,
            "line": record.lineno,
            "function": record.funcName,
        }

        extra_fields = {k: v for k, v in record.__dict__.items() if k not in _RESERVED}
        if extra_fields:
            log_entry["extra"] = extra_fields

        if record.exc_info:
            log_entry["exception"] = {
                "type": record.exc_info[0].__name__ if record.exc_info[0] else None,
                "message": str(record.exc_info[1]) if record.exc_info[1] else None,
                "traceback": traceback.format_exception(*record.exc_info),
            }

        if hasattr(record, "duration_ms"):
            log_entry["performance"] = {
                "duration_ms": record.duration_ms,
                "is_slow": record.duration_ms > self.config.slow_operation_ms,
            }

        return json.dumps(log_entry, ensure_ascii=False, default=str)


class TextFormatter(logging.Formatter):
    """Human-readable text formatter"""

    def __init__(self):
        super().__init__(fmt="%(asctime)s - %(name)s - %(levelname)s - %(message)s", datefmt="%Y-%m-%d %H:%M:%S")


class PerformanceLogger:
    """Context manager timing one operation"""

    def __init__(self, logger: logging.Logger, operation: str, slow_ms: float = 5000.0, **kwargs):
        self.logger = logger
        self.operation = operation
        self.slow_ms = slow_ms
        self.extra_data = kwargs
        self.start_time: Optional[float] = None
        self.duration_ms: Optional[float] = None

    def __enter__(self):
        self.start_time = time.perf_counter()
        self.logger.debug(f"Starting operation: {self.operation}", extra=self.extra_data)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.duration_ms = (time.perf_counter() - self.start_time) * 1000.0
        extra_data = {**self.extra_data, "duration_ms": self.duration_ms, "operation": self.operation}

        if exc_type:
            self.logger.error(
                f"Operation failed: {self.operation}", extra=extra_data, exc_info=(exc_type, exc_val, exc_tb)
            )
        else:
            level = logging.WARNING if self.duration_ms > self.slow_ms else logging.INFO
            self.logger.log(level, f"Operation completed: {self.operation}", extra=extra_data)


class RisynthLogger:
    """Logger with helpers for synthesis and pattern events"""

    def __init__(self, name: str, config: LoggingConfig):
        self.config = config
        self.logger = logging.getLogger(name)
        self._setup_logger()

    def _setup_logger(self):
        self.logger.handlers.clear()
        self.logger.setLevel(getattr(logging, self.config.level.upper(), logging.WARNING))

        if self.config.format.lower() == "json":
            formatter: logging.Formatter = StructuredFormatter(self.config)
        else:
            formatter = TextFormatter()

        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(formatter)
        self.logger.addHandler(handler)
        self.logger.propagate = False

    def debug(self, message: str, **kwargs):
        self.logger.debug(message, extra=kwargs)

    def info(self, message: str, **kwargs):
        self.logger.info(message, extra=kwargs)

    def warning(self, message: str, **kwargs):
        self.logger.warning(message, extra=kwargs)

    def error(self, message: str, **kwargs):
        self.logger.error(message, extra=kwargs)

    def exception(self, message: str, **kwargs):
        self.logger.exception(message, extra=kwargs)

    def performance(self, operation: str, **kwargs) -> PerformanceLogger:
        return PerformanceLogger(self.logger, operation, self.config.slow_operation_ms, **kwargs)

    def synthesis(self, message: str, synthesis_data: Dict[str, Any], **kwargs):
        """Quantization summary (state counts, worst residual)"""
        self.info(message, **{**kwargs, "synthesis_data": synthesis_data, "event_type": "synthesis"})

    def pattern(self, message: str, pattern_data: Dict[str, Any], **kwargs):
        """Far-field summary (metrics, gain)"""
        self.info(message, **{**kwargs, "pattern_data": pattern_data, "event_type": "pattern"})


_config: Optional[LoggingConfig] = None
_loggers: Dict[str, RisynthLogger] = {}


def setup_logging(config: Optional[LoggingConfig] = None) -> None:
    """Install the logging configuration used by every ``get_logger`` call"""
    global _config

    _config = config or LoggingConfig()
    _loggers.clear()
    logging.getLogger().setLevel(getattr(logging, _config.root_level.upper(), logging.WARNING))


def get_logger(name: str) -> RisynthLogger:
    """Get or create a logger instance"""
    if _config is None:
        setup_logging()
    if name not in _loggers:
        _loggers[name] = RisynthLogger(name, _config)
    return _loggers[name]


class RunContext:
    """Binds the scenario hash and subcommand to every log line in its scope"""

    def __init__(self, correlation_id: Optional[str] = None, command: Optional[str] = None):
        self.correlation_id = correlation_id
        self.command = command
        self._tokens = []

    def __enter__(self):
        if self.correlation_id:
            self._tokens.append((correlation_id_var, correlation_id_var.set(self.correlation_id)))
        if self.command:
            self._tokens.append((command_var, command_var.set(self.command)))
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        for var, token in reversed(self._tokens):
            var.reset(token)
        self._tokens.clear()
