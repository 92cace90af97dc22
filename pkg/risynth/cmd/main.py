#!/usr/bin/env python3
"""
risynth Entry Point

    python -m risynth.cmd.main run scenarios/schottky-steer-30.toml
    risynth grating modes --period 4mm --freq 150GHz

The command-line surface lives in ``risynth.internal.controller.cli``; this
module only hands the process exit code back to the shell.
"""

import sys

from risynth.internal.controller.cli import main


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
