"""Unit tests module."""