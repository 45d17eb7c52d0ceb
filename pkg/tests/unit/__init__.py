"""Unit tests for pyfrechetann."""
