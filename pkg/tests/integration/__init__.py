"""Integration tests for pyfrechetann."""
