"""Test package for pyfrechetann."""
