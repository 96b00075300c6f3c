"""ef-family CLI - build, certify and inspect E_f family archives."""

from .main import cli_main

__all__ = ["cli_main"]
