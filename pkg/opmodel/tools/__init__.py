"""Command bodies behind the CLI and their report/file schemas."""
