"""Command-line interface: `hermite-kinetics <command>` or `python -m src.cli <command>`."""
