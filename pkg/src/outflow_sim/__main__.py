"""Command-line entry point for ``python -m outflow_sim``."""

from .cli import main

if __name__ == "__main__":
    main()
