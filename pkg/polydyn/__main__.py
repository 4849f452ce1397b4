"""Entry point for running polydyn as a module."""

from polydyn.cli import main

if __name__ == "__main__":
    raise SystemExit(main())
