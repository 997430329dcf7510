"""Main entry point for axifb when run as a module."""

from axifb.cli import main

if __name__ == "__main__":
    main()
