"""Main entry point for the disaster-chain toolkit."""

import sys

from app.cli import run


def main():
    """Run the command line."""
    sys.exit(run())


if __name__ == "__main__":
    main()
