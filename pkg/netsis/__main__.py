"""Entry point for running netsis as a module.

Usage:
    python -m netsis [options] COMMAND [args...]
"""

from multiprocessing import freeze_support

from netsis.cli import main

if __name__ == "__main__":
    freeze_support()
    main()
