"""
Command-line entrypoint that runs the cifc_regions front end from a source checkout.

Equivalent to the installed ``cifc`` console script:

    python app.py check specs/worked_example_gaussian.json --set setg
"""

import sys

from cifc_regions.cli import main

__all__ = ['main']

if __name__ == '__main__':
    sys.exit(main())
