"""Command-line entry point.

    python app.py --config configs/example_pair.cfg --format csv
    python app.py --command audit --format json-lines --jobs 4
"""

import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
