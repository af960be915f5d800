"""Allow ``python -m edgemind``."""
import sys

from edgemind.main import main

if __name__ == "__main__":
    sys.exit(main())
