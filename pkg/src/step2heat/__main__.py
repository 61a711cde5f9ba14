"""Enable running step2heat as a module: python -m step2heat"""

import sys

from step2heat.cli import main

if __name__ == "__main__":
    sys.exit(main())
