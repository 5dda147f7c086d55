import sys

from grande.cli import main

sys.exit(main())
