import sys

from bskop.cli import main

sys.exit(main())
