import sys

from liquidyn.cli import main

sys.exit(main())
