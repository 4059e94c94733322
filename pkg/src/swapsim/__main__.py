import sys

from swapsim.cli import main

sys.exit(main())
