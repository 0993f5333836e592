import sys

from betagraph.cli import main

sys.exit(main())
