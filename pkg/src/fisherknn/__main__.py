import sys

from fisherknn.cli import main

sys.exit(main())
