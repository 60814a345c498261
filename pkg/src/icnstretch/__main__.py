import sys

from icnstretch.cli import main

sys.exit(main())
