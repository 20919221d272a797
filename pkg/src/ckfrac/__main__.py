import sys

from ckfrac.cli import main

sys.exit(main())
