import sys

from coexist_ia.cli import main

sys.exit(main())
