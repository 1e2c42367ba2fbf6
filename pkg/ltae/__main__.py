import sys

from ltae.cli import main

sys.exit(main())
