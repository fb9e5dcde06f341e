import sys

from fadline.cli import main

sys.exit(main())
