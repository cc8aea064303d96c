import sys

from scannav.cli import main

sys.exit(main())
