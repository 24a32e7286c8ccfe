import sys

from othellonet.cli import main

sys.exit(main())
