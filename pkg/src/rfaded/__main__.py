import sys

from rfaded.cli import main

sys.exit(main())
