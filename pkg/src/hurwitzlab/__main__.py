import sys

from hurwitzlab.cli import main

sys.exit(main())
