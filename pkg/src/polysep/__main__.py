from polysep.cli import main
import sys

sys.exit(main())
