import sys

from excmg.harness import main

sys.exit(main())
