import sys

from ris_emf.cli import main

sys.exit(main())
