import sys

from lindbladcraft.cli import main

sys.exit(main())
