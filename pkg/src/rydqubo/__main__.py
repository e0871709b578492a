import sys

from rydqubo.cli import main

sys.exit(main())
