import sys

from lambdapair.cli import main

sys.exit(main())
