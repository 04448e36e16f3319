import sys

import burgess.cli

sys.exit(burgess.cli.main())
