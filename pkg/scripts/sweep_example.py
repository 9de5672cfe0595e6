"""Small parameter sweep through the CLI, written to CSV."""

import sys

from cesaro.cli import main

out = sys.argv[1] if len(sys.argv) > 1 else "sweep.csv"
sys.exit(main(["sweep", "--p", "1/2", "--q", "3/4,1,2", "--theta", "1/2,1,2",
               "--budget", "1000", "--out", out]))
