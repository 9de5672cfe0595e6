"""Spike ratios for the p > 1 fixture; prints the fitted growth exponent."""

import math
import sys

from cesaro.oracle import triviality_probe
from cesaro.problems import triviality_fixture

widths = [float(x) for x in sys.argv[1:]] or [1e-1, 1e-2, 1e-3, 1e-4]
rows = triviality_probe(triviality_fixture(), widths)
for d, r in rows:
    print(f"width {d:8.1e}  ratio {r:10.4f}")
(d0, r0), (d1, r1) = rows[0], rows[-1]
if d0 != d1:
    print(f"final/first {r1 / r0:.3f}, slope {math.log(r1 / r0) / math.log(d0 / d1):.3f} (1 - 1/p = 0.5)")
