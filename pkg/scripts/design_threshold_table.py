"""Minimal gate size giving an exact diagonal t-design, by exhaustive search
over canonical classes, next to the closed-form threshold."""

import sys
import time

from diagdesign.moments import design_threshold, is_exact_design, minimal_exact_r

n = int(sys.argv[1]) if len(sys.argv) > 1 else 4
t_max = int(sys.argv[2]) if len(sys.argv) > 2 else 15

print(f"N={n}")
print(" t  exhaustive  threshold  witness below minimum")
for t in range(2, t_max + 1):
    start = time.perf_counter()
    r = minimal_exact_r(n, t)
    witness = ""
    if r > 1:
        a, b = is_exact_design(n, t, r - 1).witness
        witness = f"{a} vs {b}"
    print(f"{t:2d}  {r:10d}  {design_threshold(n, t):9d}  {witness}  [{time.perf_counter() - start:.2f}s]")
