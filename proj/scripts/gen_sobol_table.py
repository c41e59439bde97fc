#!/usr/bin/env python3
"""Regenerate include/acts/detail/sobol_directions.inc from the Joe-Kuo
direction numbers shipped with SciPy (new-joe-kuo-6.21201)."""
import os
import sys

import numpy as np
import scipy

MAX_DIM = 1111


def main(out_path):
    src = os.path.join(os.path.dirname(scipy.__file__), "stats", "_sobol_direction_numbers.npz")
    data = np.load(src)
    poly = data["poly"][:MAX_DIM]
    vinit = data["vinit"][:MAX_DIM]
    with open(out_path, "w", newline="\n") as fh:
        fh.write("// Generated by scripts/gen_sobol_table.py. Do not edit.\n")
        fh.write("// Joe-Kuo direction numbers (new-joe-kuo-6.21201), first %d dimensions.\n" % MAX_DIM)
        fh.write("// Row layout: primitive polynomial (with leading and trailing bits), then m_1..m_18.\n")
        for p, row in zip(poly, vinit):
            vals = ", ".join(str(int(v)) for v in row)
            fh.write("{%d, {%s}},\n" % (int(p), vals))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "include/acts/detail/sobol_directions.inc")
