"""Regenerate the bundled Sobol direction-number table.

Extracts the first 1024 dimensions of the Joe-Kuo D(6) direction numbers
(the copy that ships with scipy) and writes them in the classic text
format ``d s a m_1 ... m_s``.  Dimension 1 is the plain base-2 radical
inverse and carries no table entry, so lines start at d = 2.
"""

import pathlib

import numpy as np
from scipy.stats._sobol import get_poly_vinit

OUT = pathlib.Path(__file__).resolve().parents[1] / "src" / "sqmckit" / "data" / "joe_kuo_d6_1024.txt"
NDIM = 1024


def main():
    poly = get_poly_vinit("poly", np.uint32)
    vinit = get_poly_vinit("vinit", np.uint32)
    lines = ["d s a m_i"]
    for d in range(2, NDIM + 1):
        p = int(poly[d - 1])
        s = p.bit_length() - 1
        a = (p ^ (1 << s) ^ 1) >> 1
        m = [str(int(v)) for v in vinit[d - 1, :s]]
        assert all(int(x) % 2 == 1 for x in m), f"even m at d={d}"
        lines.append(f"{d} {s} {a} {' '.join(m)}")
    OUT.write_text("\n".join(lines) + "\n")
    print(f"wrote {OUT} ({NDIM - 1} entries)")


if __name__ == "__main__":
    main()
