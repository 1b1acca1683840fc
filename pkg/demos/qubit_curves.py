"""Outcome densities for a qubit with spectrum (p, 1 - p) and how they sharpen with n."""
import numpy as np

from swtomo.tomography import hdr_width, qubit_outcome_pdfs

P = 0.7

for n in (10, 30, 100):
    curves = qubit_outcome_pdfs(P, n)
    top = max(curves, key=lambda c: c.weight)
    peak = top.angles[int(np.argmax(top.density))]
    print(f"n={n:4d}  diagrams={len(curves):3d}  likeliest={top.lam}  weight={top.weight:.3f}  "
          f"peak angle={peak:.3f}  90% width={hdr_width(curves):.3f} rad")
