"""Empirical infidelity tails of the estimator against the analytic failure bound."""
import numpy as np

from swtomo.states import random_state
from swtomo.tomography import failure_probability_report

rng = np.random.default_rng(7)
rho = random_state(2, 2, rng)
deltas = np.linspace(0.02, 0.5, 7)

for n in (10, 100):
    rep = failure_probability_report(rho, n, deltas, 5000, rng)
    print(f"n={n}  mean infidelity {rep.mean_infidelity:.4f}")
    for delta, emp, bound, se, ok in rep.rows():
        print(f"  delta={delta:.2f}  empirical={emp:.4f} (se {se:.4f})  bound={min(1.0, bound):.4g}  ok={ok}")
