"""Compare sampled projector overlaps with the exact distribution of Z."""
import numpy as np

from swtomo.concentration import ZParams, sample_z, z_cdf, z_mean

rng = np.random.default_rng(5)
params = ZParams(n=10, m=3)
z = sample_z(params, rng, size=20000)
grid = np.linspace(z.min(), z.max(), 6)
print(f"mean: sampled {z.mean():.4f}  exact {z_mean():.4f}")
for g in grid:
    print(f"  P(Z <= {g:+.3f}): sampled {np.mean(z <= g):.4f}  exact {float(z_cdf(params, g)):.4f}")
