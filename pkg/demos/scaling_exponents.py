# Fit the resistance-scaling factor rho from the level sweep and turn it
# into a spectral dimension.  The cut and short surrogates bracket R_n
# between (5/4)^n and (3/2)^n, which brackets d_S as well.
from hexacarpet.analysis import LevelCache, estimate_rho, spectral_dimension

cache = LevelCache(cap=6)
rep = estimate_rho(cache, 5)

print(rep.to_csv_text())

print(f"fitted rho     = {rep.rho_fit:.6f}")
print(f"fitted rho^T   = {rep.rho_T_fit:.6f}")
print(f"rho * rho^T    = {rep.rho_fit * rep.rho_T_fit:.12f}")
print(f"d_S(fit)       = {spectral_dimension(rep.rho_fit):.6f}")
print(f"d_S(3/2) lower = {spectral_dimension(1.5):.6f}")
print(f"d_S(5/4) upper = {spectral_dimension(1.25):.6f}")

# step ratios R_{n+1}/R_n drift slowly toward rho; the first level is an
# outlier because the boundary weights dominate there
ratios = rep.ratios()
print("step ratios:", ", ".join(f"{r:.5f}" for r in ratios[1:]))
