# Build the unit current flow at a coarse level, decompose it into
# per-triangle Y currents, and splice a fine-level arc flow into every
# triangle.  The result is a genuine unit flow at the combined level, so
# its energy certifies R_{m+n} <= (4/3) R_m R_n.
import numpy as np

from hexacarpet.analysis import (
    LevelCache,
    compose_flow,
    unit_flow,
    y_decomposition,
)

cache = LevelCache(cap=6)

m = 2
Y = y_decomposition(cache, m)
print(f"level {m}: {Y.a.shape[0]} triangles, Y energy = {Y.energy():.8f}")
print(f"          solver R_{m}        = {cache.R(m):.8f}")
print(f"max |a|  = {np.abs(Y.a).max():.6f}")
print(f"min div  = {np.abs(Y.a.sum(axis=1)).max():.2e} (should be ~0)")

for mm, nn in [(1, 1), (1, 2), (2, 2)]:
    cf = compose_flow(cache, mm, nn)
    print(
        f"\nsplice ({mm},{nn}): max divergence {cf.max_divergence:.2e}, "
        f"flux {cf.flux:.12f}"
    )
    print(
        f"  R_{mm + nn} = {cache.R(mm + nn):.6f} <= E = {cf.energy:.6f}"
        f" <= (4/3) R_{mm} R_{nn} = {cf.bound:.6f}"
    )

# the symmetrized level-1 flow is the seed for every splice
I1 = unit_flow(cache, 1)
print(f"\nlevel-1 seed flow: {np.count_nonzero(I1)} active edges of {len(I1)}")
