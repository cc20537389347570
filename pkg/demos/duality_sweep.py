# The two-point resistances of the hexacarpet and of the triangulation
# skeleton are exact reciprocals, level by level.  Solve both families
# and watch the product pin to 1.
from hexacarpet.analysis import LevelCache, verify_duality

cache = LevelCache(cap=6)
rows = verify_duality(cache, range(1, 6))

print("  n        R_n          R_n^T        R_n * R_n^T - 1")
for n, R, RT, prod, ok in rows:
    flag = "" if ok else "   <-- BROKEN"
    print(f"{n:>3}  {R:>12.8f}  {RT:>12.8f}  {prod - 1.0:>+14.3e}{flag}")

# level 1 is small enough to do by hand: the hexagon-of-triangles network
# gives R_1 = 3/2 and the skeleton gives R_1^T = 2/3 exactly.
print(f"\nR_1   = {cache.R(1)}  (expect 1.5)")
print(f"R_1^T = {cache.RT(1)}  (expect {2 / 3})")
