# Two surgery estimates that pin R_n from both sides.  Severing a
# self-similar family of edges leaves disjoint strands whose parallel
# resistance has a closed form; shorting sibling edge groups collapses
# the graph to a small quotient whose resistance grows by exactly 5/4
# per level.
from hexacarpet.analysis import LevelCache, cut_report, short_report

cache = LevelCache(cap=6)

print("severed strands (upper side):")
for row in cut_report(cache, 4):
    n = row["n"]
    print(
        f"  n={n}: {row['strands']} strands, lengths {row['lengths']}, "
        f"sum {row['triangles']} = 6^{n}"
    )
    print(
        f"       R_hat = {row['R_hat']} = {float(row['R_hat']):.8f}, "
        f"solver gap {row['formula_gap']:.1e}, "
        f"R_hat <= 1.5^n: {row['hat_le_pow']}"
    )

print("\nshorted quotient (lower side):")
rows, c = short_report(cache, 5)
for row in rows:
    ratio = "" if row["n"] == 1 else f", step ratio {row['ratio']:.10f}"
    print(
        f"  n={row['n']}: R_tilde = {row['R_tilde']:.8f}"
        f" <= R = {cache.R(row['n']):.8f}{ratio}"
    )
print(f"\nR_n >= {c:.6f} * (5/4)^n for all computed levels")
