# Build a few subdivision levels, sanity-check the counts, and dump the
# small graphs in each export format.
from hexacarpet import SubdivisionComplex
from hexacarpet.graphs import (
    build_dual,
    build_hexacarpet,
    build_skeleton,
    to_dot,
    to_edgelist,
)

C = SubdivisionComplex(cap=6)
C.ensure_level(4)

print("level   V      E      F    Euler")
for n in range(5):
    V, E, F = C.counts(n)
    print(f"{n:>5} {V:>6} {E:>6} {F:>6} {V - E + F:>8}")

G1 = build_hexacarpet(C, 1)
print(f"\nhexacarpet level 1: {G1.n} vertices, {G1.m} edges")
print(f"terminals A={sorted(G1.boundary['A'])} B={sorted(G1.boundary['B'])}")

print("\nedgelist (first 8 lines):")
for line in to_edgelist(build_dual(C, 1)).splitlines()[:8]:
    print(" ", line)

print("\ndot (skeleton level 1):")
print(to_dot(build_skeleton(C, 1)))

with open("/tmp/hexacarpet_level2.edgelist", "w") as fh:
    fh.write(to_edgelist(build_hexacarpet(C, 2)))
print("wrote /tmp/hexacarpet_level2.edgelist")
