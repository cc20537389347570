"""Resistance scaling: duality, flow surgery, and exponent estimates.

Everything here works over a LevelCache, which owns one subdivision
complex plus memoized graphs and solves per level.  The headline
quantities per level n:

  R(n)        hexacarpet resistance, side-{0,1} arc to side-{3,4} arc
  RT(n)       skeleton resistance, side-2 chain to side-5 chain
  R_hat(n)    exact strand formula for the severed (cut) hexacarpet
  R_tilde(n)  resistance after fusing all cell-map images of the
              original triangle sides (the shorted quotient)

Duality says R(n) * RT(n) = 1.  The cut and short surgeries sandwich
R(n) between c (5/4)^n and (3/2)^n, and the flow/potential machinery
below turns level products into the multiplicative bounds

  R(m) R(n) / 2  <=  R(m+n)  <=  4/3 R(m) R(n).

The upper bound is certified constructively: compose_flow builds an
explicit unit flow on level m+n out of a level-m flow skeleton and two
arc-to-arc unit flows on level n, and its energy is the certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .subdivision import DEFAULT_CAP, SimplexId, SubdivisionComplex
from .graphs import (
    WeightedGraph,
    build_cut_graph,
    build_dual,
    build_hexacarpet,
    build_short_graph,
    build_skeleton,
    cut_path_lengths,
    cut_resistance_formula,
)
from .network import (
    check_flow,
    dissipation,
    divergence,
    effective_resistance,
    energy,
)

# dihedral elements by role: s2 fixes the source arc, r3 swaps source
# and sink, s5 = s2 r3; s3 mirrors across the vertical axis, s1 across
# the 30-degree axis, s0 across the horizontal axis
S0, S1, S2, S3, S5 = ("s", 0), ("s", 1), ("s", 2), ("s", 3), ("s", 5)
R3 = ("r", 3)

# the six symmetries permuting the three original triangle sides; they
# act simply transitively on assignments of the three boundary arcs
FRAME = [("r", 0), ("r", 2), ("r", 4), ("s", 0), ("s", 2), ("s", 4)]

# boundary arcs by the original side they refine: the level-0 edge
# (p0,p1) carries hexagon sides {0,1}, (p1,p2) sides {2,3}, (p0,p2)
# sides {4,5}
ARC_OF_MACRO = {0: (0, 1), 2: (2, 3), 1: (4, 5)}
MACRO_OF_ARC = {frozenset(v): k for k, v in ARC_OF_MACRO.items()}


class LevelCache:
    """Memoized graphs and resistance solves per level."""

    def __init__(self, cap=DEFAULT_CAP, rtol=1e-10, flow_rtol=1e-12,
                 max_iter=None):
        self.C = SubdivisionComplex(cap)
        self.rtol = rtol
        self.flow_rtol = flow_rtol
        self.max_iter = max_iter
        self._graphs = {}
        self._results = {}
        self._flows = {}
        self._exact = {}

    def graph(self, family, n):
        key = (family, n)
        if key not in self._graphs:
            builder = {
                "skeleton": build_skeleton,
                "dual": build_dual,
                "hexacarpet": build_hexacarpet,
                "cut": build_cut_graph,
                "short": build_short_graph,
            }[family]
            self._graphs[key] = builder(self.C, n)
        return self._graphs[key]

    def result(self, family, n, rtol=None):
        rtol = self.rtol if rtol is None else rtol
        key = (family, n, rtol)
        if key not in self._results:
            self._results[key] = effective_resistance(
                self.graph(family, n), rtol=rtol, max_iter=self.max_iter
            )
        return self._results[key]

    def R(self, n):
        return self.result("hexacarpet", n).resistance

    def RT(self, n):
        return self.result("skeleton", n).resistance

    def R_hat(self, n):
        key = ("hat", n)
        if key not in self._exact:
            self._exact[key] = cut_resistance_formula(self.C, n)
        return self._exact[key]

    def R_tilde(self, n):
        return self.result("short", n).resistance

    def arc_vertices(self, n, sides):
        """Hexacarpet edge-vertex ids along the given boundary sides."""
        G = self.graph("hexacarpet", n)
        F = G.meta["tri_count"]
        return frozenset(
            F + e for s in sides for e in self.C.side_edges_at(n, s)
        )


# -- duality ------------------------------------------------------------


def verify_duality(cache: LevelCache, levels, tol=1e-8):
    """R(n) * RT(n) = 1 per level; returns (n, R, RT, product, ok) rows."""
    rows = []
    for n in levels:
        R, RT = cache.R(n), cache.RT(n)
        prod = R * RT
        rows.append((n, R, RT, prod, abs(prod - 1.0) <= tol))
    return rows


# -- symmetrized unit flows --------------------------------------------


def hex_pullback(cache: LevelCache, n, J, elem):
    """Flow pullback (J o g)[(t, e)] = J[(g t, g e)] on the hexacarpet.

    Incidence edges are canonically triangle -> edge-vertex, and the
    symmetry preserves that typing, so no orientation signs appear.
    """
    C = cache.C
    G = cache.graph("hexacarpet", n)
    F = G.meta["tri_count"]
    idx = G.edge_index()
    out = np.empty(G.m)
    for i in range(G.m):
        t = int(G.us[i])
        e = int(G.vs[i]) - F
        gt = C.map_tri(("auto", elem), n, t)
        ge = C.map_edge(("auto", elem), n, e)
        out[i] = J[idx[(gt, F + ge)]]
    return out


def unit_flow(cache: LevelCache, n):
    """The unit current of the standard problem, exactly symmetrized.

    The terminal pair (sides {0,1} versus {3,4}) is preserved by s2 and
    reversed by r3 and s5; averaging the four transported copies
    projects the solver output onto the symmetric flow, which is the
    true minimizer, and scrubs asymmetric iteration noise.
    """
    key = ("I", n)
    if key not in cache._flows:
        res = cache.result("hexacarpet", n, rtol=cache.flow_rtol)
        I = res.flow
        I = (
            I
            + hex_pullback(cache, n, I, S2)
            - hex_pullback(cache, n, I, R3)
            - hex_pullback(cache, n, I, S5)
        ) / 4.0
        cache._flows[key] = I
    return cache._flows[key]


def arc_flows(cache: LevelCache, n):
    """Unit flows from the side-{0,1} arc to each adjacent arc.

    H02 joins sides {0,1} to sides {4,5}: it equals the symmetrized
    standard flow on the upper half-plane (triangles whose level-1 cell
    is 0, 1 or 2) and its vertical-mirror pullback on the lower half.
    Divergence cancels along the horizontal seam because the standard
    flow is odd under the half turn.  H01 = H02 o s2 joins {0,1} to
    {2,3}.  Both have energy R(n).
    """
    key = ("arcs", n)
    if key not in cache._flows:
        C = cache.C
        G = cache.graph("hexacarpet", n)
        F = G.meta["tri_count"]
        I = unit_flow(cache, n)
        mirror = hex_pullback(cache, n, I, S3)
        sl = C.tri_slice(n)
        upper = np.array([sl[int(t)] in (0, 1, 2) for t in G.us])
        H02 = np.where(upper, I, mirror)
        H01 = hex_pullback(cache, n, H02, S2)

        A = cache.arc_vertices(n, (0, 1))
        f2 = check_flow(G, H02, A, cache.arc_vertices(n, (4, 5)), tol=1e-9)
        f1 = check_flow(G, H01, A, cache.arc_vertices(n, (2, 3)), tol=1e-9)
        if abs(f2 - 1) > 1e-8 or abs(f1 - 1) > 1e-8:
            raise AssertionError("arc flows are not unit flows")
        cache._flows[key] = (H01, H02)
    return cache._flows[key]


# -- Y-decomposition and flow composition -------------------------------


@dataclass
class YDecomposition:
    """Per-triangle branch currents of the symmetrized unit flow.

    For triangle x with side edge ids e0, e1, e2 (ordered so that the
    through side comes first), a[x] = (a0, a1, a2) are the currents
    from x into those edge vertices.  They sum to zero, a1 and a2 share
    a sign, and the dissipation identity sum(a^2) / 2 = R(m) holds
    because every incidence has resistance 1/2 and belongs to exactly
    one triangle.
    """

    level: int
    a: np.ndarray
    side: np.ndarray

    def energy(self):
        return float(np.sum(self.a ** 2) / 2.0)


def y_decomposition(cache: LevelCache, m, zero_tol=1e-12):
    C = cache.C
    G = cache.graph("hexacarpet", m)
    F = G.meta["tri_count"]
    I = unit_flow(cache, m)
    idx = G.edge_index()
    a = np.zeros((F, 3))
    side = np.zeros((F, 3), dtype=np.int64)
    scale = float(np.abs(I).max())
    for x in range(F):
        es = sorted(C.tri_edges[m][x])
        # branch currents sit far above solver noise or are true zeros;
        # snapping the noise makes the sign invariants exact
        vals = [
            0.0 if abs(I[idx[(x, F + e)]]) < zero_tol * scale
            else I[idx[(x, F + e)]]
            for e in es
        ]
        # the through side is the odd sign out: the one whose removal
        # leaves a same-signed pair; ties resolve to the smallest edge id
        best = None
        for k in range(3):
            rest = [vals[j] for j in range(3) if j != k]
            if rest[0] * rest[1] >= 0.0:
                best = k
                break
        if best is None:
            raise AssertionError(f"no through side at triangle {x}: {vals}")
        order = [best] + [j for j in range(3) if j != best]
        a[x] = [vals[j] for j in order]
        side[x] = [es[j] for j in order]
    return YDecomposition(m, a, side)


def _frame_for(cache: LevelCache, word, y_sides):
    """The unique side-permuting symmetry g aligning the arc flows with
    a triangle's branch currents.

    y_sides = (a0_side, a1_side, a2_side) are level-m edge ids.  The
    source arc (refining original edge 0) must land on the through
    side, the H01 sink arc (edge 2) on the a1 side and the H02 sink arc
    (edge 1) on the a2 side; the frame group hits each assignment once.
    """
    from .subdivision import side_perm

    C = cache.C
    x_side = {
        k: C.apply_word(word, SimplexId(0, 1, k)).index for k in range(3)
    }
    want = {0: y_sides[0], 2: y_sides[1], 1: y_sides[2]}
    hits = []
    for g in FRAME:
        sp = side_perm(g)
        ok = True
        for k in range(3):
            arc = ARC_OF_MACRO[k]
            j = MACRO_OF_ARC[frozenset(sp[s] for s in arc)]
            if x_side[j] != want[k]:
                ok = False
                break
        if ok:
            hits.append(g)
    if len(hits) != 1:
        raise AssertionError(f"frame not unique for word {word}: {hits}")
    return hits[0]


@dataclass
class ComposedFlow:
    m: int
    n: int
    flow: np.ndarray
    max_divergence: float
    flux: float
    energy: float
    bound: float


def compose_flow(cache: LevelCache, m, n, div_tol=1e-9):
    """Splice arc flows of level n into the level-m flow skeleton.

    Every level-m triangle x carries branch currents (a0, a1, a2).
    Inside the level-(m+n) refinement of x we install
    a1 * H01 + a2 * H02, transported so that the common source arc of
    the two flows lands on x's through side.  Currents then match
    across cell interfaces (the arcs all carry one symmetric flux
    profile), producing a unit flow on level m+n whose energy is at
    most 4/3 R(m) R(n): the certificate for the upper resistance bound.
    """
    C = cache.C
    Y = y_decomposition(cache, m)
    H01, H02 = arc_flows(cache, n)
    Gn = cache.graph("hexacarpet", n)
    Gf = cache.graph("hexacarpet", m + n)
    Fn = Gn.meta["tri_count"]
    Ff = Gf.meta["tri_count"]
    idx_f = Gf.edge_index()
    words = C.tri_words(m)

    J = np.zeros(Gf.m)
    written = np.zeros(Gf.m, dtype=np.int8)
    for x in range(len(words)):
        word = words[x]
        g = _frame_for(cache, word, Y.side[x])
        a1, a2 = Y.a[x][1], Y.a[x][2]
        for i in range(Gn.m):
            t = int(Gn.us[i])
            e = int(Gn.vs[i]) - Fn
            gt = C.map_tri(("auto", g), n, t)
            ge = C.map_edge(("auto", g), n, e)
            ft = C.apply_word(word, SimplexId(n, 2, gt)).index
            fe = C.apply_word(word, SimplexId(n, 1, ge)).index
            pos = idx_f[(ft, Ff + fe)]
            # a1, a2 count current leaving x through its branch sides,
            # while the arc flows deposit into their source arc, so the
            # splice flips sign to keep the fine flow coarse-oriented
            J[pos] = -(a1 * H01[i] + a2 * H02[i])
            written[pos] += 1
    if not (written == 1).all():
        raise AssertionError("cells do not tile the fine incidences")

    A = Gf.boundary["A"]
    B = Gf.boundary["B"]
    fl = check_flow(Gf, J, A, B, tol=div_tol)
    div = divergence(Gf, J)
    free = np.ones(Gf.n, dtype=bool)
    for v in A | B:
        free[v] = False
    maxdiv = float(np.abs(div[free]).max())
    E = dissipation(Gf, J)
    return ComposedFlow(
        m, n, J, maxdiv, fl, E, 4.0 / 3.0 * cache.R(m) * cache.R(n)
    )


# -- potential decomposition -------------------------------------------


@dataclass
class PotentialDecomposition:
    """Slice potentials of the skeleton problem in the rotated frame.

    phi is harmonic on the level-n skeleton with value 0 on the side-0
    chain and 1 on the side-3 chain, symmetrized under the reflection
    fixing both chains.  u, v, w are its pullbacks to level n-1 under
    the cell maps of the slices at angles 0-60, 60-120 and 300-360.
    Energy splits as E(phi) = 2 E(u) + 4 E(v) with E(u, v - w) = 0, and
    E(phi) equals the reciprocal skeleton resistance.
    """

    level: int
    E_phi: float
    E_u: float
    E_v: float
    E_w: float
    cross: float
    sym_u: float
    sym_vw: float


def potential_decomposition(cache: LevelCache, n):
    C = cache.C
    G = cache.graph("skeleton", n)
    A = frozenset(C.side_vertices(n, 0))
    B = frozenset(C.side_vertices(n, 3))
    res = effective_resistance(
        G, A=A, B=B, rtol=cache.flow_rtol, max_iter=cache.max_iter
    )
    phi = res.potential
    # s1 (the 30-degree axis) fixes both chains; average to make the
    # invariance exact
    perm = np.array(C.vertex_map(("auto", S1), G.n)[: G.n])
    phi = (phi + phi[perm]) / 2.0

    Gm = cache.graph("skeleton", n - 1)
    nm = Gm.n
    u = phi[np.array(C.vertex_map(("F", 0), nm)[:nm])]
    v = phi[np.array(C.vertex_map(("F", 1), nm)[:nm])]
    w = phi[np.array(C.vertex_map(("F", 5), nm)[:nm])]

    sigma = np.array(C.vertex_map(("auto", S0), nm)[:nm])
    sym_u = float(np.abs(u - u[sigma]).max())
    sym_vw = float(np.abs(w - v[sigma]).max())

    return PotentialDecomposition(
        n,
        energy(G, phi),
        energy(Gm, u),
        energy(Gm, v),
        energy(Gm, w),
        energy(Gm, u, v - w),
        sym_u,
        sym_vw,
    )


# -- multiplicative bounds ---------------------------------------------


def verify_supermultiplicative(cache: LevelCache, max_total, tol=1e-8):
    """All four product inequalities for every split m + n <= max_total.

    Upper: R(m+n) <= 4/3 R(m) R(n), equivalently RT super to factor 3/4.
    Lower: R(m+n) >= 1/2 R(m) R(n), equivalently RT(m+n) <= 2 RT RT.
    """
    rows = []
    for total in range(2, max_total + 1):
        for m in range(1, total // 2 + 1):
            n = total - m
            R, Rm, Rn = cache.R(total), cache.R(m), cache.R(n)
            T, Tm, Tn = cache.RT(total), cache.RT(m), cache.RT(n)
            rows.append(
                {
                    "m": m,
                    "n": n,
                    "upper": R <= 4.0 / 3.0 * Rm * Rn + tol,
                    "lower": R >= 0.5 * Rm * Rn - tol,
                    "t_upper": T <= 2.0 * Tm * Tn + tol,
                    "t_lower": T >= 0.5 * Tm * Tn - tol,
                    "R": R,
                    "RmRn": Rm * Rn,
                    "T": T,
                    "TmTn": Tm * Tn,
                }
            )
    return rows


def cut_report(cache: LevelCache, max_level, tol=1e-9):
    """Severed-graph checks per level: strand inventory, exact formula
    versus solver, and the (3/2)^n upper bounds."""
    rows = []
    for n in range(1, max_level + 1):
        lengths = cut_path_lengths(cache.C, n)
        hat = cache.R_hat(n)
        solved = cache.result("cut", n).resistance
        R = cache.R(n)
        # severing edges can only raise resistance between the same
        # terminal pair (sides {0,1} to {4,5})
        G = cache.graph("hexacarpet", n)
        uncut = effective_resistance(
            G,
            A=cache.arc_vertices(n, (0, 1)),
            B=cache.arc_vertices(n, (4, 5)),
            rtol=cache.rtol,
            max_iter=cache.max_iter,
        ).resistance
        rows.append(
            {
                "n": n,
                "lengths": lengths,
                "strands": len(lengths),
                "triangles": sum(lengths),
                "R_hat": hat,
                "R_hat_solver": solved,
                "formula_gap": abs(float(hat) - solved),
                "hat_le_pow": float(hat) <= 1.5 ** n + tol,
                "R_le_pow": R <= 1.5 ** n + tol,
                "monotone": solved >= uncut - tol,
                "step_ratio": (
                    cache.R(n) <= 1.5 * cache.R(n - 1) + tol if n > 1 else True
                ),
            }
        )
    return rows


def short_report(cache: LevelCache, max_level, ratio_tol=1e-3):
    """Shorted-quotient checks: R_tilde grows by almost exactly 5/4 per
    level and lower-bounds R from below."""
    rows = []
    for n in range(1, max_level + 1):
        rt = cache.R_tilde(n)
        rows.append(
            {
                "n": n,
                "R_tilde": rt,
                "le_R": rt <= cache.R(n) + 1e-9,
                "ratio": rt / cache.R_tilde(n - 1) if n > 1 else float("nan"),
                "ratio_ok": (
                    abs(rt / cache.R_tilde(n - 1) - 1.25) <= ratio_tol
                    if n > 1
                    else True
                ),
            }
        )
    # constant for the (5/4)^n lower bound R >= c (5/4)^n
    c = min(cache.R_tilde(k) * 0.8 ** k for k in range(1, max_level + 1))
    return rows, c


# -- scaling exponents --------------------------------------------------


def spectral_dimension(rho):
    """d_S = 2 log 6 / log(6 rho)."""
    return 2.0 * math.log(6.0) / math.log(6.0 * rho)


@dataclass
class ScalingReport:
    levels: list
    R: list
    RT: list
    R_hat: list
    R_tilde: list
    rho_fit: float
    rho_T_fit: float
    d_S: float
    meta: dict = field(default_factory=dict)

    def ratios(self):
        out = [float("nan")]
        for i in range(1, len(self.R)):
            out.append(self.R[i] / self.R[i - 1])
        return out

    def to_csv_text(self):
        def fmt(x):
            return "" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{x:.17g}"

        lines = ["n,R_n,R_n_T,product,R_hat,R_tilde,ratio,fit_rho,d_S"]
        ratios = self.ratios()
        for i, n in enumerate(self.levels):
            fit = rho_fit_upto(self.levels, self.R, n)
            ds = spectral_dimension(fit) if fit is not None else None
            lines.append(
                ",".join(
                    [
                        str(n),
                        fmt(self.R[i]),
                        fmt(self.RT[i]),
                        fmt(self.R[i] * self.RT[i]),
                        fmt(self.R_hat[i]),
                        fmt(self.R_tilde[i]),
                        fmt(ratios[i]),
                        fmt(fit),
                        fmt(ds),
                    ]
                )
            )
        return "\n".join(lines) + "\n"

    def to_json_dict(self):
        return {
            "levels": self.levels,
            "R": self.R,
            "RT": self.RT,
            "R_hat": self.R_hat,
            "R_tilde": self.R_tilde,
            "ratio": self.ratios(),
            "rho_fit": self.rho_fit,
            "rho_T_fit": self.rho_T_fit,
            "rho_product": self.rho_fit * self.rho_T_fit,
            "d_S": self.d_S,
            "meta": self.meta,
        }


def rho_fit_upto(levels, R, n):
    """Least-squares growth rate of log R over levels 2..n (n >= 3)."""
    xs = [lv for lv in levels if 2 <= lv <= n]
    if len(xs) < 2:
        return None
    ys = [math.log(R[levels.index(lv)]) for lv in xs]
    slope = np.polyfit(np.array(xs, dtype=float), np.array(ys), 1)[0]
    return float(np.exp(slope))


def estimate_rho(cache: LevelCache, max_level, short_max=None):
    """Resistance sweep and growth-rate fit over levels 1..max_level.

    Level 1 is excluded from the fit (boundary effects dominate the
    first subdivision); the fitted rate uses levels 2..max_level.
    """
    if short_max is None:
        short_max = min(max_level, 5)
    levels = list(range(1, max_level + 1))
    R = [cache.R(n) for n in levels]
    RT = [cache.RT(n) for n in levels]
    hats = [float(cache.R_hat(n)) for n in levels]
    tildes = [
        cache.R_tilde(n) if n <= short_max else None for n in levels
    ]
    rho = rho_fit_upto(levels, R, max_level)
    rho_T = rho_fit_upto(levels, RT, max_level)
    dS = spectral_dimension(rho) if rho is not None else None
    return ScalingReport(levels, R, RT, hats, tildes, rho, rho_T, dS)
