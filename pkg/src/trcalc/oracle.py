"""Closed-form coefficient charts: the ground truth for the descent engine.

The chart of the fixed points of T(F_p[x_1..x_l]) at a weight multidegree is
a sum of even suspensions of an exterior algebra: with A the support of the
multidegree and i the (capped) p-adic valuation of its gcd, dimension n
carries C(|A|, q) copies of Z/p^{min(i+1, r)} for every q = n mod 2,
q <= min(|A|, n).  The ambient-representation generalisation reads its
exponent off a window of fixed-point dimensions; the motivic filtration
selects summands by suspension-plus-exterior degree; the theorem-1 chart
rebuilds the filtration pieces out of truncated fiber sequences and checks
the two agree.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .arith import PGroup
from .charts import Chart
from .reps import Rep, fixed_dim, smash_homotopy


def _vp(x: int, p: int) -> int:
    v = 0
    while x and x % p == 0:
        x //= p
        v += 1
    return v


def _gcd_index(p: int, r: int, deg) -> tuple[tuple[int, ...], int]:
    """(support, capped valuation index i) of a multidegree."""
    support = tuple(k for k, dk in enumerate(deg) if dk)
    if not support:
        return (), r - 1
    g = 0
    for k in support:
        g = math.gcd(g, deg[k])
    return support, min(_vp(g, p), r - 1)


def tr_chart(p: int, r: int, nvars: int, deg, n: int) -> PGroup:
    """Coefficient group of TR^r(F_p[x_1..x_nvars]) at multidegree deg, dim n.

    deg = 0 gives the sigma-polynomial chart Z/p^r in even dimensions; for
    nonzero deg the answer is the 2j-suspended exterior algebra on |A|
    generators over Z/p^{min(i+1, r)}.
    """
    deg = tuple(deg)
    if len(deg) != nvars:
        raise ValueError("multidegree length mismatch")
    if n < 0:
        return PGroup.trivial(p)
    support, i = _gcd_index(p, r, deg)
    if not support:
        return PGroup.cyclic(p, r) if n % 2 == 0 else PGroup.trivial(p)
    e = min(i + 1, r)
    copies = sum(
        math.comb(len(support), q)
        for q in range(n % 2, min(len(support), n) + 1, 2)
    )
    return PGroup(p, [e] * copies)


def tr_labels(p: int, r: int, nvars: int, deg, n: int) -> tuple[str, ...]:
    """Generator labels matching tr_chart: u-words times sigma powers."""
    deg = tuple(deg)
    support, _ = _gcd_index(p, r, deg)
    if not support:
        return (f"s^{n // 2}",) if n % 2 == 0 and n >= 0 else ()
    out = []
    for q in range(n % 2, min(len(support), n) + 1, 2):
        k = (n - q) // 2
        from itertools import combinations

        for sub in combinations(support, q):
            word = "".join(f"u{s + 1}" for s in sub)
            out.append(f"{word}·s^{k}" if word else f"s^{k}")
    return tuple(out)


def ltt21_exponent(V: Rep, i_idx: int, j: int, r: int) -> int:
    """Window exponent i' for suspension index j with ambient V.

    The windows are |V^{Z/p^{i+1-i'}}| <= j < |V^{Z/p^{i-i'}}| for
    i' = 0..i+1, with the usual boundary conventions; j below every window
    gives 0 (the summand vanishes there).
    """
    if j < 0:
        return 0
    hits = []
    for ip in range(0, i_idx + 2):
        lo_idx = i_idx + 1 - ip
        hi_idx = i_idx - ip
        lo = fixed_dim(V, lo_idx, r) if lo_idx <= r else 0
        hi = fixed_dim(V, hi_idx, r) if hi_idx <= r else 0
        if lo <= j < hi:
            hits.append(ip)
    if not hits:
        return 0
    assert len(hits) == 1, f"ambiguous window for V={V}, i={i_idx}, j={j}"
    return min(hits[0], r)


def smash_tr_chart(p: int, r: int, nvars: int, V: Rep, deg, n: int) -> PGroup:
    """Chart of the V-twisted summand: S^V smashed into the weight-deg piece.

    V = 0 recovers tr_chart; nvars = 0 recovers the plain fixed-point group.
    """
    deg = tuple(deg)
    if len(deg) != nvars:
        raise ValueError("multidegree length mismatch")
    if n < 0:
        return PGroup.trivial(p)
    support, i = _gcd_index(p, r, deg)
    if not support:
        if n % 2:
            return PGroup.trivial(p)
        return smash_homotopy(V, r, n // 2)
    exps = []
    for q in range(n % 2, min(len(support), n) + 1, 2):
        j = (n - q) // 2
        e = ltt21_exponent(V, i, j, r)
        if e:
            exps.extend([e] * math.comb(len(support), q))
    return PGroup(p, exps)


def filtration_chart(p: int, r: int, nvars: int, i: int, deg, n: int) -> PGroup:
    """The i-th filtration piece: keep the (q, k)-summands with q + k >= i.

    Summand bookkeeping: dimension n splits as n = q + 2k with q the
    exterior degree (the q-layer of the chart is the degree-q de Rham-Witt
    part) and k the suspension power.
    """
    if i < 0:
        raise ValueError("filtration index must be >= 0")
    deg = tuple(deg)
    if n < 0:
        return PGroup.trivial(p)
    support, iv = _gcd_index(p, r, deg)
    if not support:
        if n % 2 or n // 2 < i:
            return PGroup.trivial(p)
        return PGroup.cyclic(p, r)
    e = min(iv + 1, r)
    copies = 0
    for q in range(n % 2, min(len(support), n) + 1, 2):
        k = (n - q) // 2
        if q + k >= i:
            copies += math.comb(len(support), q)
    return PGroup(p, [e] * copies)


def gr_chart(p: int, r: int, nvars: int, i: int, deg, n: int) -> PGroup:
    """Associated-graded piece: summands with q + k = i exactly."""
    a = filtration_chart(p, r, nvars, i, deg, n)
    b = filtration_chart(p, r, nvars, i + 1, deg, n)
    exps = list(a.exponents)
    for e in b.exponents:
        exps.remove(e)
    return PGroup(p, exps)


def theorem1_chart(p: int, r: int, i: int, d: int, n: int) -> PGroup:
    """Chart of the weight-d fiber summand of the i-th filtration piece.

    Computed from the long exact sequence of the truncated comparison map
    into the twisted chart (kernel in dimension n, cokernel from n+1); the
    LES fixes orders, and the group structure is pinned by asserting
    agreement with the filtration selection rule.
    """
    if n < 0:
        return PGroup.trivial(p)
    if d == 0:
        if n % 2 == 0 and n >= 2 * i:
            return PGroup.cyclic(p, r)
        return PGroup.trivial(p)

    def src_exp(dim: int) -> int:
        # T(F_p) chart truncated at 2i
        if dim % 2 or dim < 2 * i:
            return 0
        return r

    Vd = Rep(p, [d])

    def tgt_exp(dim: int) -> int:
        # twisted chart (single rotation d) truncated at 2i
        if dim % 2 or dim < 2 * i:
            return 0
        exps = smash_homotopy(Vd, r, dim // 2).exponents
        return exps[0] if exps else 0

    def tgt_exp_raw(dim: int) -> int:
        if dim % 2 or dim < 0:
            return 0
        exps = smash_homotopy(Vd, r, dim // 2).exponents
        return exps[0] if exps else 0

    def map_val(dim: int) -> int:
        # comparison-map valuation: unit at the bottom, climbing with the
        # order jumps of the target family
        return tgt_exp_raw(dim) - tgt_exp_raw(0)

    def ker_exp(dim: int) -> int:
        es, et = src_exp(dim), tgt_exp(dim)
        if es == 0:
            return 0
        im = max(0, min(es, et - map_val(dim)))
        return es - im

    def coker_exp(dim: int) -> int:
        es, et = src_exp(dim), tgt_exp(dim)
        if et == 0:
            return 0
        im = max(0, min(es, et - map_val(dim)))
        return et - im

    order = ker_exp(n) + coker_exp(n + 1)
    expected = filtration_chart(p, r, 1, i, (d,), n)
    if order != expected.log_order():
        raise AssertionError(
            f"LES order p^{order} disagrees with filtration chart {expected} "
            f"at (p={p}, r={r}, i={i}, d={d}, n={n})"
        )
    return expected


def e3alg_chart(p: int, r: int, ell: int, s: Fraction | int) -> int:
    """Torsion exponent of the weight-s class in degree 2*ell.

    Returns the exponent e (order p^e); 0 means the class is absent.  The
    relation pattern kills p^j times the classes of weight >= (ell+1)/p^j.
    """
    s = Fraction(s)
    if s < 0:
        raise ValueError("weight must be >= 0")
    if ell < 0:
        raise ValueError("degree index must be >= 0")
    for j in range(r):
        if s * p**j >= ell + 1:
            return j
    return r


def r1_chart(p: int, d: int, n: int) -> PGroup:
    """THH of F_p[x]: rank one mod p in every (weight, dimension >= 0)."""
    if n < 0 or d < 0:
        return PGroup.trivial(p)
    return PGroup.cyclic(p, 1)


# --------------------------------------------------------------------------
# chart tables
# --------------------------------------------------------------------------


def _multidegrees(nvars: int, max_weight: int):
    if nvars == 0:
        yield ()
        return
    for first in range(max_weight + 1):
        for rest in _multidegrees(nvars - 1, max_weight - first):
            yield (first,) + rest


def tr_chart_table(p: int, r: int, nvars: int, max_weight: int, max_dim: int) -> Chart:
    chart = Chart(p, r, nvars)
    for deg in _multidegrees(nvars, max_weight):
        for n in range(max_dim + 1):
            chart.set(deg, n, tr_chart(p, r, nvars, deg, n), tr_labels(p, r, nvars, deg, n))
    return chart


def filtration_chart_table(p: int, r: int, nvars: int, i: int, max_weight: int,
                           max_dim: int) -> Chart:
    chart = Chart(p, r, nvars)
    for deg in _multidegrees(nvars, max_weight):
        for n in range(max_dim + 1):
            chart.set(deg, n, filtration_chart(p, r, nvars, i, deg, n))
    return chart


def gr_chart_table(p: int, r: int, nvars: int, i: int, max_weight: int,
                   max_dim: int) -> Chart:
    chart = Chart(p, r, nvars)
    for deg in _multidegrees(nvars, max_weight):
        for n in range(max_dim + 1):
            chart.set(deg, n, gr_chart(p, r, nvars, i, deg, n))
    return chart


def theorem1_chart_table(p: int, r: int, i: int, max_weight: int, max_dim: int) -> Chart:
    chart = Chart(p, r, 1)
    for d in range(max_weight + 1):
        for n in range(max_dim + 1):
            chart.set((d,), n, theorem1_chart(p, r, i, d, n))
    return chart


def sigma_chart(p: int, r: int, max_dim: int) -> Chart:
    """The weight-0 chart Z/p^r[sigma] as a Chart table (one variable, deg 0)."""
    chart = Chart(p, r, 1)
    for n in range(0, max_dim + 1, 2):
        chart.set((0,), n, PGroup.cyclic(p, r), (f"s^{n // 2}",))
    return chart
