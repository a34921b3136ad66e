"""S^1-representation bookkeeping and fixed-point coefficient groups.

A complex S^1-representation is a finite multiset of rotation numbers n
(the summand C[xi_n], where z in S^1 acts by z^n).  The cyclic-subgroup
fixed dimensions of such a representation drive the coefficient formula for
smashing a representation sphere into the fixed points of T(F_p): in even
dimension 2a the group is Z/p^i for the unique window

    |V^{Z/p^{r-i}}| <= a < |V^{Z/p^{r-i-1}}|

with the boundary conventions |V^{Z/p^{-1}}| = +inf and |V^{Z/p^r}| = -inf.
Also here: Postnikov truncation of charts, the Witt Green-functor chart with
its Frobenius/Verschiebung structure maps, and the cyclotomic restriction
descriptor (sigma |-> p sigma).
"""

from __future__ import annotations

from dataclasses import dataclass

from .arith import PGroup, PMatrix
from .charts import Chart

# Tagged sentinels for the boundary conventions. Floats compare correctly
# against every integer dimension and can never be mistaken for a count.
PLUS_INF = float("inf")
MINUS_INF = float("-inf")


class Rep:
    """Finite multiset of positive rotation numbers; ⊕_n C[xi_n]."""

    __slots__ = ("p", "rotations")

    def __init__(self, p: int, rotations=()):
        rots = tuple(sorted(int(n) for n in rotations))
        if any(n < 1 for n in rots):
            raise ValueError("rotation numbers must be >= 1")
        self.p = int(p)
        self.rotations = rots

    @classmethod
    def standard(cls, p: int, n: int) -> "Rep":
        """V_n = C[xi_1] ⊕ ... ⊕ C[xi_n]; V_0 = 0."""
        return cls(p, range(1, n + 1))

    @property
    def dim(self) -> int:
        return len(self.rotations)

    def direct_sum(self, *others: "Rep") -> "Rep":
        rots = list(self.rotations)
        for v in others:
            if v.p != self.p:
                raise ValueError("mismatched primes")
            rots.extend(v.rotations)
        return Rep(self.p, rots)

    def __eq__(self, other):
        if not isinstance(other, Rep):
            return NotImplemented
        return (self.p, self.rotations) == (other.p, other.rotations)

    def __hash__(self):
        return hash((self.p, self.rotations))

    def __repr__(self):
        return f"Rep(p={self.p}, rotations={list(self.rotations)})"


def fixed_dim(V: Rep, j: int, r: int):
    """Complex dimension of the Z/p^j-fixed subspace, with sentinels.

    For 0 <= j <= r-1 this is #{n in rotations : p^j | n}; j = -1 returns
    +inf and j = r returns -inf (the boundary conventions).
    """
    if not -1 <= j <= r:
        raise ValueError(f"j = {j} outside [-1, {r}]")
    if j == -1:
        return PLUS_INF
    if j == r:
        return MINUS_INF
    pj = V.p**j
    return sum(1 for n in V.rotations if n % pj == 0)


def smash_homotopy(V: Rep, r: int, a: int) -> PGroup:
    """Coefficient group of (S^V ∧ T(F_p))^{Z/p^{r-1}} in dimension 2a.

    Returns Z/p^i for the unique window index i; the trivial group for a < 0.
    Uniqueness of i is asserted.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    if a < 0:
        return PGroup.trivial(V.p)
    hits = [
        i
        for i in range(r + 1)
        if fixed_dim(V, r - i, r) <= a < fixed_dim(V, r - i - 1, r)
    ]
    assert len(hits) == 1, f"window index not unique for {V}, r={r}, a={a}: {hits}"
    return PGroup.cyclic(V.p, hits[0])


def trunc_ge(chart: Chart, i: int) -> Chart:
    """Postnikov truncation: zero every entry in topological dimension < i."""
    out = Chart(chart.p, chart.r, chart.nvars)
    for deg, dim, group, labels in chart.cells():
        if dim >= i:
            out.set(deg, dim, group, labels)
    return out


@dataclass
class MackeyChart:
    """Per-level groups of the Witt Green functor in one even dimension.

    Level l (1 <= l <= r) carries Z/p^l.  Restriction from level l+1 to l is
    reduction mod p^l (the Witt-vector Frobenius here), transfer from level l
    to l+1 is multiplication by p (Verschiebung).  Structure maps are stored
    as 1x1 matrices; ``res[l]`` maps level l+1 -> l and ``tr[l]`` maps level
    l -> l+1, for 1 <= l <= r-1.
    """

    p: int
    r: int
    dim: int
    groups: dict[int, PGroup]
    res: dict[int, PMatrix]
    tr: dict[int, PMatrix]

    def check_relations(self) -> bool:
        """res∘tr = p·id and tr∘res = p·id, matrix-exactly per level."""
        p = self.p
        for l in range(1, self.r):
            # res∘tr on level l: entries live mod p^l
            rt = int(self.res[l].data[0, 0]) * int(self.tr[l].data[0, 0])
            if (rt - p) % p**l != 0:
                return False
            # tr∘res on level l+1: entries live mod p^{l+1}
            tr_ = int(self.tr[l].data[0, 0]) * int(self.res[l].data[0, 0])
            if (tr_ - p) % p ** (l + 1) != 0:
                return False
        return True


def w_mackey(r: int, dim: int, p: int = 2) -> MackeyChart:
    """Mackey chart of the Witt Green functor in even dimension `dim`.

    Odd dimensions carry the trivial chart.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    if dim % 2 != 0 or dim < 0:
        return MackeyChart(p, r, dim, {l: PGroup.trivial(p) for l in range(1, r + 1)}, {}, {})
    groups = {l: PGroup.cyclic(p, l) for l in range(1, r + 1)}
    res = {l: PMatrix(p, l, [[1]]) for l in range(1, r)}
    tr = {l: PMatrix(p, l + 1, [[p]]) for l in range(1, r)}
    return MackeyChart(p, r, dim, groups, res, tr)


@dataclass(frozen=True)
class CyclotomicRestriction:
    """The ring-map descriptor TR^r(F_p) -> TR^{r-1}(F_p), sigma |-> p·sigma.

    In dimension 2a the component is Z/p^r -> Z/p^{r-1}, multiplication by
    p^a followed by reduction.
    """

    p: int
    r: int

    def component(self, dim: int) -> PMatrix:
        if dim % 2 != 0 or dim < 0:
            return PMatrix(self.p, self.r - 1, [[0]])
        a = dim // 2
        return PMatrix(self.p, self.r - 1, [[pow(self.p, a, self.p ** (self.r - 1))]])


def cyclotomic_restriction(r: int, p: int = 2) -> CyclotomicRestriction:
    if r < 2:
        raise ValueError("cyclotomic restriction needs r >= 2")
    return CyclotomicRestriction(p, r)
