"""p-typical Witt vectors of monomial semiperfect algebras, flat-lift style.

The algebras here are F_p[x^{1/p^N}] ⊗ (F_p[y^{1/p^N}]/(y))^{⊗k}: monomials
with exponents on the 1/p^N grid, one non-vanishing variable x and k
vanishing variables y_i (any y-exponent >= 1 lands in the monomial ideal).
W_r of such an algebra is carried by Teichmüller classes of monomials with
per-monomial torsion

    e(m) = min(r, min{ j >= 0 : m^{p^j} in I }),

so an element is a finitely supported map {monomial -> residue mod p^{e}}.
Addition is free in this presentation; only the Teichmüller expansion of a
char-p polynomial needs work (take the p^{r-1}-th root, lift, power back
up).  A universal-addition-polynomial oracle built from ghost components
cross-checks the arithmetic in the test suite.

Monomials are tuples of integer numerators at the algebra's denominator
level; exponent = numerator / p^level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from .arith import PGroup, PMatrix, PresentedModule, hom_check

Monomial = tuple[int, ...]


class DenominatorCapacityError(ValueError):
    """A required p-power root does not exist at this denominator level."""


@dataclass(frozen=True)
class MonomialAlgebra:
    """F_p[x^{1/p^level}] ⊗ (F_p[y^{1/p^level}]/(y))^{⊗ n_y}.

    Variable 0 is the x-type variable when has_x; the remaining n_y slots
    are y-type.  Monomials are numerator tuples of length nvars.
    """

    p: int
    level: int
    n_y: int
    has_x: bool = True

    @property
    def nvars(self) -> int:
        return (1 if self.has_x else 0) + self.n_y

    @property
    def one(self) -> Monomial:
        return (0,) * self.nvars

    def y_slots(self) -> range:
        return range(1 if self.has_x else 0, self.nvars)

    def in_ideal(self, m: Monomial) -> bool:
        cap = self.p**self.level
        return any(m[i] >= cap for i in self.y_slots())

    def weight(self, m: Monomial) -> Fraction:
        return Fraction(sum(m), self.p**self.level)

    def monomial_str(self, m: Monomial) -> str:
        names = (["x"] if self.has_x else []) + [f"y{i}" for i in range(1, self.n_y + 1)]
        parts = []
        den = self.p**self.level
        for name, n in zip(names, m):
            if n:
                parts.append(f"{name}^({n}/{den})" if n % den else f"{name}^{n // den}")
        return "*".join(parts) if parts else "1"


def torsion_order(m: Monomial, A: MonomialAlgebra, r: int):
    """e(m) in [1, r], or None when m lies in the monomial ideal."""
    cap = A.p**A.level
    best = None
    for i in A.y_slots():
        n = m[i]
        if n == 0:
            continue
        j = 0
        while n < cap:
            n *= A.p
            j += 1
        best = j if best is None else min(best, j)
    if best is None:
        return r
    return None if best == 0 else min(r, best)


def _reduce(coeffs: dict, A: MonomialAlgebra, r: int) -> dict:
    out = {}
    p = A.p
    for m, c in coeffs.items():
        e = torsion_order(m, A, r)
        if e is None:
            continue
        c %= p**e
        if c:
            out[m] = c
    return out


class WittElement:
    """Element of W_r(A): finitely supported monomial -> residue mod p^{e(m)}."""

    __slots__ = ("A", "r", "coeffs")

    def __init__(self, A: MonomialAlgebra, r: int, coeffs: Mapping[Monomial, int] | None = None):
        self.A = A
        self.r = r
        self.coeffs = _reduce(dict(coeffs or {}), A, r)

    @classmethod
    def zero(cls, A: MonomialAlgebra, r: int) -> "WittElement":
        return cls(A, r, {})

    @classmethod
    def teichmuller(cls, A: MonomialAlgebra, r: int, m: Monomial) -> "WittElement":
        return cls(A, r, {tuple(m): 1})

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "WittElement") -> "WittElement":
        if (self.A, self.r) != (other.A, other.r):
            raise ValueError("mismatched Witt contexts")
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) + c
        return WittElement(self.A, self.r, out)

    def __sub__(self, other: "WittElement") -> "WittElement":
        return self + other.scale(-1)

    def scale(self, c: int) -> "WittElement":
        return WittElement(self.A, self.r, {m: v * c for m, v in self.coeffs.items()})

    def __mul__(self, other: "WittElement") -> "WittElement":
        if (self.A, self.r) != (other.A, other.r):
            raise ValueError("mismatched Witt contexts")
        pr = self.A.p**self.r
        out: dict[Monomial, int] = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = (out.get(m, 0) + c1 * c2) % pr
        return WittElement(self.A, self.r, out)

    def pow(self, n: int) -> "WittElement":
        result = WittElement(self.A, self.r, {self.A.one: 1})
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, WittElement):
            return NotImplemented
        return (self.A, self.r) == (other.A, other.r) and self.coeffs == other.coeffs

    def __repr__(self):
        terms = [f"{c}*{self.A.monomial_str(m)}" for m, c in sorted(self.coeffs.items())]
        return " + ".join(terms) if terms else "0"


def teichmuller_expand(P: Mapping[Monomial, int], A: MonomialAlgebra, r: int) -> WittElement:
    """Teichmüller representative of the char-p polynomial P, in W_r(A).

    Takes the p^{r-1}-th root of P (exponents divide; F_p coefficients are
    fixed by Frobenius), lifts coefficient-wise to Z/p^r and raises back to
    the p^{r-1} power by exact multiplication.  Every numerator of P must be
    divisible by p^{r-1}.
    """
    p = A.p
    pe = p ** (r - 1)
    root: dict[Monomial, int] = {}
    for m, c in P.items():
        c %= p
        if c == 0:
            continue
        if any(n % pe for n in m):
            raise DenominatorCapacityError(
                f"monomial {m} has no p^{r - 1}-th root at level {A.level}"
            )
        root[tuple(n // pe for n in m)] = c
    return WittElement(A, r, root).pow(pe)


# --------------------------------------------------------------------------
# functorially induced maps
# --------------------------------------------------------------------------


def _root_of_poly(P: Mapping[Monomial, int], p: int, steps: int) -> dict:
    """p^steps-th root of a char-p polynomial (Frobenius is bijective)."""
    out = {}
    pe = p**steps
    for m, c in P.items():
        if any(n % pe for n in m):
            raise DenominatorCapacityError(f"monomial {m} has no p^{steps}-th root")
        out[tuple(n // pe for n in m)] = c % p
    return out


class InducedMap:
    """W_r(f) for a variable assignment f between monomial algebras.

    f maps every src variable index to a char-p polynomial over dst
    monomials (at dst level).  Teichmüller multiplicativity turns the image
    of a basis monomial into a product of cached per-variable images of the
    variable roots, so columns share almost all of the expansion work.
    """

    def __init__(self, f: Mapping[int, Mapping[Monomial, int]], src: MonomialAlgebra,
                 dst: MonomialAlgebra, r: int):
        if src.level != dst.level:
            raise ValueError("induced maps need matching denominator levels")
        if src.p != dst.p:
            raise ValueError("mismatched primes")
        self.src, self.dst, self.r = src, dst, r
        L = src.level
        # deep algebra: numerators rescaled by p^{r-1} so Teichmüller roots exist
        self.deep = MonomialAlgebra(dst.p, L + (r - 1), dst.n_y, dst.has_x)
        scale = dst.p ** (r - 1)
        self._base: dict[int, WittElement] = {}
        self._powcache: dict[int, list[WittElement]] = {}
        for v in range(src.nvars):
            poly = f.get(v)
            if poly is None:
                raise ValueError(f"assignment missing variable {v}")
            deep_poly = {tuple(n * scale for n in m): c for m, c in poly.items()}
            # image of v^{1/p^L}: p^L-th root of f(v), Teichmüller-lifted
            root = _root_of_poly(deep_poly, src.p, L)
            self._base[v] = teichmuller_expand(root, self.deep, r)
            self._powcache[v] = [WittElement(self.deep, r, {self.deep.one: 1}), self._base[v]]

    def _var_power(self, v: int, n: int) -> WittElement:
        cache = self._powcache[v]
        while len(cache) <= n:
            cache.append(cache[-1] * cache[1])
        return cache[n]

    def image_of(self, m: Monomial) -> WittElement:
        """Image of the Teichmüller class [m], in the deep algebra."""
        out = WittElement(self.deep, self.r, {self.deep.one: 1})
        for v, n in enumerate(m):
            if n:
                out = out * self._var_power(v, n)
        return out

    def project(self, w: WittElement) -> dict:
        """Restrict a deep-level element to the src/dst level lattice."""
        scale = self.dst.p ** (self.r - 1)
        out = {}
        for m, c in w.coeffs.items():
            if all(n % scale == 0 for n in m):
                out[tuple(n // scale for n in m)] = c
        return out


def induced_map(
    f: Mapping[int, Mapping[Monomial, int]],
    src: MonomialAlgebra,
    dst: MonomialAlgebra,
    r: int,
    weight: Fraction | int,
    normalized: bool = False,
) -> tuple[PMatrix, list[Monomial], list[Monomial]]:
    """Matrix of W_r(f) on the weight-graded monomial bases.

    Returns (matrix, src_basis, dst_basis); the matrix columns pass
    hom_check against the torsion orders (a failure raises, signalling an
    inconsistent f).
    """
    src_basis = witt_basis(src, r, weight, normalized=normalized)
    dst_basis = witt_basis(dst, r, weight, normalized=normalized)
    phi = InducedMap(f, src, dst, r)
    index = {m: i for i, m in enumerate(dst_basis)}
    data = np.zeros((len(dst_basis), len(src_basis)), dtype=np.int64)
    for col, m in enumerate(src_basis):
        img = _reduce(phi.project(phi.image_of(m)), dst, r)
        for mm, cc in img.items():
            if mm in index:
                data[index[mm], col] = cc
    M = PMatrix(src.p, r, data)
    if not hom_check(M, witt_module(src, r, weight, normalized=normalized),
                     witt_module(dst, r, weight, normalized=normalized)):
        raise ValueError("induced map violates torsion orders (inconsistent assignment)")
    return M, src_basis, dst_basis


# --------------------------------------------------------------------------
# weight-graded pieces
# --------------------------------------------------------------------------


def witt_basis(
    A: MonomialAlgebra, r: int, weight: Fraction | int, normalized: bool = False
) -> list[Monomial]:
    """Non-ideal monomials of the given weight, lexicographically sorted.

    With ``normalized`` every y-exponent must be strictly positive (the
    normalized cochain complex of the conerve).
    """
    wnum = Fraction(weight) * A.p**A.level
    if wnum.denominator != 1 or wnum < 0:
        return []
    wnum = int(wnum)
    cap = A.p**A.level
    lo = 1 if normalized else 0
    out: list[Monomial] = []

    def rec(slot: int, rem: int, acc: list[int]):
        if slot == A.n_y:
            if A.has_x:
                out.append((rem,) + tuple(acc))
            elif rem == 0:
                out.append(tuple(acc))
            return
        for n in range(lo, min(cap - 1, rem) + 1):
            acc.append(n)
            rec(slot + 1, rem - n, acc)
            acc.pop()

    rec(0, wnum, [])
    return sorted(out)


def witt_module(
    A: MonomialAlgebra, r: int, weight: Fraction | int, normalized: bool = False
) -> PresentedModule:
    basis = witt_basis(A, r, weight, normalized=normalized)
    tors = []
    for m in basis:
        e = torsion_order(m, A, r)
        assert e is not None
        tors.append(e)
    return PresentedModule(A.p, r, tuple(tors))


def witt_group(
    A: MonomialAlgebra, r: int, weight: Fraction | int, normalized: bool = False
) -> tuple[PresentedModule, list[Monomial]]:
    """The weight-graded piece of W_r(A): presented module plus its basis."""
    basis = witt_basis(A, r, weight, normalized=normalized)
    return witt_module(A, r, weight, normalized=normalized), basis


# --------------------------------------------------------------------------
# universal addition polynomials (ghost-component recursion) -- test oracle
# --------------------------------------------------------------------------


def _ipoly_mul(a: dict, b: dict) -> dict:
    out: dict[tuple, int] = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def _ipoly_pow(a: dict, n: int, nv: int) -> dict:
    result = {(0,) * nv: 1}
    base = dict(a)
    while n:
        if n & 1:
            result = _ipoly_mul(result, base)
        n >>= 1
        if n:
            base = _ipoly_mul(base, base)
    return result


def _ipoly_add(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + sign * c
    return {e: c for e, c in out.items() if c}


@dataclass
class WittSumOracle:
    """Universal addition polynomials S_0..S_{r-1} over Z, plus an evaluator."""

    p: int
    r: int
    polys: list[dict] = field(repr=False)

    def sum_coordinates(self, xc: list[dict], yc: list[dict], A: MonomialAlgebra) -> list[dict]:
        """Coordinates of x ⊞ y; each coordinate is a char-p polynomial."""
        p = self.p
        out = []
        for S in self.polys:
            acc: dict[Monomial, int] = {}
            for exps, c in S.items():
                c %= p
                if c == 0:
                    continue
                term = {A.one: c}
                for idx, e in enumerate(exps):
                    if e == 0:
                        continue
                    coord = xc[idx] if idx < self.r else yc[idx - self.r]
                    term = _poly_mul_modp(term, _poly_pow_modp(coord, e, A), A)
                    if not term:
                        break
                for m, cc in term.items():
                    acc[m] = (acc.get(m, 0) + cc) % p
            out.append({m: c for m, c in acc.items() if c})
        return out


def _poly_mul_modp(a: dict, b: dict, A: MonomialAlgebra) -> dict:
    p = A.p
    out: dict[Monomial, int] = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = tuple(x + y for x, y in zip(m1, m2))
            if A.in_ideal(m):
                continue
            v = (out.get(m, 0) + c1 * c2) % p
            out[m] = v
    return {m: c for m, c in out.items() if c}


def _poly_pow_modp(a: dict, n: int, A: MonomialAlgebra) -> dict:
    result = {A.one: 1}
    base = dict(a)
    while n:
        if n & 1:
            result = _poly_mul_modp(result, base, A)
        n >>= 1
        if n:
            base = _poly_mul_modp(base, base, A)
    return result


@lru_cache(maxsize=None)
def witt_sum_oracle(p: int, r: int) -> WittSumOracle:
    """Addition polynomials via the ghost recursion w_n = Σ p^i Z_i^{p^{n-i}}.

    Exact over the integers; capped at r <= 4 (the polynomials explode
    combinatorially beyond desk scale).
    """
    if r > 4:
        raise ValueError("witt_sum_oracle supports r <= 4")
    nv = 2 * r

    def var(i: int) -> dict:
        e = [0] * nv
        e[i] = 1
        return {tuple(e): 1}

    def ghost(n: int, offset: int) -> dict:
        acc: dict = {}
        for i in range(n + 1):
            acc = _ipoly_add(acc, {e: c * p**i for e, c in _ipoly_pow(var(offset + i), p ** (n - i), nv).items()})
        return acc

    polys: list[dict] = []
    for n in range(r):
        acc = _ipoly_add(ghost(n, 0), ghost(n, r))
        for i in range(n):
            acc = _ipoly_add(acc, {e: c * p**i for e, c in _ipoly_pow(polys[i], p ** (n - i), nv).items()}, sign=-1)
        pn = p**n
        Sn = {}
        for e, c in acc.items():
            assert c % pn == 0, "ghost recursion not integral -- bug"
            Sn[e] = c // pn
        polys.append(Sn)
    return WittSumOracle(p, r, polys)


# --------------------------------------------------------------------------
# flat <-> coordinate conversion (test-layer utilities)
# --------------------------------------------------------------------------


def to_coordinates(w: WittElement) -> list[dict]:
    """Witt coordinates (a_0, .., a_{r-1}) of a flat element.

    Requires every support monomial to lie on the p^{r-1}-lattice of the
    algebra level (so the intermediate Teichmüller roots exist).
    """
    A, r, p = w.A, w.r, w.A.p
    coords: list[dict] = []
    cur = WittElement(A, r, dict(w.coeffs))
    rr = r
    for t in range(r):
        a_t = {m: c % p for m, c in cur.coeffs.items() if c % p}
        coords.append(a_t)
        if t == r - 1:
            break
        diff = cur - teichmuller_expand(a_t, A, rr)
        nxt: dict[Monomial, int] = {}
        for m, c in diff.coeffs.items():
            assert c % p == 0, "element not in the V-filtration -- bug"
            nxt[tuple(n * p for n in m)] = c // p
        rr -= 1
        cur = WittElement(A, rr, nxt)
    return coords


def from_coordinates(coords: list[dict], A: MonomialAlgebra, r: int) -> WittElement:
    """Σ_t V^t([a_t]) = Σ_t p^t [a_t^{1/p^t}]; roots must exist."""
    p = A.p
    acc = WittElement.zero(A, r)
    for t, a in enumerate(coords):
        if not a:
            continue
        root = _root_of_poly(a, p, t)
        acc = acc + teichmuller_expand(root, A, r).scale(p**t)
    return acc
