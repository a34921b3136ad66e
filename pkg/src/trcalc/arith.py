"""Exact linear algebra over Z/p^r.

The ring Z/p^r is a local principal ideal ring, so every matrix has a Smith
normal form with p-power diagonal and unit transforms, and every finitely
generated module is a direct sum of cyclic p-groups.  This module provides:

  * PGroup            -- finite abelian p-group as a multiset of exponents
  * PMatrix           -- matrix of residues mod p^r
  * PresentedModule   -- ordered generators with torsion exponents
  * smith_normal_form -- U @ M @ V = D, entry-exact
  * hom_check         -- does a matrix respect torsion orders?
  * homology          -- ker/im of a complex of presented modules

Moduli are capped at p^r <= 2**40; arithmetic above 2**31 drops to exact
bignum code, below it runs on int64 kernels (see _kernels).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels

MAX_MODULUS = 1 << 40


def _check_modulus(p: int, r: int) -> int:
    pr = p**r
    if pr > MAX_MODULUS:
        raise ValueError(f"modulus p^r = {pr} exceeds 2^40")
    return pr


def vp(x: int, p: int, r: int) -> int:
    """p-adic valuation of x mod p^r, with vp(0) = r."""
    x %= p**r
    if x == 0:
        return r
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


class PGroup:
    """Finite abelian p-group ⊕ Z/p^e, as a sorted multiset of exponents e >= 1.

    The trivial group is the empty multiset; equality is equality of
    multisets.  Exponents equal to zero denote trivial cyclic factors and are
    dropped on construction; negative exponents are rejected.
    """

    __slots__ = ("p", "exponents")

    def __init__(self, p: int, exponents: Iterable[int] = ()):
        exps = []
        for e in exponents:
            e = int(e)
            if e < 0:
                raise ValueError(f"negative exponent {e}")
            if e > 0:
                exps.append(e)
        self.p = int(p)
        self.exponents = tuple(sorted(exps, reverse=True))

    @classmethod
    def cyclic(cls, p: int, e: int) -> "PGroup":
        return cls(p, (e,) if e > 0 else ())

    @classmethod
    def trivial(cls, p: int) -> "PGroup":
        return cls(p, ())

    @property
    def is_trivial(self) -> bool:
        return not self.exponents

    def log_order(self) -> int:
        return sum(self.exponents)

    def order(self) -> int:
        return self.p ** self.log_order()

    def direct_sum(self, *others: "PGroup") -> "PGroup":
        exps = list(self.exponents)
        for g in others:
            if g.p != self.p:
                raise ValueError("mismatched primes")
            exps.extend(g.exponents)
        return PGroup(self.p, exps)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PGroup):
            return NotImplemented
        return self.p == other.p and self.exponents == other.exponents

    def __hash__(self):
        return hash((self.p, self.exponents))

    def __repr__(self):
        return f"PGroup(p={self.p}, exponents={list(self.exponents)})"

    def __str__(self):
        if not self.exponents:
            return "0"
        return " + ".join(f"Z/{self.p**e}" for e in self.exponents)


class PMatrix:
    """Matrix over Z/p^r, entries reduced into [0, p^r)."""

    __slots__ = ("p", "r", "pr", "data")

    def __init__(self, p: int, r: int, data):
        self.p = int(p)
        self.r = int(r)
        self.pr = _check_modulus(p, r)
        arr = np.array(data)
        if arr.ndim != 2:
            raise ValueError("PMatrix needs a 2-d array")
        if self.pr < _kernels.INT64_SAFE_MODULUS:
            self.data = np.ascontiguousarray(arr.astype(np.int64) % self.pr)
        else:
            self.data = np.array(arr, dtype=object) % self.pr

    @classmethod
    def identity(cls, p: int, r: int, n: int) -> "PMatrix":
        return cls(p, r, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, p: int, r: int, rows: int, cols: int) -> "PMatrix":
        return cls(p, r, np.zeros((rows, cols), dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def __matmul__(self, other: "PMatrix") -> "PMatrix":
        if (self.p, self.r) != (other.p, other.r):
            raise ValueError("mismatched moduli")
        # exact bignum product; overflow-proof for any admissible modulus
        a = self.data.astype(object)
        b = other.data.astype(object)
        return PMatrix(self.p, self.r, (a @ b) % self.pr)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PMatrix):
            return NotImplemented
        return (
            (self.p, self.r) == (other.p, other.r)
            and self.data.shape == other.data.shape
            and bool(np.all(self.data == other.data))
        )

    def __repr__(self):
        return f"PMatrix(p={self.p}, r={self.r}, data={self.data.tolist()})"

    def copy(self) -> "PMatrix":
        return PMatrix(self.p, self.r, self.data.copy())

    def diagonal_valuations(self) -> list[int]:
        return [vp(int(self.data[i, i]), self.p, self.r) for i in range(min(self.rows, self.cols))]

    def is_unit(self) -> bool:
        """True iff square and invertible over Z/p^r (unit determinant)."""
        if self.rows != self.cols:
            return False
        D, *_ = _kernels.snf_sweep(self.data, self.p, self.r, track_u=False, track_v=False)
        return all(int(D[i, i]) % self.p != 0 for i in range(self.rows))


@dataclass(frozen=True)
class PresentedModule:
    """⊕_g Z/p^{e_g} with an ordered generator list; ambient modulus p^r."""

    p: int
    r: int
    torsion: tuple[int, ...]

    def __post_init__(self):
        _check_modulus(self.p, self.r)
        for e in self.torsion:
            if not 1 <= e <= self.r:
                raise ValueError(f"torsion exponent {e} outside [1, r]")

    @property
    def rank(self) -> int:
        return len(self.torsion)

    def group(self) -> PGroup:
        return PGroup(self.p, self.torsion)

    def log_order(self) -> int:
        return sum(self.torsion)


def smith_normal_form(M: PMatrix) -> tuple[PMatrix, PMatrix, PMatrix]:
    """Smith normal form over Z/p^r: returns (U, D, V) with U @ M @ V = D.

    D is diagonal with entries p^{a_1}, p^{a_2}, ... and a_1 <= a_2 <= ...;
    U and V are invertible.  Pivots are chosen with minimal p-adic valuation,
    ties broken by lowest (row, col), so the result is deterministic.
    """
    D, U, _Ui, V, _Vi, _rank = _kernels.snf_sweep(M.data, M.p, M.r)
    return (
        PMatrix(M.p, M.r, U),
        PMatrix(M.p, M.r, D),
        PMatrix(M.p, M.r, V),
    )


def hom_check(M: PMatrix, src: PresentedModule, dst: PresentedModule) -> bool:
    """True iff M defines a homomorphism ⊕Z/p^{e_src} -> ⊕Z/p^{e_dst}.

    Concretely: p^{e_g} * (column of g) must vanish in dst for every source
    generator g, i.e. p^{e_src[g]} * M[j, g] ≡ 0 mod p^{e_dst[j]}.
    """
    if M.rows != dst.rank or M.cols != src.rank:
        raise ValueError(
            f"dimension mismatch: matrix {M.rows}x{M.cols}, dst rank {dst.rank}, src rank {src.rank}"
        )
    p = M.p
    for g, eg in enumerate(src.torsion):
        for j, ej in enumerate(dst.torsion):
            if (int(M.data[j, g]) * p**eg) % p**ej != 0:
                return False
    return True


class NonComplexError(RuntimeError):
    """d∘d != 0: signals a bug in upstream differential construction."""


def _composite_is_zero(d_out: PMatrix, d_in: PMatrix, dst2: PresentedModule) -> bool:
    comp = (d_out.data.astype(object) @ d_in.data.astype(object)) % d_out.pr
    p = d_out.p
    for j, ej in enumerate(dst2.torsion):
        if np.any(comp[j, :] % p**ej != 0):
            return False
    return True


def kernel_of_presented_map(
    M: PMatrix, src: PresentedModule, dst: PresentedModule
) -> tuple[np.ndarray, list[int], np.ndarray]:
    """Kernel {x : M x = 0 in dst} as columns of an (n x n) generator matrix.

    Returns (K, orders, Vi): column i of K generates a cyclic subgroup whose
    coefficient z_i in the parametrisation x = K z is defined mod p^{orders[i]};
    Vi is the inverse of the SNF column transform, used to rewrite vectors in
    kernel coordinates.
    """
    p, r, pr = M.p, M.r, M.pr
    n = src.rank
    # fold the dst torsion in by scaling row j with p^{r - e_j}
    A = M.data.astype(object).copy()
    for j, ej in enumerate(dst.torsion):
        A[j, :] = (A[j, :] * p ** (r - ej)) % pr
    if A.dtype == object and pr < _kernels.INT64_SAFE_MODULUS:
        A = A.astype(np.int64)
    D, _U, _Ui, V, Vi, _rank = _kernels.snf_sweep(A, p, r, track_u=False)
    diag = [vp(int(D[i, i]), p, r) for i in range(min(A.shape))]
    K = np.array(V, dtype=object)
    orders = []
    for i in range(n):
        a = diag[i] if i < len(diag) else r
        K[:, i] = (K[:, i] * p ** (r - a)) % pr
        orders.append(a)
    return K, orders, np.array(Vi, dtype=object)


def homology(
    modules: Sequence[PresentedModule],
    boundaries: Sequence[PMatrix],
    at: int,
) -> PGroup:
    """Homology at slot `at` of a cochain complex of presented modules.

    `boundaries[i]` maps modules[i] -> modules[i+1].  Every boundary must
    pass hom_check and adjacent composites must vanish (NonComplexError
    otherwise -- a non-complex signals an upstream bug, not bad input).
    """
    if len(boundaries) != len(modules) - 1:
        raise ValueError("need exactly one boundary per adjacent pair")
    if not 0 <= at < len(modules):
        raise IndexError("slot out of range")
    M = modules[at]
    p, r = M.p, M.r
    pr = p**r
    n = M.rank
    if n == 0:
        return PGroup.trivial(p)

    d_out = boundaries[at] if at < len(boundaries) else None
    d_in = boundaries[at - 1] if at > 0 else None
    if d_out is not None and not hom_check(d_out, M, modules[at + 1]):
        raise ValueError("outgoing boundary fails hom_check")
    if d_in is not None and not hom_check(d_in, modules[at - 1], M):
        raise ValueError("incoming boundary fails hom_check")
    if d_out is not None and d_in is not None:
        if not _composite_is_zero(d_out, d_in, modules[at + 1]):
            raise NonComplexError(f"d∘d != 0 at slot {at}")

    if d_out is not None:
        K, korders, Vi = kernel_of_presented_map(d_out, M, modules[at + 1])
    else:
        K = np.eye(n, dtype=object)
        korders = [r] * n
        Vi = np.eye(n, dtype=object)

    # relations to quotient by, expressed in ambient coordinates
    rel_cols: list[np.ndarray] = []
    if d_in is not None:
        din = d_in.data.astype(object)
        for c in range(din.shape[1]):
            rel_cols.append(din[:, c] % pr)
    for i, e in enumerate(M.torsion):
        v = np.zeros(n, dtype=object)
        v[i] = p**e
        rel_cols.append(v)

    # rewrite each relation in kernel coordinates: K w = rel, K = V * diag(p^{r-a})
    rel_w: list[np.ndarray] = []
    for rel in rel_cols:
        y = (Vi @ rel) % pr
        w = np.zeros(n, dtype=object)
        for i in range(n):
            sc = p ** (r - korders[i])
            yi = int(y[i])
            if yi % sc != 0:
                raise NonComplexError("relation does not lie in the kernel lattice")
            w[i] = (yi // sc) % pr
        rel_w.append(w)
    # lattice relations of the parametrisation itself
    for i in range(n):
        v = np.zeros(n, dtype=object)
        v[i] = p ** korders[i] % pr
        rel_w.append(v)

    R = np.stack(rel_w, axis=1) if rel_w else np.zeros((n, 0), dtype=object)
    if pr < _kernels.INT64_SAFE_MODULUS:
        R = R.astype(np.int64)
    D, *_ = _kernels.snf_sweep(R, p, r, track_u=False, track_v=False)
    exps = []
    ndiag = min(R.shape)
    for i in range(n):
        b = vp(int(D[i, i]), p, r) if i < ndiag else r
        if b > 0:
            exps.append(min(b, r))
    return PGroup(p, exps)
