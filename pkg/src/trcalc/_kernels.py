"""Elimination kernels over Z/p^r.

Two implementations of the same Smith-reduction sweep: a numba @njit kernel
for the hot path and a pure-numpy twin.  Selection:

  * env var TRCALC_NO_NUMBA=1 forces the numpy path;
  * moduli with p^r >= 2**31 always use the numpy/object path (the njit
    kernel multiplies int64 residues and must not overflow);
  * if numba is not importable we silently fall back.

Both paths apply the identical pivot rule (minimal p-adic valuation, ties by
lowest (row, col) in the active submatrix) so results are bit-identical.
"""

from __future__ import annotations

import os

import numpy as np

_NUMBA_OK = False
if os.environ.get("TRCALC_NO_NUMBA", "") != "1":
    try:
        from numba import njit

        _NUMBA_OK = True
    except ImportError:  # pragma: no cover - numba is a hard dep, but be safe
        _NUMBA_OK = False

if not _NUMBA_OK:

    def njit(*args, **kwargs):  # type: ignore[misc]
        if args and callable(args[0]):
            return args[0]

        def deco(f):
            return f

        return deco


INT64_SAFE_MODULUS = 1 << 31


def use_numba(pr: int) -> bool:
    return _NUMBA_OK and pr < INT64_SAFE_MODULUS


@njit(cache=True)
def _inv_mod(u, pr):
    """Inverse of a unit u modulo pr via extended Euclid."""
    a, b = u % pr, pr
    x0, x1 = np.int64(1), np.int64(0)
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
    return x0 % pr


@njit(cache=True)
def _snf_sweep_nb(A, U, Ui, V, Vi, p, r, pr, track_u, track_v):
    """In-place Smith sweep; returns number of nonzero diagonal entries.

    On exit A is diagonal with entries p^a (weakly increasing a), and
    U@A_in@V == A_out, with Ui, Vi the inverses of U, V.
    """
    rows, cols = A.shape
    npivot = min(rows, cols)
    rank = 0
    for t in range(npivot):
        # pivot search: minimal valuation, ties by (row, col)
        best_v = r + 1
        bi = -1
        bj = -1
        for i in range(t, rows):
            for j in range(t, cols):
                a = A[i, j]
                if a != 0:
                    v = 0
                    while a % p == 0:
                        a //= p
                        v += 1
                    if v < best_v:
                        best_v = v
                        bi = i
                        bj = j
                        if v == 0:
                            break
            if best_v == 0:
                break
        if bi < 0:
            break
        # swap into place
        if bi != t:
            for j in range(cols):
                A[t, j], A[bi, j] = A[bi, j], A[t, j]
            if track_u:
                for j in range(rows):
                    U[t, j], U[bi, j] = U[bi, j], U[t, j]
                    Ui[j, t], Ui[j, bi] = Ui[j, bi], Ui[j, t]
        if bj != t:
            for i in range(rows):
                A[i, t], A[i, bj] = A[i, bj], A[i, t]
            if track_v:
                for i in range(cols):
                    V[i, t], V[i, bj] = V[i, bj], V[i, t]
                    Vi[t, i], Vi[bj, i] = Vi[bj, i], Vi[t, i]
        pv = best_v
        ppow = np.int64(1)
        for _ in range(pv):
            ppow *= p
        unit = A[t, t] // ppow
        uinv = _inv_mod(unit, pr)
        # normalise pivot row: multiply by unit^{-1}
        for j in range(cols):
            if A[t, j] != 0:
                A[t, j] = (A[t, j] * uinv) % pr
        if track_u:
            for j in range(rows):
                if U[t, j] != 0:
                    U[t, j] = (U[t, j] * uinv) % pr
                Ui[j, t] = (Ui[j, t] * unit) % pr
        # clear the pivot column (row ops); valuations below are >= pv
        for i in range(rows):
            if i != t and A[i, t] != 0:
                q = A[i, t] // ppow
                for j in range(cols):
                    if A[t, j] != 0:
                        A[i, j] = (A[i, j] - q * A[t, j]) % pr
                if track_u:
                    for j in range(rows):
                        if U[t, j] != 0:
                            U[i, j] = (U[i, j] - q * U[t, j]) % pr
                        Ui[j, t] = (Ui[j, t] + q * Ui[j, i]) % pr
        # clear the pivot row (column ops); only row t is nonzero in col t now
        for j in range(cols):
            if j != t and A[t, j] != 0:
                q = A[t, j] // ppow
                A[t, j] = 0
                if track_v:
                    for i in range(cols):
                        if V[i, t] != 0:
                            V[i, j] = (V[i, j] - q * V[i, t]) % pr
                        Vi[t, i] = (Vi[t, i] + q * Vi[j, i]) % pr
        rank += 1
    return rank


def _snf_sweep_py(A, U, Ui, V, Vi, p, r, pr, track_u, track_v):
    """Pure-python/numpy twin of _snf_sweep_nb (object or int64 dtype)."""
    rows, cols = A.shape
    rank = 0

    def val(x):
        v = 0
        while x % p == 0:
            x //= p
            v += 1
        return v

    for t in range(min(rows, cols)):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if A[i, j] != 0:
                    v = val(int(A[i, j]))
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        pv, bi, bj = best
        if bi != t:
            A[[t, bi], :] = A[[bi, t], :]
            if track_u:
                U[[t, bi], :] = U[[bi, t], :]
                Ui[:, [t, bi]] = Ui[:, [bi, t]]
        if bj != t:
            A[:, [t, bj]] = A[:, [bj, t]]
            if track_v:
                V[:, [t, bj]] = V[:, [bj, t]]
                Vi[[t, bj], :] = Vi[[bj, t], :]
        ppow = p**pv
        unit = int(A[t, t]) // ppow
        uinv = pow(unit, -1, pr)
        A[t, :] = (A[t, :] * uinv) % pr
        if track_u:
            U[t, :] = (U[t, :] * uinv) % pr
            Ui[:, t] = (Ui[:, t] * unit) % pr
        for i in range(rows):
            if i != t and A[i, t] != 0:
                q = int(A[i, t]) // ppow
                A[i, :] = (A[i, :] - q * A[t, :]) % pr
                if track_u:
                    U[i, :] = (U[i, :] - q * U[t, :]) % pr
                    Ui[:, t] = (Ui[:, t] + q * Ui[:, i]) % pr
        for j in range(cols):
            if j != t and A[t, j] != 0:
                q = int(A[t, j]) // ppow
                A[t, j] = 0
                if track_v:
                    V[:, j] = (V[:, j] - q * V[:, t]) % pr
                    Vi[t, :] = (Vi[t, :] + q * Vi[j, :]) % pr
        rank += 1
    return rank


def snf_sweep(A, p, r, track_u=True, track_v=True):
    """Smith-reduce a copy of A over Z/p^r.

    Returns (D, U, Ui, V, Vi, rank); the transforms not tracked are None.
    U@A@V == D with U, V invertible; Ui = U^{-1}, Vi = V^{-1}.
    """
    pr = p**r
    rows, cols = A.shape
    if use_numba(pr) and A.dtype == np.int64:
        W = A.copy()
        U = np.eye(rows, dtype=np.int64) if track_u else np.zeros((0, 0), np.int64)
        Ui = np.eye(rows, dtype=np.int64) if track_u else np.zeros((0, 0), np.int64)
        V = np.eye(cols, dtype=np.int64) if track_v else np.zeros((0, 0), np.int64)
        Vi = np.eye(cols, dtype=np.int64) if track_v else np.zeros((0, 0), np.int64)
        rank = _snf_sweep_nb(W, U, Ui, V, Vi, p, r, pr, track_u, track_v)
    else:
        W = np.array(A, dtype=object) % pr
        U = np.eye(rows, dtype=object) if track_u else None
        Ui = np.eye(rows, dtype=object) if track_u else None
        V = np.eye(cols, dtype=object) if track_v else None
        Vi = np.eye(cols, dtype=object) if track_v else None
        Un = U if track_u else np.zeros((0, 0), dtype=object)
        Uin = Ui if track_u else np.zeros((0, 0), dtype=object)
        Vn = V if track_v else np.zeros((0, 0), dtype=object)
        Vin = Vi if track_v else np.zeros((0, 0), dtype=object)
        rank = _snf_sweep_py(W, Un, Uin, Vn, Vin, p, r, pr, track_u, track_v)
    return (
        W,
        U if track_u else None,
        Ui if track_u else None,
        V if track_v else None,
        Vi if track_v else None,
        rank,
    )
