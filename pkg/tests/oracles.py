"""Reference computations written independently of the library's algorithms.

Ranks are taken modulo a word-sized prime with numpy row operations; a
rank modulo ``p`` never exceeds the rational rank, and for the small
integer-like matrices met here the two agree.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

PRIME = 32749


def _mod(x: Fraction, p: int = PRIME) -> int:
    x = Fraction(x)
    return (x.numerator % p) * pow(x.denominator % p, -1, p) % p


def to_mod_p(rows, ncols: int, p: int = PRIME) -> np.ndarray:
    """Rows given as ``{col: value}`` dicts or dense sequences."""
    rows = list(rows)
    out = np.zeros((len(rows), ncols), dtype=np.int64)
    for r, row in enumerate(rows):
        items = row.items() if isinstance(row, dict) else enumerate(row)
        for c, v in items:
            if v:
                out[r, c] = _mod(v, p)
    return out


def rank_mod_p(a: np.ndarray, p: int = PRIME) -> int:
    a = a.copy() % p
    nrows, ncols = a.shape
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        a[[r, k]] = a[[k, r]]
        a[r] = a[r] * pow(int(a[r, c]), -1, p) % p
        below = np.nonzero(a[r + 1:, c])[0] + r + 1
        if below.size:
            a[below] = (a[below] - np.outer(a[below, c], a[r])) % p
        r += 1
    return r


def functional_rank(functionals, dim: int) -> int:
    return rank_mod_p(to_mod_p([f.coeffs for f in functionals], dim))


def bracket_rank(functionals, catalog) -> int:
    """Rank of ``{f_i, f_j}``, with the canonical bracket written out from the catalog."""
    n = len(functionals)
    P = np.zeros((n, n), dtype=np.int64)
    rows = [f.coeffs for f in functionals]
    for i in range(n):
        for j in range(n):
            acc = Fraction(0)
            for k, v in rows[i].items():
                partner = catalog.partner(k)
                w = rows[j].get(partner)
                if w:
                    # {q, p} = 1
                    acc += v * w * (1 if not catalog.locate(k)[2] else -1)
            P[i, j] = _mod(acc)
    return rank_mod_p(P)


def dof_from_ranks(constraints, catalog) -> int:
    """``(dim - 2 rank C + rank P) / 2`` for linear constraints ``C`` with brackets ``P = C Omega C^T``.

    The first-class flows are ``Omega C^T w`` with ``P w = 0``; their number
    of independent directions is ``rank C - rank P``, and the constraint
    surface has dimension ``dim - rank C``.
    """
    fs = [c.functional for c in constraints]
    rc = functional_rank(fs, catalog.dim)
    rp = bracket_rank(fs, catalog)
    num = catalog.dim - 2 * rc + rp
    assert num % 2 == 0
    return num // 2


def perm_sign(p) -> int:
    p = list(p)
    sign = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


ETA = (-1, 1, 1, 1)


def brute_action(e, B) -> Fraction:
    """``sum_x eps^{abmn} eta_II B^I_ab(x) (e^I_n(x + m) - e^I_n(x))`` with explicit loops."""
    shape = e.shape[:4]
    total = Fraction(0)
    for x in itertools.product(*(range(s) for s in shape)):
        for perm in itertools.permutations(range(4)):
            a, b, m, n = perm
            s = perm_sign(perm)
            y = list(x)
            y[m] = (y[m] + 1) % shape[m]
            y = tuple(y)
            for i in range(4):
                total += s * ETA[i] * B[x + (i, a, b)] * (e[y + (i, n)] - e[x + (i, n)])
    return total


def brute_gauge(e, B, lam, lam_mu):
    """``e - D lam`` and ``B - 1/2 (Dbar_a lam_b - Dbar_b lam_a)`` site by site."""
    shape = e.shape[:4]
    e2, B2 = e.copy(), B.copy()

    def step(x, axis, k):
        y = list(x)
        y[axis] = (y[axis] + k) % shape[axis]
        return tuple(y)

    for x in itertools.product(*(range(s) for s in shape)):
        for i in range(4):
            for m in range(4):
                e2[x + (i, m)] = e[x + (i, m)] - (lam[step(x, m, 1) + (i,)] - lam[x + (i,)])
                for n in range(4):
                    db_m = lam_mu[x + (i, n)] - lam_mu[step(x, m, -1) + (i, n)]
                    db_n = lam_mu[x + (i, m)] - lam_mu[step(x, n, -1) + (i, m)]
                    B2[x + (i, m, n)] = B[x + (i, m, n)] - Fraction(1, 2) * (db_m - db_n)
    return e2, B2
