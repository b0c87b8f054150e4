"""Pointwise maps between tetrad, connection, two-form and metric grids.

Grids are numpy object arrays of :class:`fractions.Fraction` whose leading
axes are the lattice shape and whose trailing axes are tensor indices:

* tetrad ``e[..., I, mu]`` holds ``e^I_mu``;
* connection ``w[..., mu, I, J]`` holds ``w_mu^{IJ}``, antisymmetric in ``I, J``;
* two-form ``B[..., I, alpha, beta]`` holds ``B^I_{alpha beta}``, antisymmetric
  in ``alpha, beta``.

Antisymmetric pairs are kept as full arrays so that index sums read like
the formulas they implement; the validators reject inputs that are not
exactly antisymmetric.  Internal indices are raised and lowered with
``diag(-1, 1, 1, 1)``.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..exact_linalg import SingularMatrix, SparseMatrix, invert
from ..lattice import EPS4, MINKOWSKI, fwd


class DegenerateTetrad(ArithmeticError):
    def __init__(self, site):
        self.site = site
        super().__init__(f"tetrad is degenerate at site {site}")


def _check_trailing(name, arr, trailing):
    arr = np.asarray(arr, dtype=object)
    if arr.shape[arr.ndim - len(trailing):] != trailing:
        raise ValueError(f"{name} must end in axes {trailing}, got shape {arr.shape}")
    return arr


def _check_antisym(name, arr, ax1, ax2):
    if not np.all(arr == -np.swapaxes(arr, ax1, ax2)):
        raise ValueError(f"{name} is not antisymmetric in its paired indices")


def zeros(shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(Fraction(0))
    return out


def b_from_connection(e, w) -> np.ndarray:
    """``B^I_{ab} = -1/2 eps^{IJKL} (e_{aJ} w_{bKL} - e_{bJ} w_{aKL})``."""
    e = _check_trailing("tetrad", e, (4, 4))
    w = _check_trailing("connection", w, (4, 4, 4))
    if e.shape[:-2] != w.shape[:-3]:
        raise ValueError("tetrad and connection grids live on different lattices")
    _check_antisym("connection", w, -1, -2)
    eta = np.array([Fraction(s) for s in MINKOWSKI], dtype=object)
    e_low = e * eta[:, None]                       # e_{J mu}, J lowered
    w_low = w * eta[None, :, None] * eta[None, None, :]
    out = zeros(e.shape[:-2] + (4, 4, 4))
    for (i, j, k, l), s in EPS4:
        for a in range(4):
            for b in range(a + 1, 4):
                term = e_low[..., j, a] * w_low[..., b, k, l] - e_low[..., j, b] * w_low[..., a, k, l]
                out[..., i, a, b] = out[..., i, a, b] - Fraction(s, 2) * term
    for a in range(4):
        for b in range(a + 1, 4):
            out[..., :, b, a] = -out[..., :, a, b]
    return out


def _inverse_tetrad(mat, site):
    m = SparseMatrix.from_dense(mat.tolist())
    try:
        inv = invert(m)
    except SingularMatrix:
        raise DegenerateTetrad(site) from None
    return np.array(inv.to_dense(), dtype=object)


def connection_from_b(e, b) -> np.ndarray:
    """Invert :func:`b_from_connection` for a non-degenerate tetrad.

    ``w_{aIJ} = 1/2 eps_{IJKL} e^{bK} (B^L_{ab} - 1/2 e^{cL} e_{aN} B^N_{bc})``
    with ``e^{bK}`` the exact inverse tetrad, ``eps_{IJKL} = -eps^{IJKL}``.
    """
    e = _check_trailing("tetrad", e, (4, 4))
    b = _check_trailing("two-form", b, (4, 4, 4))
    if e.shape[:-2] != b.shape[:-3]:
        raise ValueError("tetrad and two-form grids live on different lattices")
    _check_antisym("two-form", b, -1, -2)
    lattice_shape = e.shape[:-2]
    out = zeros(lattice_shape + (4, 4, 4))
    eta = [Fraction(s) for s in MINKOWSKI]
    for site in np.ndindex(*lattice_shape):
        E = e[site]
        inv = _inverse_tetrad(E, site)             # inv[mu, I] e^I_nu = delta
        eup = [[inv[mu, k] * eta[k] for k in range(4)] for mu in range(4)]   # e^{mu K}
        elow = [[eta[n] * E[n, a] for a in range(4)] for n in range(4)]      # e_{N a}
        B = b[site]
        # trace part T_b = e^{cL} e_{aN} B^N_{bc} depends on (a, b, L)
        for a in range(4):
            inner = [[Fraction(0)] * 4 for _ in range(4)]   # inner[bb][L]
            for bb in range(4):
                for L in range(4):
                    acc = B[L, a, bb]
                    tr = Fraction(0)
                    for c in range(4):
                        if eup[c][L] == 0:
                            continue
                        tr += eup[c][L] * sum((elow[n][a] * B[n, bb, c] for n in range(4)), Fraction(0))
                    inner[bb][L] = acc - tr / 2
            for (i, j, k, l), s in EPS4:
                val = Fraction(0)
                for bb in range(4):
                    if eup[bb][k] and inner[bb][l]:
                        val += eup[bb][k] * inner[bb][l]
                if val:
                    # eps_{IJKL} = -eps^{IJKL}; store w_a^{IJ} = eta^I eta^J w_{aIJ}
                    out[site + (a, i, j)] += -Fraction(s, 2) * val * eta[i] * eta[j]
    return out


def metric_from_gradient(df) -> np.ndarray:
    """``g_{mu nu} = eta_IJ df[mu, I] df[nu, J]`` for a supplied gradient grid ``df[..., mu, I]``."""
    df = _check_trailing("gradient", df, (4, 4))
    eta = np.array([Fraction(s) for s in MINKOWSKI], dtype=object)
    out = zeros(df.shape[:-2] + (4, 4))
    for mu in range(4):
        for nu in range(mu, 4):
            val = (df[..., mu, :] * df[..., nu, :] * eta).sum(axis=-1)
            out[..., mu, nu] = val
            out[..., nu, mu] = val
    return out


def metric_from_f(f) -> np.ndarray:
    """Metric induced by a periodic 4-vector field ``f[t, x, y, z, I]`` via forward differences.

    Linear coordinates are not periodic; pass their constant gradient to
    :func:`metric_from_gradient` instead.
    """
    f = _check_trailing("f", f, (4,))
    if f.ndim != 5:
        raise ValueError(f"f must live on a 4D lattice, got shape {f.shape}")
    df = zeros(f.shape[:-1] + (4, 4))
    for mu in range(4):
        df[..., mu, :] = fwd(f, mu)
    return metric_from_gradient(df)
