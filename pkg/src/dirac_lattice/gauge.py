"""Gauge symmetry of the (e, B) theory: generator, transformations, action checks.

Spacetime grids are numpy object arrays of Fractions on a ``(t, n, n, n)``
lattice with trailing index axes: ``e[..., I, mu]`` and the fully
antisymmetric ``B[..., I, alpha, beta]``.  Array axis ``mu`` is spacetime
direction ``mu``.

The discrete action is

    S = sum_x eps^{abmn} eta_II B^I_{ab}(x) (D_m e^I_n)(x)

and it is exactly invariant under

    e^I_mu -> e^I_mu - D_mu L^I,
    B^I_{mn} -> B^I_{mn} - 1/2 (Dbar_m L^I_n - Dbar_n L^I_m),

with forward differences on the tetrad and backward differences on the
two-form (the adjoint placement that makes the invariance exact).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dirac import families as fam
from .dirac.analysis import ClassifiedConstraints
from .exact_linalg import EchelonBasis
from .lattice import EPS4, ETA3, MINKOWSKI, LatticeSpec, bwd, fwd
from .phase_space import CoordinateCatalog, LinearFunctional
from .theory.maps import zeros

SPATIAL = (1, 2, 3)


class TheoryMismatch(ValueError):
    pass


# -- parameters ---------------------------------------------------------------

@dataclass(frozen=True)
class GaugeParams:
    """Parameters of the canonical generator on one time slice.

    Shapes (``n`` the spatial extent): ``eps0_dot`` and ``eps`` are
    ``(n, n, n, 4)``; ``eps0a_dot`` and ``eps_a`` are ``(n, n, n, 4, 3)`` with
    the last axis holding spatial ``a = 1, 2, 3``.  The time derivatives of
    the 0-components are independent data on a single slice.
    """

    eps0_dot: np.ndarray
    eps: np.ndarray
    eps0a_dot: np.ndarray
    eps_a: np.ndarray

    def __post_init__(self):
        n = self.eps.shape[0]
        for name, arr, tail in (("eps0_dot", self.eps0_dot, (4,)), ("eps", self.eps, (4,)),
                                ("eps0a_dot", self.eps0a_dot, (4, 3)), ("eps_a", self.eps_a, (4, 3))):
            if arr.shape != (n, n, n) + tail:
                raise ValueError(f"{name} has shape {arr.shape}, expected {(n, n, n) + tail}")

    @classmethod
    def zero(cls, lattice: LatticeSpec) -> "GaugeParams":
        s = lattice.shape()
        return cls(zeros(s + (4,)), zeros(s + (4,)), zeros(s + (4, 3)), zeros(s + (4, 3)))

    @classmethod
    def random(cls, lattice: LatticeSpec, rng) -> "GaugeParams":
        s = lattice.shape()
        return cls(random_grid(rng, s + (4,)), random_grid(rng, s + (4,)),
                   random_grid(rng, s + (4, 3)), random_grid(rng, s + (4, 3)))


@dataclass(frozen=True)
class SpacetimeGaugeParams:
    """``lam[..., I]`` and ``lam_mu[..., I, mu]`` on a spacetime lattice."""

    lam: np.ndarray
    lam_mu: np.ndarray

    def __post_init__(self):
        if self.lam_mu.shape != self.lam.shape + (4,):
            raise ValueError(f"lam_mu shape {self.lam_mu.shape} does not match lam shape {self.lam.shape}")

    @classmethod
    def random(cls, lattice: LatticeSpec, rng) -> "SpacetimeGaugeParams":
        s = lattice.shape(spacetime=True)
        return cls(random_grid(rng, s + (4,)), random_grid(rng, s + (4, 4)))

    def on_slice(self, t: int) -> GaugeParams:
        """Canonical parameters reproducing this transformation on slice ``t``.

        ``eps = L``, ``eps_a = L_a``, ``eps0_dot = -D_0 L`` and
        ``eps0a_dot = -(Dbar_0 L_a - Dbar_a L_0)``; the last factor reflects
        ``{B_0a, Pi^{0a}} = 1/2``.
        """
        lam, lm = self.lam, self.lam_mu
        d0 = fwd(lam, 0)[t]
        eps0a = zeros(lam.shape[1:4] + (4, 3))
        for a in SPATIAL:
            eps0a[..., a - 1] = -(bwd(lm[..., a], 0) - bwd(lm[..., 0], a))[t]
        return GaugeParams(-d0, lam[t].copy(), eps0a, lm[t][..., 1:].copy())


def random_grid(rng, shape, span: int = 5, max_den: int = 4) -> np.ndarray:
    """Random rationals ``p/q`` with ``|p| <= span`` and ``1 <= q <= max_den``."""
    out = np.empty(shape, dtype=object)
    for idx in np.ndindex(*shape):
        out[idx] = Fraction(rng.randint(-span, span), rng.randint(1, max_den))
    return out


# -- phase-space side -----------------------------------------------------------

def _check_eb_catalog(catalog: CoordinateCatalog) -> None:
    from .theory.spec import paper_g0_theory
    ref = paper_g0_theory()
    if catalog.theory.fields != ref.fields or catalog.theory.kinetic != ref.kinetic:
        raise TheoryMismatch(f"generator is defined for the (e, B) theory, got {catalog.theory.name!r}")


def castellani_generator(params: GaugeParams, cc: ClassifiedConstraints) -> LinearFunctional:
    """``G = sum_x [eps0_dot Pi^0 + eps0a_dot Pi^{0a} + eps Dbar_a Pi^a + eps_a gamma^a]``.

    Every smeared piece is checked to lie in the span of the first-class set.
    """
    cat = cc.catalog
    _check_eb_catalog(cat)
    if params.eps.shape[:3] != cat.lattice.shape():
        raise ValueError("parameters live on a different lattice")
    pieces = (
        (fam.pi0(cat), params.eps0_dot, 4, None),
        (fam.pi0a(cat), params.eps0a_dot, 4, 3),
        (fam.psi(cat), params.eps, 4, None),
        (fam.gamma_a(cat), params.eps_a, 4, 3),
    )
    acc: dict[int, Fraction] = {}
    for funcs, grid, ni, na in pieces:
        k = 0
        for s in range(cat.lattice.volume):
            site = cat.lattice.site_coords(s)
            for i in range(ni):
                for a in range(na or 1):
                    w = grid[site + (i,)] if na is None else grid[site + (i, a)]
                    if w:
                        for idx, v in funcs[k].coeffs.items():
                            acc[idx] = acc.get(idx, 0) + w * v
                    k += 1
    g = LinearFunctional(cat, acc)
    basis = EchelonBasis(c.functional.coeffs for c in cc.first_class)
    if not basis.contains(g.coeffs):
        raise TheoryMismatch("generator is not a combination of the first-class constraints")
    return g


def generator_flow(g: LinearFunctional) -> list[Fraction]:
    """``delta z_i = {z_i, G}`` for every coordinate."""
    from .phase_space import SymplecticMatrix
    out = [Fraction(0)] * g.catalog.dim
    for k, v in SymplecticMatrix(g.catalog).apply(g.coeffs).items():
        out[k] = v
    return out


def phase_gauge_variation(catalog: CoordinateCatalog, params: GaugeParams) -> list[Fraction]:
    """The gauge variation of every canonical coordinate, written out directly.

    ``de_0 = eps0_dot``, ``de_a = -D_a eps``, ``dB_0a = eps0a_dot / 2``,
    ``dB_ab = -1/2 (Dbar_a eps_b - Dbar_b eps_a)``,
    ``dPi^a = -eta^{abc} eta_II Dbar_b eps_c``; all other momenta are inert.
    """
    _check_eb_catalog(catalog)
    lat = catalog.lattice
    eps = params.eps
    ea = params.eps_a
    out = [Fraction(0)] * catalog.dim
    half = Fraction(1, 2)

    def put(label, site, value):
        flat, sign = catalog.ref_index(label, site)
        out[flat] += sign * value

    d_eps = {a: fwd(eps, a - 1) for a in SPATIAL}
    b_epsa = {(a, b): bwd(ea[..., b - 1], a - 1) for a in SPATIAL for b in SPATIAL}
    for site in lat.sites():
        for i in range(4):
            put(f"e[{i},0]", site, params.eps0_dot[site + (i,)])
            for a in SPATIAL:
                put(f"e[{i},{a}]", site, -d_eps[a][site + (i,)])
                put(f"B[{i},0,{a}]", site, half * params.eps0a_dot[site + (i, a - 1)])
                for b in SPATIAL:
                    if a < b:
                        put(f"B[{i},{a},{b}]", site,
                            -half * (b_epsa[(a, b)][site + (i,)] - b_epsa[(b, a)][site + (i,)]))
            for (a, b, c), s in ETA3:
                put(f"p:e[{i},{a}]", site, -s * MINKOWSKI[i] * b_epsa[(b, c)][site + (i,)])
    return out


def apply_gauge_phase(z, params: GaugeParams, catalog: CoordinateCatalog) -> list[Fraction]:
    """Shift a phase point by the gauge variation (exact: the flow is a translation)."""
    dz = phase_gauge_variation(catalog, params)
    return [Fraction(a) + b for a, b in zip(z, dz)]


# -- spacetime side -------------------------------------------------------------

def apply_gauge(e: np.ndarray, B: np.ndarray, params: SpacetimeGaugeParams) -> tuple[np.ndarray, np.ndarray]:
    """Finite gauge transformation of spacetime grids."""
    if e.shape[:-2] != params.lam.shape[:-1] or B.shape[:-3] != e.shape[:-2]:
        raise ValueError("fields and parameters live on different lattices")
    e2 = e.copy()
    B2 = B.copy()
    half = Fraction(1, 2)
    for mu in range(4):
        e2[..., :, mu] = e[..., :, mu] - fwd(params.lam, mu)
    for m in range(4):
        for n in range(4):
            if m != n:
                B2[..., :, m, n] = B[..., :, m, n] - half * (bwd(params.lam_mu[..., n], m)
                                                              - bwd(params.lam_mu[..., m], n))
    return e2, B2


def discrete_action(e: np.ndarray, B: np.ndarray) -> Fraction:
    if e.shape[:-2] != B.shape[:-3]:
        raise ValueError("tetrad and two-form grids live on different lattices")
    total = Fraction(0)
    de = {(m, n): fwd(e[..., :, n], m) for m in range(4) for n in range(4)}
    for (a, b, m, n), s in EPS4:
        prod = B[..., :, a, b] * de[(m, n)]
        for i in range(4):
            total += s * MINKOWSKI[i] * sum(prod[..., i].ravel(), Fraction(0))
    return total


def check_action_invariance(e, B, params: SpacetimeGaugeParams) -> Fraction:
    """``S(transformed) - S(original)``; exactly zero for periodic parameters."""
    e2, B2 = apply_gauge(e, B, params)
    return discrete_action(e2, B2) - discrete_action(e, B)


def diffeo_parameters(xi, e: np.ndarray, B: np.ndarray) -> SpacetimeGaugeParams:
    """Field-dependent parameters ``L^I = -xi^r e^I_r`` and ``L^I_m = -2 xi^r B^I_{rm}``.

    ``xi`` is a constant 4-vector or a grid ``xi[..., rho]``.
    """
    xi = np.asarray(xi, dtype=object)
    if xi.shape == (4,):
        xi = np.broadcast_to(xi, e.shape[:-2] + (4,))
    if xi.shape != e.shape[:-2] + (4,):
        raise ValueError(f"xi has shape {xi.shape}")
    lam = -(e * xi[..., None, :]).sum(axis=-1)
    lam_mu = -2 * (B * xi[..., None, :, None]).sum(axis=-2)
    return SpacetimeGaugeParams(lam, lam_mu)


def translation(e: np.ndarray, B: np.ndarray, xi) -> tuple[np.ndarray, np.ndarray]:
    """``(xi^r D_r e, xi^r Dbar_r B)`` for a constant ``xi``."""
    de = sum((Fraction(xi[r]) * fwd(e, r) for r in range(4)), zeros(e.shape))
    dB = sum((Fraction(xi[r]) * bwd(B, r) for r in range(4)), zeros(B.shape))
    return de, dB
