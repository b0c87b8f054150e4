"""Covariant phase space of the (e, B) theory on a periodic spacetime lattice.

Field equations, with forward differences on the tetrad and backward ones
on the two-form:

    D_m e^I_n - D_n e^I_m = 0,        eps^{abmn} Dbar_m B^I_{ab} = 0.

Solutions are built from potentials, ``e = D f + c`` and
``B_{ab} = Dbar_a A_b - Dbar_b A_a + C_{ab}``, which solve the equations
identically.  The theory is linear, so tangent vectors are solutions too.

The symplectic current pairs the two-form at ``x`` with the tetrad at
``x + m``:

    J^m(x) = eps^{abmn} eta_II [d1B^I_{ab}(x) d2e^I_n(x + m) - (1 <-> 2)],

and the discrete Leibniz rule ``Dbar_m(f(x) g(x+m)) = f D_m g + (Dbar_m f) g``
makes ``Dbar_m J^m`` vanish pointwise on-shell.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .gauge import SpacetimeGaugeParams, apply_gauge, random_grid
from .lattice import EPS4, ETA3, MINKOWSKI, LatticeSpec, bwd, fwd, shift
from .theory.maps import zeros

SPATIAL = (1, 2, 3)


class InvalidSolution(AssertionError):
    pass


class UnknownGenerator(KeyError):
    pass


@dataclass(frozen=True)
class SpacetimeSolution:
    e: np.ndarray   # (t, n, n, n, 4, 4)
    B: np.ndarray   # (t, n, n, n, 4, 4, 4), antisymmetric in the last two axes

    def __add__(self, other: "SpacetimeSolution") -> "SpacetimeSolution":
        return SpacetimeSolution(self.e + other.e, self.B + other.B)

    def scale(self, c) -> "SpacetimeSolution":
        c = Fraction(c)
        return SpacetimeSolution(self.e * c, self.B * c)


# tangent vectors of a linear theory are solutions themselves
TangentSolution = SpacetimeSolution


def eom_e_residual(e: np.ndarray) -> np.ndarray:
    """``R[..., I, m, n] = D_m e^I_n - D_n e^I_m``."""
    out = zeros(e.shape[:-1] + (4, 4))
    for m in range(4):
        for n in range(4):
            if m != n:
                out[..., m, n] = fwd(e[..., n], m) - fwd(e[..., m], n)
    return out


def eom_b_residual(B: np.ndarray) -> np.ndarray:
    """``R[..., I, n] = eps^{abmn} Dbar_m B^I_{ab}``."""
    out = zeros(B.shape[:-2] + (4,))
    for (a, b, m, n), s in EPS4:
        out[..., n] = out[..., n] + s * bwd(B[..., a, b], m)
    return out


def is_solution(e: np.ndarray, B: np.ndarray) -> bool:
    return not np.any(eom_e_residual(e) != 0) and not np.any(eom_b_residual(B) != 0)


def _antisym_const(rng) -> np.ndarray:
    c = zeros((4, 4, 4))
    for i in range(4):
        for a in range(4):
            for b in range(a + 1, 4):
                v = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
                c[i, a, b] = v
                c[i, b, a] = -v
    return c


def solution_from_potentials(f: np.ndarray, A: np.ndarray, e_const=None, B_const=None) -> SpacetimeSolution:
    """``e^I_m = D_m f^I + c^I_m`` and ``B^I_{ab} = Dbar_a A^I_b - Dbar_b A^I_a + C^I_{ab}``."""
    shape = f.shape[:-1]
    e = zeros(shape + (4, 4))
    for m in range(4):
        e[..., m] = fwd(f, m)
    B = zeros(shape + (4, 4, 4))
    for a in range(4):
        for b in range(4):
            if a != b:
                B[..., a, b] = bwd(A[..., b], a) - bwd(A[..., a], b)
    if e_const is not None:
        e = e + np.asarray(e_const, dtype=object)
    if B_const is not None:
        B = B + np.asarray(B_const, dtype=object)
    return SpacetimeSolution(e, B)


def generate_solution(seed: int, lattice: LatticeSpec, harmonic: bool = True) -> SpacetimeSolution:
    """A random exact solution; constant (harmonic) pieces are included unless disabled."""
    rng = random.Random(seed)
    shape = lattice.shape(spacetime=True)
    f = random_grid(rng, shape + (4,))
    A = random_grid(rng, shape + (4, 4))
    ec = random_grid(rng, (4, 4), span=3, max_den=3) if harmonic else None
    bc = _antisym_const(rng) if harmonic else None
    sol = solution_from_potentials(f, A, ec, bc)
    if not is_solution(sol.e, sol.B):
        raise InvalidSolution("generated fields violate the field equations")
    return sol


def random_off_shell(seed: int, lattice: LatticeSpec) -> SpacetimeSolution:
    """Random fields that generically violate the field equations."""
    rng = random.Random(seed)
    shape = lattice.shape(spacetime=True)
    e = random_grid(rng, shape + (4, 4))
    B = random_grid(rng, shape + (4, 4, 4))
    return SpacetimeSolution(e, B - np.swapaxes(B, -1, -2))


def pure_gauge(params: SpacetimeGaugeParams) -> SpacetimeSolution:
    """The tangent ``(-D L, -1/2 (Dbar_m L_n - Dbar_n L_m))``."""
    shape = params.lam.shape[:-1]
    e, B = apply_gauge(zeros(shape + (4, 4)), zeros(shape + (4, 4, 4)), params)
    return SpacetimeSolution(e, B)


# -- potential, current and form -------------------------------------------------

def potential_field(sol: SpacetimeSolution, delta: TangentSolution) -> np.ndarray:
    """``Psi^m(x) = eps^{abmn} eta_II B^I_{ab}(x) de^I_n(x + m)``, shape ``(t, n, n, n, 4)``."""
    out = zeros(sol.e.shape[:-2] + (4,))
    eta = np.array([Fraction(s) for s in MINKOWSKI], dtype=object)
    for (a, b, m, n), s in EPS4:
        prod = (sol.B[..., :, a, b] * shift(delta.e[..., :, n], m) * eta).sum(axis=-1)
        out[..., m] = out[..., m] + s * prod
    return out


def symplectic_potential(sol: SpacetimeSolution, delta: TangentSolution, slice_t: int):
    """Slice sum of ``Psi^0`` at time ``slice_t`` together with the full field ``Psi``."""
    psi = potential_field(sol, delta)
    return sum(psi[slice_t, ..., 0].ravel(), Fraction(0)), psi


def current(d1: TangentSolution, d2: TangentSolution) -> np.ndarray:
    return potential_field(d1, d2) - potential_field(d2, d1)


def omega_on_slice(d1: TangentSolution, d2: TangentSolution, slice_t: int) -> Fraction:
    """``sum_x eta^{abc} eta_II [d1B^I_{ab}(x) d2e^I_c(x + t) - (1 <-> 2)]`` over the slice."""
    eta = np.array([Fraction(s) for s in MINKOWSKI], dtype=object)
    total = Fraction(0)
    for (a, b, c), s in ETA3:
        x = (d1.B[slice_t, ..., :, a, b] * shift(d2.e[..., :, c], 0)[slice_t] * eta
             - d2.B[slice_t, ..., :, a, b] * shift(d1.e[..., :, c], 0)[slice_t] * eta)
        total += s * sum(x.ravel(), Fraction(0))
    return total


def current_divergence(d1: TangentSolution, d2: TangentSolution) -> np.ndarray:
    """``Dbar_m J^m`` at every site."""
    J = current(d1, d2)
    return sum((bwd(J[..., m], m) for m in range(4)), zeros(J.shape[:-1]))


@dataclass(frozen=True)
class Verdict:
    passed: bool
    residual: Fraction
    detail: str = ""


def current_divergence_check(d1: TangentSolution, d2: TangentSolution) -> tuple[Verdict, np.ndarray]:
    div = current_divergence(d1, d2)
    worst = max((abs(v) for v in div.ravel()), default=Fraction(0))
    return Verdict(worst == 0, Fraction(worst), "max |Dbar_m J^m|"), div


def slice_values(d1: TangentSolution, d2: TangentSolution) -> list[Fraction]:
    return [omega_on_slice(d1, d2, t) for t in range(d1.e.shape[0])]


def closure_check(tangents: list[TangentSolution], rng: random.Random | None = None,
                  slice_t: int = 0) -> Verdict:
    """Antisymmetry, bilinearity and slice independence of the form on a tangent basis.

    For a linear theory the form does not depend on the base point, so these
    properties are the lattice content of ``d omega = 0``.
    """
    rng = rng or random.Random(0)
    n = len(tangents)
    for i in range(n):
        if omega_on_slice(tangents[i], tangents[i], slice_t):
            return Verdict(False, omega_on_slice(tangents[i], tangents[i], slice_t), f"omega(d{i}, d{i})")
        for j in range(n):
            w = omega_on_slice(tangents[i], tangents[j], slice_t)
            r = w + omega_on_slice(tangents[j], tangents[i], slice_t)
            if r:
                return Verdict(False, r, f"antisymmetry ({i}, {j})")
            vals = slice_values(tangents[i], tangents[j])
            if len(set(vals)) > 1:
                return Verdict(False, max(vals) - min(vals), f"slice dependence ({i}, {j})")
    for i in range(n):
        for j in range(n):
            for k in range(n):
                a = Fraction(rng.randint(-5, 5), rng.randint(1, 5))
                lhs = omega_on_slice(tangents[i].scale(a) + tangents[j], tangents[k], slice_t)
                rhs = a * omega_on_slice(tangents[i], tangents[k], slice_t) + \
                    omega_on_slice(tangents[j], tangents[k], slice_t)
                if lhs != rhs:
                    return Verdict(False, lhs - rhs, f"bilinearity ({i}, {j}, {k})")
    return Verdict(True, Fraction(0))


# -- smeared first-class flows on slice data ---------------------------------------

@dataclass(frozen=True)
class SliceData:
    """Canonical data on one slice: ``e[..., I, mu]``, full ``B[..., I, a, b]``, ``pi[..., I, mu]``."""

    e: np.ndarray
    B: np.ndarray
    pi: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, SliceData):
            return NotImplemented
        return bool(np.all(self.e == other.e) and np.all(self.B == other.B) and np.all(self.pi == other.pi))

    __hash__ = None


GENERATORS = ("gamma", "gamma_a", "gamma_0", "gamma_0a")


def smeared_flow(which: str, test_field: np.ndarray, point: SliceData, eps=1) -> SliceData:
    """Move ``point`` along the flow of a smeared first-class constraint.

    ``which`` selects ``gamma[C] = sum C^I Dbar_a Pi_I^a`` (``test_field``
    shape ``(n, n, n, 4)``), ``gamma_a[C] = sum C^I_a gamma_I^a`` (shape
    ``(n, n, n, 4, 3)``), ``gamma_0[D] = sum D^I Pi_I^0`` or
    ``gamma_0a[D] = sum D^I_a Pi_I^{0a}``.  The constraints are linear, so the
    flow is a translation and the first-order result with parameter ``eps``
    is exact.
    """
    if which not in GENERATORS:
        raise UnknownGenerator(f"unknown generator {which!r}; choose from {GENERATORS}")
    eps = Fraction(eps)
    e, B, pi = point.e.copy(), point.B.copy(), point.pi.copy()
    C = np.asarray(test_field, dtype=object)
    if which == "gamma":
        for a in SPATIAL:
            e[..., a] = e[..., a] - eps * fwd(C, a - 1)
    elif which == "gamma_a":
        for (a, b, c), s in ETA3:
            for i in range(4):
                pi[..., i, a] = pi[..., i, a] - eps * s * MINKOWSKI[i] * bwd(C[..., i, c - 1], b - 1)
        half = Fraction(1, 2)
        for a in SPATIAL:
            for b in SPATIAL:
                if a != b:
                    B[..., a, b] = B[..., a, b] - eps * half * (bwd(C[..., b - 1], a - 1) - bwd(C[..., a - 1], b - 1))
    elif which == "gamma_0":
        e[..., 0] = e[..., 0] + eps * C
    else:
        half = Fraction(1, 2)
        for a in SPATIAL:
            B[..., 0, a] = B[..., 0, a] + eps * half * C[..., a - 1]
            B[..., a, 0] = -B[..., 0, a]
    return SliceData(e, B, pi)


def slice_to_phase(catalog, data: SliceData) -> list[Fraction]:
    """Phase point carrying ``data``; momenta of ``B`` are set to zero."""
    z = [Fraction(0)] * catalog.dim
    for s, site in enumerate(catalog.lattice.sites()):
        for i in range(4):
            for m in range(4):
                z[catalog.ref_index(f"e[{i},{m}]", s)[0]] = Fraction(data.e[site + (i, m)])
                z[catalog.ref_index(f"p:e[{i},{m}]", s)[0]] = Fraction(data.pi[site + (i, m)])
                for n in range(m + 1, 4):
                    z[catalog.ref_index(f"B[{i},{m},{n}]", s)[0]] = Fraction(data.B[site + (i, m, n)])
    return z


def phase_to_slice(catalog, z) -> SliceData:
    shape = catalog.lattice.shape()
    e, pi, B = zeros(shape + (4, 4)), zeros(shape + (4, 4)), zeros(shape + (4, 4, 4))
    for s, site in enumerate(catalog.lattice.sites()):
        for i in range(4):
            for m in range(4):
                e[site + (i, m)] = Fraction(z[catalog.ref_index(f"e[{i},{m}]", s)[0]])
                pi[site + (i, m)] = Fraction(z[catalog.ref_index(f"p:e[{i},{m}]", s)[0]])
                for n in range(m + 1, 4):
                    v = Fraction(z[catalog.ref_index(f"B[{i},{m},{n}]", s)[0]])
                    B[site + (i, m, n)] = v
                    B[site + (i, n, m)] = -v
    return SliceData(e, B, pi)
