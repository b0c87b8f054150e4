"""Named constraint families of the shipped theories, written out by hand.

These are independent transcriptions used to check the engine: they are
built directly from component labels and lattice neighbours, never from
the algorithm's output.  Every family is a list ordered site-major, then by
internal index, then by spatial index.

Conventions for the (e, B) theory: ``Pi_I^mu = p(e[I,mu])``; the full-range
momentum of an antisymmetric pair is half the stored momentum,
``Pi_I^{ab} = p(B[I,a,b]) / 2 = -Pi_I^{ba}``; internal indices are lowered
with ``diag(-1, 1, 1, 1)``.
"""
from __future__ import annotations

from fractions import Fraction

from ..lattice import ETA3, MINKOWSKI, levi_civita
from ..phase_space import CoordinateCatalog, LinearFunctional, QuadraticFunctional, linear_sum

HALF = Fraction(1, 2)
SPATIAL = (1, 2, 3)


def _neighbour(cat: CoordinateCatalog, site: int, direction: int, step: int) -> int:
    coords = list(cat.lattice.site_coords(site))
    coords[direction - 1] += step
    return cat.lattice.site_index(coords)


def term(cat, label: str, site: int, scale=1):
    """``scale * label(site)`` as ``(flat, coefficient)`` pairs; reversed pairs flip sign."""
    flat, sign = cat.ref_index(label, site)
    return [(flat, sign * Fraction(scale))]


def forward(cat, label: str, site: int, direction: int, scale=1):
    """``scale * (D_direction label)(site)``."""
    return term(cat, label, _neighbour(cat, site, direction, 1), scale) + term(cat, label, site, -Fraction(scale))


def backward(cat, label: str, site: int, direction: int, scale=1):
    """``scale * (Dbar_direction label)(site)``."""
    return term(cat, label, site, scale) + term(cat, label, _neighbour(cat, site, direction, -1), -Fraction(scale))


def _sites(cat):
    return range(cat.lattice.volume)


# -- (e, B) theory ----------------------------------------------------------

def pi0(cat):
    return [linear_sum(cat, term(cat, f"p:e[{i},0]", s)) for s in _sites(cat) for i in range(4)]


def pi0a(cat):
    """``Pi_I^{0a}``."""
    return [linear_sum(cat, term(cat, f"p:B[{i},0,{a}]", s, HALF))
            for s in _sites(cat) for i in range(4) for a in SPATIAL]


def psi(cat):
    """``Dbar_a Pi_I^a``."""
    return [linear_sum(cat, [t for a in SPATIAL for t in backward(cat, f"p:e[{i},{a}]", s, a)])
            for s in _sites(cat) for i in range(4)]


def _psi_a_terms(cat, i, a, s):
    # 1/2 eta^{abc} (D_b e_{Ic} - D_c e_{Ib}) = eta^{abc} eta_II D_b e^I_c
    out = []
    for (a1, b, c), sign in ETA3:
        if a1 == a:
            out += forward(cat, f"e[{i},{c}]", s, b, sign * MINKOWSKI[i])
    return out


def psi_a(cat):
    return [linear_sum(cat, _psi_a_terms(cat, i, a, s)) for s in _sites(cat) for i in range(4) for a in SPATIAL]


def gamma_a(cat):
    """``psi_I^a - D_b Pi_I^{ab}`` with a forward difference on the momentum."""
    out = []
    for s in _sites(cat):
        for i in range(4):
            for a in SPATIAL:
                terms = _psi_a_terms(cat, i, a, s)
                for b in SPATIAL:
                    if b != a:
                        terms += forward(cat, f"p:B[{i},{a},{b}]", s, b, -HALF)
                out.append(linear_sum(cat, terms))
    return out


def chi_a(cat):
    """``Pi_I^a - eta^{abc} B_{Ibc}`` summed over all ``b, c``."""
    out = []
    for s in _sites(cat):
        for i in range(4):
            for a in SPATIAL:
                terms = term(cat, f"p:e[{i},{a}]", s)
                for (a1, b, c), sign in ETA3:
                    if a1 == a:
                        terms += term(cat, f"B[{i},{b},{c}]", s, -sign * MINKOWSKI[i])
                out.append(linear_sum(cat, terms))
    return out


def chi_ab(cat):
    """``Pi_I^{ab}`` for ``a < b``."""
    return [linear_sum(cat, term(cat, f"p:B[{i},{a},{b}]", s, HALF))
            for s in _sites(cat) for i in range(4) for a in SPATIAL for b in SPATIAL if a < b]


def first_class_family(cat):
    return pi0(cat) + pi0a(cat) + psi(cat) + gamma_a(cat)


def second_class_family(cat):
    return chi_a(cat) + chi_ab(cat)


def secondary_family(cat):
    return psi(cat) + psi_a(cat)


def lambda_ab(cat, i: int, a: int, b: int, site: int) -> LinearFunctional:
    """Fixed multiplier of the stored ``B[i,a,b]`` constraint: ``Dbar_a B^I_{0b} - Dbar_b B^I_{0a}``."""
    return linear_sum(cat, backward(cat, f"B[{i},0,{b}]", site, a) + backward(cat, f"B[{i},0,{a}]", site, b, -1))


def second_class_bracket(i: int, a: int, j: int, c: int, d: int) -> int:
    """Same-site ``{chi_I^a, chi_J^{cd}}``."""
    if i != j:
        return 0
    return -levi_civita(a, c, d) * MINKOWSKI[i]


def expected_hamiltonian(cat) -> QuadraticFunctional:
    """``-sum_x (B^I_{0a} gamma_I^a + e^I_0 psi_I)``."""
    from ..exact_linalg import SparseMatrix
    total = QuadraticFunctional(cat, SparseMatrix(cat.dim, cat.dim))
    g = gamma_a(cat)
    p = psi(cat)
    k = 0
    for s in _sites(cat):
        for i in range(4):
            e0 = linear_sum(cat, term(cat, f"e[{i},0]", s, -1))
            total = total + QuadraticFunctional.product(e0, p[s * 4 + i])
            for a in SPATIAL:
                b0 = linear_sum(cat, term(cat, f"B[{i},0,{a}]", s, -1))
                total = total + QuadraticFunctional.product(b0, g[k])
                k += 1
    # ``product`` stores f*g as a symmetric matrix with 1/2 z^T M z = f g
    return total


# -- first-order Maxwell ----------------------------------------------------

def gauss(cat):
    """``Dbar_a P_A^a`` with ``P_A^a = p(A[a])``."""
    return [linear_sum(cat, [t for a in SPATIAL for t in backward(cat, f"p:A[{a}]", s, a)])
            for s in _sites(cat)]
