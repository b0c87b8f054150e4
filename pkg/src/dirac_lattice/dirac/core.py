"""The Dirac-Bergmann algorithm over exact rationals.

All constraints produced here are homogeneous linear functionals on the
coordinate catalog, so "weakly zero" is decided exactly by span membership.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .._parallel import parallel_map
from ..exact_linalg import EchelonBasis, SparseMatrix, nullspace_sparse, rref_pivots
from ..lattice import LatticeSpec, diff_matrix
from ..phase_space import (CoordinateCatalog, LinearFunctional, QuadraticFunctional, SymplecticMatrix,
                           poisson_lin_quad)
from ..theory.spec import NonFirstOrderLagrangian, TheorySpec, parse_stencil


class InconsistentSystem(ArithmeticError):
    pass


class NonIntegerDof(ArithmeticError):
    pass


@dataclass(frozen=True)
class Constraint:
    functional: LinearFunctional
    label: str
    family: str
    site: int | None
    generation: int
    klass: str = "unresolved"   # "first", "second" or "unresolved"

    @property
    def kind(self) -> str:
        return "primary" if self.generation == 1 else "secondary"

    def with_class(self, klass: str) -> "Constraint":
        return Constraint(self.functional, self.label, self.family, self.site, self.generation, klass)


@dataclass(frozen=True)
class MultiplierSolution:
    """Per primary constraint: a fixed functional of phase space, or ``None`` when free."""

    primaries: tuple[Constraint, ...]
    values: tuple[LinearFunctional | None, ...]

    @property
    def fixed(self) -> dict[str, LinearFunctional]:
        return {c.label: v for c, v in zip(self.primaries, self.values) if v is not None}

    @property
    def free(self) -> list[str]:
        return [c.label for c, v in zip(self.primaries, self.values) if v is None]

    def __getitem__(self, label: str) -> LinearFunctional | None:
        for c, v in zip(self.primaries, self.values):
            if c.label == label:
                return v
        raise KeyError(label)


# --------------------------------------------------------------------------
# building blocks

@lru_cache(maxsize=64)
def stencil_matrix(lattice: LatticeSpec, stencil: str) -> SparseMatrix:
    """Site-by-site matrix of a (possibly composite) difference stencil."""
    ops = parse_stencil(stencil)
    m = SparseMatrix.identity(lattice.volume)
    for orientation, direction in ops:
        m = m @ diff_matrix(lattice, direction, orientation)
    return m


def primary_constraints(spec: TheorySpec, lattice: LatticeSpec,
                        catalog: CoordinateCatalog | None = None) -> list[Constraint]:
    """One constraint per configuration component and site.

    The constraint for component ``n`` is ``(p_n - sum_m K_nm q_m) / mult_n``
    where ``mult_n`` is 2 for a stored antisymmetric pair, so that it equals
    the full-range momentum minus its kinetic coefficient.
    """
    catalog = catalog or CoordinateCatalog(spec, lattice)
    try:
        K = spec.kinetic_matrix()
    except NonFirstOrderLagrangian:
        raise
    labels = spec.component_labels
    out = []
    for s in range(lattice.volume):
        for n in range(spec.config_dim):
            inv = Fraction(1, spec.multiplicity(n))
            coeffs = {catalog.index(s, n, True): inv}
            for m, c in K.get(n, {}).items():
                coeffs[catalog.index(s, m)] = -c * inv
            out.append(Constraint(LinearFunctional(catalog, coeffs), f"phi:{labels[n]}@{s}",
                                  f"phi:{labels[n]}", s, 1))
    return out


def canonical_hamiltonian(spec: TheorySpec, lattice: LatticeSpec,
                          catalog: CoordinateCatalog | None = None) -> QuadraticFunctional:
    """Sum over sites of the theory's Hamiltonian table.

    A row ``(c, X, S, Y)`` contributes ``c * X(x) (S Y)(x)``; the symmetric
    matrix stores it in both ``(X, Y)`` and ``(Y, X)`` so that
    ``1/2 z^T M z`` reproduces the sum.
    """
    catalog = catalog or CoordinateCatalog(spec, lattice)
    M = SparseMatrix(catalog.dim, catalog.dim)
    for row in spec.hamiltonian:
        left = spec.resolve(row.left, allow=("q", "p"))
        right = spec.resolve(row.right, allow=("q", "p"))
        S = stencil_matrix(lattice, row.stencil)
        c = row.coefficient * left.sign * right.sign
        for x in range(lattice.volume):
            i = catalog.index(x, left.component, left.kind == "p")
            for y, v in S.row(x).items():
                j = catalog.index(y, right.component, right.kind == "p")
                M.add_to(i, j, c * v)
                M.add_to(j, i, c * v)
    return QuadraticFunctional(catalog, M)


def bracket_matrix(fs: list[LinearFunctional], gs: list[LinearFunctional]) -> SparseMatrix:
    """``P_ij = {f_i, g_j}`` assembled row by row."""
    if not fs or not gs:
        return SparseMatrix(len(fs), len(gs))
    catalog = fs[0].catalog
    omega = SymplecticMatrix(catalog)
    cols: dict[int, list[tuple[int, Fraction]]] = {}
    for j, g in enumerate(gs):
        for k, v in g.coeffs.items():
            cols.setdefault(k, []).append((j, v))

    def row(f):
        acc: dict[int, Fraction] = {}
        for k, w in omega.apply_left(f.coeffs).items():
            for j, v in cols.get(k, ()):
                acc[j] = acc.get(j, 0) + w * v
        return {j: v for j, v in sorted(acc.items()) if v}

    return SparseMatrix.from_rows(parallel_map(row, fs), len(gs))


def _basis_of(constraints) -> EchelonBasis:
    return EchelonBasis(c.functional.coeffs for c in constraints)


# --------------------------------------------------------------------------
# consistency loop

def _solve_multipliers(M: SparseMatrix, drifts: list[LinearFunctional], basis: EchelonBasis,
                       primaries: list[Constraint]) -> MultiplierSolution:
    """Solve ``d_i + sum_j M_ij lambda_j ~ 0`` modulo the constraint span.

    Free multipliers are those touched by a right null vector of ``M``;
    the remaining ones get the particular solution with free ones set to 0.
    """
    m = M.ncols
    catalog = drifts[0].catalog if drifts else None
    dim = catalog.dim if catalog else 0
    aug = []
    for i, d in enumerate(drifts):
        r = dict(M.row(i))
        for k, v in basis.reduce(d.coeffs).items():
            r[m + k] = v
        if d.constant:
            r[m + dim] = d.constant
        aug.append(r)
    red = rref_pivots(SparseMatrix.from_rows(aug, m + dim + 1))
    pivot_cols = {c for c in red if c < m}
    values: list[LinearFunctional | None] = [None] * m
    for c in sorted(pivot_cols):
        row = red[c]
        if any(k < m and k != c for k in row):
            continue       # coupled to a free multiplier
        coeffs = {k - m: -v for k, v in row.items() if m <= k < m + dim}
        values[c] = LinearFunctional(catalog, coeffs, -row.get(m + dim, 0))
    return MultiplierSolution(tuple(primaries), tuple(values))


def consistency_step(constraints: list[Constraint], h: QuadraticFunctional,
                     primaries: list[Constraint] | None = None,
                     basis: EchelonBasis | None = None) -> tuple[list[Constraint], MultiplierSolution]:
    """One pass of the consistency conditions.

    ``M_ij = {c_i, phi_j}`` pairs every current constraint with every primary
    (whose multipliers enter the primary Hamiltonian) and ``d_i = {c_i, H}``.
    Each left null vector ``w`` of ``M`` gives a multiplier-free combination
    ``w . d`` that must vanish; it becomes a new constraint unless it already
    lies in the span of the current constraints.
    """
    if primaries is None:
        primaries = [c for c in constraints if c.generation == 1]
    if basis is None:
        basis = _basis_of(constraints)
    M = bracket_matrix([c.functional for c in constraints], [p.functional for p in primaries])
    drifts = parallel_map(lambda c: poisson_lin_quad(c.functional, h), constraints)
    generation = max(c.generation for c in constraints) + 1
    new = []
    for w in nullspace_sparse(M.transpose()):
        # reduced-echelon null vectors carry a unit entry on their free column, the largest index
        src = constraints[max(w)]
        acc: dict[int, Fraction] = {}
        const = Fraction(0)
        for i, wi in w.items():
            for k, v in drifts[i].coeffs.items():
                acc[k] = acc.get(k, 0) + wi * v
            const += wi * drifts[i].constant
        if not basis.reduce(acc):
            if const:
                raise InconsistentSystem(
                    f"consistency of {src.label} requires {const} = 0")
            continue
        new.append(Constraint(LinearFunctional(h.catalog, acc, const), f"dot[{src.label}]",
                              f"dot[{src.family}]", src.site, generation))
    return new, _solve_multipliers(M, drifts, basis, primaries)


def run_algorithm(spec: TheorySpec, lattice: LatticeSpec, max_generations: int = 16):
    """Iterate :func:`consistency_step` to a fixed point.

    Returns ``(constraints, multipliers, hamiltonian)``.
    """
    catalog = CoordinateCatalog(spec, lattice)
    primaries = primary_constraints(spec, lattice, catalog)
    h = canonical_hamiltonian(spec, lattice, catalog)
    constraints = list(primaries)
    basis = _basis_of(constraints)
    for _ in range(max_generations):
        new, mult = consistency_step(constraints, h, primaries, basis)
        if not new:
            return constraints, mult, h
        constraints.extend(new)
        for c in new:
            basis.add(c.functional.coeffs)
    raise InconsistentSystem(f"no fixed point after {max_generations} generations")
