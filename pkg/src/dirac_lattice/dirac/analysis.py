"""Classification, reducibility, counting and the brackets built on them."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from ..exact_linalg import SparseMatrix, independent_rows, invert, nullspace_sparse, rank
from ..phase_space import (CoordinateCatalog, LinearFunctional, QuadraticFunctional, SymplecticMatrix,
                           poisson)
from .core import (Constraint, MultiplierSolution, NonIntegerDof, bracket_matrix, canonical_hamiltonian,
                   run_algorithm)


def _combine(constraints, weights: dict[int, Fraction], catalog) -> LinearFunctional:
    acc: dict[int, Fraction] = {}
    for i, w in weights.items():
        for k, v in constraints[i].functional.coeffs.items():
            acc[k] = acc.get(k, 0) + w * v
    return LinearFunctional(catalog, acc)


@dataclass(frozen=True)
class ClassifiedConstraints:
    catalog: CoordinateCatalog
    constraints: tuple[Constraint, ...]
    first_class: tuple[Constraint, ...]
    second_class: tuple[Constraint, ...]
    reducibility_basis: tuple[dict[int, Fraction], ...]
    multipliers: MultiplierSolution | None
    bracket_rank: int

    @cached_property
    def second_class_matrix(self) -> SparseMatrix:
        fs = [c.functional for c in self.second_class]
        return bracket_matrix(fs, fs)

    @cached_property
    def second_class_inverse(self) -> SparseMatrix:
        return invert(self.second_class_matrix)

    @property
    def n_first_class_independent(self) -> int:
        return len(self.first_class) - len(self.reducibility_basis)


def classify(constraints: list[Constraint], multipliers: MultiplierSolution | None = None,
             catalog: CoordinateCatalog | None = None) -> ClassifiedConstraints:
    """Split the final constraint set into first and second class.

    The second-class set is the in-order greedy independent subset of rows
    of the full bracket matrix ``P``; its bracket block is invertible because
    a principal submatrix of an antisymmetric matrix on a maximal independent
    row set has full rank.  First-class functionals are the combinations
    given by the reduced-echelon right null vectors of ``P``, each labelled
    after the constraint sitting on its free column.
    """
    catalog = catalog or constraints[0].functional.catalog
    fs = [c.functional for c in constraints]
    P = bracket_matrix(fs, fs)
    second_idx = independent_rows(P)
    second = tuple(constraints[i].with_class("second") for i in second_idx)
    first = []
    for v in nullspace_sparse(P):
        src = constraints[max(v)]
        first.append(Constraint(_combine(constraints, v, catalog), f"gamma[{src.label}]",
                                f"gamma[{src.family}]", src.site, src.generation, "first"))
    red = reducibility(first)
    return ClassifiedConstraints(catalog, tuple(constraints), tuple(first), second, tuple(red),
                                 multipliers, len(second_idx))


def reducibility(first_class: list[Constraint]) -> list[dict[int, Fraction]]:
    """Basis of linear dependencies ``sum_k r_k gamma_k = 0`` among the rows."""
    if not first_class:
        return []
    dim = first_class[0].functional.catalog.dim
    F = SparseMatrix.from_rows([c.functional.coeffs for c in first_class], dim)
    return nullspace_sparse(F.transpose())


def analyze(spec, lattice) -> ClassifiedConstraints:
    constraints, mult, _ = run_algorithm(spec, lattice)
    return classify(constraints, mult)


# --------------------------------------------------------------------------
# degrees of freedom

@dataclass(frozen=True)
class DofReport:
    volume: int
    n_vars: int
    n_first_class_raw: int
    n_first_class_independent: int
    n_second_class: int
    dof_exact: int
    dof_bulk_density: Fraction | None = None
    topological_modes: int | Fraction | None = None


def count_dof(cc: ClassifiedConstraints, reference: DofReport | None = None) -> DofReport:
    """``(n_vars - 2 F_indep - S) / 2`` plus an optional exact ``a V + b`` split.

    ``reference`` is the report for the same theory on a lattice of a
    different volume.
    """
    n_vars = cc.catalog.dim
    f_raw = len(cc.first_class)
    f_ind = cc.n_first_class_independent
    s = len(cc.second_class)
    num = n_vars - 2 * f_ind - s
    if num % 2:
        raise NonIntegerDof(f"(n_vars - 2F - S) = {num} is odd")
    dof = num // 2
    V = cc.catalog.lattice.volume
    density = topo = None
    if reference is not None:
        if reference.volume == V:
            raise ValueError("the reference report must come from a different lattice volume")
        density = Fraction(dof - reference.dof_exact, V - reference.volume)
        b = dof - density * V
        topo = int(b) if b.denominator == 1 else b
    return DofReport(V, n_vars, f_raw, f_ind, s, dof, density, topo)


def dof_oracle(cc: ClassifiedConstraints) -> int:
    """Degrees of freedom from the geometry of the constraint surface.

    The surface is the kernel of the stacked constraint rows ``C``; the gauge
    orbits through it are spanned by the flows ``Omega C^T w`` of the
    combinations ``w`` that have zero bracket with every constraint.  The
    physical count is half the difference of the two dimensions.
    """
    fs = [c.functional for c in cc.constraints]
    dim = cc.catalog.dim
    C = SparseMatrix.from_rows([f.coeffs for f in fs], dim)
    surface = dim - rank(C)
    P = bracket_matrix(fs, fs)
    omega = SymplecticMatrix(cc.catalog)
    flows = []
    for w in nullspace_sparse(P):
        acc: dict[int, Fraction] = {}
        for i, wi in w.items():
            for k, v in fs[i].coeffs.items():
                acc[k] = acc.get(k, 0) + wi * v
        flows.append(omega.apply(acc))
    gauge = rank(SparseMatrix.from_rows(flows, dim)) if flows else 0
    diff = surface - gauge
    if diff % 2:
        raise NonIntegerDof(f"surface minus gauge directions = {diff} is odd")
    return diff // 2


# --------------------------------------------------------------------------
# brackets on the classified system

def dirac_bracket(f: LinearFunctional, g: LinearFunctional, cc: ClassifiedConstraints) -> Fraction:
    """``{f, g} - {f, chi_a} (C^-1)^{ab} {chi_b, g}`` with ``C_ab = {chi_a, chi_b}``."""
    chis = [c.functional for c in cc.second_class]
    left = {a: v for a, chi in enumerate(chis) if (v := poisson(f, chi))}
    if not left:
        return poisson(f, g)
    right = {b: v for b, chi in enumerate(chis) if (v := poisson(chi, g))}
    inv = cc.second_class_inverse
    corr = Fraction(0)
    for a, fa in left.items():
        for b, cab in inv.row(a).items():
            gb = right.get(b)
            if gb:
                corr += fa * cab * gb
    return poisson(f, g) - corr


@dataclass(frozen=True)
class ExtendedSystem:
    """``H_E = H + sum_k u_k gamma_k`` and the evolution of every coordinate.

    ``eom[i]`` is ``(drift, slots)``: ``dz_i/dt = drift(z) + sum_k slots[k] u_k``.
    """

    hamiltonian: QuadraticFunctional
    slots: tuple[str, ...]
    slot_functionals: tuple[LinearFunctional, ...]
    eom: tuple[tuple[LinearFunctional, dict[int, Fraction]], ...]

    def rhs(self, label_or_index) -> tuple[LinearFunctional, dict[str, Fraction]]:
        cat = self.hamiltonian.catalog
        i = label_or_index if isinstance(label_or_index, int) else \
            next(k for k in range(cat.dim) if cat.label(k) == label_or_index)
        drift, slots = self.eom[i]
        return drift, {self.slots[k]: v for k, v in slots.items()}


def total_hamiltonian(cc: ClassifiedConstraints, h: QuadraticFunctional) -> QuadraticFunctional:
    """``H_c + sum_j lambda_j phi_j`` over the fixed multipliers."""
    mult = cc.multipliers
    total = h
    if mult is None:
        return total
    for prim, lam in zip(mult.primaries, mult.values):
        if lam is None or lam.is_zero():
            continue
        total = total + QuadraticFunctional.product(lam, prim.functional)
    return total


def extended_system(spec, lattice, cc: ClassifiedConstraints,
                    h: QuadraticFunctional | None = None) -> ExtendedSystem:
    h = h if h is not None else canonical_hamiltonian(spec, lattice, cc.catalog)
    H = total_hamiltonian(cc, h)
    cat = cc.catalog
    omega = SymplecticMatrix(cat)
    M = H.quadratic
    slot_flows = [omega.apply(g.functional.coeffs) for g in cc.first_class]
    by_coord: dict[int, dict[int, Fraction]] = {}
    for k, flow in enumerate(slot_flows):
        for i, v in flow.items():
            by_coord.setdefault(i, {})[k] = v
    eom = []
    for i in range(cat.dim):
        # {z_i, H} = (Omega (M z + b))_i
        j = cat.partner(i)
        sign = 1 if not cat.locate(i)[2] else -1
        drift = LinearFunctional(cat, {k: sign * v for k, v in M.row(j).items()},
                                 sign * H.linear.coeffs.get(j, 0))
        eom.append((drift, dict(sorted(by_coord.get(i, {}).items()))))
    return ExtendedSystem(H, tuple(f"u[{g.label}]" for g in cc.first_class),
                          tuple(g.functional for g in cc.first_class), tuple(eom))


@dataclass(frozen=True)
class AlgebraTable:
    """Nonzero brackets among the final constraints, keyed by index pairs."""

    labels: tuple[str, ...]
    classes: tuple[str, ...]
    entries: dict[tuple[int, int], Fraction]
    closed: bool
    all_constant: bool

    def nonzero_pairs(self) -> list[tuple[str, str, Fraction]]:
        return [(self.labels[i], self.labels[j], v) for (i, j), v in sorted(self.entries.items())]


def algebra_closure(cc: ClassifiedConstraints) -> AlgebraTable:
    """Brackets among the classified constraints (first class, then second class).

    For linear constraints every bracket is a constant, and a constant is
    weakly zero only if it vanishes.  The algebra is closed when every
    bracket involving a first-class constraint is zero.
    """
    cs = list(cc.first_class) + list(cc.second_class)
    fs = [c.functional for c in cs]
    P = bracket_matrix(fs, fs)
    entries = {(i, j): v for i, j, v in P.entries()}
    nf = len(cc.first_class)
    closed = all(i >= nf and j >= nf for (i, j) in entries)
    return AlgebraTable(tuple(c.label for c in cs), tuple(c.klass for c in cs), entries, closed, True)


def dirac_bracket_matrix(fs: list[LinearFunctional], gs: list[LinearFunctional],
                         cc: ClassifiedConstraints) -> SparseMatrix:
    """All ``{f_i, g_j}_D`` at once: ``P_fg - P_fc C^-1 P_cg``."""
    chis = [c.functional for c in cc.second_class]
    base = bracket_matrix(fs, gs)
    if not chis:
        return base
    corr = bracket_matrix(fs, chis) @ cc.second_class_inverse @ bracket_matrix(chis, gs)
    return base - corr
