from __future__ import annotations

from fractions import Fraction

import pytest

from dirac_lattice.dirac import (Constraint, InconsistentSystem, NonIntegerDof, algebra_closure, consistency_step,
                                 count_dof, dirac_bracket, extended_system, primary_constraints,
                                 total_hamiltonian)
from dirac_lattice.dirac import families as fam
from dirac_lattice.exact_linalg import SparseMatrix
from dirac_lattice.lattice import LatticeSpec
from dirac_lattice.suites import same_span
from dirac_lattice.phase_space import CoordinateCatalog, LinearFunctional, QuadraticFunctional
from dirac_lattice.theory import loads, paper_g0_theory


def _coord(cat, label, site=0):
    flat, sign = cat.ref_index(label, site)
    return LinearFunctional.coordinate(cat, flat, sign)


def test_primary_labels_and_normalisation():
    cat = CoordinateCatalog(paper_g0_theory(), LatticeSpec(1))
    prim = primary_constraints(paper_g0_theory(), LatticeSpec(1), cat)
    by_label = {c.label: c for c in prim}
    assert set(by_label) >= {"phi:e[0,0]@0", "phi:B[3,2,3]@0"}
    # a multiplier field has a bare momentum constraint
    assert by_label["phi:e[0,0]@0"].functional == _coord(cat, "p:e[0,0]")


def test_canonical_hamiltonian_matches_hand_form(g0):
    _, _, h, cc = g0(2)
    assert total_hamiltonian(cc, h) == fam.expected_hamiltonian(cc.catalog)


def test_multipliers_fixed_and_free(g0):
    _, mult, _, _ = g0(2)
    assert mult["phi:e[1,2]@3"].is_zero()
    assert "phi:e[1,0]@3" in mult.free
    assert "phi:B[1,0,2]@3" in mult.free
    assert len(mult.free) == 16 * 8


def test_algebra_closed(g0):
    table = algebra_closure(g0(2)[3])
    assert table.closed and table.all_constant
    assert all(table.classes[i] == "second" for (i, _) in table.entries)


def test_dirac_brackets(g0):
    cc = g0(2)[3]
    cat = cc.catalog
    assert dirac_bracket(_coord(cat, "e[2,1]"), _coord(cat, "p:e[2,1]"), cc) == 1
    assert dirac_bracket(_coord(cat, "B[2,2,3]"), _coord(cat, "e[2,1]"), cc) == Fraction(-1, 2)
    # the internal metric flips the sign for I = 0
    assert dirac_bracket(_coord(cat, "B[0,2,3]"), _coord(cat, "e[0,1]"), cc) == Fraction(1, 2)
    for chi in cc.second_class[:20]:
        assert dirac_bracket(chi.functional, _coord(cat, "e[3,2]", 5), cc) == 0


def test_extended_evolution(g0):
    th = paper_g0_theory()
    cc = g0(2)[3]
    cat = cc.catalog
    es = extended_system(th, LatticeSpec(2), cc)
    drift, slots = es.rhs("e[1,0]@(0,0,0)")
    assert drift.is_zero()
    assert list(slots.values()) == [1]
    drift, slots = es.rhs("p:e[1,0]@(0,0,0)")
    assert drift == fam.psi(cat)[1]
    assert not slots


def test_inconsistent_system_detected():
    th = loads("theory x\n[fields]\nq i=1..1\n")
    cat = CoordinateCatalog(th, LatticeSpec(1))
    phi = Constraint(_coord(cat, "p:q[1]"), "phi", "phi", 0, 1)
    h = QuadraticFunctional(cat, SparseMatrix(cat.dim, cat.dim), _coord(cat, "q[1]"))
    with pytest.raises(InconsistentSystem):
        consistency_step([phi], h, [phi])


def test_maxwell_gauss_law(maxwell):
    constraints, mult, _, cc = maxwell(2)
    primaries = [c.functional for c in constraints if c.generation == 1]
    secondaries = [c.functional for c in constraints if c.generation == 2]
    # the engine may write the Gauss law with E in place of p_A; they agree modulo the primaries
    assert len(secondaries) == 8
    assert same_span(primaries + secondaries, primaries + fam.gauss(cc.catalog))
    assert mult["phi:A[0]@0"] is None


def test_odd_count_rejected(maxwell):
    cc = maxwell(2)[3]
    broken = type(cc)(cc.catalog, cc.constraints, cc.first_class, cc.second_class[:-1], cc.reducibility_basis,
                      cc.multipliers, cc.bracket_rank)
    with pytest.raises(NonIntegerDof):
        count_dof(broken)


def test_reference_must_differ(maxwell):
    cc = maxwell(2)[3]
    with pytest.raises(ValueError):
        count_dof(cc, count_dof(cc))

