"""Acceptance criteria, one test per criterion, all exact.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary prints a
PASS/FAIL line for every criterion.
"""
from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest
import sympy

from dirac_lattice.cli import main
from dirac_lattice.dirac import consistency_step, count_dof, dof_oracle
from dirac_lattice.dirac import families as fam
from dirac_lattice.dirac.core import bracket_matrix
from dirac_lattice.exact_linalg import EchelonBasis, rank
from dirac_lattice.gauge import SpacetimeGaugeParams, apply_gauge, discrete_action
from dirac_lattice.lattice import LatticeSpec
from dirac_lattice.phase_space import LinearFunctional
from dirac_lattice import suites
from dirac_lattice.covariant import random_off_shell
from dirac_lattice.report import build_report, to_json
from dirac_lattice.theory import paper_g0_theory

from tests.oracles import (bracket_rank, brute_action, brute_gauge, dof_from_ranks, functional_rank,
                           to_mod_p, rank_mod_p)

SEED = 20240611


def _primaries(constraints):
    return [c for c in constraints if c.generation == 1]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_c01_primary_count(g0, n):
    constraints, _, _, _ = g0(n)
    V = n ** 3
    prim = _primaries(constraints)
    assert len(prim) == 40 * V
    # one primary per configuration component and site
    assert len({c.label for c in prim}) == 40 * V


@pytest.mark.parametrize("n", [1, 2, 3])
def test_c02_primary_bracket_rank(g0, n):
    constraints, _, _, cc = g0(n)
    V = n ** 3
    fs = [c.functional for c in _primaries(constraints)]
    P = bracket_matrix(fs, fs)
    assert rank(P) == 24 * V
    assert len(fs) - rank(P) == 16 * V
    # the primary brackets only couple a site to itself
    assert all(constraints[i].site == constraints[j].site for i, j, _ in P.entries())
    # independent rank of one site block
    block = [c.functional for c in _primaries(constraints) if c.site == 0]
    sub = bracket_matrix(block, block).to_dense()
    assert sympy.Matrix(sub).rank() == 24
    if n <= 2:
        assert bracket_rank(fs, cc.catalog) == 24 * V


@pytest.mark.parametrize("n", [1, 2, 3])
def test_c03_consistency_output(g0, n):
    constraints, mult, h, cc = g0(n)
    V = n ** 3
    secondaries = [c.functional for c in constraints if c.generation == 2]
    # on one site every difference vanishes and so do all secondaries
    assert len(secondaries) == (16 * V if n > 1 else 0)
    assert suites.same_span(secondaries, fam.secondary_family(cc.catalog))
    for s in range(V):
        for i in range(4):
            for a in (1, 2, 3):
                assert mult[f"phi:e[{i},{a}]@{s}"].is_zero()
                for b in range(a + 1, 4):
                    assert mult[f"phi:B[{i},{a},{b}]@{s}"] == fam.lambda_ab(cc.catalog, i, a, b, s)
    new, _ = consistency_step(constraints, h, _primaries(constraints))
    assert new == []
    assert max(c.generation for c in constraints) == (2 if n > 1 else 1)


def test_c04_single_site_degenerates(g0):
    _, _, _, cc = g0(1)
    assert all(f.is_zero() for f in fam.secondary_family(cc.catalog))
    assert (len(cc.second_class), len(cc.first_class)) == (24, 16)
    assert suites.same_span([c.functional for c in cc.first_class], fam.first_class_family(cc.catalog))


@pytest.mark.parametrize("n", [2, 3])
def test_c04_classification(g0, n):
    _, _, _, cc = g0(n)
    V = n ** 3
    assert len(cc.second_class) == 24 * V
    assert len(cc.first_class) == 32 * V
    assert suites.same_span([c.functional for c in cc.first_class], fam.first_class_family(cc.catalog))
    assert suites.same_span([c.functional for c in cc.second_class], fam.second_class_family(cc.catalog))


def _divergence_relations(cat):
    """``D_a gamma_I^a = 0`` per site, as weights on ``first_class_family`` rows.

    Both pieces of ``gamma_I^a`` carry a forward difference contracted with an
    antisymmetric symbol, and ``D_a D_b`` is symmetric.
    """
    V = cat.lattice.volume
    offset = 4 * V + 12 * V + 4 * V  # pi0, pi0a, psi come first
    rels = []
    for s in range(V):
        for i in range(4):
            w: dict[int, Fraction] = {}
            for a in (1, 2, 3):
                coords = list(cat.lattice.site_coords(s))
                coords[a - 1] += 1
                ahead = cat.lattice.site_index(coords)
                k0 = offset + ahead * 12 + i * 3 + (a - 1)
                k1 = offset + s * 12 + i * 3 + (a - 1)
                w[k0] = w.get(k0, 0) + 1
                w[k1] = w.get(k1, 0) - 1
            rels.append({k: v for k, v in w.items() if v})
    return rels


def _global_relations(cat):
    """Sums over the lattice of ``psi_I`` and of ``gamma_I^a``."""
    V = cat.lattice.volume
    rels = []
    for i in range(4):
        rels.append({16 * V + s * 4 + i: Fraction(1) for s in range(V)})
    for i in range(4):
        for a in range(3):
            rels.append({20 * V + s * 12 + i * 3 + a: Fraction(1) for s in range(V)})
    return rels


def _apply(rel, funcs, cat):
    acc = LinearFunctional(cat)
    for k, w in rel.items():
        acc = acc + funcs[k] * w
    return acc


@pytest.mark.parametrize("n", [2, 3])
def test_c05_reducibility(g0, n):
    _, _, _, cc = g0(n)
    cat = cc.catalog
    V = n ** 3
    fam_first = fam.first_class_family(cat)
    div = _divergence_relations(cat)
    assert all(_apply(r, fam_first, cat).is_zero() for r in div)
    glob = _global_relations(cat)
    assert all(_apply(r, fam_first, cat).is_zero() for r in glob)
    relations = EchelonBasis(div + glob)
    # the divergence relations lose one combination per internal index (their lattice sum)
    assert EchelonBasis(div).rank == 4 * V - 4
    assert relations.rank == 4 * V + 12
    # family and engine sets span the same space and have the same size, so
    # their dependency spaces have equal dimension
    assert len(fam_first) == len(cc.first_class)
    assert len(cc.reducibility_basis) == relations.rank
    # the hand relations exhaust the dependencies of the family rows
    assert len(fam_first) - rank_from(fam_first, cat) == relations.rank
    for r in cc.reducibility_basis:
        assert _apply(r, [c.functional for c in cc.first_class], cat).is_zero()


def rank_from(funcs, cat) -> int:
    if cat.lattice.n <= 2:
        return functional_rank(funcs, cat.dim)
    return EchelonBasis(f.coeffs for f in funcs).rank


@pytest.mark.parametrize("n", [1, 2])
def test_c05_reducibility_oracle(g0, n):
    _, _, _, cc = g0(n)
    fs = [c.functional for c in cc.first_class]
    assert len(cc.reducibility_basis) == len(fs) - functional_rank(fs, cc.catalog.dim)


@pytest.mark.parametrize("n", [1, 2])
def test_c06_dof(g0, n):
    constraints, _, _, cc = g0(n)
    dof = count_dof(cc)
    assert dof.dof_exact == dof_from_ranks(constraints, cc.catalog)
    assert dof.dof_exact == dof_oracle(cc)
    if n == 1:
        assert dof.dof_exact == 12


def test_c06_dof_density(g0):
    reports = {}
    for n in (2, 3):
        reports[n] = count_dof(g0(n)[3])
    split = count_dof(g0(2)[3], reports[3])
    assert split.dof_bulk_density == 0
    assert reports[2].dof_exact == reports[3].dof_exact == 12


@pytest.mark.parametrize("n", [1, 2])
def test_c07_dirac_bracket(g0, n):
    cc = g0(n)[3]
    check = suites.check_dirac_degeneracy(cc, SEED, trials=100)
    assert check.passed, check.detail
    assert check.trials == 100


@pytest.mark.parametrize("n", [1, 2])
def test_c08_constraint_algebra(g0, n):
    cc = g0(n)[3]
    cat = cc.catalog
    assert suites.check_algebra(cc).passed
    first = fam.first_class_family(cat)
    everything = first + fam.chi_a(cat) + fam.chi_ab(cat)
    assert bracket_matrix(first, everything).is_zero()
    assert bracket_matrix(fam.chi_a(cat), fam.chi_a(cat)).is_zero()
    assert bracket_matrix(fam.chi_ab(cat), fam.chi_ab(cat)).is_zero()
    check = suites.check_family_tables(cc)
    assert check.passed, check.detail


def test_c09_action_invariance_brute_force():
    lattice = LatticeSpec(2, 2)
    rng = random.Random(SEED)
    for _ in range(20):
        fields = random_off_shell(rng.randrange(2 ** 31), lattice)
        params = SpacetimeGaugeParams.random(lattice, rng)
        e2, B2 = apply_gauge(fields.e, fields.B, params)
        e3, B3 = brute_gauge(fields.e, fields.B, params.lam, params.lam_mu)
        assert (e2 == e3).all() and (B2 == B3).all()
        s0 = brute_action(fields.e, fields.B)
        assert s0 == discrete_action(fields.e, fields.B)
        assert brute_action(e3, B3) - s0 == 0


def test_c09_castellani_flow(g0):
    cc = g0(2)[3]
    check = suites.check_castellani(cc, LatticeSpec(2, 2), SEED)
    assert check.passed, check.detail
    assert suites.check_action_trials(LatticeSpec(2, 2), SEED, trials=20).passed


def test_c10_diffeomorphisms():
    check = suites.check_diffeomorphisms(LatticeSpec(2, 2), SEED, trials=10)
    assert check.passed, check.detail
    assert check.trials == 10


def test_c11_symplectic_suite():
    lattice = LatticeSpec(2, 3)
    for check in (suites.check_slice_independence(lattice, SEED, trials=10),
                  suites.check_gauge_degeneracy(lattice, SEED, trials=10),
                  suites.check_current_conservation(lattice, SEED, trials=10),
                  suites.check_negative_control(lattice, SEED)):
        assert check.passed, check.detail


@pytest.mark.parametrize("n", [1, 2])
def test_c12_smeared_flows(g0, n):
    check = suites.check_smeared_flows(g0(n)[3], SEED)
    assert check.passed, check.detail


@pytest.mark.parametrize("n", [2, 3])
def test_c13_maxwell(maxwell, n):
    constraints, _, _, cc = maxwell(n)
    V = n ** 3
    assert len(cc.second_class) == 6 * V
    assert len(cc.first_class) == 2 * V
    assert len(cc.reducibility_basis) == 1
    (rel,) = cc.reducibility_basis
    combo = LinearFunctional(cc.catalog)
    for k, w in rel.items():
        combo = combo + cc.first_class[k].functional * w
    assert combo.is_zero()
    # the dependency is the lattice sum of the Gauss law: it only touches Gauss-law rows
    gauss = EchelonBasis(f.coeffs for f in fam.gauss(cc.catalog))
    assert all(gauss.contains(cc.first_class[k].functional.coeffs) for k in rel)
    dof = count_dof(cc)
    assert dof.dof_exact == 2 * V + 1
    if n <= 2:
        assert dof.dof_exact == dof_from_ranks(constraints, cc.catalog)


def test_c13_maxwell_density(maxwell):
    split = count_dof(maxwell(2)[3], count_dof(maxwell(3)[3]))
    assert split.dof_bulk_density == 2
    assert split.topological_modes == 1


def test_c14_map_round_trip():
    check = suites.check_map_round_trip(SEED, trials=10)
    assert check.passed, check.detail
    assert suites.check_flat_metric(LatticeSpec(2, 2)).passed


def _reports(n_threads):
    spec = paper_g0_theory()
    out = [to_json(build_report(spec, 2, 2, "verify", "all", SEED, n_threads)),
           to_json(build_report(spec, 3, 2, "analyze", None, 0, n_threads))]
    return out


def test_c15_determinism(tmp_path):
    base = _reports(1)
    for k in (2, 8):
        assert _reports(k) == base
    outs = []
    for k in (1, 2, 8):
        path = tmp_path / f"maxwell{k}.json"
        assert main(["analyze", "--theory", "maxwell1", "--n", "2", "--threads", str(k), "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_oracle_rank_helper_matches_sympy():
    rng = np.random.default_rng(3)
    for _ in range(5):
        m = rng.integers(-2, 3, size=(7, 9))
        m[3] = m[1] + 2 * m[2]
        dense = [[Fraction(int(v)) for v in row] for row in m]
        assert rank_mod_p(to_mod_p(dense, 9)) == sympy.Matrix(m.tolist()).rank()
