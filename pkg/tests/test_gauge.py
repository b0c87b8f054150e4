from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest

from dirac_lattice.covariant import eom_e_residual, generate_solution, random_off_shell
from dirac_lattice.gauge import (GaugeParams, SpacetimeGaugeParams, TheoryMismatch, apply_gauge, apply_gauge_phase,
                                 castellani_generator, check_action_invariance, diffeo_parameters, discrete_action,
                                 generator_flow, phase_gauge_variation, translation)
from dirac_lattice.lattice import LatticeSpec

from tests.oracles import brute_action

L4 = LatticeSpec(2, 2)


def test_action_matches_brute_force_on_longer_time():
    lat = LatticeSpec(2, 3)
    f = random_off_shell(9, lat)
    assert discrete_action(f.e, f.B) == brute_action(f.e, f.B)


def test_action_of_solution_is_quadratic_form():
    sol = generate_solution(4, L4)
    # the action is bilinear; scaling both fields scales it by the square
    assert discrete_action(sol.e * 2, sol.B * 3) == 6 * discrete_action(sol.e, sol.B)


@pytest.mark.parametrize("seed", range(3))
def test_invariance(seed):
    rng = random.Random(seed)
    f = random_off_shell(seed, L4)
    assert check_action_invariance(f.e, f.B, SpacetimeGaugeParams.random(L4, rng)) == 0


def test_non_gauge_change_moves_action():
    f = random_off_shell(1, L4)
    e2 = f.e.copy()
    e2[0, 0, 0, 0, 1, 2] += 1
    assert discrete_action(e2, f.B) != discrete_action(f.e, f.B)


def test_castellani_generator(g0):
    cc = g0(2)[3]
    rng = random.Random(3)
    p = GaugeParams.random(LatticeSpec(2), rng)
    flow = generator_flow(castellani_generator(p, cc))
    assert flow == phase_gauge_variation(cc.catalog, p)
    z = [Fraction(rng.randint(-3, 3)) for _ in range(cc.catalog.dim)]
    moved = apply_gauge_phase(z, p, cc.catalog)
    assert [b - a for a, b in zip(z, moved)] == flow
    zero = castellani_generator(GaugeParams.zero(LatticeSpec(2)), cc)
    assert zero.is_zero()


def test_generator_rejects_other_theories(maxwell):
    cc = maxwell(1)[3]
    with pytest.raises(TheoryMismatch):
        castellani_generator(GaugeParams.zero(LatticeSpec(1)), cc)


def test_slice_dictionary(g0):
    """Restricting a spacetime transformation to one slice matches the generator flow."""
    from dirac_lattice.suites import check_castellani
    assert check_castellani(g0(2)[3], L4, seed=11, trials=2).passed


def test_off_shell_diffeomorphism_mismatch():
    off = random_off_shell(4, L4)
    xi = [Fraction(1), Fraction(-2, 3), Fraction(1, 2), Fraction(3)]
    e2, _ = apply_gauge(off.e, off.B, diffeo_parameters(xi, off.e, off.B))
    de, _ = translation(off.e, off.B, xi)
    R = eom_e_residual(off.e)
    mismatch = sum(xi[r] * R[..., :, r] for r in range(4))
    assert np.all((e2 - off.e) - de == mismatch)
    assert np.any(mismatch != 0)


def test_mismatched_shapes():
    f = random_off_shell(0, L4)
    other = SpacetimeGaugeParams.random(LatticeSpec(1, 2), random.Random(0))
    with pytest.raises(ValueError):
        apply_gauge(f.e, f.B, other)
    with pytest.raises(ValueError):
        diffeo_parameters([1, 2, 3], f.e, f.B)
