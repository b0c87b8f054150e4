from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirac_lattice.covariant import (GENERATORS, SliceData, UnknownGenerator, closure_check, current,
                                     current_divergence, generate_solution, is_solution, omega_on_slice,
                                     phase_to_slice, pure_gauge, random_off_shell, slice_to_phase,
                                     slice_values, smeared_flow)
from dirac_lattice.gauge import SpacetimeGaugeParams, random_grid
from dirac_lattice.lattice import LatticeSpec

LAT = LatticeSpec(2, 3)


def test_generated_solutions_solve():
    for seed in range(3):
        sol = generate_solution(seed, LAT)
        assert is_solution(sol.e, sol.B)
    assert not is_solution(*(lambda s: (s.e, s.B))(random_off_shell(1, LAT)))
    assert is_solution(*(lambda s: (s.e, s.B))(pure_gauge(SpacetimeGaugeParams.random(LAT, random.Random(2)))))


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(0, 10 ** 6), st.fractions(-3, 3, max_denominator=3))
def test_omega_bilinear_antisymmetric(s1, s2, c):
    d1, d2 = generate_solution(s1, LAT), generate_solution(s2, LAT)
    assert omega_on_slice(d1, d2, 0) == -omega_on_slice(d2, d1, 0)
    assert omega_on_slice(d1.scale(c), d2, 1) == c * omega_on_slice(d1, d2, 1)
    assert len(set(slice_values(d1, d2))) == 1


def test_current_divergence_on_and_off_shell():
    d1, d2 = generate_solution(1, LAT), generate_solution(2, LAT)
    assert all(v == 0 for v in current_divergence(d1, d2).ravel())
    off = random_off_shell(3, LAT)
    assert any(v != 0 for v in current_divergence(off, d2).ravel())
    assert current(d1, d2).shape == LAT.shape(spacetime=True) + (4,)


def test_pure_gauge_is_degenerate():
    g = pure_gauge(SpacetimeGaugeParams.random(LAT, random.Random(5)))
    d = generate_solution(6, LAT)
    assert slice_values(g, d) == [0, 0, 0]


def test_closure():
    tangents = [generate_solution(k, LAT) for k in range(3)]
    assert closure_check(tangents, random.Random(1)).passed


def test_slice_phase_round_trip(g0):
    cat = g0(1)[3].catalog
    rng = random.Random(4)
    z = [Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(cat.dim)]
    data = phase_to_slice(cat, z)
    assert isinstance(data, SliceData)
    back = slice_to_phase(cat, data)
    # slice data does not carry the momenta of B
    b_momenta = {k for k in range(cat.dim) if cat.label(k).startswith("p:B")}
    assert all(back[k] == (0 if k in b_momenta else z[k]) for k in range(cat.dim))
    assert phase_to_slice(cat, back) == data


@pytest.mark.parametrize("which", GENERATORS)
def test_smeared_flow_linear_in_test_field(g0, which):
    cat = g0(1)[3].catalog
    rng = random.Random(8)
    point = phase_to_slice(cat, [Fraction(rng.randint(-3, 3)) for _ in range(cat.dim)])
    tail = (4,) if which in ("gamma", "gamma_0") else (4, 3)
    test = random_grid(rng, cat.lattice.shape() + tail)
    once = smeared_flow(which, test, point, eps=2)
    twice = smeared_flow(which, test, smeared_flow(which, test, point))
    assert once == twice
    assert smeared_flow(which, test * 0, point) == point


def test_unknown_generator(g0):
    cat = g0(1)[3].catalog
    point = phase_to_slice(cat, [Fraction(0)] * cat.dim)
    with pytest.raises(UnknownGenerator):
        smeared_flow("delta", np.zeros((1, 1, 1, 4), dtype=object), point)
