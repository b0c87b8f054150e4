"""Seeded verification suites shared by the command line and the tests.

Each check returns a :class:`Check`: pass/fail, the number of trials, the
largest exact residual seen and, on failure, a description of the inputs
that produced it.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .covariant import (SliceData, closure_check, current_divergence_check, generate_solution,
                        phase_to_slice, pure_gauge, random_off_shell, slice_to_phase,
                        slice_values, smeared_flow)
from .dirac import families as fam
from .dirac.analysis import (ClassifiedConstraints, algebra_closure, dirac_bracket_matrix, dof_oracle)
from .dirac.core import bracket_matrix
from .exact_linalg import EchelonBasis, SparseMatrix, rank
from .gauge import (GaugeParams, SpacetimeGaugeParams, apply_gauge, castellani_generator,
                    check_action_invariance, diffeo_parameters, generator_flow, phase_gauge_variation,
                    random_grid, translation)
from .lattice import LatticeSpec
from .phase_space import LinearFunctional, linear_sum
from .theory.maps import (b_from_connection, connection_from_b, metric_from_gradient,
                          zeros)
from .theory.spec import paper_g0_theory


@dataclass(frozen=True)
class Check:
    passed: bool
    trials: int
    residual: Fraction
    detail: str = ""


def _ok(trials: int) -> Check:
    return Check(True, trials, Fraction(0))


def is_eb_theory(spec) -> bool:
    ref = paper_g0_theory()
    return spec.fields == ref.fields and spec.kinetic == ref.kinetic and spec.hamiltonian == ref.hamiltonian


def same_span(a: list[LinearFunctional], b: list[LinearFunctional]) -> bool:
    ea = EchelonBasis(f.coeffs for f in a)
    eb = EchelonBasis(f.coeffs for f in b)
    return ea.rank == eb.rank and all(ea.contains(f.coeffs) for f in b)


def random_functional(catalog, rng: random.Random, density: float = 0.1) -> LinearFunctional:
    coeffs = {}
    for k in range(catalog.dim):
        if rng.random() < density:
            coeffs[k] = Fraction(rng.randint(-9, 9), rng.randint(1, 6))
    return LinearFunctional(catalog, coeffs)


# -- dirac suite -----------------------------------------------------------------

def check_dof_oracle(cc: ClassifiedConstraints, dof_exact: int) -> Check:
    oracle = dof_oracle(cc)
    return Check(oracle == dof_exact, 1, Fraction(abs(oracle - dof_exact)),
                 "" if oracle == dof_exact else f"formula {dof_exact} vs oracle {oracle}")


def check_algebra(cc: ClassifiedConstraints) -> Check:
    table = algebra_closure(cc)
    bad = [(i, j) for (i, j) in table.entries if i < len(cc.first_class) or j < len(cc.first_class)]
    if bad:
        i, j = bad[0]
        return Check(False, len(table.entries), abs(table.entries[bad[0]]),
                     f"{{{table.labels[i]}, {table.labels[j]}}} != 0")
    return _ok(len(table.labels) ** 2)


def check_dirac_degeneracy(cc: ClassifiedConstraints, seed: int, trials: int = 100) -> Check:
    rng = random.Random(seed)
    gs = [random_functional(cc.catalog, rng) for _ in range(trials)]
    chis = [c.functional for c in cc.second_class]
    D = dirac_bracket_matrix(chis, gs, cc)
    if not D.is_zero():
        i, j, v = next(iter(D.entries()))
        return Check(False, trials, abs(v), f"{{{cc.second_class[i].label}, g_{j}}}_D = {v} (seed {seed})")
    return _ok(trials)


def check_family_tables(cc: ClassifiedConstraints) -> Check:
    """Engine output against the hand-written families of the (e, B) theory."""
    cat = cc.catalog
    secondaries = [c.functional for c in cc.constraints if c.generation == 2]
    if not same_span(secondaries, fam.secondary_family(cat)):
        return Check(False, 1, Fraction(1), "secondary constraints differ from psi, psi_a")
    if any(c.generation > 2 for c in cc.constraints):
        return Check(False, 1, Fraction(1), "algorithm produced a third generation")
    if not same_span([c.functional for c in cc.first_class], fam.first_class_family(cat)):
        return Check(False, 1, Fraction(1), "first-class span differs")
    if not same_span([c.functional for c in cc.second_class], fam.second_class_family(cat)):
        return Check(False, 1, Fraction(1), "second-class span differs")
    mult = cc.multipliers
    for s in range(cat.lattice.volume):
        for i in range(4):
            for a in (1, 2, 3):
                v = mult[f"phi:e[{i},{a}]@{s}"]
                if v is None or not v.is_zero():
                    return Check(False, 1, Fraction(1), f"multiplier of e[{i},{a}] at site {s} is not 0")
                for b in range(a + 1, 4):
                    if mult[f"phi:B[{i},{a},{b}]@{s}"] != fam.lambda_ab(cat, i, a, b, s):
                        return Check(False, 1, Fraction(1), f"multiplier of B[{i},{a},{b}] at site {s}")
    chi_a, chi_ab = fam.chi_a(cat), fam.chi_ab(cat)
    P = bracket_matrix(chi_a, chi_ab)
    pairs = [(a, b) for a in (1, 2, 3) for b in (1, 2, 3) if a < b]
    V = cat.lattice.volume
    for r in range(len(chi_a)):
        s, rem = divmod(r, 12)
        i, a = divmod(rem, 3)
        for c in range(len(chi_ab)):
            s2, rem2 = divmod(c, 12)
            j, k = divmod(rem2, 3)
            want = fam.second_class_bracket(i, a + 1, j, *pairs[k]) if s == s2 else 0
            if P[r, c] != want:
                return Check(False, 1, abs(P[r, c] - want), f"chi block entry ({r}, {c})")
    return _ok(V)


# -- gauge suite -----------------------------------------------------------------

def check_action_trials(lattice4: LatticeSpec, seed: int, trials: int = 20) -> Check:
    rng = random.Random(seed)
    worst = Fraction(0)
    for k in range(trials):
        fields = random_off_shell(rng.randrange(2 ** 31), lattice4)
        params = SpacetimeGaugeParams.random(lattice4, rng)
        r = check_action_invariance(fields.e, fields.B, params)
        if r:
            return Check(False, k + 1, abs(r), f"trial {k} (seed {seed}) gives S' - S = {r}")
    return Check(True, trials, worst)


def check_castellani(cc: ClassifiedConstraints, lattice4: LatticeSpec, seed: int, trials: int = 5) -> Check:
    """Generator flow against the written-out variation and the spacetime transformation."""
    rng = random.Random(seed)
    cat = cc.catalog
    shape = cat.lattice.shape()
    config = [k for k in range(cat.dim) if not cat.locate(k)[2]]
    for k in range(trials):
        p = GaugeParams.random(cat.lattice, rng)
        if generator_flow(castellani_generator(p, cc)) != phase_gauge_variation(cat, p):
            return Check(False, k + 1, Fraction(1), f"trial {k}: bracket flow differs from the variation")
        if lattice4.n == cat.lattice.n:
            sp = SpacetimeGaugeParams.random(lattice4, rng)
            sol = random_off_shell(rng.randrange(2 ** 31), lattice4)
            e2, B2 = apply_gauge(sol.e, sol.B, sp)
            t = rng.randrange(lattice4.t)
            flow = generator_flow(castellani_generator(sp.on_slice(t), cc))
            pi = zeros(shape + (4, 4))
            z0 = slice_to_phase(cat, SliceData(sol.e[t], sol.B[t], pi))
            z1 = slice_to_phase(cat, SliceData(e2[t], B2[t], pi))
            for i in config:
                if z1[i] - z0[i] != flow[i]:
                    return Check(False, k + 1, abs(z1[i] - z0[i] - flow[i]),
                                 f"trial {k}: {cat.label(i)} on slice {t}")
    return _ok(trials)


def check_diffeomorphisms(lattice4: LatticeSpec, seed: int, trials: int = 10) -> Check:
    rng = random.Random(seed)
    for k in range(trials):
        sol = generate_solution(rng.randrange(2 ** 31), lattice4)
        xi = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(4)]
        e2, B2 = apply_gauge(sol.e, sol.B, diffeo_parameters(xi, sol.e, sol.B))
        de, dB = translation(sol.e, sol.B, xi)
        r = [abs(v) for v in ((e2 - sol.e) - de).ravel()] + [abs(v) for v in ((B2 - sol.B) - dB).ravel()]
        if max(r):
            return Check(False, k + 1, max(r), f"trial {k}, xi = {xi}")
    return _ok(trials)


# -- symplectic suite ---------------------------------------------------------------

def _pairs(lattice4, rng, count):
    return [(generate_solution(rng.randrange(2 ** 31), lattice4),
             generate_solution(rng.randrange(2 ** 31), lattice4)) for _ in range(count)]


def check_slice_independence(lattice4, seed, trials=10) -> Check:
    rng = random.Random(seed)
    for k, (d1, d2) in enumerate(_pairs(lattice4, rng, trials)):
        vals = slice_values(d1, d2)
        if len(set(vals)) != 1:
            return Check(False, k + 1, max(vals) - min(vals), f"pair {k}: slice values {vals}")
    return _ok(trials)


def check_gauge_degeneracy(lattice4, seed, trials=10) -> Check:
    rng = random.Random(seed)
    for k in range(trials):
        g = pure_gauge(SpacetimeGaugeParams.random(lattice4, rng))
        d = generate_solution(rng.randrange(2 ** 31), lattice4)
        vals = slice_values(g, d)
        if any(vals):
            return Check(False, k + 1, max(abs(v) for v in vals), f"trial {k}: omega = {vals}")
    return _ok(trials)


def check_current_conservation(lattice4, seed, trials=10) -> Check:
    rng = random.Random(seed)
    for k, (d1, d2) in enumerate(_pairs(lattice4, rng, trials)):
        verdict, _ = current_divergence_check(d1, d2)
        if not verdict.passed:
            return Check(False, k + 1, verdict.residual, f"pair {k}")
    return _ok(trials)


def check_negative_control(lattice4, seed) -> Check:
    off = random_off_shell(seed, lattice4)
    on = generate_solution(seed + 1, lattice4)
    verdict, _ = current_divergence_check(off, on)
    # passes when the off-shell divergence is detected
    return Check(not verdict.passed, 1, Fraction(0), "" if not verdict.passed else "off-shell divergence vanished")


def check_closure(lattice4, seed) -> Check:
    rng = random.Random(seed)
    tangents = [generate_solution(rng.randrange(2 ** 31), lattice4) for _ in range(3)]
    tangents.append(pure_gauge(SpacetimeGaugeParams.random(lattice4, rng)))
    v = closure_check(tangents, rng)
    return Check(v.passed, len(tangents), v.residual, v.detail)


def check_smeared_flows(cc: ClassifiedConstraints, seed: int) -> Check:
    cat = cc.catalog
    rng = random.Random(seed)
    shape = cat.lattice.shape()
    point = phase_to_slice(cat, [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(cat.dim)])
    cases = (("gamma", (4,), fam.psi(cat)), ("gamma_a", (4, 3), fam.gamma_a(cat)),
             ("gamma_0", (4,), fam.pi0(cat)), ("gamma_0a", (4, 3), fam.pi0a(cat)))
    b_momenta = {k for k in range(cat.dim)
                 if cat.locate(k)[2] and cat.theory.component_labels[cat.locate(k)[1]].startswith("B")}
    for which, tail, funcs in cases:
        test = random_grid(rng, shape + tail)
        moved = smeared_flow(which, test, point)
        terms = []
        for k, f in enumerate(funcs):
            s, rem = divmod(k, int(np.prod(tail)))
            w = test[cat.lattice.site_coords(s) + np.unravel_index(rem, tail)]
            terms += [(i, w * v) for i, v in f.coeffs.items()]
        flow = generator_flow(linear_sum(cat, terms))
        z0, z1 = slice_to_phase(cat, point), slice_to_phase(cat, moved)
        for i in range(cat.dim):
            if i not in b_momenta and z1[i] - z0[i] != flow[i]:
                return Check(False, 1, abs(z1[i] - z0[i] - flow[i]), f"{which}: {cat.label(i)}")
    return _ok(len(cases))


def random_tetrad(rng, shape) -> np.ndarray:
    """Random tetrad grid, resampled site by site until non-degenerate."""
    e = random_grid(rng, shape + (4, 4))
    for site in np.ndindex(*shape):
        while rank(SparseMatrix.from_dense(e[site].tolist())) < 4:
            e[site] = random_grid(rng, (4, 4))
    return e


def check_map_round_trip(seed: int, trials: int = 10, shape=(2,)) -> Check:
    rng = random.Random(seed)
    for k in range(trials):
        e = random_tetrad(rng, shape)
        w = random_grid(rng, shape + (4, 4, 4))
        w = w - np.swapaxes(w, -1, -2)
        back = connection_from_b(e, b_from_connection(e, w))
        diff = [abs(v) for v in (back - w).ravel()]
        if max(diff):
            return Check(False, k + 1, max(diff), f"trial {k} (seed {seed})")
    return _ok(trials)


def check_flat_metric(lattice4: LatticeSpec) -> Check:
    shape = lattice4.shape(spacetime=True)
    df = zeros(shape + (4, 4))
    for i in range(4):
        df[..., i, i] = Fraction(1)
    g = metric_from_gradient(df)
    want = np.diag([Fraction(s) for s in (-1, 1, 1, 1)])
    bad = [abs(v) for v in (g - want).ravel()]
    return Check(max(bad) == 0, 1, max(bad))
