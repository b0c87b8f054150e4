"""Declarative first-order field theories.

A theory is a list of tensor fields plus two coefficient tables:

* ``kinetic`` rows ``(c, X, Y)`` encode the Lagrangian term ``c * X * dY/dt``;
* ``hamiltonian`` rows ``(c, X, S, Y)`` encode the Hamiltonian density term
  ``c * X(x) * (S Y)(x)`` where ``S`` is a difference stencil.  ``X`` and
  ``Y`` may be momenta (``p:<component>``), which lets the Hamiltonian be
  written on the primary surface exactly as it is usually presented.

Component labels look like ``e[0,3]`` or ``B[2,0,1]``.  Antisymmetric index
pairs are stored once with the smaller index first; a reversed reference
such as ``B[2,1,0]`` resolves to ``-B[2,0,1]``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from ..lattice import ETA3, MINKOWSKI


class ValidationError(ValueError):
    pass


class NonFirstOrderLagrangian(ValueError):
    pass


_LABEL_RE = re.compile(r"^(?:(?P<prefix>p|dot):)?(?P<name>[A-Za-z_][A-Za-z0-9_]*)\[(?P<idx>-?\d+(?:,-?\d+)*)\]$")
_STENCIL_TOKEN = re.compile(r"^(D|Db)([123])$")


@dataclass(frozen=True)
class IndexRange:
    name: str
    lo: int
    hi: int

    def values(self) -> range:
        return range(self.lo, self.hi + 1)


@dataclass(frozen=True)
class FieldDescriptor:
    """A tensor field with ordered components.

    Components enumerate the index ranges lexicographically; when
    ``antisym`` names a pair of index positions only tuples with the first
    index strictly below the second are kept.
    """

    name: str
    indices: tuple[IndexRange, ...]
    antisym: tuple[int, int] | None = None

    def __post_init__(self):
        if self.antisym is not None:
            i, j = self.antisym
            if not (0 <= i < j < len(self.indices)):
                raise ValidationError(f"field {self.name}: antisymmetric pair {self.antisym} out of range")
            a, b = self.indices[i], self.indices[j]
            if (a.lo, a.hi) != (b.lo, b.hi):
                raise ValidationError(
                    f"field {self.name}: antisymmetric indices {a.name},{b.name} have different ranges")

    @cached_property
    def components(self) -> tuple[tuple[int, ...], ...]:
        out = []
        for combo in itertools.product(*(r.values() for r in self.indices)):
            if self.antisym is not None:
                i, j = self.antisym
                if combo[i] >= combo[j]:
                    continue
            out.append(combo)
        return tuple(out)

    @property
    def multiplicity(self) -> int:
        """Ordered index tuples represented by one stored component."""
        return 2 if self.antisym is not None else 1

    def label(self, combo) -> str:
        return f"{self.name}[{','.join(str(c) for c in combo)}]"

    def canonical(self, combo: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
        """Map an index tuple to its stored component and a sign."""
        if len(combo) != len(self.indices):
            raise ValidationError(f"{self.label(combo)}: expected {len(self.indices)} indices")
        for v, r in zip(combo, self.indices):
            if v not in r.values():
                raise ValidationError(f"{self.label(combo)}: index {r.name}={v} outside {r.lo}..{r.hi}")
        if self.antisym is None:
            return combo, 1
        i, j = self.antisym
        if combo[i] == combo[j]:
            raise ValidationError(f"{self.label(combo)}: repeated antisymmetric index")
        if combo[i] < combo[j]:
            return combo, 1
        c = list(combo)
        c[i], c[j] = c[j], c[i]
        return tuple(c), -1


@dataclass(frozen=True)
class Ref:
    """A resolved component reference."""

    component: int
    sign: int
    kind: str  # "q", "p" or "dot"


@dataclass(frozen=True)
class KineticTerm:
    coefficient: Fraction
    coordinate: str
    velocity: str


@dataclass(frozen=True)
class HamiltonianTerm:
    coefficient: Fraction
    left: str
    stencil: str
    right: str


def parse_stencil(stencil: str) -> tuple[tuple[str, int], ...]:
    """``"id"`` or ``*``-joined tokens ``D1..D3`` (forward), ``Db1..Db3`` (backward)."""
    if stencil == "id":
        return ()
    ops = []
    for tok in stencil.split("*"):
        m = _STENCIL_TOKEN.match(tok.strip())
        if not m:
            raise ValidationError(f"unknown stencil token {tok!r} in {stencil!r}")
        ops.append(("forward" if m.group(1) == "D" else "backward", int(m.group(2))))
    return tuple(ops)


@dataclass(frozen=True)
class TheorySpec:
    name: str
    fields: tuple[FieldDescriptor, ...]
    kinetic: tuple[KineticTerm, ...]
    hamiltonian: tuple[HamiltonianTerm, ...]
    multipliers: tuple[str, ...] = field(default=())

    def __post_init__(self):
        names = [f.name for f in self.fields]
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            raise ValidationError(f"duplicate field name(s): {', '.join(sorted(dup))}")
        for k in self.kinetic:
            self.resolve(k.coordinate, allow=("q", "dot"))
            self.resolve(k.velocity, allow=("q",))
        for h in self.hamiltonian:
            self.resolve(h.left, allow=("q", "p"))
            self.resolve(h.right, allow=("q", "p"))
            parse_stencil(h.stencil)
        for m in self.multipliers:
            self.resolve(m, allow=("q",))

    @cached_property
    def _component_table(self):
        labels, index, fields = [], {}, []
        for f in self.fields:
            for combo in f.components:
                index[(f.name, combo)] = len(labels)
                labels.append(f.label(combo))
                fields.append(f)
        return labels, index, fields

    @property
    def component_labels(self) -> list[str]:
        return self._component_table[0]

    @property
    def config_dim(self) -> int:
        return len(self._component_table[0])

    def field_of(self, component: int) -> FieldDescriptor:
        return self._component_table[2][component]

    def multiplicity(self, component: int) -> int:
        return self.field_of(component).multiplicity

    def resolve(self, label: str, allow=("q", "p", "dot")) -> Ref:
        m = _LABEL_RE.match(label.strip())
        if not m:
            raise ValidationError(f"malformed component label {label!r}")
        kind = m.group("prefix") or "q"
        if kind not in allow:
            raise ValidationError(f"{label!r}: a {kind!r} reference is not allowed here")
        fields = {f.name: f for f in self.fields}
        f = fields.get(m.group("name"))
        if f is None:
            raise ValidationError(f"{label!r} references undeclared field {m.group('name')!r}")
        combo = tuple(int(x) for x in m.group("idx").split(","))
        combo, sign = f.canonical(combo)
        return Ref(self._component_table[1][(f.name, combo)], sign, kind)

    def kinetic_matrix(self) -> dict[int, dict[int, Fraction]]:
        """``K[velocity][coordinate]``: the momentum of ``velocity`` is ``sum K q``.

        Raises :class:`NonFirstOrderLagrangian` if a velocity multiplies a
        velocity.
        """
        K: dict[int, dict[int, Fraction]] = {}
        for t in self.kinetic:
            src = self.resolve(t.coordinate)
            vel = self.resolve(t.velocity)
            if src.kind == "dot":
                raise NonFirstOrderLagrangian(
                    f"term {t.coefficient} {t.coordinate} {t.velocity} is quadratic in velocities")
            row = K.setdefault(vel.component, {})
            row[src.component] = row.get(src.component, 0) + t.coefficient * src.sign * vel.sign
        return {v: {q: c for q, c in sorted(r.items()) if c} for v, r in sorted(K.items())}

    def multiplier_components(self) -> list[int]:
        return [self.resolve(m).component for m in self.multipliers]


def _frac(x) -> Fraction:
    return Fraction(x)


def paper_g0_theory() -> TheorySpec:
    """The G -> 0 limit of the first-order Einstein action in (e, B) variables.

    Lagrangian density (sums over all spatial a, b, c; internal indices
    lowered with diag(-1, 1, 1, 1))::

        eta^{abc} B_{Iab} de^I_c/dt - 1/2 eta^{abc} B_{I0a} (D_b e^I_c - D_c e^I_b) ...

    The Hamiltonian table carries the canonical density on the primary
    surface, ``-eta^{abc} B_{I0a} D_b e^I_c + Pi_I^a D_a e^I_0``.
    """
    I = IndexRange("I", 0, 3)
    e = FieldDescriptor("e", (I, IndexRange("mu", 0, 3)))
    B = FieldDescriptor("B", (I, IndexRange("alpha", 0, 3), IndexRange("beta", 0, 3)), antisym=(1, 2))
    kinetic = []
    for i in range(4):
        for c in (1, 2, 3):
            for (a, b, cc), s in ETA3:
                if cc != c:
                    continue
                kinetic.append(KineticTerm(_frac(s * MINKOWSKI[i]), f"B[{i},{a},{b}]", f"e[{i},{c}]"))
    ham = []
    for i in range(4):
        for (a, b, c), s in ETA3:
            ham.append(HamiltonianTerm(_frac(-s * MINKOWSKI[i]), f"B[{i},0,{a}]", f"D{b}", f"e[{i},{c}]"))
    for i in range(4):
        for a in (1, 2, 3):
            ham.append(HamiltonianTerm(_frac(1), f"p:e[{i},{a}]", f"D{a}", f"e[{i},0]"))
    mult = [f"e[{i},0]" for i in range(4)] + [f"B[{i},0,{a}]" for i in range(4) for a in (1, 2, 3)]
    return TheorySpec("paper_g0", (e, B), tuple(kinetic), tuple(ham), tuple(mult))


def maxwell_first_order() -> TheorySpec:
    """First-order electromagnetism with configuration (A_0, A_a, E^a).

    ``L = E^a dA_a/dt - H`` with
    ``H = 1/2 E^2 + 1/2 (curl A)^2 + E^a D_a A_0``.
    """
    A = FieldDescriptor("A", (IndexRange("mu", 0, 3),))
    E = FieldDescriptor("E", (IndexRange("a", 1, 3),))
    kinetic = tuple(KineticTerm(_frac(1), f"E[{a}]", f"A[{a}]") for a in (1, 2, 3))
    ham = [HamiltonianTerm(Fraction(1, 2), f"E[{a}]", "id", f"E[{a}]") for a in (1, 2, 3)]
    ham += [HamiltonianTerm(_frac(1), f"E[{a}]", f"D{a}", "A[0]") for a in (1, 2, 3)]
    # 1/2 (curl A)^2 summed by parts onto one factor
    for a in (1, 2, 3):
        for (a1, b, c), s1 in ETA3:
            if a1 != a:
                continue
            for (a2, d, e_), s2 in ETA3:
                if a2 != a:
                    continue
                ham.append(HamiltonianTerm(Fraction(-s1 * s2, 2), f"A[{c}]", f"Db{b}*D{d}", f"A[{e_}]"))
    return TheorySpec("maxwell1", (A, E), kinetic, tuple(ham), ("A[0]",))
