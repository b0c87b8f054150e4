"""Canonical coordinates, the symplectic matrix and Poisson brackets.

Coordinate layout: for each spatial site (flat C-order index ``s``) the
theory's ``n`` configuration components come first, followed by their ``n``
momenta, so

    flat(s, k, momentum) = 2 n s + k + (n if momentum else 0).

The bracket is ``{q_k(x), p_k(y)} = delta_xy`` for every stored component.
Antisymmetric pairs are stored once, so ``{B_12, p(B_12)} = 1``; the
full-range momentum ``Pi^{12} = -Pi^{21}`` equals ``p(B_12) / 2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

from .exact_linalg import SparseMatrix, as_rational
from .lattice import LatticeSpec
from .theory.spec import TheorySpec


class CatalogMismatch(ValueError):
    pass


@dataclass(frozen=True)
class CoordinateCatalog:
    theory: TheorySpec
    lattice: LatticeSpec

    @property
    def n_config(self) -> int:
        return self.theory.config_dim

    @property
    def dim(self) -> int:
        return 2 * self.n_config * self.lattice.volume

    def index(self, site, component: int, momentum: bool = False) -> int:
        """Flat index of ``q_component`` (or its momentum) at ``site``.

        ``site`` is a flat site index or a coordinate triple (wrapped
        periodically).
        """
        if not isinstance(site, int):
            site = self.lattice.site_index(site)
        if not 0 <= component < self.n_config:
            raise IndexError(f"component {component} out of range")
        return 2 * self.n_config * site + component + (self.n_config if momentum else 0)

    def locate(self, flat: int) -> tuple[int, int, bool]:
        """Inverse of :meth:`index`: ``(site, component, is_momentum)``."""
        if not 0 <= flat < self.dim:
            raise IndexError(f"coordinate {flat} out of range")
        site, r = divmod(flat, 2 * self.n_config)
        return site, r % self.n_config, r >= self.n_config

    def partner(self, flat: int) -> int:
        """The canonically conjugate coordinate."""
        site, comp, mom = self.locate(flat)
        return self.index(site, comp, not mom)

    def label(self, flat: int) -> str:
        site, comp, mom = self.locate(flat)
        coords = ",".join(str(c) for c in self.lattice.site_coords(site))
        return f"{'p:' if mom else ''}{self.theory.component_labels[comp]}@({coords})"

    def ref_index(self, label: str, site) -> tuple[int, int]:
        """Flat index and sign for a component label (``p:`` allowed) at ``site``."""
        ref = self.theory.resolve(label, allow=("q", "p"))
        return self.index(site, ref.component, ref.kind == "p"), ref.sign


class LinearFunctional:
    """``z -> sum_i c_i z_i + constant`` over a catalog; immutable."""

    __slots__ = ("catalog", "coeffs", "constant")

    def __init__(self, catalog: CoordinateCatalog, coeffs: Mapping[int, object] | None = None,
                 constant=0):
        clean = {}
        for k, v in (coeffs or {}).items():
            v = as_rational(v)
            if v:
                if not 0 <= k < catalog.dim:
                    raise IndexError(f"coordinate {k} out of range for catalog of size {catalog.dim}")
                clean[int(k)] = v
        object.__setattr__(self, "catalog", catalog)
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))
        object.__setattr__(self, "constant", as_rational(constant))

    def __setattr__(self, key, value):
        raise AttributeError("LinearFunctional is immutable")

    @classmethod
    def coordinate(cls, catalog, flat: int, scale=1) -> "LinearFunctional":
        return cls(catalog, {flat: scale})

    def _same(self, other: "LinearFunctional") -> None:
        if self.catalog != other.catalog:
            raise CatalogMismatch("functionals live on different coordinate catalogs")

    def __add__(self, other):
        if not isinstance(other, LinearFunctional):
            return NotImplemented
        self._same(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return LinearFunctional(self.catalog, out, self.constant + other.constant)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        if not isinstance(other, LinearFunctional):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "LinearFunctional":
        c = as_rational(c)
        return LinearFunctional(self.catalog, {k: c * v for k, v in self.coeffs.items()}, c * self.constant)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, LinearFunctional):
            return NotImplemented
        return self.catalog == other.catalog and self.coeffs == other.coeffs and self.constant == other.constant

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.coeffs and not self.constant

    def evaluate(self, z: Sequence[object]) -> Fraction:
        if len(z) != self.catalog.dim:
            raise CatalogMismatch(f"point has {len(z)} coordinates, catalog has {self.catalog.dim}")
        return sum((v * as_rational(z[k]) for k, v in self.coeffs.items()), self.constant)

    def to_dense(self) -> list[Fraction]:
        out = [Fraction(0)] * self.catalog.dim
        for k, v in self.coeffs.items():
            out[k] = v
        return out

    def describe(self) -> str:
        terms = [f"{v}*{self.catalog.label(k)}" for k, v in self.coeffs.items()]
        if self.constant:
            terms.append(str(self.constant))
        return " + ".join(terms) if terms else "0"

    def __repr__(self):
        return f"LinearFunctional({self.describe()})"


def linear_sum(catalog: CoordinateCatalog, terms) -> LinearFunctional:
    """Build a functional from ``(flat_index, coefficient)`` pairs, merging repeats."""
    acc: dict[int, Fraction] = {}
    for k, v in terms:
        acc[k] = acc.get(k, 0) + as_rational(v)
    return LinearFunctional(catalog, acc)


class QuadraticFunctional:
    """``z -> 1/2 z^T M z + b.z + c`` with ``M`` exactly symmetric."""

    __slots__ = ("catalog", "quadratic", "linear")

    def __init__(self, catalog: CoordinateCatalog, quadratic: SparseMatrix,
                 linear: LinearFunctional | None = None):
        if quadratic.shape != (catalog.dim, catalog.dim):
            raise CatalogMismatch(f"quadratic part has shape {quadratic.shape}, catalog dim {catalog.dim}")
        if not quadratic.is_symmetric():
            raise ValueError("quadratic part must be exactly symmetric")
        linear = linear if linear is not None else LinearFunctional(catalog)
        if linear.catalog != catalog:
            raise CatalogMismatch("linear part lives on another catalog")
        self.catalog = catalog
        self.quadratic = quadratic
        self.linear = linear

    def __add__(self, other):
        if isinstance(other, LinearFunctional):
            return QuadraticFunctional(self.catalog, self.quadratic, self.linear + other)
        if not isinstance(other, QuadraticFunctional):
            return NotImplemented
        if other.catalog != self.catalog:
            raise CatalogMismatch("functionals live on different coordinate catalogs")
        return QuadraticFunctional(self.catalog, self.quadratic + other.quadratic, self.linear + other.linear)

    def __eq__(self, other):
        if not isinstance(other, QuadraticFunctional):
            return NotImplemented
        return (self.catalog == other.catalog and self.quadratic == other.quadratic
                and self.linear == other.linear)

    __hash__ = None

    @classmethod
    def product(cls, f: LinearFunctional, g: LinearFunctional) -> "QuadraticFunctional":
        """The quadratic functional ``f * g`` of two homogeneous linear functionals."""
        if f.constant or g.constant:
            raise ValueError("product requires homogeneous factors")
        f._same(g)
        m = SparseMatrix(f.catalog.dim, f.catalog.dim)
        for i, a in f.coeffs.items():
            for j, b in g.coeffs.items():
                m.add_to(i, j, a * b)
                m.add_to(j, i, a * b)
        return cls(f.catalog, m)

    def evaluate(self, z) -> Fraction:
        z = [as_rational(x) for x in z]
        mz = self.quadratic.matvec(z)
        return sum((a * b for a, b in zip(z, mz)), Fraction(0)) / 2 + self.linear.evaluate(z)

    def gradient(self) -> tuple[SparseMatrix, LinearFunctional]:
        """``(M, b)`` so that the gradient at ``z`` is ``M z + b``."""
        return self.quadratic, self.linear


class SymplecticMatrix:
    """The constant bracket matrix ``Omega`` with ``{z_i, z_j} = Omega_ij``."""

    def __init__(self, catalog: CoordinateCatalog):
        self.catalog = catalog

    @cached_property
    def matrix(self) -> SparseMatrix:
        c = self.catalog
        m = SparseMatrix(c.dim, c.dim)
        for s in range(c.lattice.volume):
            for k in range(c.n_config):
                q, p = c.index(s, k), c.index(s, k, True)
                m[q, p] = 1
                m[p, q] = -1
        return m

    def bracket(self, i: int, j: int) -> Fraction:
        c = self.catalog
        if c.partner(i) != j:
            return Fraction(0)
        return Fraction(-1 if c.locate(i)[2] else 1)

    def apply(self, coeffs: Mapping[int, Fraction]) -> dict[int, Fraction]:
        """``Omega g`` for a coefficient vector ``g``."""
        n = self.catalog.n_config
        out = {}
        for k, v in coeffs.items():
            _, r = divmod(k, 2 * n)
            if r < n:
                out[k + n] = -v
            else:
                out[k - n] = v
        return out

    def apply_left(self, coeffs: Mapping[int, Fraction]) -> dict[int, Fraction]:
        """``f^T Omega`` as a coefficient vector."""
        return {k: -v for k, v in self.apply(coeffs).items()}


def build_omega(spec: TheorySpec, lattice: LatticeSpec) -> SymplecticMatrix:
    return SymplecticMatrix(CoordinateCatalog(spec, lattice))


def poisson(f: LinearFunctional, g: LinearFunctional) -> Fraction:
    """``{f, g} = f^T Omega g``."""
    f._same(g)
    n = f.catalog.n_config
    total = Fraction(0)
    for k, v in f.coeffs.items():
        _, r = divmod(k, 2 * n)
        if r < n:
            w = g.coeffs.get(k + n)
            if w:
                total += v * w
        else:
            w = g.coeffs.get(k - n)
            if w:
                total -= v * w
    return total


def poisson_lin_quad(f: LinearFunctional, h: QuadraticFunctional) -> LinearFunctional:
    """``{f, h}`` as the linear functional ``z -> f^T Omega (M z + b)``."""
    if f.catalog != h.catalog:
        raise CatalogMismatch("functionals live on different coordinate catalogs")
    w = SymplecticMatrix(f.catalog).apply_left(f.coeffs)
    M = h.quadratic
    acc: dict[int, Fraction] = {}
    for j, wj in w.items():
        for k, mjk in M.row(j).items():
            acc[k] = acc.get(k, 0) + wj * mjk
    const = sum((wj * h.linear.coeffs.get(j, 0) for j, wj in w.items()), Fraction(0))
    return LinearFunctional(f.catalog, acc, const)
