"""Periodic cubical lattices, difference operators and the Levi-Civita symbol.

Sites are flattened in C order.  A spatial lattice has shape ``(n, n, n)``
and direction ``a`` in 1..3 lives on array axis ``a - 1``; a spacetime
lattice has shape ``(t, n, n, n)`` and direction ``mu`` in 0..3 lives on
array axis ``mu``.

Forward differences ``D f(x) = f(x + e) - f(x)`` are the only derivative
placement used in constraints, Hamiltonians and actions.  Their adjoint
under the lattice sum is minus the backward difference
``Dbar f(x) = f(x) - f(x - e)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .exact_linalg import SparseMatrix


class InvalidAxis(ValueError):
    pass


@dataclass(frozen=True)
class LatticeSpec:
    """Periodic lattice with spatial extent ``n`` and time extent ``t``."""

    n: int
    t: int = 1

    def __post_init__(self):
        if int(self.n) < 1 or int(self.t) < 1:
            raise ValueError(f"lattice extents must be >= 1, got n={self.n}, t={self.t}")

    @property
    def volume(self) -> int:
        return self.n ** 3

    @property
    def spacetime_volume(self) -> int:
        return self.t * self.n ** 3

    def shape(self, spacetime: bool = False) -> tuple[int, ...]:
        return (self.t, self.n, self.n, self.n) if spacetime else (self.n, self.n, self.n)

    def num_sites(self, spacetime: bool = False) -> int:
        return self.spacetime_volume if spacetime else self.volume

    def sites(self, spacetime: bool = False) -> Iterator[tuple[int, ...]]:
        """Site coordinates in flat-index order."""
        return itertools.product(*(range(k) for k in self.shape(spacetime)))

    def site_index(self, coords, spacetime: bool = False) -> int:
        shape = self.shape(spacetime)
        if len(coords) != len(shape):
            raise ValueError(f"expected {len(shape)} coordinates, got {len(coords)}")
        idx = 0
        for c, k in zip(coords, shape):
            idx = idx * k + (c % k)
        return idx

    def site_coords(self, index: int, spacetime: bool = False) -> tuple[int, ...]:
        return tuple(int(c) for c in np.unravel_index(index, self.shape(spacetime)))


@dataclass(frozen=True)
class SiteIndex:
    """A spacetime site with every coordinate reduced into ``[0, extent)``."""

    t: int
    x: int
    y: int
    z: int

    @classmethod
    def on(cls, lattice: LatticeSpec, t: int, x: int, y: int, z: int) -> "SiteIndex":
        n = lattice.n
        return cls(t % lattice.t, x % n, y % n, z % n)

    def spatial(self) -> tuple[int, int, int]:
        return (self.x, self.y, self.z)


def array_axis(direction: int, spacetime: bool) -> int:
    if spacetime:
        if direction not in (0, 1, 2, 3):
            raise InvalidAxis(f"spacetime direction must be 0..3, got {direction}")
        return direction
    if direction not in (1, 2, 3):
        raise InvalidAxis(f"spatial direction must be 1..3, got {direction}")
    return direction - 1


def diff_matrix(lattice: LatticeSpec, direction: int, orientation: str = "forward",
                spacetime: bool = False) -> SparseMatrix:
    """Matrix of the forward or backward difference along ``direction``.

    ``backward == -forward.T`` holds exactly.
    """
    if orientation not in ("forward", "backward"):
        raise ValueError(f"orientation must be 'forward' or 'backward', got {orientation!r}")
    ax = array_axis(direction, spacetime)
    shape = lattice.shape(spacetime)
    nsites = lattice.num_sites(spacetime)
    step = 1 if orientation == "forward" else -1
    m = SparseMatrix(nsites, nsites)
    for s, coords in enumerate(lattice.sites(spacetime)):
        nb = list(coords)
        nb[ax] = (nb[ax] + step) % shape[ax]
        j = lattice.site_index(nb, spacetime)
        if orientation == "forward":
            m.add_to(s, j, 1)
            m.add_to(s, s, -1)
        else:
            m.add_to(s, s, 1)
            m.add_to(s, j, -1)
    return m


# array-level helpers; ``axis`` is the numpy axis, not the physical direction

def shift(f: np.ndarray, axis: int, step: int = 1) -> np.ndarray:
    """``shift(f, axis, k)(x) = f(x + k e_axis)`` with periodic wraparound."""
    return np.roll(f, -step, axis=axis)


def fwd(f: np.ndarray, axis: int) -> np.ndarray:
    return np.roll(f, -1, axis=axis) - f


def bwd(f: np.ndarray, axis: int) -> np.ndarray:
    return f - np.roll(f, 1, axis=axis)


def _perm_sign(p) -> int:
    p = list(p)
    if len(set(p)) != len(p):
        return 0
    sign = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


def levi_civita(*indices) -> int:
    """Totally antisymmetric symbol with ``eps(0,1,2,3) = eta(1,2,3) = +1``.

    Four indices are spacetime (0..3); three indices are spatial (1..3).
    """
    if len(indices) == 1 and not isinstance(indices[0], int):
        indices = tuple(indices[0])
    if len(indices) == 4:
        if any(i not in (0, 1, 2, 3) for i in indices):
            raise ValueError(f"spacetime indices must lie in 0..3, got {indices}")
    elif len(indices) == 3:
        if any(i not in (1, 2, 3) for i in indices):
            raise ValueError(f"spatial indices must lie in 1..3, got {indices}")
    else:
        raise ValueError("levi_civita takes 3 spatial or 4 spacetime indices")
    return _perm_sign(indices)


# frequently iterated nonzero entries
EPS4 = [(p, _perm_sign(p)) for p in itertools.permutations(range(4))]
ETA3 = [(p, _perm_sign(p)) for p in itertools.permutations((1, 2, 3))]

# internal Minkowski metric, signature (-,+,+,+)
MINKOWSKI = (-1, 1, 1, 1)
