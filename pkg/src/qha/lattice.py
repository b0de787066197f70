"""Discrete phase space: the N x N torus lattice, domains, and their geometry.

Phase space is modeled as Z_N x Z_N. A lattice point (m, n) sits at the
continuous coordinate (l*m, l*n) where l = 1/sqrt(N) is the length unit, and
carries measure w = 1/N, so w = l**2 and the full lattice has measure N.
This normalization is what makes every operator-convolution identity in the
rest of the package exact (see convolution module).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import ShapeTooLarge

__all__ = [
    "PhaseLattice",
    "Domain",
    "Ball",
    "Rectangle",
    "ExplicitMask",
    "ShapeSpec",
    "rasterize",
    "domain_from_points",
    "full_domain",
]


@dataclass(frozen=True)
class PhaseLattice:
    """The torus lattice Z_N x Z_N with its measure weight and length unit."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"lattice size must be a positive integer, got {self.n!r}")

    @property
    def weight(self) -> float:
        """Measure of a single lattice point, w = 1/N."""
        return 1.0 / self.n

    @property
    def unit(self) -> float:
        """Length of one lattice step, l = 1/sqrt(N); satisfies w = l**2."""
        return 1.0 / math.sqrt(self.n)

    @property
    def extent(self) -> float:
        """Total side length of the torus, N*l = sqrt(N)."""
        return self.n * self.unit

    def min_image(self, d) -> np.ndarray:
        """Reduce integer coordinate differences to the minimal image in [-N/2, N/2]."""
        d = np.asarray(d)
        r = np.mod(d, self.n)
        return np.where(r > self.n / 2, r - self.n, r)

    def torus_distance(self, z, zp=(0, 0)) -> float:
        """Euclidean distance between two lattice points in length units.

        Each coordinate difference is reduced to its minimal image before
        taking the norm, so the wrap-around geometry of the torus is respected:
        (0,0) to (N-1,0) has distance l, not (N-1)*l.
        """
        dm = int(self.min_image(z[0] - zp[0]))
        dn = int(self.min_image(z[1] - zp[1]))
        return self.unit * math.hypot(dm, dn)

    def distance_grid(self) -> np.ndarray:
        """(N, N) grid of torus distances from each point to the origin."""
        idx = np.abs(self.min_image(np.arange(self.n)))
        return self.unit * np.hypot(idx[:, None], idx[None, :])


def _frozen_mask(mask: np.ndarray, n: int) -> np.ndarray:
    mask = np.ascontiguousarray(mask, dtype=bool)
    if mask.shape != (n, n):
        raise ValueError(f"mask shape {mask.shape} does not match lattice ({n}, {n})")
    mask.setflags(write=False)
    return mask


@dataclass(frozen=True)
class Domain:
    """A subset of lattice points, stored as a boolean (N, N) mask.

    mask[m, n] is True when the point (m, n) belongs to the domain. Instances
    are immutable; the mask array is marked read-only at construction.
    """

    lattice: PhaseLattice
    mask: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mask", _frozen_mask(self.mask, self.lattice.n))

    @property
    def point_count(self) -> int:
        return int(np.count_nonzero(self.mask))

    def measure(self) -> float:
        """Weighted point count w * #mask; the full lattice has measure N."""
        return self.point_count / self.lattice.n

    def perimeter(self) -> float:
        """Discrete total variation of the indicator, in length units.

        Counts unordered 4-neighbor adjacent pairs {z, z'} on the periodic
        lattice with z inside and z' outside, times l. A single point has
        perimeter 4l; the count is symmetric under complementation.
        """
        mask = self.mask
        edges = 0
        for axis in (0, 1):
            for step in (1, -1):
                edges += int(np.count_nonzero(mask & ~np.roll(mask, step, axis=axis)))
        return self.lattice.unit * edges

    def complement(self) -> "Domain":
        return Domain(self.lattice, ~self.mask)

    def indicator(self) -> np.ndarray:
        """The mask as a float grid (the function chi_Omega on the lattice)."""
        return self.mask.astype(np.float64)

    def points(self) -> list[tuple[int, int]]:
        """Member points as a lexicographically sorted list of (m, n) tuples."""
        ms, ns = np.nonzero(self.mask)
        return sorted(zip(ms.tolist(), ns.tolist()))

    def __contains__(self, z) -> bool:
        return bool(self.mask[z[0] % self.lattice.n, z[1] % self.lattice.n])


def domain_from_points(lattice: PhaseLattice, points) -> Domain:
    mask = np.zeros((lattice.n, lattice.n), dtype=bool)
    for m, n in points:
        if not (0 <= m < lattice.n and 0 <= n < lattice.n):
            raise ValueError(f"point ({m}, {n}) outside lattice of size {lattice.n}")
        mask[m, n] = True
    return Domain(lattice, mask)


def full_domain(lattice: PhaseLattice) -> Domain:
    return Domain(lattice, np.ones((lattice.n, lattice.n), dtype=bool))


@dataclass(frozen=True)
class Ball:
    """Euclidean disk; center coordinates and radius in length units."""

    center: tuple[float, float] = (0.0, 0.0)
    radius: float = 1.0

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("ball radius must be >= 0")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned rectangle [corner, corner + widths], in length units."""

    corner: tuple[float, float]
    widths: tuple[float, float]

    def __post_init__(self):
        if self.widths[0] < 0 or self.widths[1] < 0:
            raise ValueError("rectangle widths must be >= 0")
        object.__setattr__(self, "corner", (float(self.corner[0]), float(self.corner[1])))
        object.__setattr__(self, "widths", (float(self.widths[0]), float(self.widths[1])))


@dataclass(frozen=True)
class ExplicitMask:
    """A literal point set; supports no dilation (rasterize requires scale 1)."""

    points: tuple = field(default_factory=tuple)

    def __post_init__(self):
        pts = tuple(sorted((int(m), int(n)) for m, n in self.points))
        object.__setattr__(self, "points", pts)


ShapeSpec = Union[Ball, Rectangle, ExplicitMask]


def _wrapped_offsets(lattice: PhaseLattice, center_steps: float) -> np.ndarray:
    # offset of each index from the (possibly fractional) center, reduced to
    # the minimal image in [-N/2, N/2); in lattice steps
    n = lattice.n
    return np.mod(np.arange(n) - center_steps + n / 2, n) - n / 2


def shape_fits(shape: ShapeSpec, scale: float, lattice: PhaseLattice) -> bool:
    """Whether the scaled shape stays strictly within half the torus extent.

    This is the exact condition under which minimal-image rasterization is
    faithful: every point of the scaled shape must be closer to the center
    than N*l/2 in each relevant sense, so no wrap-around self-intersection
    can occur.
    """
    half = lattice.extent / 2
    if isinstance(shape, Ball):
        return scale * shape.radius < half
    if isinstance(shape, Rectangle):
        return scale * shape.widths[0] / 2 < half and scale * shape.widths[1] / 2 < half
    if isinstance(shape, ExplicitMask):
        return scale == 1.0
    raise TypeError(f"unknown shape {shape!r}")


def rasterize(shape: ShapeSpec, scale: float, lattice: PhaseLattice) -> Domain:
    """Collect lattice points strictly inside the shape dilated by `scale`.

    Dilation fixes the shape's center. Each lattice point is taken in its
    minimal-image representative around the center, so shapes may be placed
    anywhere on the torus. Boundary convention: strict interior (points
    exactly on the boundary are excluded), which makes masks nested in the
    scale and degenerate shapes (radius 0) rasterize to the empty domain.

    Raises ShapeTooLarge when the scaled shape does not fit within half the
    torus extent (ExplicitMask shapes only accept scale == 1).
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    if isinstance(shape, ExplicitMask) and scale != 1.0:
        raise ValueError("explicit masks do not support dilation; use scale=1")
    if not shape_fits(shape, scale, lattice):
        raise ShapeTooLarge(
            f"{type(shape).__name__} at scale {scale} exceeds half the torus extent "
            f"({lattice.extent / 2:.4g}) of the N={lattice.n} lattice"
        )
    ell = lattice.unit
    if isinstance(shape, Ball):
        cm = shape.center[0] / ell
        cn = shape.center[1] / ell
        dm = _wrapped_offsets(lattice, cm) * ell
        dn = _wrapped_offsets(lattice, cn) * ell
        r = scale * shape.radius
        mask = dm[:, None] ** 2 + dn[None, :] ** 2 < r * r
        return Domain(lattice, mask)
    if isinstance(shape, Rectangle):
        cx = shape.corner[0] + shape.widths[0] / 2
        cy = shape.corner[1] + shape.widths[1] / 2
        dm = np.abs(_wrapped_offsets(lattice, cx / ell)) * ell
        dn = np.abs(_wrapped_offsets(lattice, cy / ell)) * ell
        hx = scale * shape.widths[0] / 2
        hy = scale * shape.widths[1] / 2
        mask = (dm[:, None] < hx) & (dn[None, :] < hy)
        return Domain(lattice, mask)
    if isinstance(shape, ExplicitMask):
        return domain_from_points(lattice, shape.points)
    raise TypeError(f"unknown shape {shape!r}")
