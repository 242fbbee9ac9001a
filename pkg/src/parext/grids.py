"""Uniform frequency and spacetime grids, sampled profiles and fields,
and the discrete L^p machinery on the frequency side.

Frequency grids are FFT-style: N points per axis (N a power of two) at
spacing 2*half_width/N, starting at center - half_width and excluding the
right endpoint.  For the smooth, decaying profiles this package works with,
the resulting Riemann sum coincides with the trapezoid rule to the accuracy
of the tails.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


def _as_vector(v, d: int, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    if arr.shape == (1,) and d > 1:
        arr = np.full(d, arr[0])
    if arr.shape != (d,):
        raise ValueError(f"{name} must have length {d}, got shape {arr.shape}")
    return arr


def smooth_bump(u: np.ndarray) -> np.ndarray:
    """Standard smooth bump exp(1 - 1/(1-u^2)) on |u| < 1, zero outside,
    identically 1 at u = 0 and >= exp(1 - 4/3) on |u| <= 1/2."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    ui = u[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - ui * ui))
    return out


def plateau_bump(u: np.ndarray) -> np.ndarray:
    """Smooth bump equal to 1 on |u| <= 1/2 and supported on |u| < 1.

    Built from the integral of a smooth bump; used where a genuine plateau
    is required rather than just positivity at the center.
    """
    u = np.abs(np.asarray(u, dtype=float))
    out = np.zeros_like(u)
    out[u <= 0.5] = 1.0
    ramp = (u > 0.5) & (u < 1.0)
    if np.any(ramp):
        # smooth step from 1 down to 0 on [1/2, 1]
        s = (u[ramp] - 0.5) / 0.5  # in (0, 1)
        g = np.exp(-1.0 / s) / (np.exp(-1.0 / s) + np.exp(-1.0 / (1.0 - s)))
        out[ramp] = 1.0 - g
    return out


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform tensor grid covering [center - L, center + L)^d with N points
    per axis, N a power of two."""

    d: int
    half_width: float
    points_per_axis: int
    center: tuple = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        n = self.points_per_axis
        if n < 2 or (n & (n - 1)) != 0:
            raise ValueError(f"points_per_axis must be a power of two >= 2, got {n}")
        c = self.center
        if c is None:
            c = (0.0,) * self.d
        c = tuple(float(x) for x in np.atleast_1d(np.asarray(c, dtype=float)))
        if len(c) != self.d:
            raise ValueError("center must have length d")
        object.__setattr__(self, "center", c)

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.points_per_axis

    def axis_points(self, axis: int = 0) -> np.ndarray:
        j = np.arange(self.points_per_axis)
        return self.center[axis] - self.half_width + j * self.spacing

    def meshgrid(self) -> list[np.ndarray]:
        axes = [self.axis_points(a) for a in range(self.d)]
        return list(np.meshgrid(*axes, indexing="ij"))

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.d

    @property
    def shape(self) -> tuple:
        return (self.points_per_axis,) * self.d


@dataclass
class FrequencyProfile:
    """Complex samples of a frequency-side function on a FrequencyGrid."""

    grid: FrequencyGrid
    samples: np.ndarray
    label: str = ""
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.shape != self.grid.shape:
            raise ValueError(
                f"samples shape {self.samples.shape} does not match grid shape {self.grid.shape}"
            )
        if not np.all(np.isfinite(self.samples.view(float))):
            raise ValueError("profile samples must be finite")

    def scaled(self, c: complex) -> "FrequencyProfile":
        return FrequencyProfile(self.grid, c * self.samples, label=self.label)


@dataclass(frozen=True)
class SpacetimeGrid:
    """Uniform (t, x) grid: M time points on [-T, T], N_x points per spatial
    axis on [-X, X], endpoints included."""

    d: int
    t_half_width: float
    x_half_width: float
    t_points: int
    x_points_per_axis: int

    def __post_init__(self):
        if self.t_half_width <= 0 or self.x_half_width <= 0:
            raise ValueError("grid half-widths must be positive")
        if self.t_points < 2 or self.x_points_per_axis < 2:
            raise ValueError("need at least two points per axis")

    @property
    def t_axis(self) -> np.ndarray:
        return np.linspace(-self.t_half_width, self.t_half_width, self.t_points)

    @property
    def x_axis(self) -> np.ndarray:
        return np.linspace(-self.x_half_width, self.x_half_width, self.x_points_per_axis)

    @property
    def t_spacing(self) -> float:
        return 2.0 * self.t_half_width / (self.t_points - 1)

    @property
    def x_spacing(self) -> float:
        return 2.0 * self.x_half_width / (self.x_points_per_axis - 1)

    def t_weights(self) -> np.ndarray:
        w = np.full(self.t_points, self.t_spacing)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def x_weights(self) -> np.ndarray:
        w = np.full(self.x_points_per_axis, self.x_spacing)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    @property
    def field_shape(self) -> tuple:
        return (self.t_points,) + (self.x_points_per_axis,) * self.d


@dataclass
class SpacetimeField:
    """Complex samples of an extension on a SpacetimeGrid.

    ``tail_bound`` is a certified bound (in L^q norm units) on the mass
    outside the grid; it is filled by the norms module and is 0 until then.
    ``coverage`` records the fraction of points genuinely evaluated (< 1
    after a clipped symmetry pullback).
    """

    grid: SpacetimeGrid
    samples: np.ndarray
    tail_bound: float = 0.0
    coverage: float = 1.0
    warnings: list = field(default_factory=list)
    mask: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.shape != self.grid.field_shape:
            raise ValueError(
                f"samples shape {self.samples.shape} does not match grid {self.grid.field_shape}"
            )


# ---------------------------------------------------------------------------
# profile constructors
# ---------------------------------------------------------------------------

def gaussian_profile(
    grid: FrequencyGrid,
    center: Sequence[float] | float = 0.0,
    width: float = 1.0,
    phase_velocity: Sequence[float] | float = 0.0,
    chirp: float = 0.0,
    label: str = "gaussian",
) -> FrequencyProfile:
    """Sample exp(-|xi - center|^2 / width^2) * exp(i xi . v) on the grid.

    ``chirp`` adds a quadratic phase exp(i * chirp * |xi - center|^2).
    A truncation warning is recorded when the center sits more than half a
    grid half-width outside the grid.
    """
    if width <= 0:
        raise ValueError("width must be positive")
    c = _as_vector(center, grid.d, "center")
    v = _as_vector(phase_velocity, grid.d, "phase_velocity")
    mesh = grid.meshgrid()
    r2 = sum((m - ci) ** 2 for m, ci in zip(mesh, c))
    phase = sum(m * vi for m, vi in zip(mesh, v))
    samples = np.exp(-r2 / width**2) * np.exp(1j * phase)
    if chirp != 0.0:
        samples = samples * np.exp(1j * chirp * r2)
    prof = FrequencyProfile(grid, samples, label=label)
    for a in range(grid.d):
        if abs(c[a] - grid.center[a]) > 1.5 * grid.half_width:
            prof.warnings.append(
                f"center coordinate {c[a]} lies more than half a grid width outside the grid"
            )
    return prof


def bump_profile(
    grid: FrequencyGrid,
    center: Sequence[float] | float = 0.0,
    radius: float = 1.0,
    label: str = "bump",
) -> FrequencyProfile:
    """Smooth compactly supported bump of the given radius."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    c = _as_vector(center, grid.d, "center")
    mesh = grid.meshgrid()
    r2 = sum((m - ci) ** 2 for m, ci in zip(mesh, c))
    samples = smooth_bump(np.sqrt(r2) / radius).astype(complex)
    return FrequencyProfile(grid, samples, label=label)


def superpose(f: FrequencyProfile, g: FrequencyProfile, label: str = "") -> FrequencyProfile:
    if f.grid != g.grid:
        raise ValueError("profiles live on different grids")
    return FrequencyProfile(f.grid, f.samples + g.samples, label=label or f"{f.label}+{g.label}")


def translate_profile(f: FrequencyProfile, shift_vec) -> FrequencyProfile:
    """Exact translation xi -> f(xi + shift_vec): the grid center moves, the
    samples are reused unchanged."""
    s = _as_vector(shift_vec, f.grid.d, "shift_vec")
    new_grid = FrequencyGrid(
        d=f.grid.d,
        half_width=f.grid.half_width,
        points_per_axis=f.grid.points_per_axis,
        center=tuple(np.asarray(f.grid.center) - s),
    )
    return FrequencyProfile(new_grid, f.samples.copy(), label=f.label)


def dilate_profile(f: FrequencyProfile, lam: float, p: float) -> FrequencyProfile:
    """Norm-preserving dilation f_lam(xi) = lam^(d/p) f(lam xi), on a grid
    rescaled by 1/lam so no resolution is lost.

    The new samples are the old samples scaled in amplitude; the L^p norm is
    preserved exactly by the rescaled quadrature weights.
    """
    if lam <= 0:
        raise ValueError("dilation parameter must be positive")
    g = f.grid
    new_grid = FrequencyGrid(
        d=g.d,
        half_width=g.half_width / lam,
        points_per_axis=g.points_per_axis,
        center=tuple(np.asarray(g.center) / lam),
    )
    amp = lam ** (g.d / p)
    return FrequencyProfile(new_grid, amp * f.samples, label=f.label)


# ---------------------------------------------------------------------------
# discrete norms and moments
# ---------------------------------------------------------------------------

def lp_norm_frequency(f: FrequencyProfile, p: float) -> float:
    """Trapezoid-rule approximation to the frequency-side L^p norm."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if f.samples.size == 0:
        raise ValueError("empty profile")
    return float((np.abs(f.samples) ** p).sum() * f.grid.cell_volume) ** (1.0 / p)


def inner_product_frequency(f: FrequencyProfile, g: FrequencyProfile) -> complex:
    """Discrete bilinear pairing integral f * g dxi (no conjugation)."""
    if f.grid != g.grid:
        raise ValueError("profiles live on different grids")
    return complex((f.samples * g.samples).sum() * f.grid.cell_volume)


def profile_centroid(f: FrequencyProfile, p: float = 2.0) -> np.ndarray:
    """|f|^p-weighted centroid of the profile."""
    w = np.abs(f.samples) ** p
    tot = w.sum()
    if tot == 0:
        return np.asarray(f.grid.center, dtype=float)
    mesh = f.grid.meshgrid()
    return np.array([(m * w).sum() / tot for m in mesh])


def profile_second_moment(f: FrequencyProfile, p: float = 2.0, about=None) -> float:
    """|f|^p-weighted mean square radius about the centroid (or ``about``)."""
    w = np.abs(f.samples) ** p
    tot = w.sum()
    if tot == 0:
        raise ValueError("degenerate profile: no mass")
    c = profile_centroid(f, p) if about is None else _as_vector(about, f.grid.d, "about")
    mesh = f.grid.meshgrid()
    r2 = sum((m - ci) ** 2 for m, ci in zip(mesh, c))
    return float((r2 * w).sum() / tot)


def profile_gradient_l2sq(f: FrequencyProfile) -> float:
    """Integral of |grad f|^2, by central differences; controls the spatial
    spread of the extension at t = 0."""
    h = f.grid.spacing
    total = 0.0
    for axis in range(f.grid.d):
        g = np.gradient(f.samples, h, axis=axis)
        total += float((np.abs(g) ** 2).sum() * f.grid.cell_volume)
    return total
