"""Circle geometry, grids, densities, CDFs, quantiles, and Wasserstein-1.

Angles are plain floats in radians; the canonical representative lives in
``[0, 2*pi)`` and is produced by :func:`wrap_angle`.  Labels (quantile
arguments) live in ``[0, 1]``.  Two uniform grids appear everywhere:

* :class:`ThetaGrid` holds angle nodes ``theta_j = 2*pi*j / n_cells``.  A
  periodic trapezoid rule on these nodes has uniform weights
  ``2*pi/n_cells`` and is spectrally accurate for smooth densities.
* :class:`LabelGrid` holds label midpoints ``xi_j = (j + 1/2) / n_labels``.
  The midpoint rule over these points is likewise spectrally accurate
  for smooth 1-periodic integrands and exact (to rounding) for
  trigonometric polynomials in the label.

The CDF convention is the circular cumulative distribution anchored at
angle zero: ``F(theta) = mass of [0, theta]``, so ``F(0) = 0`` and
``F(2*pi) = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.stats import wasserstein_distance

from .errors import (
    DomainError,
    EmptyMeasure,
    NonNormalized,
    NotStrictlyMonotone,
)

TWO_PI = 2.0 * np.pi

#: Mass tolerance accepted before renormalization.
MASS_TOL = 1e-8
#: Per-cell CDF increment below which a cell counts as flat in strict mode.
FLAT_TOL = 1e-10


def wrap_angle(theta):
    """Canonical circle representative in ``[0, 2*pi)``."""
    return np.mod(theta, TWO_PI)


def wrap_pm_pi(theta):
    """Representative in ``[-pi, pi)``."""
    return np.mod(np.asarray(theta, dtype=float) + np.pi, TWO_PI) - np.pi


def wrap_label(xi):
    """Canonical label representative in ``[0, 1)``."""
    return np.mod(xi, 1.0)


def circle_distance(a, b):
    """Geodesic distance on the circle of circumference ``2*pi``."""
    d = np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), TWO_PI)
    return np.minimum(d, TWO_PI - d)


def label_distance(a, b):
    """Geodesic distance on the label circle of circumference one."""
    d = np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), 1.0)
    return np.minimum(d, 1.0 - d)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class ThetaGrid:
    """Uniform periodic angle grid with ``n_cells`` nodes on ``[0, 2*pi)``."""

    n_cells: int

    def __post_init__(self):
        if self.n_cells < 2:
            raise DomainError(f"ThetaGrid needs at least 2 cells, got {self.n_cells}")

    @cached_property
    def nodes(self) -> np.ndarray:
        return _readonly(np.arange(self.n_cells) * (TWO_PI / self.n_cells))

    @property
    def spacing(self) -> float:
        return TWO_PI / self.n_cells


@dataclass(frozen=True)
class LabelGrid:
    """Uniform label grid with midpoints ``(j + 1/2) / n_labels``."""

    n_labels: int

    def __post_init__(self):
        if self.n_labels < 1:
            raise DomainError(f"LabelGrid needs at least 1 label, got {self.n_labels}")

    @cached_property
    def midpoints(self) -> np.ndarray:
        return _readonly((np.arange(self.n_labels) + 0.5) / self.n_labels)


@dataclass(frozen=True)
class CircularDensity:
    """Probability density on a :class:`ThetaGrid`, stored as cell averages.

    ``values[j]`` is the average of the density over the cell
    ``[theta_j, theta_{j+1})``, so the total mass ``spacing * sum(values)``
    must be within ``MASS_TOL`` of one and the CDF built from these values
    is exact at the nodes.  For smooth densities the cell average agrees
    with the midpoint value to second order, so midpoint sampling is an
    acceptable way to construct one.  Tiny negative values (above
    ``-1e-12``, e.g. finite-volume rounding) are tolerated but not
    repaired here.
    """

    grid: ThetaGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).copy()
        if vals.shape != (self.grid.n_cells,):
            raise DomainError(
                f"density shape {vals.shape} does not match grid ({self.grid.n_cells},)"
            )
        if np.any(vals < -1e-12):
            raise DomainError("density has negative values beyond tolerance")
        object.__setattr__(self, "values", _readonly(vals))
        m = self.mass()
        if abs(m - 1.0) > MASS_TOL:
            raise NonNormalized(f"density mass {m!r} differs from 1 by more than {MASS_TOL}")

    def mass(self) -> float:
        return float(self.values.sum() * self.grid.spacing)


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Weighted atoms, either on the circle or on the real line."""

    positions: np.ndarray
    weights: np.ndarray
    space: str = "circle"

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float).copy()
        w = np.asarray(self.weights, dtype=float).copy()
        if pos.size == 0:
            raise EmptyMeasure("empirical measure needs at least one atom")
        if pos.shape != w.shape or pos.ndim != 1:
            raise DomainError("positions and weights must be matching 1-d arrays")
        if self.space not in ("circle", "line"):
            raise DomainError(f"unknown space {self.space!r}")
        if np.any(w < 0):
            raise DomainError("weights must be nonnegative")
        total = float(w.sum())
        if abs(total - 1.0) > 1e-12:
            raise NonNormalized(f"weights sum to {total!r}, not 1 within 1e-12")
        if self.space == "circle":
            pos = wrap_angle(pos)
        object.__setattr__(self, "positions", _readonly(pos))
        object.__setattr__(self, "weights", _readonly(w))


@dataclass(frozen=True)
class CdfFn:
    """Circular CDF as a piecewise-linear grid function.

    ``values`` holds ``n_cells + 1`` samples at the nodes extended by the
    endpoint ``2*pi``, with ``values[0] == 0`` and ``values[-1] == 1``.
    """

    grid: ThetaGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).copy()
        if vals.shape != (self.grid.n_cells + 1,):
            raise DomainError("CDF needs n_cells + 1 values (nodes plus endpoint)")
        if abs(vals[0]) > 1e-12 or abs(vals[-1] - 1.0) > 1e-12:
            raise DomainError("CDF must run from 0 at angle 0 to 1 at angle 2*pi")
        if np.any(np.diff(vals) < 0):
            raise DomainError("CDF values must be nondecreasing")
        object.__setattr__(self, "values", _readonly(vals))

    @cached_property
    def nodes(self) -> np.ndarray:
        ext = np.append(self.grid.nodes, TWO_PI)
        return _readonly(ext)

    def __call__(self, theta):
        th = np.clip(np.asarray(theta, dtype=float), 0.0, TWO_PI)
        return np.interp(th, self.nodes, self.values)


def cdf_from_density(f: CircularDensity) -> CdfFn:
    """Cumulative CDF of a grid density, renormalized to end at one.

    Cell values are read as averages over ``[theta_j, theta_{j+1})``, so
    the increment of cell ``j`` is exactly ``values[j] * spacing`` and the
    CDF is exact at every node whenever the values are true cell averages
    (see :func:`kuralim.oa.oa_cell_averages`).  Increments are clamped at
    zero so rounding-level negativity in the input cannot break
    monotonicity.  Raises :class:`NonNormalized` if the raw mass is
    farther than ``MASS_TOL`` from one.
    """
    incr = np.maximum(f.values * f.grid.spacing, 0.0)
    cum = np.concatenate(([0.0], np.cumsum(incr)))
    total = cum[-1]
    if abs(total - 1.0) > MASS_TOL:
        raise NonNormalized(f"density mass {total!r} differs from 1 by more than {MASS_TOL}")
    return CdfFn(f.grid, cum / total)


@dataclass(frozen=True)
class QuantileFn:
    """Generalized inverse ``xi -> inf{theta : F(theta) >= xi}`` of a grid CDF.

    Evaluation is a binary search over the monotone grid values followed by
    linear interpolation inside the located cell.  In strict mode the
    construction refuses CDFs with a flat cell (increment below
    ``FLAT_TOL``); non-strict mode implements the pseudo-inverse, which
    jumps across flat stretches.
    """

    cdf: CdfFn
    strict: bool = True

    def __post_init__(self):
        if self.strict and np.any(np.diff(self.cdf.values) < FLAT_TOL):
            raise NotStrictlyMonotone(
                f"CDF has a cell increment below {FLAT_TOL}; "
                "use strict=False for the pseudo-inverse"
            )

    def __call__(self, xi):
        x = np.asarray(xi, dtype=float)
        if np.any((x < -1e-12) | (x > 1.0 + 1e-12)):
            raise DomainError("quantile argument outside [0, 1]")
        x = np.clip(x, 0.0, 1.0)
        F = self.cdf.values
        nodes = self.cdf.nodes
        idx = np.searchsorted(F, x, side="left")
        idx = np.clip(idx, 0, len(F) - 1)
        lo = np.maximum(idx - 1, 0)
        f_lo, f_hi = F[lo], F[idx]
        th_lo, th_hi = nodes[lo], nodes[idx]
        denom = f_hi - f_lo
        with np.errstate(invalid="ignore", divide="ignore"):
            t = np.where(denom > 0, (x - f_lo) / np.where(denom > 0, denom, 1.0), 1.0)
        out = th_lo + np.clip(t, 0.0, 1.0) * (th_hi - th_lo)
        out = np.where(idx == 0, nodes[0], out)
        return out if out.ndim else float(out)


def quantile_from_cdf(F: CdfFn, strict: bool = True) -> QuantileFn:
    """Invert a grid CDF.  See :class:`QuantileFn` for the semantics."""
    return QuantileFn(F, strict)


def empirical_quantile(m: EmpiricalMeasure, xi):
    """Quantile ``inf{x : F(x) >= xi}`` of an atomic measure.

    Exact at breakpoints: the atom boundary ``xi == F(atom)`` selects the
    atom itself, matching the left-continuous step convention.  Circle
    atoms are ordered by their canonical representative.
    """
    x = np.asarray(xi, dtype=float)
    if np.any((x < -1e-12) | (x > 1.0 + 1e-12)):
        raise DomainError("quantile argument outside [0, 1]")
    x = np.clip(x, 0.0, 1.0)
    order = np.argsort(m.positions, kind="stable")
    pos = m.positions[order]
    cum = np.cumsum(m.weights[order])
    cum = cum / cum[-1]
    idx = np.minimum(np.searchsorted(cum, x, side="left"), len(pos) - 1)
    out = pos[idx]
    return out if out.ndim else float(out)


def w1_line(mu: EmpiricalMeasure, nu: EmpiricalMeasure) -> float:
    """Wasserstein-1 distance between atomic measures on the real line.

    Computed exactly from the quantile coupling of the sorted atoms
    (delegated to scipy, which implements exactly that formula).
    """
    if mu.space != "line" or nu.space != "line":
        raise DomainError("w1_line expects measures on the real line")
    return float(
        wasserstein_distance(mu.positions, nu.positions, mu.weights, nu.weights)
    )


def w1_circle(mu: EmpiricalMeasure, nu: EmpiricalMeasure) -> float:
    """Wasserstein-1 distance between atomic measures on the circle.

    Uses the cut-shift formulation: for CDFs anchored at angle zero,
    ``W1 = min_c int_0^{2*pi} |F_mu(x) - F_nu(x) - c| dx``, minimized
    exactly by a weighted median of the CDF difference over the
    atom-induced segments.  The candidate shifts are therefore scanned at
    the atom breakpoints; the result never exceeds ``pi``.
    """
    if mu.space != "circle" or nu.space != "circle":
        raise DomainError("w1_circle expects measures on the circle")
    pos = np.concatenate([mu.positions, nu.positions])
    jump = np.concatenate(
        [mu.weights / mu.weights.sum(), -nu.weights / nu.weights.sum()]
    )
    order = np.argsort(pos, kind="stable")
    xs = pos[order]
    diff = np.cumsum(jump[order])
    # Segment k runs from xs[k] to xs[k+1] (wrapping at the end) and carries
    # the constant CDF difference diff[k].
    seg = np.empty_like(xs)
    seg[:-1] = np.diff(xs)
    seg[-1] = TWO_PI - xs[-1] + xs[0]
    med_order = np.argsort(diff, kind="stable")
    csum = np.cumsum(seg[med_order])
    median = diff[med_order][np.searchsorted(csum, 0.5 * csum[-1], side="left")]
    return float(np.sum(np.abs(diff - median) * seg))
