"""Mean-field transport of a phase density, in two discretizations.

The density ``f(theta, t)`` on the circle obeys the continuity equation
``f_t + (v f)_theta = 0`` with the self-consistent velocity
``v(theta) = integral phi(theta, y) f(y) dy``.

Spectral route (sine coupling only): expanding
``f = (1/2pi) sum_n c_n exp(i n theta)`` with ``c_n = integral
exp(-i n theta) f dtheta`` (so ``c_0 = 1``, ``c_{-n} = conj(c_n)``)
closes the hierarchy

    dc_n/dt = (n/2) (c_1 c_{n-1} - conj(c_1) c_{n+1}),

truncated at ``n_modes`` either by zeroing ``c_{N+1}`` or by the
geometric tail ``c_{N+1} = c_N c_1`` that is exact on the invariant
family of wrapped-Cauchy densities (where ``c_n = (beta e^{i alpha})^n``).

Grid route (any kernel): first-order finite volumes on cells
``[theta_j, theta_{j+1})`` with local Lax-Friedrichs interface fluxes and
forward Euler stepping, which for this scalar flux reduces to upwinding.
The update is conservative, so total mass is preserved to rounding.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rk4 import Trajectory, integrate_fixed, record_stride
from .circle import TWO_PI, CircularDensity, ThetaGrid
from .errors import CflViolation, DomainError, TailBlowup
from .oa import OAPoint
from .particles import InteractionKernel

# Hard stability margin for the explicit grid solver: the advective CFL
# number |v| dt / dtheta must stay at or below this on every step.
CFL_LIMIT = 0.5

# Spectral runs abort once the last retained mode grows past this: the
# truncation is then feeding back into resolved modes at O(1).
TAIL_LIMIT = 0.5


@dataclass(frozen=True)
class FourierDensity:
    """Truncated Fourier description of a circle density.

    ``modes[k]`` holds ``c_{k+1}``; the zeroth coefficient is fixed at 1
    by normalization and negative modes are conjugates.
    """

    modes: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.modes, dtype=complex).copy()
        if m.ndim != 1 or m.size == 0:
            raise DomainError("modes must be a nonempty 1-d complex array")
        m.flags.writeable = False
        object.__setattr__(self, "modes", m)

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @classmethod
    def from_oa(cls, point: OAPoint, n_modes: int) -> "FourierDensity":
        """Wrapped-Cauchy coefficients ``c_n = (beta exp(i alpha))^n``."""
        if n_modes < 1:
            raise DomainError("need at least one mode")
        a = point.beta * np.exp(1j * point.alpha)
        return cls(a ** np.arange(1, n_modes + 1))

    def to_grid(self, grid: ThetaGrid) -> CircularDensity:
        """Exact cell averages of the truncated series.

        Averaging ``exp(i n theta)`` over a cell multiplies it by
        ``exp(i n h / 2) * sinc(n h / 2)``, so the averages come out in
        closed form.  Requires more cells than modes so that no retained
        mode aliases into the sampled mass.
        """
        if grid.n_cells <= self.n_modes:
            raise DomainError(
                "grid must have more cells than the density has modes"
            )
        n = np.arange(1, self.n_modes + 1)
        half = 0.5 * n * grid.spacing
        avg = self.modes * np.exp(1j * half) * np.sin(half) / half
        phases = np.exp(1j * np.outer(grid.nodes, n))
        values = (1.0 + 2.0 * (phases @ avg).real) / TWO_PI
        return CircularDensity(grid, values)


def order_parameter(density) -> complex:
    """First circular moment ``c_1 = integral exp(-i theta) f dtheta``.

    On the wrapped-Cauchy family this is ``beta exp(i alpha)``; its
    magnitude measures synchrony (0 flat, 1 fully clustered).
    """
    if isinstance(density, FourierDensity):
        return complex(density.modes[0])
    if isinstance(density, CircularDensity):
        # exact moment of the piecewise-constant density built from cell
        # averages: average of exp(-i theta) over a cell carries the
        # factor exp(-i h/2) sinc(h/2) relative to the left node
        h = density.grid.spacing
        z = np.exp(-1j * (density.grid.nodes + 0.5 * h))
        factor = np.sin(0.5 * h) / (0.5 * h)
        return complex(np.sum(z * density.values) * h * factor)
    raise DomainError(f"unsupported density type {type(density).__name__}")


def spectral_rhs(modes: np.ndarray, oa_tail: bool = False) -> np.ndarray:
    """Mode velocities of the sine-coupled hierarchy.

    ``oa_tail`` selects the geometric tail closure ``c_{N+1} = c_N c_1``
    instead of plain truncation.
    """
    c1 = modes[0]
    tail = modes[-1] * c1 if oa_tail else 0.0j
    lower = np.concatenate(([1.0 + 0.0j], modes[:-1]))
    upper = np.concatenate((modes[1:], [tail]))
    n = np.arange(1, len(modes) + 1)
    return 0.5 * n * (c1 * lower - np.conj(c1) * upper)


def mfl_simulate_spectral(
    initial: FourierDensity,
    dt: float,
    t_end: float,
    output_every: float | None = None,
    oa_tail: bool = False,
) -> Trajectory:
    """Fixed-step RK4 evolution of the truncated mode hierarchy.

    States along the trajectory are complex mode vectors.  Raises
    :class:`TailBlowup` as soon as the last retained mode exceeds
    ``TAIL_LIMIT``, which signals that the truncation is no longer
    meaningful.
    """
    if t_end > 0.0 and dt > t_end:
        raise DomainError(f"dt = {dt} exceeds final time {t_end}")

    def rhs(c):
        return spectral_rhs(c, oa_tail=oa_tail)

    def check_tail(c, step, t):
        if abs(c[-1]) > TAIL_LIMIT:
            raise TailBlowup(
                f"last mode reached |c_N| = {abs(c[-1]):.3g} at t = {t:.6g}; "
                "increase n_modes or shorten the run"
            )

    return integrate_fixed(
        rhs,
        initial.modes,
        dt,
        t_end,
        record_every=record_stride(dt, output_every),
        post_step=check_tail,
    )


@dataclass(frozen=True)
class DensityTrajectory:
    """Recorded grid-density slices of a transport run.

    ``drift``, when present, is the solver's own running total of mass
    transported across the interface at ``theta = 0`` up to each recorded
    time.  It is exact bookkeeping of the conservative update, not a
    quadrature, and it is what the circle quantile transform needs to keep
    labels aligned with the solver.  Trajectories assembled from bare
    snapshots carry ``drift=None`` and fall back to time quadrature.
    """

    times: np.ndarray
    values: np.ndarray
    grid: ThetaGrid
    drift: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if v.shape != (len(t), self.grid.n_cells):
            raise DomainError("values must have shape (n_times, n_cells)")
        t.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        if self.drift is not None:
            d = np.asarray(self.drift, dtype=float)
            if d.shape != t.shape:
                raise DomainError("drift must have one value per recorded time")
            d.flags.writeable = False
            object.__setattr__(self, "drift", d)

    def __len__(self) -> int:
        return len(self.times)

    def density(self, index: int) -> CircularDensity:
        return CircularDensity(self.grid, self.values[index])

    @property
    def final(self) -> CircularDensity:
        return self.density(len(self) - 1)


def mfl_simulate_grid(
    initial: CircularDensity,
    kernel: InteractionKernel,
    dt: float,
    t_end: float,
    output_every: float | None = None,
) -> DensityTrajectory:
    """Conservative upwind evolution of a grid density.

    Cell values are averages over ``[theta_j, theta_j + dtheta)``; the
    self-consistent velocity is integrated by the midpoint rule over cell
    centers and evaluated at cell interfaces (the grid nodes).  Every step
    checks the CFL number against :data:`CFL_LIMIT` and raises
    :class:`CflViolation` when the step size is too large for the current
    velocity field.  The mass crossing the ``theta = 0`` interface is
    accumulated exactly as the run proceeds and stored per recorded time
    (see :class:`DensityTrajectory`).
    """
    if t_end > 0.0 and dt > t_end:
        raise DomainError(f"dt = {dt} exceeds final time {t_end}")
    grid = initial.grid
    dtheta = grid.spacing
    centers = grid.nodes + 0.5 * dtheta
    interfaces = grid.nodes

    f = initial.values.copy()
    stride = record_stride(dt, output_every)

    n_full = int(np.floor(t_end / dt + 1e-9))
    remainder = t_end - n_full * dt
    if remainder < 1e-9 * max(1.0, abs(t_end)):
        remainder = 0.0
    n_total = n_full + (1 if remainder else 0)

    times = [0.0]
    slices = [f.copy()]
    crossed = 0.0
    drifts = [0.0]
    for step in range(1, n_total + 1):
        h = dt if step <= n_full else remainder
        t = step * dt if step <= n_full else t_end

        v = kernel.circle_velocity(interfaces, centers, f * dtheta)
        vmax = float(np.max(np.abs(v)))
        if vmax * h > CFL_LIMIT * dtheta:
            raise CflViolation(
                f"CFL number {vmax * h / dtheta:.3f} exceeds {CFL_LIMIT} at "
                f"t = {t:.6g}; need dt <= {CFL_LIMIT * dtheta / vmax:.6g}"
            )

        # Interface j sits between cells j-1 and j (periodic).  Local
        # Lax-Friedrichs with speed |v| == upwinding for flux v*f.
        left = np.roll(f, 1)
        flux = 0.5 * v * (left + f) - 0.5 * np.abs(v) * (f - left)
        f = f - (h / dtheta) * (np.roll(flux, -1) - flux)
        crossed += h * flux[0]

        if not np.all(np.isfinite(f)):
            raise CflViolation(f"non-finite density at step {step} (t = {t:.6g})")
        if step % stride == 0 or step == n_total:
            times.append(t)
            slices.append(f.copy())
            drifts.append(crossed)

    return DensityTrajectory(np.array(times), np.array(slices), grid, np.array(drifts))


def linearized_operator(n_cells: int, harmonic: int = 1) -> np.ndarray:
    """Interaction matrix of the dynamics linearized at the flat state.

    Perturbing every phase by ``u_j`` around equidistributed positions
    and expanding the sine coupling of the given harmonic to first order
    gives ``du/dt = (L - mean-zero diagonal) u`` whose coupling matrix is
    ``L[i, j] = cos(harmonic * (theta_i - theta_j)) / n``.  ``L`` is the
    rank-two projector ``(c c^T + s s^T) / n`` onto the harmonic's cosine
    and sine profiles, each with eigenvalue 1/2.
    """
    if n_cells < 3:
        raise DomainError("need at least three cells")
    if harmonic < 1 or 2 * harmonic >= n_cells:
        raise DomainError("harmonic must satisfy 1 <= harmonic < n_cells / 2")
    theta = ThetaGrid(n_cells).nodes
    return np.cos(harmonic * np.subtract.outer(theta, theta)) / n_cells


def linearized_spectrum(matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues of a symmetric operator, descending."""
    return np.linalg.eigvalsh(matrix)[::-1]
