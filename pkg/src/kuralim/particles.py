"""Finite ensembles of interacting phase oscillators.

The system is ``dx_i/dt = omega_i + (1/N) * sum_j phi(x_i, x_j)`` with the
self term ``j == i`` included (it vanishes for odd kernels).  Interaction
kernels follow the Kuramoto sign convention ``phi(x, y) = K sin(y - x)``,
i.e. positive coupling is attractive, and the gradient-shape hypothesis
``phi(x, y) = Phi'(x - y)`` for tabulated kernels.

Interaction means are reduced with exactly-rounded summation
(:mod:`kuralim._reduce`), which makes trajectories bitwise equivariant
under particle relabeling and lets symmetric states cancel to rounding.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._reduce import exact_mean, exact_mean_complex
from ._rk4 import Trajectory, integrate_fixed, record_stride
from .circle import TWO_PI, EmpiricalMeasure, wrap_angle
from .errors import DomainError, KernelDomain


@dataclass(frozen=True)
class ParticleState:
    """Positions (and optional natural frequencies) of ``N`` oscillators.

    ``space`` is ``"circle"`` (positions stored as canonical
    representatives in ``[0, 2*pi)``) or ``"line"`` (raw reals).
    """

    positions: np.ndarray
    frequencies: np.ndarray | None = None
    space: str = "circle"

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float).copy()
        if pos.ndim != 1 or pos.size == 0:
            raise DomainError("positions must be a nonempty 1-d array")
        if self.space not in ("circle", "line"):
            raise DomainError(f"unknown space {self.space!r}")
        if self.space == "circle":
            pos = wrap_angle(pos)
        pos.flags.writeable = False
        object.__setattr__(self, "positions", pos)
        if self.frequencies is not None:
            freq = np.asarray(self.frequencies, dtype=float).copy()
            if freq.shape != pos.shape:
                raise DomainError("frequencies must match positions in shape")
            freq.flags.writeable = False
            object.__setattr__(self, "frequencies", freq)

    @property
    def n(self) -> int:
        return len(self.positions)


class InteractionKernel:
    """Pairwise interaction ``phi(x, y)`` plus the reductions built on it.

    Subclasses override :meth:`phi`; the generic mean/velocity reductions
    here are O(N^2) and exact, and the trigonometric kernels replace them
    with O(N) order-parameter forms (identical real-arithmetic identities,
    so they agree to rounding).
    """

    def phi(self, x, y):
        raise NotImplementedError

    def mean_interaction(self, positions: np.ndarray) -> np.ndarray:
        """Componentwise ``(1/N) sum_j phi(x_i, x_j)``, self term included."""
        out = np.empty_like(positions)
        for i in range(len(positions)):
            out[i] = exact_mean(self.phi(positions[i], positions))
        return out

    def circle_velocity(self, theta, nodes: np.ndarray, masses: np.ndarray):
        """Transport velocity ``sum_k phi(theta, y_k) m_k`` of a mass vector."""
        th = np.atleast_1d(np.asarray(theta, dtype=float))
        out = np.array([np.dot(self.phi(t, nodes), masses) for t in th])
        return out if np.ndim(theta) else float(out[0])


@dataclass(frozen=True)
class KuramotoSin(InteractionKernel):
    """Classic sine coupling ``phi(x, y) = coupling * sin(y - x)``."""

    coupling: float = 1.0

    def phi(self, x, y):
        return self.coupling * np.sin(np.asarray(y, dtype=float) - x)

    def mean_interaction(self, positions: np.ndarray) -> np.ndarray:
        # (1/N) sum_j sin(x_j - x_i) = Im(R * conj(z_i)) with R the exact
        # mean of z_j = exp(i x_j); one pass, permutation-invariant.
        z = np.exp(1j * positions)
        r = exact_mean_complex(z)
        return self.coupling * (r * np.conj(z)).imag

    def circle_velocity(self, theta, nodes, masses):
        z = complex(np.dot(masses, np.cos(nodes)), np.dot(masses, np.sin(nodes)))
        out = self.coupling * (z * np.exp(-1j * np.asarray(theta, dtype=float))).imag
        return out if np.ndim(theta) else float(out)


@dataclass(frozen=True)
class OddTrig(InteractionKernel):
    """Odd trigonometric polynomial ``phi(x, y) = sum_m K_m sin(m (y - x))``.

    ``coefficients[m-1]`` is the coupling of harmonic ``m``.
    """

    coefficients: tuple

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        if len(self.coefficients) == 0:
            raise DomainError("OddTrig needs at least one harmonic coefficient")

    def phi(self, x, y):
        d = np.asarray(y, dtype=float) - x
        out = np.zeros_like(d)
        for m, km in enumerate(self.coefficients, start=1):
            out += km * np.sin(m * d)
        return out

    def mean_interaction(self, positions: np.ndarray) -> np.ndarray:
        out = np.zeros_like(positions)
        for m, km in enumerate(self.coefficients, start=1):
            if km == 0.0:
                continue
            z = np.exp(1j * m * positions)
            r = exact_mean_complex(z)
            out += km * (r * np.conj(z)).imag
        return out


@dataclass(frozen=True)
class TabulatedGradient(InteractionKernel):
    """Kernel of gradient shape ``phi(x, y) = Phi'(x - y)`` with ``Phi'``
    given by linear interpolation of samples.

    ``offsets`` must be strictly increasing.  With ``periodic=True`` the
    offset is wrapped into the base window (circle use); otherwise
    querying outside the window raises :class:`KernelDomain` (line use).
    """

    offsets: np.ndarray
    values: np.ndarray
    periodic: bool = False

    def __post_init__(self):
        u = np.asarray(self.offsets, dtype=float).copy()
        v = np.asarray(self.values, dtype=float).copy()
        if u.ndim != 1 or u.shape != v.shape or len(u) < 2:
            raise DomainError("offsets/values must be matching 1-d arrays, length >= 2")
        if np.any(np.diff(u) <= 0):
            raise DomainError("offsets must be strictly increasing")
        u.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "offsets", u)
        object.__setattr__(self, "values", v)

    def phi(self, x, y):
        d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        u0, u1 = self.offsets[0], self.offsets[-1]
        if self.periodic:
            d = u0 + np.mod(d - u0, u1 - u0)
        elif np.any((d < u0) | (d > u1)):
            raise KernelDomain(
                f"offset outside tabulated window [{u0:.6g}, {u1:.6g}]"
            )
        return np.interp(d, self.offsets, self.values)


def ds_rhs(state: ParticleState, kernel: InteractionKernel) -> np.ndarray:
    """Right-hand side of the finite system at the given state."""
    drift = kernel.mean_interaction(state.positions)
    if state.frequencies is not None:
        drift = state.frequencies + drift
    return drift


def _simulate_positions(
    y0: np.ndarray,
    kernel: InteractionKernel,
    frequencies: np.ndarray | None,
    dt: float,
    t_end: float,
    output_every: float | None,
    circle: bool,
) -> Trajectory:
    # Single integration path shared by the finite system and the
    # continuum-limit solver: identical inputs give identical bytes.
    if t_end > 0.0 and dt > t_end:
        raise DomainError(f"dt = {dt} exceeds final time {t_end}")
    if frequencies is None:
        rhs = kernel.mean_interaction
    else:
        def rhs(y):
            return frequencies + kernel.mean_interaction(y)

    return integrate_fixed(
        rhs,
        y0,
        dt,
        t_end,
        record_every=record_stride(dt, output_every),
        wrap=wrap_angle if circle else None,
    )


def ds_simulate(
    state: ParticleState,
    kernel: InteractionKernel,
    dt: float,
    t_end: float,
    output_every: float | None = None,
) -> Trajectory:
    """Fixed-step RK4 trajectory of the finite system.

    Circle states integrate on the real lift within each step and wrap at
    step boundaries.  ``output_every`` selects the recording interval
    (``None`` records every step); the initial and final states are always
    recorded.
    """
    return _simulate_positions(
        state.positions, kernel, state.frequencies, dt, t_end, output_every,
        circle=state.space == "circle",
    )


def discrete_twisted_state(n: int, m: int, q: float = 0.0) -> ParticleState:
    """Finite counterpart of a twisted field: ``x_j = 2*pi*j*m/n + q``."""
    if n < 1:
        raise DomainError("need at least one particle")
    return ParticleState(wrap_angle(TWO_PI * np.arange(n) * m / n + q))


def to_empirical(state: ParticleState) -> EmpiricalMeasure:
    """Uniformly weighted empirical measure of the particle positions."""
    n = state.n
    return EmpiricalMeasure(state.positions, np.full(n, 1.0 / n), state.space)
