"""Closed forms for the Poisson-kernel (Ott-Antonsen) density family.

The family is parameterized by a phase ``alpha`` in ``[-pi, pi)`` and a
concentration ``beta`` in ``[0, 1)``:

    density      f(theta) = (1 - b^2) / (2*pi * (1 - 2 b cos(theta + a) + b^2))
    CDF          F(theta) = theta/(2*pi) + (T(theta + a) - T(a)) / pi,
                 where T(psi) = arctan(b sin(psi) / (1 - b cos(psi)))
    quantile     branch-tracked arctan expression, see :func:`oa_quantile`
    shift        C = -T(a) / pi, the label offset that anchors the
                 quantile family so the value at label 0 is angle 0

``beta == 0`` is the uniform density; ``beta -> 1`` concentrates at the
angle ``-alpha`` (equivalently ``2*pi - alpha``).  Under the attractive
sine interaction the family is invariant with

    d(beta)/dt = beta (1 - beta^2) / 2,     d(alpha)/dt = 0,

solved in closed form by :func:`oa_flow`.  All functions are vectorized
over their angle/label argument.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .circle import TWO_PI, LabelGrid, ThetaGrid, CircularDensity, wrap_pm_pi
from .errors import BranchEvaluation, DomainError

#: Concentrations at least this close to 1 are clamped at construction.
BETA_CAP = 1.0 - 1e-9
#: Distance from a tangent pole below which the quantile falls back to
#: root finding on the CDF.
POLE_TOL = 1e-12


@dataclass(frozen=True)
class OAPoint:
    """A member of the density family: phase ``alpha``, concentration ``beta``.

    ``alpha`` is wrapped into ``[-pi, pi)``; ``beta`` must lie in
    ``[0, 1]`` and is clamped to at most ``BETA_CAP``.  Values above one
    are rejected.
    """

    alpha: float
    beta: float

    def __post_init__(self):
        b = float(self.beta)
        if not np.isfinite(b) or b < 0.0:
            raise DomainError(f"beta must be in [0, 1], got {self.beta!r}")
        if b > 1.0 + 1e-12:
            raise DomainError(f"beta must not exceed 1, got {self.beta!r}")
        if not np.isfinite(float(self.alpha)):
            raise DomainError(f"alpha must be finite, got {self.alpha!r}")
        a = float(wrap_pm_pi(float(self.alpha)))
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", min(b, BETA_CAP))


@dataclass(frozen=True)
class OAFlowState:
    """A family member together with the time at which it occurs."""

    point: OAPoint
    time: float


def _poisson_denominator(p: OAPoint, psi):
    return 1.0 - 2.0 * p.beta * np.cos(psi) + p.beta * p.beta


def oa_density(p: OAPoint, theta):
    """Family density at angle ``theta``; strictly positive for beta < 1."""
    th = np.asarray(theta, dtype=float)
    out = (1.0 - p.beta**2) / (TWO_PI * _poisson_denominator(p, th + p.alpha))
    return out if out.ndim else float(out)


def oa_cell_averages(p: OAPoint, grid: ThetaGrid) -> CircularDensity:
    """Exact cell averages of the family density over ``[theta_j, theta_{j+1})``.

    Computed from CDF increments, so the cumulative mass up to every grid
    node is exact.  This is the right initial datum for the finite-volume
    transport solver: its reconstructed CDF then starts with no sampling
    bias at the nodes.
    """
    edges = np.append(grid.nodes, TWO_PI)
    masses = np.diff(oa_cdf(p, edges))
    return CircularDensity(grid, masses / grid.spacing)


def _arctan_term(p: OAPoint, psi):
    # T(psi): denominator 1 - b cos(psi) >= 1 - b > 0, so no pole.
    return np.arctan(p.beta * np.sin(psi) / (1.0 - p.beta * np.cos(psi)))


def oa_cdf(p: OAPoint, theta):
    """Circular CDF anchored at angle zero; F(0) = 0 and F(2*pi) = 1."""
    th = np.asarray(theta, dtype=float)
    if np.any((th < -1e-9) | (th > TWO_PI + 1e-9)):
        raise DomainError("oa_cdf argument outside [0, 2*pi]")
    out = th / TWO_PI + (_arctan_term(p, th + p.alpha) - _arctan_term(p, p.alpha)) / np.pi
    return out if out.ndim else float(out)


def oa_shift(p: OAPoint) -> float:
    """Anchor shift of the quantile family.

    ``oa_shift`` is the label offset C with ``C = -T(alpha)/pi`` in the
    notation of :func:`oa_cdf`; composing the quantile with
    ``xi + C`` keeps label 0 glued to angle 0 across the family.  Always
    lies in ``(-1/2, 1/2)``.
    """
    return float(-_arctan_term(p, p.alpha) / np.pi)


def _quantile_fallback(p: OAPoint, xi: float) -> float:
    """Root finding on the CDF, used near tangent poles of the closed form."""
    try:
        return brentq(
            lambda th: oa_cdf(p, th) - xi, 0.0, TWO_PI, xtol=1e-14, rtol=8.9e-16
        )
    except Exception as exc:  # pragma: no cover - brentq failure is pathological
        raise BranchEvaluation(
            f"quantile fallback failed at xi={xi!r} for {p!r}"
        ) from exc


def oa_quantile(p: OAPoint, xi):
    """Inverse CDF on ``[0, 1]``, continuous and increasing onto ``[0, 2*pi]``.

    Closed form: with ``r = (1 - b)/(1 + b)`` and
    ``A = arctan(tan(a/2)/r)``, the expression

        2 * [arctan(r * tan(pi*xi + A)) + pi * floor((pi*xi + A + pi/2)/pi)] - a

    is the branch-tracked evaluation of the textbook two-branch formula:
    the floor term adds the ``2*pi*k`` correction that undoes the arctan
    jumps, so no case split at the branch label is needed.  Arguments
    landing within ``POLE_TOL`` of a tangent pole are evaluated by root
    finding on :func:`oa_cdf` instead; :class:`BranchEvaluation` is raised
    only if that fallback also fails.
    """
    x = np.asarray(xi, dtype=float)
    scalar = x.ndim == 0
    if np.any((x < -1e-12) | (x > 1.0 + 1e-12)):
        raise DomainError("quantile argument outside [0, 1]")
    x = np.atleast_1d(np.clip(x, 0.0, 1.0))
    if p.beta == 0.0:
        out = TWO_PI * x
        return float(out[0]) if scalar else out

    b = p.beta
    r = (1.0 - b) / (1.0 + b)
    big_a = np.arctan(np.tan(0.5 * p.alpha) / r)
    u = np.pi * x + big_a
    k = np.floor((u + 0.5 * np.pi) / np.pi)
    with np.errstate(over="ignore", invalid="ignore"):
        theta = 2.0 * (np.arctan(r * np.tan(u)) + np.pi * k) - p.alpha

    near_pole = np.abs(np.cos(u)) < POLE_TOL
    if np.any(near_pole):
        for i in np.nonzero(near_pole)[0]:
            theta[i] = _quantile_fallback(p, float(x[i]))
    theta = np.clip(theta, 0.0, TWO_PI)
    return float(theta[0]) if scalar else theta


def oa_partials(p: OAPoint, theta):
    """Partial derivatives of the CDF and the anchor shift.

    Returns ``(dF_dalpha, dF_dbeta, dF_dtheta, dC_dalpha, dC_dbeta)``
    evaluated at ``theta`` (the shift partials do not depend on theta).
    ``dF_dtheta`` equals the density.
    """
    th = np.asarray(theta, dtype=float)
    b = p.beta
    psi = th + p.alpha
    d_psi = _poisson_denominator(p, psi)
    d_a = _poisson_denominator(p, p.alpha)

    t_prime_psi = (b * np.cos(psi) - b * b) / d_psi
    t_prime_alpha = (b * np.cos(p.alpha) - b * b) / d_a
    df_dalpha = (t_prime_psi - t_prime_alpha) / np.pi
    df_dbeta = (np.sin(psi) / d_psi - np.sin(p.alpha) / d_a) / np.pi
    df_dtheta = oa_density(p, th)
    dc_dalpha = -t_prime_alpha / np.pi
    dc_dbeta = -np.sin(p.alpha) / (np.pi * d_a)
    return df_dalpha, df_dbeta, df_dtheta, float(dc_dalpha), float(dc_dbeta)


def oa_vector_field(p: OAPoint) -> tuple[float, float]:
    """Reduced dynamics ``(d alpha/dt, d beta/dt)`` on the family."""
    return 0.0, 0.5 * p.beta * (1.0 - p.beta**2)


def oa_flow(p: OAPoint, t: float) -> OAPoint:
    """Closed-form flow of the reduced dynamics after time ``t``.

    ``beta(t) = beta0 / sqrt(beta0^2 + (1 - beta0^2) exp(-t))``; alpha is
    constant.  Evaluated in an overflow-safe form for either sign of t;
    ``beta(t)`` stays inside ``[0, 1)`` for all finite t (construction
    clamping absorbs the rounding at the synchronized end).
    """
    if not np.isfinite(t):
        raise DomainError(f"flow time must be finite, got {t!r}")
    b0 = p.beta
    if b0 == 0.0:
        return OAPoint(p.alpha, 0.0)
    one_minus = 1.0 - b0 * b0
    if t >= 0.0:
        bt = b0 / np.sqrt(b0 * b0 + one_minus * np.exp(-t))
    else:
        half = np.exp(0.5 * t)
        bt = b0 * half / np.sqrt(b0 * b0 * np.exp(t) + one_minus)
    return OAPoint(p.alpha, float(bt))


def poisson_circular_moment(p: OAPoint) -> complex:
    """Exact value of ``int_0^{2pi} e^{iu} / (1 - 2 b cos(a + u) + b^2) du``.

    Equals ``2*pi*b*e^{-i a} / (1 - b^2)``: the first circular moment of
    the unnormalized Poisson kernel.
    """
    b = p.beta
    return TWO_PI * b * np.exp(-1j * p.alpha) / (1.0 - b * b)


def oa_mean_sine(p: OAPoint, theta):
    """Mean sine interaction felt at ``theta`` under the family density.

    Closed form of ``int sin(u - theta) f(u) du = -beta * sin(alpha + theta)``,
    which is also the midpoint-quadrature limit of
    ``int_0^1 sin(Q(z) - theta) dz`` for the family quantile Q.
    """
    th = np.asarray(theta, dtype=float)
    out = -p.beta * np.sin(p.alpha + th)
    return out if out.ndim else float(out)
