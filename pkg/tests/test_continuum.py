"""Label-indexed continuum dynamics and the invariant-family fields."""
import numpy as np
import pytest

from kuralim import (
    DomainError,
    KuramotoSin,
    LabelField,
    LabelGrid,
    OAPoint,
    ParticleState,
    cl_rhs,
    cl_simulate,
    ds_simulate,
    manifold_field,
    oa_flow,
    oa_quantile,
    oa_shift,
    twisted_field,
    wrap_angle,
    wrap_label,
)
from kuralim._reduce import exact_mean_complex

TWO_PI = 2.0 * np.pi


def test_label_field_validation():
    g = LabelGrid(8)
    LabelField(g, np.zeros(8))
    with pytest.raises(DomainError):
        LabelField(g, np.zeros(7))


def test_twisted_field_values():
    g = LabelGrid(4)
    f = twisted_field(g, 1)
    assert np.allclose(f.values, TWO_PI * g.midpoints)
    assert np.allclose(twisted_field(g, 0, q=1.0).values, 1.0)
    two = twisted_field(g, 2)
    assert np.allclose(two.values, wrap_angle(2 * TWO_PI * g.midpoints))


@pytest.mark.parametrize("m,q", [(0, 0.0), (1, 0.0), (2, 1.0), (3, 0.5)])
def test_twisted_fields_are_equilibria(m, q):
    f = twisted_field(LabelGrid(256), m, q)
    assert np.max(np.abs(cl_rhs(f, KuramotoSin()))) < 1e-14


def test_cl_rhs_is_label_mean_of_pair_interaction():
    g = LabelGrid(32)
    rng = np.random.default_rng(4)
    f = LabelField(g, rng.uniform(0, TWO_PI, 32))
    rhs = cl_rhs(f, KuramotoSin())
    for i in [0, 13, 31]:
        direct = np.mean(np.sin(f.values - f.values[i]))
        assert abs(rhs[i] - direct) < 1e-14


def test_cl_and_ds_agree_bitwise():
    rng = np.random.default_rng(9)
    x = rng.uniform(0, TWO_PI, 64)
    a = cl_simulate(LabelField(LabelGrid(64), x), KuramotoSin(), 0.01, 1.0)
    b = ds_simulate(ParticleState(x.copy()), KuramotoSin(), 0.01, 1.0)
    # the two descriptions use the same reduction, so equal data must
    # produce equal floats
    assert np.array_equal(a.final, b.final)
    assert np.array_equal(np.asarray(a.states), np.asarray(b.states))


def test_manifold_field_beta_zero_is_single_twist():
    g = LabelGrid(128)
    for q in (0.0, 1.7):
        f = manifold_field(g, OAPoint(0.9, 0.0), q=q)
        t = twisted_field(g, 1, q)
        assert np.max(np.abs(f.values - t.values)) < 1e-12


def test_manifold_field_law_matches_family_moment():
    # the field pushes uniform labels to the family density, so its
    # empirical first moment reproduces the circular moment beta*exp(-i*alpha)
    p = OAPoint(-0.7, 0.45)
    f = manifold_field(LabelGrid(256), p)
    z = exact_mean_complex(np.exp(1j * f.values))
    assert abs(z - p.beta * np.exp(-1j * p.alpha)) < 1e-12


def test_manifold_field_q_rotates_labels():
    g = LabelGrid(64)
    p = OAPoint(0.3, 0.2)
    base = manifold_field(g, p)
    q = 0.7
    shifted = manifold_field(g, p, q=q)
    expected = wrap_angle(oa_quantile(p, wrap_label(g.midpoints + oa_shift(p) + q / TWO_PI)))
    assert np.max(np.abs(shifted.values - expected)) < 1e-14
    # same law either way: sorted values interleave within one label step
    assert np.max(np.abs(np.sort(base.values) - np.sort(shifted.values))) < TWO_PI / 64 * 10


def test_manifold_family_is_invariant_short_run():
    # evolving the field for a short time lands on the field of the
    # flowed family member
    p0 = OAPoint(0.3, 0.1)
    g = LabelGrid(256)
    t_end = 0.5
    traj = cl_simulate(manifold_field(g, p0), KuramotoSin(), 1e-3, t_end)
    target = manifold_field(g, oa_flow(p0, t_end)).values
    assert np.max(np.abs(wrap_angle(traj.final) - target)) < 1e-6


def test_simulate_rejects_bad_horizon():
    f = twisted_field(LabelGrid(8), 1)
    with pytest.raises(DomainError):
        cl_simulate(f, KuramotoSin(), 1.0, 0.5)
