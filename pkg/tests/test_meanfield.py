"""Mode-hierarchy and grid descriptions of the mean-field density."""
import numpy as np
import pytest

from kuralim import (
    CflViolation,
    CircularDensity,
    DensityTrajectory,
    DomainError,
    FourierDensity,
    KuramotoSin,
    OAPoint,
    TailBlowup,
    ThetaGrid,
    linearized_operator,
    linearized_spectrum,
    mfl_simulate_grid,
    mfl_simulate_spectral,
    oa_cell_averages,
    oa_flow,
    order_parameter,
    spectral_rhs,
)

TWO_PI = 2.0 * np.pi


def test_fourier_density_validation():
    FourierDensity(np.array([0.1 + 0.0j]))
    with pytest.raises(DomainError):
        FourierDensity(np.array([], dtype=complex))
    with pytest.raises(DomainError):
        FourierDensity.from_oa(OAPoint(0.0, 0.5), 0)


def test_from_oa_modes_are_geometric():
    p = OAPoint(0.8, 0.3)
    d = FourierDensity.from_oa(p, 6)
    a = p.beta * np.exp(1j * p.alpha)
    assert np.allclose(d.modes, a ** np.arange(1, 7), atol=1e-15)


def test_to_grid_reproduces_cell_averages():
    # the mode sum integrated cell by cell must match averages computed
    # from the exact distribution function
    p = OAPoint(-0.4, 0.2)
    grid = ThetaGrid(256)
    from_modes = FourierDensity.from_oa(p, 64).to_grid(grid)
    exact = oa_cell_averages(p, grid)
    assert np.max(np.abs(from_modes.values - exact.values)) < 1e-13
    assert abs(np.sum(from_modes.values) * grid.spacing - 1.0) < 1e-13


def test_to_grid_refuses_aliasing():
    d = FourierDensity.from_oa(OAPoint(0.0, 0.3), 64)
    with pytest.raises(DomainError):
        d.to_grid(ThetaGrid(64))


def test_order_parameter_dispatch():
    p = OAPoint(1.2, 0.35)
    spec = FourierDensity.from_oa(p, 8)
    assert order_parameter(spec) == spec.modes[0]
    grid_val = order_parameter(oa_cell_averages(p, ThetaGrid(512)))
    assert abs(grid_val - p.beta * np.exp(1j * p.alpha)) < 1e-4
    finer = order_parameter(oa_cell_averages(p, ThetaGrid(1024)))
    coarse_err = abs(grid_val - p.beta * np.exp(1j * p.alpha))
    fine_err = abs(finer - p.beta * np.exp(1j * p.alpha))
    assert fine_err < 0.3 * coarse_err  # second-order in the spacing
    with pytest.raises(DomainError):
        order_parameter(np.zeros(8))


def test_spectral_rhs_single_mode_seed():
    eps = 1e-3
    modes = np.zeros(4, dtype=complex)
    modes[0] = eps
    dot = spectral_rhs(modes)
    assert dot[0] == eps / 2.0  # growth rate 1/2 at the uniform state
    assert dot[1] == eps**2
    assert dot[2] == 0.0 and dot[3] == 0.0


def test_spectral_rhs_on_geometric_modes():
    a = 0.3 * np.exp(0.2j)
    n = np.arange(1, 17)
    modes = a**n
    dot = spectral_rhs(modes)
    expected = 0.5 * n * a**n * (1.0 - abs(a) ** 2)
    # truncation only touches the last retained mode
    assert np.max(np.abs(dot[:-1] - expected[:-1])) < 1e-15
    assert abs(dot[0] - 0.5 * a * (1.0 - abs(a) ** 2)) < 1e-16
    closed = spectral_rhs(modes, oa_tail=True)
    assert np.max(np.abs(closed - expected)) < 1e-15


def test_uniform_state_is_stationary():
    start = FourierDensity(np.zeros(8, dtype=complex))
    traj = mfl_simulate_spectral(start, 1e-2, 1.0)
    assert np.max(np.abs(traj.final)) == 0.0


def test_spectral_run_matches_family_flow():
    p0 = OAPoint(0.5, 0.2)
    traj = mfl_simulate_spectral(FourierDensity.from_oa(p0, 32), 1e-3, 1.0, output_every=0.5)
    for t, modes in zip(traj.times, traj.states):
        beta_t = oa_flow(p0, t).beta
        assert abs(abs(modes[0]) - beta_t) < 1e-9


def test_tail_blowup_detected():
    start = FourierDensity.from_oa(OAPoint(0.0, 0.4), 4)
    with pytest.raises(TailBlowup):
        mfl_simulate_spectral(start, 1e-2, 6.0)


def test_spectral_rejects_bad_horizon():
    with pytest.raises(DomainError):
        mfl_simulate_spectral(FourierDensity(np.zeros(4, dtype=complex)), 1.0, 0.5)


def test_grid_uniform_is_stationary():
    grid = ThetaGrid(128)
    uniform = CircularDensity(grid, np.full(128, 1.0 / TWO_PI))
    traj = mfl_simulate_grid(uniform, KuramotoSin(), 0.01, 1.0)
    assert np.max(np.abs(traj.values[-1] - uniform.values)) < 1e-12


def test_grid_run_conserves_mass_and_positivity():
    grid = ThetaGrid(256)
    traj = mfl_simulate_grid(oa_cell_averages(OAPoint(0.4, 0.2), grid), KuramotoSin(), 0.01, 2.0, output_every=0.5)
    for slc in traj.values:
        assert abs(np.sum(slc) * grid.spacing - 1.0) < 1e-10
        assert np.min(slc) > -1e-12  # upwind flux keeps cells nonnegative


def test_grid_drift_bookkeeping():
    grid = ThetaGrid(256)
    traj = mfl_simulate_grid(oa_cell_averages(OAPoint(0.4, 0.2), grid), KuramotoSin(), 0.01, 1.0, output_every=0.25)
    assert traj.drift is not None
    assert traj.drift[0] == 0.0
    # transport at the cut points against the phase for this family member,
    # so accumulated crossing mass decreases
    assert np.all(np.diff(traj.drift) < 0.0)


def test_cfl_violation_raised():
    grid = ThetaGrid(512)
    dense = oa_cell_averages(OAPoint(0.0, 0.5), grid)
    with pytest.raises(CflViolation):
        mfl_simulate_grid(dense, KuramotoSin(), 0.1, 1.0)


def test_density_trajectory_validation():
    grid = ThetaGrid(8)
    times = np.array([0.0, 1.0])
    values = np.zeros((2, 8))
    DensityTrajectory(times, values, grid)
    with pytest.raises(DomainError):
        DensityTrajectory(times, values, grid, drift=np.zeros(3))
    with pytest.raises(DomainError):
        DensityTrajectory(times, np.zeros((2, 4)), grid)


def test_spectral_and_grid_runs_agree():
    # two independent discretizations of the same evolution
    p0 = OAPoint(0.0, 0.2)
    t_end = 2.0
    spec = mfl_simulate_spectral(FourierDensity.from_oa(p0, 64), 1e-3, t_end, output_every=1.0)
    grid = mfl_simulate_grid(
        oa_cell_averages(p0, ThetaGrid(512)), KuramotoSin(), 0.01, t_end, output_every=1.0
    )
    errs = []
    for k, t in enumerate(spec.times):
        r_spec = abs(spec.states[k][0])
        r_grid = abs(order_parameter(CircularDensity(grid.grid, grid.values[k])))
        errs.append(abs(r_spec - r_grid))
    assert max(errs) < 2e-3
    finer = mfl_simulate_grid(
        oa_cell_averages(p0, ThetaGrid(1024)), KuramotoSin(), 0.005, t_end, output_every=1.0
    )
    errs2 = []
    for k in range(len(spec.times)):
        r_spec = abs(spec.states[k][0])
        r_grid = abs(order_parameter(CircularDensity(finer.grid, finer.values[k])))
        errs2.append(abs(r_spec - r_grid))
    assert max(errs2) < 0.75 * max(errs)


def test_linearized_operator_actions():
    n = 64
    mat = linearized_operator(n)
    theta = ThetaGrid(n).nodes
    sin_out = mat @ np.sin(theta)
    assert np.max(np.abs(sin_out - 0.5 * np.sin(theta))) < 1e-13
    assert np.max(np.abs(mat @ np.cos(2 * theta))) < 1e-13
    assert np.max(np.abs(mat @ np.ones(n))) < 1e-13
    assert np.allclose(mat, mat.T)
    assert abs(np.trace(mat) - 1.0) < 1e-14


def test_linearized_spectrum_half_pair():
    for n in (32, 64):
        ev = linearized_spectrum(linearized_operator(n))
        assert abs(ev[0] - 0.5) < 1e-12 and abs(ev[1] - 0.5) < 1e-12
        assert np.max(np.abs(ev[2:])) < 1e-12
    # the nonzero pair does not move with the mesh
    a = linearized_spectrum(linearized_operator(64))[:2]
    b = linearized_spectrum(linearized_operator(128))[:2]
    assert np.max(np.abs(a - b)) < 1e-10


def test_linearized_operator_validation():
    with pytest.raises(DomainError):
        linearized_operator(2)
    with pytest.raises(DomainError):
        linearized_operator(16, harmonic=8)
    # a higher harmonic shifts which mode pair carries the 1/2 eigenvalue
    ev = linearized_spectrum(linearized_operator(32, harmonic=3))
    assert abs(ev[0] - 0.5) < 1e-12 and abs(ev[1] - 0.5) < 1e-12
