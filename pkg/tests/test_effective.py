import numpy as np
import pytest

from nlslab import (
    AnsatzManifold,
    DegenerateOmegaError,
    DomainExitError,
    StepConfig,
    compare_with_pde,
    effective_hamiltonian,
    effective_rhs,
    ghw_manifold,
    integrate_effective,
    make_grid,
    omega_matrix,
    single_soliton_manifold,
)
from nlslab.effective import field_observables
from nlslab.presymplectic import bisect_parameter, pullback_energy_gradient
from nlslab.profiles import gaussian_profile


@pytest.fixture(scope="module")
def soliton_family(grid512):
    return single_soliton_manifold(grid512)


@pytest.fixture(scope="module")
def on_curve_setup():
    g = make_grid(1024, 120.0)
    m = ghw_manifold(g, gamma=0.1, restricted=True)
    base = {"eta": 0.8, "phi": 0.0, "psi": np.pi / 4}
    return m, m.theta_from(bisect_parameter(m, base, "a", 0.33, 0.37))


class TestEffectiveHamiltonian:
    def test_boosted_soliton_value(self, soliton_family):
        h = effective_hamiltonian(soliton_family, [1.0, 0.0, 0.5, 0.0], 3.0)
        assert h == pytest.approx(-1.0 / 6.0 + 1.0 / 8.0, abs=1e-7)

    def test_resting_soliton_value(self, soliton_family):
        for eta in (0.7, 1.0, 1.5):
            h = effective_hamiltonian(soliton_family, [eta, 0.3, 0.0, 0.2], 3.0)
            assert h == pytest.approx(-(eta**3) / 6.0, abs=1e-7)

    def test_position_and_phase_independence(self, soliton_family):
        theta = np.array([1.2, 0.7, 0.4, 0.3])
        grad = pullback_energy_gradient(soliton_family, theta, 3.0)
        assert abs(grad[1]) < 1e-8  # d/dZ
        assert abs(grad[3]) < 1e-8  # d/dphi

    def test_analytic_energy_matches_field_energy(self, soliton_family):
        # closed form against the embedded-field Hamiltonian, both powers
        from nlslab import hamiltonian

        theta = np.array([1.1, 0.5, 0.4, 0.2])
        for p in (3.0, 5.0):
            direct = hamiltonian(soliton_family.field(theta), p)
            assert effective_hamiltonian(soliton_family, theta, p) == pytest.approx(
                direct, rel=1e-9
            )

    def test_domain_violation(self, soliton_family):
        with pytest.raises(ValueError):
            effective_hamiltonian(soliton_family, [-1.0, 0.0, 0.0, 0.0], 3.0)


class TestEffectiveRhs:
    def test_free_soliton_velocities(self, soliton_family):
        rhs = effective_rhs(soliton_family, [1.0, 0.0, 0.3, 0.0], 3.0)
        assert abs(rhs[0]) < 1e-6           # eta steady
        assert rhs[1] == pytest.approx(0.3, abs=1e-6)   # Z moves at V
        assert abs(rhs[2]) < 1e-6           # V steady
        assert rhs[3] == pytest.approx(0.455, abs=1e-6)  # frozen phase rate

    def test_resting_soliton_is_stationary_except_phase(self, soliton_family):
        rhs = effective_rhs(soliton_family, [1.3, 0.0, 0.0, 0.0], 3.0)
        assert abs(rhs[0]) < 1e-8 and abs(rhs[1]) < 1e-8 and abs(rhs[2]) < 1e-8

    def test_linear_system_residual(self, soliton_family):
        theta = np.array([1.1, 0.4, 0.25, 0.6])
        rhs = effective_rhs(soliton_family, theta, 3.0)
        om = omega_matrix(soliton_family, theta).entries
        grad = pullback_energy_gradient(soliton_family, theta, 3.0)
        assert np.linalg.norm(om @ rhs - grad) < 1e-10 * np.linalg.norm(grad)

    def test_degenerate_point_raises_with_kernel(self, on_curve_setup):
        m, theta = on_curve_setup
        with pytest.raises(DegenerateOmegaError) as excinfo:
            effective_rhs(m, theta, 3.0)
        err = excinfo.value
        assert err.condition >= 1e8
        om = omega_matrix(m, theta).entries
        assert np.linalg.norm(om @ err.kernel_direction) < 1e-6 * np.linalg.norm(om, 2)


class TestIntegrateEffective:
    def test_free_soliton_transport(self, soliton_family):
        states = integrate_effective(soliton_family, [1.0, 0.0, 0.3, 0.0], 3.0, 1e-2, 5.0)
        final = states[-1].theta
        assert abs(final[1] - 1.5) < 1e-4
        assert abs(final[0] - 1.0) < 1e-6
        assert all(s.omega_condition < 100 for s in states)

    def test_resting_soliton_constant_but_phase(self, soliton_family):
        theta0 = np.array([1.2, 0.5, 0.0, 0.1])
        states = integrate_effective(soliton_family, theta0, 3.0, 1e-2, 1.0)
        final = states[-1].theta
        assert np.max(np.abs(final[:3] - theta0[:3])) < 1e-8
        assert abs(final[3] - theta0[3]) > 0.1  # phase advanced

    def test_energy_conserved_along_flow(self, soliton_family):
        states = integrate_effective(soliton_family, [1.0, 0.0, 0.3, 0.0], 3.0, 1e-2, 5.0)
        h = [effective_hamiltonian(soliton_family, s.theta, 3.0) for s in states]
        assert max(abs(v - h[0]) for v in h) < 1e-8 * abs(h[0])

    def test_degeneracy_halt_carries_partial_trajectory(self, on_curve_setup):
        m, theta = on_curve_setup
        with pytest.raises(DegenerateOmegaError) as excinfo:
            integrate_effective(m, theta, 3.0, 1e-2, 1.0)
        assert excinfo.value.states == []  # degenerate from the very start

    def test_domain_exit_halts(self, grid512):
        base = single_soliton_manifold(grid512)
        boxed = AnsatzManifold(
            name="boxed", param_names=base.param_names, embed=base.embed,
            grid=grid512, tangents=base.tangents,
            domain=((1e-6, np.inf), (-1.0, 1.0), (-np.inf, np.inf), (-np.inf, np.inf)),
            energy_theta=base.energy_theta, energy_grad_theta=base.energy_grad_theta,
        )
        with pytest.raises(DomainExitError) as excinfo:
            integrate_effective(boxed, [1.0, 0.0, 0.5, 0.0], 3.0, 1e-2, 5.0)
        assert len(excinfo.value.states) > 10

    def test_step_validation(self, soliton_family):
        with pytest.raises(ValueError):
            integrate_effective(soliton_family, [1.0, 0.0, 0.0, 0.0], 3.0, 0.0, 1.0)


@pytest.fixture(scope="module")
def free_report(soliton_family):
    cfg = StepConfig(dt=1e-3, t_final=5.0, observer_stride=100)
    return compare_with_pde(soliton_family, np.array([1.0, 0.0, 0.3, 0.0]), 3.0, cfg)


class TestCompareWithPde:
    def test_centroid_tracks_pde(self, free_report):
        assert free_report.max_deviation["centroid"] < 1e-3

    def test_mass_matches_to_roundoff(self, free_report):
        assert free_report.max_deviation["mass"] < 1e-10

    def test_momentum_and_phase_track(self, free_report):
        assert free_report.max_deviation["momentum"] < 1e-6
        assert free_report.max_deviation["phase"] < 1e-3

    def test_perturbed_data_stays_close(self, soliton_family, grid512):
        # ceilings recorded from the first run of this regression
        theta0 = np.array([1.0, 0.0, 0.3, 0.0])
        initial = soliton_family.field(theta0) + 0.01 * gaussian_profile(grid512)
        cfg = StepConfig(dt=1e-3, t_final=5.0, observer_stride=250)
        report = compare_with_pde(soliton_family, theta0, 3.0, cfg, initial=initial)
        assert report.max_deviation["mass"] < 0.04
        assert report.max_deviation["centroid"] < 0.02
        assert report.max_deviation["momentum"] < 0.02
        assert report.max_deviation["phase"] < 0.12

    def test_observables_fields(self, grid512, soliton_family):
        obs = field_observables(soliton_family.field(np.array([1.0, 2.0, 0.5, 0.3])))
        assert obs["mass"] == pytest.approx(2.0, abs=1e-9)
        assert obs["centroid"] == pytest.approx(2.0, abs=1e-9)
        assert obs["momentum"] == pytest.approx(1.0, abs=1e-9)
        assert obs["phase"] == pytest.approx((0.5 * 2.0 + 0.3) % (2 * np.pi), abs=1e-6)
