import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from squeezed_battery.dynamics import BathSpec, DriveSpec, drift_diffusion, hamiltonian_matrix
from squeezed_battery.errors import InvalidParameter, UndefinedEfficiency, UnphysicalState
from squeezed_battery.gaussian import (
    ChannelSpec,
    apply_symplectic,
    euler_charged_cov,
    random_state,
    random_symplectic,
    thermal_state,
    vacuum_state,
)
from squeezed_battery.protocol import charging_trajectory, thermo_point
from squeezed_battery.thermo import (
    closed_delta_E,
    delta_E,
    efficiency,
    entropy_from_spectrum,
    free_energy_change,
    internal_energy,
    temperature,
    thermo_report,
    von_neumann_entropy,
    work_heat,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def thermal_entropy(N):
    return (N + 1) * math.log(N + 1) - (N * math.log(N) if N > 0 else 0.0)


class TestEnergy:
    def test_vacuum(self):
        assert internal_energy(vacuum_state(), 1.0) == 0.5

    def test_thermal(self):
        assert internal_energy(thermal_state(1.0), 1.0) == 1.5

    @pytest.mark.parametrize("r", [0.2, 1.0])
    def test_squeezed_vacuum(self, r):
        cov = np.diag([math.exp(2 * r), math.exp(-2 * r)])
        assert internal_energy(cov, 1.0) == pytest.approx(0.5 * math.cosh(2 * r), rel=1e-14)

    def test_per_mode_frequencies(self):
        from squeezed_battery.gaussian import direct_sum

        s = direct_sum(thermal_state(1.0), thermal_state(2.0))
        assert internal_energy(s, [1.0, 2.0]) == pytest.approx(1.5 + 2.0 * 2.5)

    def test_nonzero_mean_rejected(self):
        from squeezed_battery.gaussian import GaussianState

        with pytest.raises(InvalidParameter):
            internal_energy(GaussianState(np.array([1.0, 0.0]), np.eye(2)), 1.0)

    def test_delta_E_examples(self):
        assert delta_E(np.eye(2), np.eye(2), 1.0) == 0.0
        assert delta_E(np.eye(2), 3 * np.eye(2), 1.0) == 1.0
        with pytest.raises(InvalidParameter):
            delta_E(np.eye(2), np.eye(4), 1.0)


class TestWorkHeat:
    def test_identical_states(self):
        assert work_heat(np.eye(2), np.eye(2), 1.0, 0.5) == (0.0, 0.0)

    @given(seeds, st.floats(0.1, 3.0), st.floats(0.0, 2.0))
    def test_first_law(self, seed, mu, lam):
        rng = np.random.default_rng(seed)
        a, b = random_state(1, rng), random_state(1, rng)
        dW, dQ = work_heat(a, b, mu, lam)
        dE = delta_E(a, b, mu)
        assert dW + dQ == pytest.approx(dE, abs=1e-12 * max(1.0, abs(dE)))

    @pytest.mark.parametrize("lam", [0.1, 0.5, 0.9])
    @pytest.mark.parametrize("N", [0.0, 1.0, 2.5])
    def test_no_heat_between_equal_temperatures(self, lam, N):
        rep = thermo_point(DriveSpec(lam=lam), BathSpec(gamma=1.0, N_B=N, N_A=N)).thermo
        assert abs(rep.delta_Q) < 1e-8

    @pytest.mark.parametrize("lam,N_A,N_B,r_B,theta_B", [
        (0.5, 1.0, 1.0, 0.0, 0.0),
        (0.7, 0.3, 2.0, 0.0, 0.0),
        (0.4, 1.0, 1.0, 0.5, 1.2),
    ])
    def test_heat_matches_integrated_flux(self, lam, N_A, N_B, r_B, theta_B):
        """Heat is the time integral of tr(H_s dsigma/dt)/4 along the charging trajectory."""
        drive, bath = DriveSpec(lam=lam), BathSpec(gamma=1.0, N_B=N_B, N_A=N_A, r_B=r_B, theta_B=theta_B)
        dd = drift_diffusion(drive, bath)
        traj = charging_trajectory(drive, bath, dt=1e-3, eps_ss=1e-10)
        H = hamiltonian_matrix(drive)
        dsig = dd.A @ traj.covs + traj.covs @ dd.A.T + dd.D
        flux = np.einsum("ij,tji->t", H, dsig) / 4
        from scipy.integrate import simpson

        heat = simpson(flux, x=traj.times)
        rep = thermo_point(drive, bath).thermo
        assert heat == pytest.approx(rep.delta_Q, abs=1e-8)


class TestEntropy:
    def test_vacuum(self):
        assert von_neumann_entropy(vacuum_state()) == 0.0

    @pytest.mark.parametrize("N", [0.1, 1.0, 5.0])
    def test_thermal_formula(self, N):
        assert von_neumann_entropy(thermal_state(N)) == pytest.approx(thermal_entropy(N), abs=1e-12)

    def test_thermal_n1_is_2ln2(self):
        assert von_neumann_entropy(thermal_state(1.0)) == pytest.approx(2 * math.log(2), abs=1e-14)

    @given(seeds, st.integers(1, 3))
    def test_symplectic_invariance(self, seed, n):
        rng = np.random.default_rng(seed)
        s = random_state(n, rng)
        moved = apply_symplectic(s, random_symplectic(n, rng))
        assert von_neumann_entropy(moved) == pytest.approx(von_neumann_entropy(s), abs=1e-10)

    def test_squeezed_thermal_same_as_thermal(self):
        s = euler_charged_cov(0.8, ChannelSpec(theta=1.3, r=0.9))
        assert von_neumann_entropy(s) == pytest.approx(thermal_entropy(0.8), abs=1e-10)

    def test_nonnegative_and_pure_band(self):
        assert entropy_from_spectrum([1.0 + 1e-13]) == 0.0
        assert entropy_from_spectrum([1.5, 2.0]) > 0

    def test_unphysical_rejected(self):
        with pytest.raises(UnphysicalState):
            entropy_from_spectrum([0.9])


class TestFreeEnergy:
    def test_examples(self):
        a, b = thermal_state(0.5), thermal_state(1.5)
        assert free_energy_change(a, a, 1.0, 2.0) == 0.0
        assert free_energy_change(a, b, 1.0, 0.0) == delta_E(a, b, 1.0)

    @given(seeds, st.floats(0.0, 5.0))
    def test_isentropic_pair(self, seed, T):
        rng = np.random.default_rng(seed)
        a = random_state(1, rng)
        b = apply_symplectic(a, random_symplectic(1, rng))
        assert free_energy_change(a, b, 1.0, T) == pytest.approx(delta_E(a, b, 1.0), abs=1e-9)

    @given(seeds, st.floats(0.0, 5.0))
    def test_path_independence(self, seed, T):
        rng = np.random.default_rng(seed)
        a, b = random_state(1, rng), random_state(1, rng)
        assert free_energy_change(a, b, 1.0, T) == pytest.approx(-free_energy_change(b, a, 1.0, T), abs=1e-12)

    def test_negative_temperature(self):
        with pytest.raises(InvalidParameter):
            free_energy_change(np.eye(2), 3 * np.eye(2), 1.0, -1.0)


class TestEfficiency:
    def test_isentropic_is_one(self):
        b = euler_charged_cov(1.0, ChannelSpec(theta=0.2, r=0.6))
        assert efficiency(thermal_state(1.0), b, 1.0, 1.7) == pytest.approx(1.0, abs=1e-12)

    def test_undefined(self):
        with pytest.raises(UndefinedEfficiency):
            efficiency(np.eye(2), np.eye(2), 1.0, 1.0)
        with pytest.raises(ZeroDivisionError):
            efficiency(np.eye(2), np.eye(2), 1.0, 1.0)

    @given(seeds, st.floats(0.0, 5.0))
    def test_bounded_by_one_when_entropy_grows(self, seed, T):
        rng = np.random.default_rng(seed)
        a, b = random_state(1, rng), random_state(1, rng)
        dE = delta_E(a, b, 1.0)
        dS = von_neumann_entropy(b) - von_neumann_entropy(a)
        if dE > 1e-9 and dS >= 0:
            assert efficiency(a, b, 1.0, T) <= 1.0 + 1e-12

    def test_weak_drive_limit(self):
        rep = thermo_point(DriveSpec(lam=1e-3), BathSpec(gamma=1.0, N_B=1.0, N_A=1.0)).thermo
        assert rep.eta == pytest.approx(0.5, abs=0.01)

    def test_report_consistency(self):
        rep = thermo_point(DriveSpec(lam=0.6), BathSpec(gamma=0.8, N_B=2.0, N_A=0.5, r_B=0.4)).thermo
        assert rep.eta == pytest.approx(rep.delta_F / rep.delta_E, rel=1e-14)
        assert rep.delta_E == pytest.approx(rep.delta_W + rep.delta_Q, abs=1e-12)
        assert rep.S_A >= 0 and rep.S_B >= 0
        assert rep.as_dict()["eta"] == rep.eta


class TestTemperature:
    def test_conventions(self):
        assert temperature("unit", 3.0, 2.0) == 1.0
        assert temperature("bath_b", 1.0, 1.0) == pytest.approx(1 / math.log(2))
        assert temperature("bath_b", 1.0, 0.0) == 0.0

    def test_unknown(self):
        with pytest.raises(InvalidParameter):
            temperature("kelvin")

    @pytest.mark.parametrize("N", [0.2, 1.0, 4.0])
    def test_bath_b_inverts_occupation(self, N):
        from squeezed_battery.gaussian import thermal_occupation

        T = temperature("bath_b", 1.3, N)
        assert thermal_occupation(1 / T, 1.3) == pytest.approx(N, rel=1e-12)


class TestClosedDeltaE:
    def test_zero_squeezing(self):
        assert closed_delta_E(0.0, 1.0, 1.0) == 0.0

    def test_closed_form_on_grid(self):
        for r in np.linspace(0, 1.5, 7):
            for N in (0.0, 0.5, 2.0):
                assert closed_delta_E(r, N, 1.3) == pytest.approx(1.3 * (1 + 2 * N) * math.sinh(r) ** 2,
                                                                  rel=1e-12, abs=1e-15)

    def test_rotation_independent(self):
        a = thermal_state(0.7)
        vals = [delta_E(a, euler_charged_cov(0.7, ChannelSpec(theta=t, r=0.8)), 1.0)
                for t in np.linspace(0, 2 * math.pi, 9)]
        np.testing.assert_allclose(vals, closed_delta_E(0.8, 0.7, 1.0), rtol=1e-12)

    def test_strictly_increasing_in_r(self):
        vals = [closed_delta_E(r, 1.0, 1.0) for r in np.linspace(0.01, 2.0, 50)]
        assert np.all(np.diff(vals) > 0)

    def test_negative_r(self):
        with pytest.raises(InvalidParameter):
            closed_delta_E(-0.1, 0.0, 1.0)


def test_thermo_report_fields():
    rep = thermo_report(thermal_state(1.0), thermal_state(2.0), 1.0, 0.0, 1.0)
    assert rep.delta_E == pytest.approx(1.0)
    assert rep.delta_W == 0.0
    assert rep.delta_S == pytest.approx(thermal_entropy(2.0) - thermal_entropy(1.0))
