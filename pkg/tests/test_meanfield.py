import math

import numpy as np
import pytest

from heraldsim.errors import DivergenceError
from heraldsim.meanfield import (
    ClassicalTrajectory,
    classical_rhs,
    integrate_classical,
    local_from_normal,
    max_classical_dt,
    normal_from_local,
)
from heraldsim.system import PulseSpec, SystemParams, default_params


def quiet_params(**kw):
    base = dict(J_c=8.45, kappa_plus=0.486, kappa_minus=0.338,
                Omega_1=5.08, Omega_2=5.13, g=8.6e-4, gamma=3.75e-6)
    base.update(kw)
    return SystemParams(**base)


class TestBasisMaps:
    def test_symmetric_input(self):
        one, two = local_from_normal(1.0, 1.0)
        assert one == pytest.approx(math.sqrt(2)) and two == pytest.approx(0.0)

    def test_antisymmetric_input(self):
        one, two = local_from_normal(1.0, -1.0)
        assert one == pytest.approx(0.0) and two == pytest.approx(math.sqrt(2))

    def test_round_trip(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            z = rng.normal(size=2) + 1j * rng.normal(size=2)
            back = normal_from_local(*local_from_normal(z[0], z[1]))
            assert abs(back[0] - z[0]) < 1e-14
            assert abs(back[1] - z[1]) < 1e-14


class TestFreeEvolution:
    def test_optical_decay_closed_form(self):
        p = quiet_params(g=1e-300)
        traj = integrate_classical(p, [], 4.0, dt=0.001,
                                   y0=np.array([1, 0, 0, 0], complex))
        expected = np.exp(-p.kappa_plus * traj.t)
        assert np.abs(np.abs(traj.alpha_plus) ** 2 - expected).max() < 1e-8

    def test_local_mode_is_free_eigenmode(self):
        # oracle: diagonalizing the (Omega_+, Omega_-) block gives the local
        # modes with frequencies Omega_1, Omega_2; beta_1(0) = 1 stays in
        # mode 1 and rotates at exactly Omega_1
        p = quiet_params(g=1e-300, gamma=1e-300)
        b0 = 1 / math.sqrt(2)  # beta_1 = 1, beta_2 = 0 in the local basis
        traj = integrate_classical(
            p, [], 30.0, y0=np.array([0, 0, b0, b0], complex))
        beta1 = (traj.beta_plus + traj.beta_minus) / math.sqrt(2)
        beta2 = (traj.beta_plus - traj.beta_minus) / math.sqrt(2)
        assert np.abs(beta1 - np.exp(-1j * p.Omega_1 * traj.t)).max() < 1e-5
        assert np.abs(beta2).max() < 1e-10

    def test_normal_mode_beat(self):
        # a beta_+ excitation is not an eigenmode: it beats between the
        # normal modes as e^{-i Omega_+ t} cos(Omega_- t)
        p = quiet_params(g=1e-300, gamma=1e-300)
        traj = integrate_classical(p, [], 40.0, y0=np.array([0, 0, 1, 0], complex))
        expected = np.exp(-1j * p.Omega_plus * traj.t) * np.cos(p.Omega_minus * traj.t)
        assert np.abs(traj.beta_plus - expected).max() < 1e-5

    def test_energy_decay_monotone(self):
        p = quiet_params(g=1e-300)
        y0 = np.array([0.3 + 0.1j, -0.2j, 0.5, 0.25 - 0.1j], complex)
        traj = integrate_classical(p, [], 5.0, y0=y0)
        optical = traj.optical_occupations()
        assert np.all(np.diff(optical) <= 1e-12)


class TestDrivenDynamics:
    def test_drive_splits_equally(self):
        # drive on cavity 1 feeds alpha+ and alpha- with F/sqrt2 each
        p = default_params()
        pulse = PulseSpec(t0=5.0, sigma_t=1.5, amplitude=10.0, detuning=0.0)
        y = np.zeros(4, complex)
        rhs = classical_rhs(p, [pulse], 5.0, y)
        assert rhs[0] == pytest.approx(rhs[1])
        assert abs(rhs[0]) == pytest.approx(10.0 / math.sqrt(2))

    def test_write_pulse_peak_against_adaptive_oracle(self):
        # independent high-order adaptive integrator (scipy DOP853)
        from scipy.integrate import solve_ivp

        p = default_params()
        pulse = PulseSpec(t0=11.7, sigma_t=3.85, amplitude=1e3 * p.kappa_minus,
                          detuning=p.J_c + p.Omega_plus)
        traj = integrate_classical(p, [pulse], 18.0)

        def rhs(t, y):
            return classical_rhs(p, [pulse], t, y)

        sol = solve_ivp(rhs, (0.0, 18.0), np.zeros(4, complex), method="DOP853",
                        rtol=1e-10, atol=1e-12, dense_output=True)
        ours = np.abs(traj.alpha_plus).max()
        fine_t = np.linspace(0, 18.0, 4000)
        ref = np.abs(sol.sol(fine_t)[0]).max()
        assert ours == pytest.approx(ref, rel=1e-3)

    def test_halving_dt_changes_little(self):
        p = default_params()
        pulse = PulseSpec(t0=6.0, sigma_t=2.0, amplitude=50.0,
                          detuning=p.J_c + p.Omega_plus)
        t_end = 12.0
        coarse = integrate_classical(p, [pulse], t_end)
        fine = integrate_classical(p, [pulse], float(coarse.t[-1]), dt=coarse.dt / 2)
        assert len(fine.t) == 2 * len(coarse.t) - 1
        # every stored point, relative to the trajectory scale
        for name in ("alpha_plus", "alpha_minus", "beta_plus", "beta_minus"):
            a_c = getattr(coarse, name)
            a_f = getattr(fine, name)[::2]
            scale = np.abs(a_f).max()
            if scale == 0.0:
                continue
            assert np.abs(a_c - a_f).max() / scale < 1e-6


class TestContracts:
    def test_dt_bound_enforced(self):
        p = default_params()
        with pytest.raises(ValueError):
            integrate_classical(p, [], 1.0, dt=10 * max_classical_dt(p))

    def test_divergence_reported_with_time(self):
        p = default_params()
        y0 = np.array([np.nan, 0, 0, 0], complex)
        with pytest.raises(DivergenceError) as err:
            integrate_classical(p, [], 1.0, y0=y0)
        assert err.value.t_first_bad >= 0.0

    def test_trajectory_interpolation(self):
        t = np.linspace(0.0, 1.0, 11)
        traj = ClassicalTrajectory(t, t + 0j, 2 * t + 0j, np.zeros(11, complex),
                                   np.zeros(11, complex))
        amps = traj.amplitudes_at(0.55)
        assert amps[0] == pytest.approx(0.55)
        assert amps[1] == pytest.approx(1.10)

    def test_csv_dump(self, tmp_path):
        p = quiet_params()
        traj = integrate_classical(p, [], 0.5, y0=np.array([1, 0, 0, 0], complex))
        path = tmp_path / "classical.csv"
        traj.to_csv(path)
        header = path.read_text().splitlines()[0]
        assert header.startswith("t_ns,re_alpha_plus,im_alpha_plus")
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        assert data.shape[1] == 9
