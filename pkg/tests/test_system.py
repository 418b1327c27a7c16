import math

import numpy as np
import pytest

from heraldsim.fockspace import basis_state, canonical_layout
from heraldsim.system import (
    FrameConvention,
    PulseSpec,
    SystemParams,
    build_fluctuation_hamiltonian,
    default_params,
    drive_sum,
    pulse_value,
    thermal_occupation,
)

TWO_PI = 2 * math.pi


class TestDefaultParams:
    """Device constants; internal unit is the X of a quoted 2pi x X GHz."""

    def test_optical_coupling(self):
        assert default_params().J_c == pytest.approx(8.45)   # 2J_c = 2pi x 16.9 GHz

    def test_mechanical_nondegeneracy(self):
        p = default_params()
        assert p.Omega_2 - p.Omega_1 == pytest.approx(0.05)  # 2pi x 50 MHz

    def test_linewidths(self):
        p = default_params()
        assert p.kappa_minus == pytest.approx(0.338)
        assert p.kappa_plus == pytest.approx(0.486)

    def test_coupling_and_losses(self):
        p = default_params()
        assert p.g == pytest.approx(8.6e-4)
        assert p.gamma == pytest.approx(3.75e-6)
        assert p.temperature == 0.0

    def test_derived_quantities(self):
        p = default_params()
        assert p.Omega_plus == pytest.approx(5.105)
        assert p.Omega_minus == pytest.approx(-0.025)
        assert p.n_th == 0.0
        assert p.kappa_local == pytest.approx(0.412)

    def test_positivity_enforced(self):
        with pytest.raises(ValueError):
            SystemParams(kappa_minus=-0.1)

    def test_sideband_warning(self):
        with pytest.warns(UserWarning):
            SystemParams(kappa_plus=2.0)


class TestThermalOccupation:
    def test_zero_temperature(self):
        assert thermal_occupation(5.08, 0.0) == 0.0

    def test_ln2_point(self):
        # h nu / k_B T = ln 2  ->  occupation exactly 1
        from heraldsim.system import H_OVER_KB_NS_K

        nu = 1.0
        t = H_OVER_KB_NS_K * nu / math.log(2.0)
        assert thermal_occupation(nu, t) == pytest.approx(1.0, abs=1e-12)

    def test_mechanical_mode_at_200mK(self):
        # direct Bose-Einstein evaluation for 2pi x 5.08 GHz at 0.2 K
        assert thermal_occupation(5.08, 0.2) == pytest.approx(0.4194, abs=2e-4)

    def test_monotone_in_temperature(self):
        vals = [thermal_occupation(5.08, t) for t in (0.05, 0.1, 0.2, 0.4)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            thermal_occupation(-1.0, 0.1)
        with pytest.raises(ValueError):
            thermal_occupation(1.0, -0.1)


class TestPulse:
    def test_peak_value(self):
        p = PulseSpec(t0=10.0, sigma_t=3.85, amplitude=2.5, detuning=0.0)
        assert p.envelope(10.0) == pytest.approx(2.5)

    def test_one_sigma_point(self):
        p = PulseSpec(t0=10.0, sigma_t=3.85, amplitude=2.5, detuning=0.0)
        assert p.envelope(10.0 + 3.85) == pytest.approx(2.5 * math.exp(-0.5))

    def test_carrier_phase(self):
        p = PulseSpec(t0=0.0, sigma_t=2.0, amplitude=1.0, detuning=3.0, phase=0.7)
        val = pulse_value(p, 0.5)
        assert np.angle(val) == pytest.approx(0.7 - 3.0 * 0.5)

    def test_write_detuning_is_stokes_condition(self):
        from heraldsim.protocol import default_config

        cfg = default_config()
        p = cfg.params
        assert cfg.write.detuning == pytest.approx(p.J_c + p.Omega_plus)
        assert cfg.read.detuning == pytest.approx(p.J_c - p.Omega_plus)

    def test_envelope_integral(self):
        # property: integral = A sigma sqrt(2 pi) within 0.1%
        p = PulseSpec(t0=30.0, sigma_t=3.85, amplitude=2.0, detuning=0.0)
        t = np.linspace(0.0, 60.0, 20001)
        integral = np.trapezoid(p.envelope(t), t)
        assert integral == pytest.approx(2.0 * 3.85 * math.sqrt(TWO_PI), rel=1e-3)

    def test_drive_sum(self):
        p1 = PulseSpec(t0=0.0, sigma_t=1.0, amplitude=1.0, detuning=0.0)
        p2 = PulseSpec(t0=0.0, sigma_t=1.0, amplitude=2.0, detuning=0.0)
        assert drive_sum([p1, p2], 0.0) == pytest.approx(3.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            PulseSpec(t0=0.0, sigma_t=-1.0, amplitude=1.0, detuning=0.0)
        with pytest.raises(ValueError):
            PulseSpec(t0=0.0, sigma_t=1.0, amplitude=-1.0, detuning=0.0)


def _expect(layout, vec, h, other=None):
    other = vec if other is None else other
    return other @ h.matrix @ vec


class TestFluctuationHamiltonian:
    def setup_method(self):
        self.params = default_params()
        self.layout = canonical_layout((3, 3, 4, 4))

    def test_bare_structure(self):
        # all classical amplitudes zero and g -> 0: +-J_c detunings,
        # Omega_+ mechanical energies, Omega_- mixing only
        from heraldsim.fockspace import destroy, embed

        p = SystemParams(g=1e-300)
        h = build_fluctuation_hamiltonian(p, 0, 0, 0, 0, self.layout)
        ap = embed(destroy(3), "a+", self.layout).matrix
        am = embed(destroy(3), "a-", self.layout).matrix
        bp = embed(destroy(4), "b+", self.layout).matrix
        bm = embed(destroy(4), "b-", self.layout).matrix
        expected = (p.J_c * (ap.conj().T @ ap - am.conj().T @ am)
                    + p.Omega_plus * (bp.conj().T @ bp + bm.conj().T @ bm)
                    + p.Omega_minus * (bp.conj().T @ bm + bm.conj().T @ bp))
        assert np.abs(h.matrix - expected).max() < 1e-12

    def test_hermitian_for_random_amplitudes(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            amps = rng.normal(size=4) + 1j * rng.normal(size=4)
            h = build_fluctuation_hamiltonian(self.params, *amps, self.layout)
            assert np.abs(h.matrix - h.matrix.conj().T).max() < 1e-10

    def test_two_mode_squeezing_coefficient(self):
        # with alpha+ large and real, <1_a+ 1_b+| H |vac> = g alpha+ / sqrt2
        alpha = 37.0
        h = build_fluctuation_hamiltonian(self.params, alpha, 0, 0, 0, self.layout)
        vac = basis_state(self.layout, (0, 0, 0, 0))
        pair = basis_state(self.layout, (1, 0, 1, 0))
        coeff = pair @ h.matrix @ vac
        assert coeff == pytest.approx(self.params.g * alpha / math.sqrt(2), abs=1e-12)

    def test_linearity_in_classical_amplitudes(self):
        base = build_fluctuation_hamiltonian(self.params, 0, 0, 0, 0, self.layout)
        h1 = build_fluctuation_hamiltonian(self.params, 1.5, 0, 0, 0, self.layout)
        h2 = build_fluctuation_hamiltonian(self.params, 3.0, 0, 0, 0, self.layout)
        assert np.allclose(h2.matrix - base.matrix, 2 * (h1.matrix - base.matrix),
                           atol=1e-12)

    def test_degenerate_mechanics_decouples(self):
        p = SystemParams(Omega_1=5.08, Omega_2=5.08)
        h = build_fluctuation_hamiltonian(p, 0, 0, 0, 0, canonical_layout((3, 3, 4, 4)))
        lay = canonical_layout((3, 3, 4, 4))
        one_bp = basis_state(lay, (0, 0, 1, 0))
        one_bm = basis_state(lay, (0, 0, 0, 1))
        assert abs(one_bp @ h.matrix @ one_bm) < 1e-14

    def test_cubic_terms_toggle(self):
        conv_off = FrameConvention(retain_cubic_terms=False)
        h_on = build_fluctuation_hamiltonian(self.params, 0, 0, 0, 0, self.layout)
        h_off = build_fluctuation_hamiltonian(self.params, 0, 0, 0, 0, self.layout,
                                              conv_off)
        diff = h_on.matrix - h_off.matrix
        # the difference is exactly the cubic coupling, nonzero off-diagonal
        assert np.abs(diff).max() > 0
        vac = basis_state(self.layout, (0, 0, 0, 0))
        assert abs(vac @ diff @ vac) < 1e-15

    def test_mechanical_splitting_flag(self):
        p_on = SystemParams(include_mechanical_splitting=True)
        lay = canonical_layout((3, 3, 4, 4))
        h_on = build_fluctuation_hamiltonian(p_on, 0, 0, 0, 0, lay)
        h_off = build_fluctuation_hamiltonian(default_params(), 0, 0, 0, 0, lay)
        one_bp = basis_state(lay, (0, 0, 1, 0))
        delta = (one_bp @ h_on.matrix @ one_bp - one_bp @ h_off.matrix @ one_bp).real
        assert delta == pytest.approx(p_on.J_m)
