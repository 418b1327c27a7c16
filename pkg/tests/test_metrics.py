import math

import numpy as np
import pytest

from heraldsim.fockspace import DensityMatrix, ModeLayout
from heraldsim.metrics import (
    FringePattern,
    VisibilityResult,
    bell_fidelity,
    bell_fidelity_max,
    concurrence,
    heralding_rate,
    negativity,
    visibility,
)

RNG = np.random.default_rng(123)


def bell(phase=0.0):
    psi = np.zeros(4, complex)
    psi[2] = 1 / math.sqrt(2)
    psi[1] = np.exp(1j * phase) / math.sqrt(2)
    return np.outer(psi, psi.conj())


def werner(p):
    phi = np.zeros(4, complex)
    phi[0] = phi[3] = 1 / math.sqrt(2)
    return p * np.outer(phi, phi.conj()) + (1 - p) * np.eye(4) / 4


def random_pure_product(rng=RNG):
    a = rng.normal(size=2) + 1j * rng.normal(size=2)
    b = rng.normal(size=2) + 1j * rng.normal(size=2)
    a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
    vec = np.kron(a, b)
    return np.outer(vec, vec.conj())


def random_two_qubit(rng=RNG, rank=4):
    m = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = m @ m.conj().T
    return rho / rho.trace()


def wootters_oracle(rho):
    """Independent route: eigenvalues of the non-Hermitian flip product."""
    sy = np.array([[0, -1j], [1j, 0]])
    yy = np.kron(sy, sy)
    ev = np.linalg.eigvals(rho @ yy @ rho.conj() @ yy).real
    lam = np.sort(np.sqrt(np.clip(ev, 0.0, None)))[::-1]
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def two_mode_dm(mat):
    return DensityMatrix(ModeLayout((("m1", 2), ("m2", 2))), np.asarray(mat, complex))


class TestConcurrence:
    def test_bell_is_maximal(self):
        assert concurrence(bell()) == pytest.approx(1.0, abs=1e-12)

    def test_product_is_zero(self):
        vac = np.zeros((4, 4), complex)
        vac[0, 0] = 1.0
        assert concurrence(vac) == 0.0

    @pytest.mark.parametrize("p", [0.0, 0.25, 0.4, 0.5, 0.75, 1.0])
    def test_werner_closed_form(self, p):
        expected = max(0.0, (3 * p - 1) / 2)
        assert concurrence(werner(p)) == pytest.approx(expected, abs=1e-10)
        assert wootters_oracle(werner(p)) == pytest.approx(expected, abs=1e-8)

    def test_matches_brute_force_on_random_states(self):
        for _ in range(20):
            rho = random_two_qubit()
            assert concurrence(rho) == pytest.approx(wootters_oracle(rho), abs=1e-7)

    def test_random_products_are_zero(self):
        for _ in range(20):
            assert concurrence(random_pure_product()) < 1e-9

    def test_phase_invariance(self):
        rho = random_two_qubit()
        theta, chi = 0.7, -1.2
        rot = np.diag(np.exp(1j * np.array([0, chi, theta, theta + chi])))
        rotated = rot @ rho @ rot.conj().T
        assert abs(concurrence(rho) - concurrence(rotated)) < 1e-9

    def test_invalid_state_rejected(self):
        bad = np.diag([1.2, -0.2, 0.0, 0.0]).astype(complex)
        with pytest.raises(ValueError):
            concurrence(bad)


class TestNegativity:
    def test_bell_is_one(self):
        assert negativity(two_mode_dm(bell())) == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("p", [0.0, 0.25, 0.4, 0.5, 0.6, 0.75, 1.0])
    def test_werner_closed_form(self, p):
        expected = max(0.0, (3 * p - 1) / 2)
        assert negativity(two_mode_dm(werner(p))) == pytest.approx(expected, abs=1e-10)

    def test_products_are_ppt(self):
        for _ in range(20):
            assert negativity(two_mode_dm(random_pure_product())) < 1e-9

    def test_bounded_by_concurrence(self):
        # two-qubit ordering N <= C, checked numerically
        for _ in range(30):
            rho = random_two_qubit()
            assert negativity(two_mode_dm(rho)) <= concurrence(rho) + 1e-9

    def test_beyond_qubit_subspace(self):
        # one delocalized phonon on 3-level modes keeps N = 1
        lay = ModeLayout((("m1", 3), ("m2", 3)))
        psi = np.zeros(9, complex)
        psi[3] = psi[1] = 1 / math.sqrt(2)   # |10> + |01>
        rho = DensityMatrix(lay, np.outer(psi, psi.conj()))
        assert negativity(rho) == pytest.approx(1.0, abs=1e-10)

    def test_phase_invariance(self):
        rho = random_two_qubit()
        rot = np.diag(np.exp(1j * np.array([0, 0.3, 1.1, 1.4])))
        assert abs(negativity(two_mode_dm(rho))
                   - negativity(two_mode_dm(rot @ rho @ rot.conj().T))) < 1e-9


class TestBellFidelity:
    def test_target_projector(self):
        assert bell_fidelity(bell(0.8), 0.8) == pytest.approx(1.0, abs=1e-12)

    def test_maximally_mixed(self):
        assert bell_fidelity(np.eye(4, dtype=complex) / 4, 0.0) == pytest.approx(0.25)

    def test_orthogonal_state(self):
        vac = np.zeros((4, 4), complex)
        vac[0, 0] = 1.0
        assert bell_fidelity(vac, 0.0) == 0.0

    def test_max_formula_matches_grid_scan(self):
        # closed form (r22 + r11)/2 + |r21| against brute-force phase scan
        for _ in range(10):
            rho = random_two_qubit()
            fid, phi = bell_fidelity_max(rho)
            grid = [bell_fidelity(rho, x) for x in np.linspace(0, 2 * math.pi, 3001)]
            assert fid == pytest.approx(max(grid), abs=1e-6)
            assert fid >= bell_fidelity(rho, phi) - 1e-12


class TestHeraldingRate:
    def test_zero_occupation(self):
        assert heralding_rate(0.412, 0.0) == 0.0

    def test_linearity(self):
        assert heralding_rate(0.412, 2e-4) == pytest.approx(
            2 * heralding_rate(0.412, 1e-4))

    def test_unit_conversion(self):
        # kappa = (kappa+ + kappa-)/2 = 0.412 1/ns with n = 5e-4 gives the
        # photoemission scale 0.2 MHz
        assert heralding_rate(0.412, 5e-4) == pytest.approx(0.206, abs=1e-3)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            heralding_rate(-1.0, 0.1)


class TestVisibility:
    def make_pattern(self, func, n=20, span=150.0):
        delays = np.linspace(40.0, 40.0 + span, n)
        raw = func(delays)
        return FringePattern.from_raw(delays, raw, readout_offset=25.0)

    def test_full_contrast(self):
        omega = 2 * math.pi / 125.0
        pat = self.make_pattern(lambda d: 1.0 + np.cos(omega * d))
        res = visibility(pat, omega)
        assert res.visibility == pytest.approx(1.0, abs=1e-6)
        assert res.period == pytest.approx(125.0, rel=1e-4)

    def test_flat_pattern(self):
        pat = self.make_pattern(lambda d: np.ones_like(d))
        res = visibility(pat, 2 * math.pi / 125.0)
        assert res.visibility < 1e-6

    def test_partial_contrast(self):
        omega = 2 * math.pi / 125.0
        pat = self.make_pattern(lambda d: 1.0 + 0.84 * np.cos(omega * d + 0.4))
        res = visibility(pat, omega)
        assert res.visibility == pytest.approx(0.84, abs=1e-4)
        assert res.phase == pytest.approx(0.4, abs=1e-3)

    def test_period_refinement(self):
        # seed off by 10%: the fit recovers the true period
        true_omega = 2 * math.pi / 118.0
        pat = self.make_pattern(lambda d: 1.0 + 0.7 * np.cos(true_omega * d))
        res = visibility(pat, true_omega * 1.1)
        assert res.period == pytest.approx(118.0, rel=0.01)

    def test_degenerate_seed_flagged(self):
        pat = self.make_pattern(lambda d: np.ones_like(d))
        res = visibility(pat, 0.0)
        assert not res.fit_ok
        assert math.isinf(res.period)

    def test_too_few_points_rejected(self):
        delays = np.linspace(0, 150, 5)
        pat = FringePattern.from_raw(delays, np.ones(5), 25.0)
        with pytest.raises(ValueError):
            visibility(pat, 2 * math.pi / 125.0)

    def test_undersampled_period_rejected(self):
        # 10 points over three periods: fewer than 8 per period
        omega = 2 * math.pi / 50.0
        delays = np.linspace(0, 150, 10)
        pat = FringePattern.from_raw(delays, 1 + np.cos(omega * delays), 25.0)
        with pytest.raises(ValueError):
            visibility(pat, omega)

    def test_negative_intensity_rejected(self):
        with pytest.raises(ValueError):
            FringePattern.from_raw(np.linspace(0, 150, 16),
                                   -np.ones(16), 25.0)
