import math

import numpy as np
import pytest

from heraldsim.errors import CutoffTooSmall, ZeroProbabilityHerald
from heraldsim.fockspace import DensityMatrix, basis_state, canonical_layout
from heraldsim.herald import (
    displace_state,
    herald_single_photon,
    mechanical_basis_rotation,
    multimode_displacement,
    optical_basis_rotation,
    reconstruct_full,
    undisplace,
)
from heraldsim.meanfield import ClassicalTrajectory

LAYOUT = canonical_layout((3, 3, 4, 4))


def constant_trajectory(amps, t_end=10.0, n=101):
    t = np.linspace(0.0, t_end, n)
    ones = np.ones(n, complex)
    return ClassicalTrajectory(t, amps[0] * ones, amps[1] * ones,
                               amps[2] * ones, amps[3] * ones)


def pure_state(vec):
    return DensityMatrix(LAYOUT, np.outer(vec, vec.conj()))


def written_state_local(c00, c10, c01, phi):
    """Ideal post-write state in the LOCAL basis: vacuum + one photon in a
    cavity paired with a delocalized phonon (|10> + e^{i phi} |01>)."""
    vec = np.zeros(LAYOUT.total_dim, complex)
    vec += c00 * basis_state(LAYOUT, (0, 0, 0, 0))
    for c, cav_occ in ((c10, (1, 0)), (c01, (0, 1))):
        vec += c * basis_state(LAYOUT, (*cav_occ, 1, 0))
        vec += c * np.exp(1j * phi) * basis_state(LAYOUT, (*cav_occ, 0, 1))
    return vec / np.linalg.norm(vec)


class TestBasisRotation:
    def test_single_excitation_splits(self):
        rho = pure_state(basis_state(LAYOUT, (1, 0, 0, 0)))
        out = optical_basis_rotation(rho, "normal_to_local")
        i10 = LAYOUT.index((1, 0, 0, 0))
        i01 = LAYOUT.index((0, 1, 0, 0))
        assert out.matrix[i10, i10].real == pytest.approx(0.5, abs=1e-12)
        assert out.matrix[i01, i01].real == pytest.approx(0.5, abs=1e-12)
        assert out.matrix[i10, i01].real == pytest.approx(0.5, abs=1e-12)

    def test_vacuum_invariant(self):
        rho = pure_state(basis_state(LAYOUT, (0, 0, 0, 0)))
        out = optical_basis_rotation(rho)
        assert np.abs(out.matrix - rho.matrix).max() < 1e-12

    def test_involution_on_states(self):
        rng = np.random.default_rng(9)
        # random state confined to complete total-n sectors (n <= cutoff-1)
        vec = np.zeros(LAYOUT.total_dim, complex)
        for occ in ((0, 0, 0, 0), (1, 0, 1, 0), (0, 1, 0, 1), (1, 1, 0, 0),
                    (2, 0, 2, 1), (0, 2, 1, 1)):
            vec[LAYOUT.index(occ)] = rng.normal() + 1j * rng.normal()
        vec /= np.linalg.norm(vec)
        rho = pure_state(vec)
        twice = optical_basis_rotation(optical_basis_rotation(rho))
        assert np.abs(twice.matrix - rho.matrix).max() < 1e-10

    def test_unitarity(self):
        rng = np.random.default_rng(4)
        m = rng.normal(size=(144, 144)) + 1j * rng.normal(size=(144, 144))
        rho = DensityMatrix(LAYOUT, (m @ m.conj().T) / np.trace(m @ m.conj().T))
        out = optical_basis_rotation(rho)
        assert abs(out.matrix.trace() - 1.0) < 1e-12
        ev0 = np.sort(np.linalg.eigvalsh(rho.matrix))
        ev1 = np.sort(np.linalg.eigvalsh(out.matrix))
        assert np.abs(ev0 - ev1).max() < 1e-10

    def test_unequal_cutoffs_rejected(self):
        lay = canonical_layout((3, 4, 4, 4))
        rho = DensityMatrix(lay, np.eye(lay.total_dim, dtype=complex) / lay.total_dim)
        with pytest.raises(ValueError):
            optical_basis_rotation(rho)


class TestDisplacement:
    def test_zero_amplitudes_identity(self):
        rng = np.random.default_rng(1)
        m = rng.normal(size=(144, 144)) + 1j * rng.normal(size=(144, 144))
        rho = DensityMatrix(LAYOUT, (m @ m.conj().T) / np.trace(m @ m.conj().T))
        traj = constant_trajectory(np.zeros(4, complex))
        out, defect = reconstruct_full(rho, traj, 5.0)
        assert np.abs(out.matrix - rho.matrix).max() < 1e-12
        assert defect < 1e-14

    def test_vacuum_displaces_to_coherent_occupation(self):
        # cutoff large enough to hold a |alpha| = 0.5 coherent state
        lay = canonical_layout((8, 3, 4, 4))
        vec = np.zeros(lay.total_dim, complex)
        vec[0] = 1.0
        rho = DensityMatrix(lay, np.outer(vec, vec.conj()))
        traj = constant_trajectory(np.array([0.5, 0, 0, 0], complex))
        out, _ = reconstruct_full(rho, traj, 5.0)
        from heraldsim.fockspace import destroy, embed

        n_op = embed(destroy(8).conj().T @ destroy(8), "a+", lay).matrix
        n_val = np.einsum("ij,ji->", out.matrix, n_op).real
        assert n_val == pytest.approx(0.25, abs=1e-6)

    def test_displace_undisplace_round_trip(self):
        # random state supported on low occupations (physical regime)
        rng = np.random.default_rng(2)
        occs = [(0, 0, 0, 0), (1, 0, 0, 0), (0, 1, 1, 0), (0, 0, 1, 1),
                (1, 0, 1, 0), (0, 0, 2, 0), (0, 1, 0, 1)]
        m = np.zeros((LAYOUT.total_dim, 4), complex)
        for occ in occs:
            m[LAYOUT.index(occ)] = rng.normal(size=4) + 1j * rng.normal(size=4)
        rho_m = m @ m.conj().T
        rho = DensityMatrix(LAYOUT, rho_m / rho_m.trace())
        amps = np.array([0.015 + 0.008j, -0.01j, 0.02, 0.005 - 0.01j])
        traj = constant_trajectory(amps)
        full, _ = reconstruct_full(rho, traj, 5.0)
        back = undisplace(full, traj, 5.0)
        # limited by two truncations at the cutoffs; herald-time amplitudes
        # are another two orders smaller than tested here
        assert np.abs(back.matrix - rho.matrix).max() < 1e-5

    def test_large_amplitude_rejected(self):
        rho = pure_state(basis_state(LAYOUT, (0, 0, 0, 0)))
        traj = constant_trajectory(np.array([3.5, 0, 0, 0], complex))
        with pytest.raises(CutoffTooSmall):
            reconstruct_full(rho, traj, 5.0)

    def test_operator_level_displacement_defect(self):
        d_op, defect = multimode_displacement(LAYOUT, [0.05, 0.0, 0.02, 0.0])
        assert d_op.shape == (144, 144)
        assert 0 <= defect < 0.05

    def test_time_outside_span_rejected(self):
        rho = pure_state(basis_state(LAYOUT, (0, 0, 0, 0)))
        traj = constant_trajectory(np.zeros(4, complex), t_end=1.0)
        with pytest.raises(ValueError):
            reconstruct_full(rho, traj, 5.0)


class TestHerald:
    def test_ideal_written_state_gives_bell(self):
        # the ideal post-write superposition heralds into the maximally
        # entangled phonon Bell state; click probability is the weight of
        # the one-photon-in-cavity-1 component
        phi = 0.6
        c00, c10, c01 = 0.9, 0.3, 0.2
        vec_local = written_state_local(c00, c10, c01, phi)
        norm2 = c00**2 + 2 * c10**2 + 2 * c01**2
        rho_local = pure_state(vec_local)
        # herald_single_photon expects the normal-mode optical basis
        rho_normal = optical_basis_rotation(rho_local, "local_to_normal")
        rho_normal = DensityMatrix(
            LAYOUT, mechanical_basis_rotation_full(rho_normal.matrix))
        heralded = herald_single_photon(rho_normal, cavity=1)
        assert heralded.herald_probability == pytest.approx(
            2 * c10**2 / norm2, abs=1e-10)
        q = heralded.rho_qubit
        assert q[1, 1].real == pytest.approx(0.5, abs=1e-10)
        assert q[2, 2].real == pytest.approx(0.5, abs=1e-10)
        assert abs(q[2, 1]) == pytest.approx(0.5, abs=1e-10)
        from heraldsim.metrics import bell_fidelity, concurrence

        assert concurrence(q) == pytest.approx(1.0, abs=1e-8)
        assert bell_fidelity(q, phi) == pytest.approx(1.0, abs=1e-8)

    def test_cavity_choice_symmetric(self):
        phi = -0.4
        vec_local = written_state_local(0.8, 0.25, 0.25, phi)
        rho_local = pure_state(vec_local)
        rho_normal = optical_basis_rotation(rho_local, "local_to_normal")
        rho_normal = DensityMatrix(
            LAYOUT, mechanical_basis_rotation_full(rho_normal.matrix))
        from heraldsim.metrics import concurrence

        c1 = concurrence(herald_single_photon(rho_normal, cavity=1).rho_qubit)
        c2 = concurrence(herald_single_photon(rho_normal, cavity=2).rho_qubit)
        assert abs(c1 - c2) < 1e-3

    def test_vacuum_has_zero_probability(self):
        rho = pure_state(basis_state(LAYOUT, (0, 0, 0, 0)))
        with pytest.raises(ZeroProbabilityHerald):
            herald_single_photon(rho, cavity=1)

    def test_photon_number_weights(self):
        vec = (basis_state(LAYOUT, (1, 0, 0, 0)) * 0.6
               + basis_state(LAYOUT, (1, 1, 0, 0)) * 0.8)
        heralded = herald_single_photon(pure_state(vec), cavity=1)
        assert heralded.single_photon_weight == pytest.approx(0.36, abs=1e-12)
        assert heralded.multi_photon_weight == pytest.approx(0.64, abs=1e-12)
        assert heralded.two_photon_contamination == pytest.approx(0.64 / 0.36, rel=1e-9)

    def test_qubit_export_json(self, tmp_path):
        vec_local = written_state_local(0.9, 0.3, 0.2, 0.0)
        rho_normal = optical_basis_rotation(pure_state(vec_local), "local_to_normal")
        rho_normal = DensityMatrix(
            LAYOUT, mechanical_basis_rotation_full(rho_normal.matrix))
        heralded = herald_single_photon(rho_normal, cavity=1)
        path = tmp_path / "qubit.json"
        heralded.qubit_to_json(path)
        import json

        doc = json.loads(path.read_text())
        assert doc["basis"] == ["|00>", "|01>", "|10>", "|11>"]
        mat = np.array([[a + 1j * b for a, b in row] for row in doc["matrix_re_im"]])
        assert np.abs(mat - heralded.rho_qubit).max() < 1e-15


def mechanical_basis_rotation_full(mat):
    """Rotate the mechanical sector of a full-layout matrix (test helper)."""
    from heraldsim.herald import _sector_rotation

    u = _sector_rotation(LAYOUT, ("b+", "b-"))
    return u @ mat @ u.conj().T
