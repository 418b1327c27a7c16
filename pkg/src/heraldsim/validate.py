"""Fast self-checks: operator algebra, open-system oracles, metric oracles.

Backs the `heraldsim validate` subcommand.  Everything here has a closed
form or an independent brute-force oracle and runs in seconds; the heavier
protocol-level reproductions live in the test suite.
"""
from __future__ import annotations

import math

import numpy as np

from .fockspace import (
    DensityMatrix,
    ModeLayout,
    basis_state,
    canonical_layout,
    destroy,
    displacement,
    embed,
    partial_trace,
    partial_transpose,
    project_and_normalize,
)
from .herald import _mixing_unitary
from .lindblad import BathSpec, evolve, initial_state, thermal_state
from .meanfield import integrate_classical, local_from_normal, normal_from_local
from .metrics import bell_fidelity_max, concurrence, negativity
from .system import SystemParams, default_params, thermal_occupation


def _werner(p: float) -> np.ndarray:
    phi = np.zeros(4, complex)
    phi[0] = phi[3] = 1 / math.sqrt(2)
    return p * np.outer(phi, phi.conj()) + (1 - p) * np.eye(4) / 4


def _bell_01_10(phase: float = 0.0) -> np.ndarray:
    """(|10> + e^{i phase} |01>)/sqrt2 in the |00>,|01>,|10>,|11> basis."""
    psi = np.zeros(4, complex)
    psi[2] = 1 / math.sqrt(2)
    psi[1] = np.exp(1j * phase) / math.sqrt(2)
    return np.outer(psi, psi.conj())


def _checks():
    rng = np.random.default_rng(7)

    def random_qubit_state():
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = m @ m.conj().T
        return rho / rho.trace()

    # --- operator algebra ---
    a3 = destroy(3)
    yield "destroy matrix elements", abs(a3[1, 2] - math.sqrt(2)) < 1e-14
    n3 = a3.conj().T @ a3
    yield "number operator diagonal", np.allclose(np.diag(n3).real, [0, 1, 2], atol=1e-14)
    comm = a3 @ a3.conj().T - n3
    yield "truncated commutator", (
        np.allclose(comm[:2, :2], np.eye(2), atol=1e-12) and abs(comm[2, 2] + 2) < 1e-12)

    layout = canonical_layout((3, 3, 4, 4))
    op_b = embed(destroy(4), "b-", layout).matrix
    op_a = embed(destroy(3), "a+", layout).matrix
    yield "embedded modes commute", np.abs(op_b @ op_a - op_a @ op_b).max() < 1e-12

    dmat, defect = displacement(0.6, 12, pad=10)
    pops = np.abs(dmat[:, 0]) ** 2
    expected = np.exp(-0.36) * 0.36 ** np.arange(12) / [math.factorial(k) for k in range(12)]
    yield "coherent state populations", np.abs(pops - expected).max() < 1e-10
    yield "displacement defect reported", 0 <= defect < 1.0

    # two-qubit Bell on a 2x2x2x2-style layout via a two-mode layout
    lay2 = ModeLayout((("m1", 2), ("m2", 2)))
    bell = DensityMatrix(lay2, _bell_01_10())
    red = partial_trace(bell, keep={"m1"})
    yield "Bell partial trace is maximally mixed", np.allclose(
        red.matrix, np.eye(2) / 2, atol=1e-12)
    pt = partial_transpose(bell, "m2")
    ev = np.sort(np.linalg.eigvalsh(pt))
    yield "Bell partial transpose spectrum", np.allclose(
        ev, [-0.5, 0.5, 0.5, 0.5], atol=1e-12)

    proj = np.zeros((2, 2), complex)
    proj[1, 1] = 1
    p_op = embed(proj, "m1", lay2)
    projected, prob = project_and_normalize(bell, p_op)
    yield "projection probability", abs(prob - 0.5) < 1e-12

    u = _mixing_unitary(3)
    yield "mixing unitary is unitary", np.abs(
        u @ u.conj().T - np.eye(9)).max() < 1e-12
    v10 = np.zeros(9, complex)
    v10[3] = 1.0   # |1,0>
    out = u @ v10
    tgt = np.zeros(9, complex)
    tgt[3] = tgt[1] = 1 / math.sqrt(2)
    yield "single photon splits 50/50", np.abs(out - tgt).max() < 1e-10

    # --- classical dynamics ---
    params = default_params()
    pfree = SystemParams(J_c=params.J_c, kappa_plus=0.4, kappa_minus=0.3,
                         Omega_1=5.08, Omega_2=5.13, g=params.g, gamma=1e-4)
    traj = integrate_classical(pfree, [], 6.0, y0=np.array([1, 0, 0, 0], complex))
    decay = np.abs(traj.alpha_plus[-1]) ** 2
    yield "classical cavity decay", abs(decay - math.exp(-0.4 * traj.t[-1])) < 1e-6
    one, two = local_from_normal(1.0 + 0j, 1.0 + 0j)
    yield "normal to local", abs(one - math.sqrt(2)) < 1e-14 and abs(two) < 1e-14
    z1, z2 = rng.normal(size=2) + 1j * rng.normal(size=2)
    yield "basis round trip", all(
        abs(x - y) < 1e-14
        for x, y in zip(normal_from_local(*local_from_normal(z1, z2)), (z1, z2)))

    # --- open-system oracles ---
    kappa = 0.45
    psingle = SystemParams(J_c=1.0, kappa_plus=kappa, kappa_minus=kappa,
                           Omega_1=0.99, Omega_2=1.01, g=1e-12, gamma=1e-12)
    lay_small = canonical_layout((3, 2, 2, 2))
    rho0 = np.zeros((lay_small.total_dim,) * 2, complex)
    idx = lay_small.index((1, 0, 0, 0))
    rho0[idx, idx] = 1.0
    t_end = 3.0 / kappa
    ctraj = integrate_classical(psingle, [], t_end + 0.1, dt=0.002)
    qtraj = evolve(DensityMatrix(lay_small, rho0), ctraj, psingle,
                   BathSpec(kappa, kappa, 1e-12, 0.0), [t_end])
    n_final = float(qtraj.occupations["n_a_plus"][-1].real)
    target = math.exp(-kappa * float(qtraj.times[-1]))   # sample snaps to the grid
    yield "single-mode decay e^{-kt}", abs(n_final - target) / target < 1e-6

    th = thermal_state(1.0, 24)
    n_mean = float(np.sum(np.diag(th.matrix).real * np.arange(24)))
    yield "thermal state mean occupation", abs(n_mean - 1.0) < 1e-4
    yield "thermal occupation formula", abs(
        thermal_occupation(5.08, 0.2) - 0.4194) < 2e-3

    # --- metric oracles ---
    for p, c_expect in ((0.0, 0.0), (0.5, 0.25), (1.0, 1.0)):
        w = _werner(p)
        ok = abs(concurrence(w) - c_expect) < 1e-10
        lay_w = ModeLayout((("m1", 2), ("m2", 2)))
        ok = ok and abs(negativity(DensityMatrix(lay_w, w)) - c_expect) < 1e-10
        yield f"Werner p={p} concurrence/negativity", ok
    fid, phi = bell_fidelity_max(_bell_01_10(0.35))
    yield "Bell fidelity maximization", abs(fid - 1.0) < 1e-12 and abs(phi - 0.35) < 1e-9

    rho_r = random_qubit_state()
    lam = np.angle(rng.normal() + 1j * rng.normal())
    rot = np.diag(np.exp(1j * lam * np.array([0, 1, 0, 1])))
    yield "concurrence phase invariance", abs(
        concurrence(rho_r) - concurrence(rot @ rho_r @ rot.conj().T)) < 1e-9

    # --- full-state initialization ---
    lay = canonical_layout()
    rho_i = initial_state(lay, n_th=0.3, tail_tol=0.1)
    yield "initial state trace", abs(rho_i.matrix.trace().real - 1.0) < 1e-12


def run_validation(verbose: bool = False) -> bool:
    """Run all checks; returns True when every one passes."""
    ok = True
    for name, passed in _checks():
        ok = ok and bool(passed)
        if verbose:
            print(f"  [{'pass' if passed else 'FAIL'}] {name}")
    if verbose:
        print("validation:", "all checks passed" if ok else "FAILURES detected")
    return ok
