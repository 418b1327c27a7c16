"""Precomputed data consumed by the master-equation stepping kernels.

The stepper works in the interaction picture of the static diagonal part D
of the Hamiltonian: rho_tilde(t) = e^{+iDt} rho e^{-iDt}.  Every jump
operator changes the D-eigenvalue by a mode-independent constant, so the
dissipators are form-invariant; the stiff free rotation is handled exactly
and only the weak coupling terms remain for the integrator.  Each COO entry
(i, j) of a Hamiltonian term therefore carries the phase rate
theta = D_i - D_j and enters as v * exp(i theta t).

A plan freezes, for one Hamiltonian layout and one bath specification:

  * the rotating diagonal D,
  * all off-diagonal Hamiltonian content as coordinate blocks tagged by how
    their scalar coefficient enters (Re(c)*T, c*T, or conj(c)*T for the
    dagger half of a paired term, stored row-sorted so scatters walk memory
    forward) together with the per-entry phase rates,
  * the jump operators as compressed index maps with rates folded into the
    weights, and the diagonal of the summed o^dag o contribution.

Coefficient columns map one-to-one onto *logical* terms; the two halves of
a paired term share a column.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TERM_REAL = 0   # H += Re(c) * T, T Hermitian
TERM_PAIR = 1   # H += c * T + conj(c) * T^dag

_SCATTER_RE = 0     # H += Re(c) * T
_SCATTER_C = 1      # H += c * T
_SCATTER_CONJ = 2   # H += conj(c) * T


@dataclass
class KernelPlan:
    dim: int
    n_coeffs: int                # number of coefficient columns expected
    diag: np.ndarray             # float64 rotating diagonal D
    dense_terms: list            # [(kind, T, T_dag_or_None), ...], logical terms
    term_i: np.ndarray           # int32, concatenated COO rows (scatter blocks)
    term_j: np.ndarray           # int32
    term_v: np.ndarray           # complex128
    term_theta: np.ndarray       # float64, phase rate D_i - D_j per entry
    term_off: np.ndarray         # int32, len n_blocks + 1
    term_mode: np.ndarray        # int32, scatter mode per block
    term_col: np.ndarray         # int32, coefficient column per block
    jump_src: np.ndarray         # int32, concatenated valid source indices
    jump_dst: np.ndarray         # int32, target indices
    jump_w: np.ndarray           # float64, weights incl. sqrt(rate)
    jump_off: np.ndarray         # int32, len n_jumps + 1
    dtot: np.ndarray             # float64 diag of sum_k rate_k (o_k^dag o_k)

    @property
    def n_blocks(self) -> int:
        return len(self.term_mode)

    def frame_phases(self, t: float) -> np.ndarray:
        """Diagonal of e^{-iDt}; rho_lab = u rho_tilde u^dag with u = diag of this."""
        return np.exp(-1j * self.diag * t)

    def to_lab(self, rho_tilde: np.ndarray, t: float) -> np.ndarray:
        u = self.frame_phases(t)
        return (u[:, None] * u.conj()[None, :]) * rho_tilde

    def to_frame(self, rho_lab: np.ndarray, t: float) -> np.ndarray:
        u = self.frame_phases(t)
        return np.ascontiguousarray((u.conj()[:, None] * u[None, :]) * rho_lab)


def _coo(mat: np.ndarray):
    i, j = np.nonzero(mat)
    return i.astype(np.int32), j.astype(np.int32), np.ascontiguousarray(mat[i, j])


def build_plan(diag: np.ndarray, terms: list, jump_ops: list) -> KernelPlan:
    """Assemble a KernelPlan.

    diag: real rotating diagonal D (the static diagonal Hamiltonian part).
    terms: list of (kind, matrix) with kind TERM_REAL or TERM_PAIR; matrices
        must be purely off-diagonal OR carry a diagonal with zero phase rate
        (any matrix works: theta vanishes on its diagonal entries).
    jump_ops: list of (rate, matrix); each matrix must have at most one
        nonzero per column and shift the D-eigenvalue uniformly.
    """
    diag = np.ascontiguousarray(np.real(diag), dtype=np.float64)
    d = len(diag)
    ti, tj, tv, tth, toff, tmode, tcol = [], [], [], [], [0], [], []
    dense = []

    def add_block(mat, mode, col):
        i, j, v = _coo(mat)
        ti.append(i)
        tj.append(j)
        tv.append(v)
        tth.append(diag[i] - diag[j])
        toff.append(toff[-1] + len(i))
        tmode.append(mode)
        tcol.append(col)

    for col, (kind, mat) in enumerate(terms):
        if mat.shape != (d, d):
            raise ValueError("term shape does not match diag")
        if kind == TERM_REAL:
            add_block(mat, _SCATTER_RE, col)
            dense.append((kind, np.ascontiguousarray(mat), None))
        elif kind == TERM_PAIR:
            add_block(mat, _SCATTER_C, col)
            add_block(mat.conj().T, _SCATTER_CONJ, col)
            dense.append((kind, np.ascontiguousarray(mat),
                          np.ascontiguousarray(mat.conj().T)))
        else:
            raise ValueError(f"unknown term kind {kind}")

    js, jd, jw, joff = [], [], [], [0]
    dtot = np.zeros(d)
    for rate, op in jump_ops:
        if rate < 0:
            raise ValueError("jump rates must be >= 0")
        if rate == 0:
            continue
        i, j, v = _coo(op)
        if np.abs(v.imag).max(initial=0.0) > 0:
            raise ValueError("jump operators must have real matrix elements")
        if len(np.unique(j)) != len(j):
            raise ValueError("jump operator has more than one entry per column")
        shifts = diag[i] - diag[j]
        if len(shifts) and np.ptp(shifts) > 1e-9 * max(1.0, np.abs(shifts).max()):
            raise ValueError("jump operator does not shift the rotating diagonal uniformly")
        w = np.sqrt(rate) * v.real
        js.append(j)        # source column
        jd.append(i)        # target row
        jw.append(w)
        joff.append(joff[-1] + len(j))
        dtot[j] += w**2     # (o^dag o)_jj = |o_ij|^2 summed over the single row hit
    cat = lambda parts, dtype: (np.concatenate(parts).astype(dtype)
                                if parts else np.zeros(0, dtype))
    return KernelPlan(
        dim=d,
        n_coeffs=len(terms),
        diag=diag,
        dense_terms=dense,
        term_i=cat(ti, np.int32),
        term_j=cat(tj, np.int32),
        term_v=cat(tv, np.complex128),
        term_theta=cat(tth, np.float64),
        term_off=np.asarray(toff, dtype=np.int32),
        term_mode=np.asarray(tmode, dtype=np.int32),
        term_col=np.asarray(tcol, dtype=np.int32),
        jump_src=cat(js, np.int32),
        jump_dst=cat(jd, np.int32),
        jump_w=cat(jw, np.float64),
        jump_off=np.asarray(joff, dtype=np.int32),
        dtot=dtot,
    )
