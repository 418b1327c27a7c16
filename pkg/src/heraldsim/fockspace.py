"""Operator algebra over truncated multimode bosonic Fock spaces.

All operators are dense complex matrices over the tensor product of
number-truncated single-mode spaces.  The canonical layout holds the four
fluctuation modes of the coupled two-cavity system in the fixed order
(a+, a-, b+, b-): the optical and mechanical normal modes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np
from scipy.linalg import expm

from .errors import CutoffTooSmall, ZeroProbabilityHerald

CANONICAL_LABELS = ("a+", "a-", "b+", "b-")

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-8
EIGENVALUE_TOL = 1e-8
PROJECTOR_TOL = 1e-10
ZERO_PROBABILITY_TOL = 1e-12


@dataclass(frozen=True)
class ModeLayout:
    """Ordered mode labels and per-mode truncation dimensions."""

    modes: tuple[tuple[str, int], ...]

    def __post_init__(self):
        labels = tuple(lab for lab, _ in self.modes)
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate mode labels in {labels}")
        for lab, cut in self.modes:
            if cut < 2:
                raise ValueError(f"mode '{lab}' needs cutoff >= 2, got {cut}")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.modes)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(cut for _, cut in self.modes)

    @property
    def total_dim(self) -> int:
        out = 1
        for _, cut in self.modes:
            out *= cut
        return out

    def axis(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"unknown mode label '{label}' (have {self.labels})") from None

    def cutoff(self, label: str) -> int:
        return self.dims[self.axis(label)]

    def index(self, occupations: tuple[int, ...]) -> int:
        """Flat basis index of the number state |n_0, n_1, ...>."""
        if len(occupations) != len(self.modes):
            raise ValueError("occupation tuple length does not match mode count")
        idx = 0
        for n, d in zip(occupations, self.dims):
            if not 0 <= n < d:
                raise ValueError(f"occupation {n} outside [0, {d})")
            idx = idx * d + n
        return idx


def canonical_layout(cutoffs: tuple[int, int, int, int] = (3, 3, 4, 4)) -> ModeLayout:
    """The fixed 4-mode layout (a+, a-, b+, b-) used throughout the protocol."""
    if len(cutoffs) != 4:
        raise ValueError("canonical layout takes exactly 4 cutoffs")
    return ModeLayout(tuple(zip(CANONICAL_LABELS, cutoffs)))


@dataclass
class FockOperator:
    """A dense operator tied to a mode layout."""

    layout: ModeLayout
    matrix: np.ndarray

    def __post_init__(self):
        d = self.layout.total_dim
        if self.matrix.shape != (d, d):
            raise ValueError(f"matrix shape {self.matrix.shape} != layout dim {d}")

    def dag(self) -> "FockOperator":
        return FockOperator(self.layout, self.matrix.conj().T)


@dataclass
class DensityMatrix:
    """Hermitian, unit-trace, positive (within tolerance) state matrix."""

    layout: ModeLayout
    matrix: np.ndarray
    check_on_init: bool = field(default=False, repr=False)

    def __post_init__(self):
        d = self.layout.total_dim
        if self.matrix.shape != (d, d):
            raise ValueError(f"matrix shape {self.matrix.shape} != layout dim {d}")
        if self.check_on_init:
            self.check()

    def check(self, hermiticity=HERMITICITY_TOL, trace=TRACE_TOL, min_eig=-EIGENVALUE_TOL):
        """Raise ValueError if the state violates its invariants."""
        herm = np.abs(self.matrix - self.matrix.conj().T).max()
        if herm > hermiticity:
            raise ValueError(f"hermiticity defect {herm:.3e} > {hermiticity:.1e}")
        tr = self.matrix.trace()
        if abs(tr - 1.0) > trace:
            raise ValueError(f"trace {tr} deviates from 1 by more than {trace:.1e}")
        lo = float(np.linalg.eigvalsh(self.matrix).min())
        if lo < min_eig:
            raise ValueError(f"minimum eigenvalue {lo:.3e} < {min_eig:.1e}")

    def expectation(self, op: np.ndarray) -> complex:
        return complex(np.einsum("ij,ji->", self.matrix, op))


def destroy(cutoff: int) -> np.ndarray:
    """Single-mode lowering operator, <n-1|a|n> = sqrt(n)."""
    if cutoff < 2:
        raise ValueError(f"cutoff must be >= 2, got {cutoff}")
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), k=1).astype(complex)


def create(cutoff: int) -> np.ndarray:
    return destroy(cutoff).conj().T


def number(cutoff: int) -> np.ndarray:
    return np.diag(np.arange(cutoff, dtype=float)).astype(complex)


def embed(op: np.ndarray, slot: str, layout: ModeLayout) -> FockOperator:
    """Kronecker-embed a single-mode operator, identities on all other modes."""
    axis = layout.axis(slot)
    d = layout.dims[axis]
    if op.shape != (d, d):
        raise ValueError(f"operator shape {op.shape} does not match cutoff {d} of '{slot}'")
    mats = [np.eye(n, dtype=complex) for n in layout.dims]
    mats[axis] = np.asarray(op, dtype=complex)
    return FockOperator(layout, reduce(np.kron, mats))


def basis_state(layout: ModeLayout, occupations: tuple[int, ...]) -> np.ndarray:
    """State vector of the number state |n_0, n_1, ...>."""
    vec = np.zeros(layout.total_dim, dtype=complex)
    vec[layout.index(occupations)] = 1.0
    return vec


def displacement(amplitude: complex, cutoff: int, pad: int = 8) -> tuple[np.ndarray, float]:
    """Single-mode displacement D(alpha) truncated to `cutoff`.

    The exponential is evaluated on a space padded by `pad` levels and the
    result truncated back, which controls the truncation error for moderate
    |alpha|.  Returns the truncated matrix together with its unitarity defect
    max|D D^dag - I| on the retained block.
    """
    if cutoff < 2:
        raise ValueError(f"cutoff must be >= 2, got {cutoff}")
    if pad < 0:
        raise ValueError("pad must be non-negative")
    a = destroy(cutoff + pad)
    gen = amplitude * a.conj().T - np.conjugate(amplitude) * a
    full = expm(gen)
    d = full[:cutoff, :cutoff]
    defect = float(np.abs(d @ d.conj().T - np.eye(cutoff)).max())
    return d, defect


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out all modes not in `keep`; kept modes preserve layout order."""
    keep = set(keep)
    if not keep:
        raise ValueError("keep set must be non-empty")
    unknown = keep - set(rho.layout.labels)
    if unknown:
        raise ValueError(f"unknown labels {sorted(unknown)}")
    dims = rho.layout.dims
    nm = len(dims)
    keep_axes = [i for i, lab in enumerate(rho.layout.labels) if lab in keep]
    drop_axes = [i for i in range(nm) if i not in keep_axes]
    t = rho.matrix.reshape(dims + dims)
    for k, ax in enumerate(drop_axes):
        # axes shift left as earlier ones are contracted away
        a = ax - k
        t = np.trace(t, axis1=a, axis2=a + nm - k)
    new_modes = tuple(rho.layout.modes[i] for i in keep_axes)
    new_layout = ModeLayout(new_modes)
    d = new_layout.total_dim
    return DensityMatrix(new_layout, np.ascontiguousarray(t.reshape(d, d)))


def partial_transpose(rho: DensityMatrix, subsystem: str) -> np.ndarray:
    """Transpose the bra/ket indices of a single mode."""
    axis = rho.layout.axis(subsystem)
    dims = rho.layout.dims
    nm = len(dims)
    t = rho.matrix.reshape(dims + dims)
    t = np.swapaxes(t, axis, axis + nm)
    d = rho.layout.total_dim
    return np.ascontiguousarray(t.reshape(d, d))


def project_and_normalize(
    rho: DensityMatrix, projector: FockOperator
) -> tuple[DensityMatrix, float]:
    """Selective measurement: (P rho P / Tr[P rho], Tr[P rho]).

    Raises ZeroProbabilityHerald when the projection probability is below
    the resolvable threshold; the caller decides the fallback.
    """
    p_mat = projector.matrix
    idem = np.abs(p_mat @ p_mat - p_mat).max()
    if idem > PROJECTOR_TOL:
        raise ValueError(f"projector not idempotent: defect {idem:.3e}")
    prob = float(np.einsum("ij,ji->", p_mat, rho.matrix).real)
    if prob < ZERO_PROBABILITY_TOL:
        raise ZeroProbabilityHerald(f"projection probability {prob:.3e} below threshold")
    out = p_mat @ rho.matrix @ p_mat
    out /= out.trace().real
    return DensityMatrix(rho.layout, out), min(max(prob, 0.0), 1.0)


def thermal_populations(n_th: float, cutoff: int, tail_tol: float = 1e-6) -> np.ndarray:
    """Renormalized Bose-Einstein populations on a truncated ladder.

    The discarded tail weight of the untruncated geometric distribution must
    stay below `tail_tol`, otherwise the cutoff is declared too small.
    """
    if n_th < 0:
        raise ValueError("thermal occupation must be >= 0")
    if n_th == 0.0:
        pops = np.zeros(cutoff)
        pops[0] = 1.0
        return pops
    r = n_th / (n_th + 1.0)
    tail = r**cutoff
    if tail > tail_tol:
        raise CutoffTooSmall(
            f"thermal tail weight {tail:.3e} at cutoff {cutoff} exceeds {tail_tol:.1e} "
            f"(n_th = {n_th:.4g})"
        )
    pops = (1.0 - r) * r ** np.arange(cutoff)
    return pops / pops.sum()
