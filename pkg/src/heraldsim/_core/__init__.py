"""Stepping kernels: compiled extension with a pure-numpy fallback.

The compiled kernel (`heraldsim._core.kernel`, built from kernel.pyx) and the
fallback (`heraldsim._core.fallback`) expose the same two entry points:

    classical_rk4(y0, t0, dt, nsteps, coeffs, pulse_table)
    lindblad_rk4(rho, coeffs, dt, plan)

Selection happens on first use; set HERALDSIM_BACKEND=compiled|python to
force one side (the benchmark and parity tests rely on this).
"""
from __future__ import annotations

import os

_BACKEND = None


def backend():
    """Return the active kernel module, importing it on first use."""
    global _BACKEND
    if _BACKEND is not None:
        return _BACKEND
    choice = os.environ.get("HERALDSIM_BACKEND", "auto").lower()
    if choice not in ("auto", "compiled", "python"):
        raise ValueError(f"HERALDSIM_BACKEND must be auto|compiled|python, got {choice!r}")
    if choice in ("auto", "compiled"):
        try:
            from . import kernel as mod
            _BACKEND = mod
            return _BACKEND
        except ImportError:
            if choice == "compiled":
                raise
    from . import fallback as mod
    _BACKEND = mod
    return _BACKEND


def backend_name() -> str:
    return backend().BACKEND_NAME


def available_backends() -> dict:
    """All importable kernel modules keyed by name."""
    out = {}
    try:
        from . import kernel
        out["compiled"] = kernel
    except ImportError:
        pass
    from . import fallback
    out["python"] = fallback
    return out
