"""Exception types shared across the simulator."""


class SimulationError(Exception):
    """Base class for simulator-specific failures."""


class ZeroProbabilityHerald(SimulationError):
    """Projection probability fell below the resolvable threshold."""


class CutoffTooSmall(SimulationError):
    """A truncated Fock space is too small for the requested operation."""


class AccuracyFailure(SimulationError):
    """An integration accuracy monitor (trace drift) exceeded its bound."""


class PositivityFailure(SimulationError):
    """A propagated density matrix developed a significant negative eigenvalue."""


class DivergenceError(SimulationError):
    """Non-finite values appeared during integration."""

    def __init__(self, t_first_bad: float):
        self.t_first_bad = t_first_bad
        super().__init__(f"non-finite values encountered at t = {t_first_bad:.6g} ns")


class ProtocolViolation(SimulationError):
    """A protocol-level ordering or validity constraint was broken."""


class ConfigError(ValueError):
    """Invalid run configuration; carries field/line diagnostics when known."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        super().__init__((", ".join(where) + ": " if where else "") + message)
