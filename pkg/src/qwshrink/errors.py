"""Exception types shared across the package."""


class InvariantViolation(ValueError):
    """A numerical invariant failed its tolerance check.

    ``name`` identifies the invariant (e.g. ``"kraus_completeness"``) and
    ``residual`` carries the measured violation so callers can report it.
    """

    def __init__(self, name: str, residual: float, detail: str = ""):
        self.name = name
        self.residual = float(residual)
        msg = f"{name} violated (residual {self.residual:.3e})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
