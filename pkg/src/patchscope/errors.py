"""Exception hierarchy for scene handling, solver runs, and analysis."""


class PatchscopeError(Exception):
    """Base class for all toolkit errors."""


class SceneParseError(PatchscopeError):
    """Scene file is not readable JSON."""


class SceneSchemaError(PatchscopeError):
    """Scene JSON has missing, extra, or mistyped fields."""


class SceneValidationError(PatchscopeError):
    """Scene violates a documented invariant."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(f"{v.path}: {v.message}" for v in self.violations)
        super().__init__(f"invalid scene: {lines}")


class FormulaDomainError(PatchscopeError, ValueError):
    """Input outside the validity domain of a closed-form model."""


class TilingOverflowError(PatchscopeError):
    """Unit-cell tiling does not fit within the board footprint."""


class GridFitError(PatchscopeError):
    """Scene geometry does not fit inside the simulation domain."""


class StabilityError(PatchscopeError):
    """Field magnitude exceeded the blow-up ceiling (unstable run)."""


class RingdownError(PatchscopeError):
    """Port record has not decayed enough for spectral analysis."""


class RingdownWarning(UserWarning):
    """Run finished before the ring-down criterion was met."""


class PassivityError(PatchscopeError, ValueError):
    """Reflection/transmission data exceeds passive bounds."""


class BranchAmbiguityWarning(UserWarning):
    """|S21| too small for a well-conditioned refractive-index branch."""


class MissingFrequencyError(PatchscopeError, KeyError):
    """Requested frequency was not recorded by the run."""


class ExcitationError(PatchscopeError):
    """Operation requires the other excitation kind (port vs plane wave)."""


class NoMinimumError(PatchscopeError):
    """Spectrum has no interior |S11| minimum to refine."""


class SummarySchemaError(PatchscopeError):
    """Summary files have mismatched schema versions."""
