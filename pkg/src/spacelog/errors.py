"""Exception hierarchy for the spacelog package."""


class SpacelogError(Exception):
    """Base class for all spacelog errors."""


# --- network ---

class NonDivisibleHorizon(SpacelogError):
    """Horizon length is not an integer multiple of the step length."""


class DanglingNodeReference(SpacelogError):
    """An edge or demand references a node id that was never declared."""


# --- commodity ---

class NonPositiveIsp(SpacelogError):
    """Specific impulse must be strictly positive."""


class MissingCommodity(SpacelogError):
    """A coefficient builder referenced a commodity absent from the space."""


class NegativeDuration(SpacelogError):
    """Operating duration passed to a production matrix was negative."""


class ZeroPowerWorkingTime(SpacelogError):
    """Power system working time per solar day must be positive."""


# --- formulation ---

class InvalidScenario(SpacelogError):
    """Scenario failed structural checks during model assembly."""


class RatiosIncomplete(SpacelogError):
    """Prefixed ratios do not cover every infrastructure bundle."""


class UnderdeterminedReference(SpacelogError):
    """No reference production demand available to derive prefixed ratios."""


class PlanModelMismatch(SpacelogError):
    """A packing plan was applied to a model it was not derived from."""


# --- packing ---

class NTooLarge(SpacelogError):
    """Requested more package commodities than intersection sets exist."""


class InvalidAggregationMatrix(SpacelogError):
    """Aggregation matrix violates the structural conditions (one nonzero
    per column / at least one per row, all positive)."""


class ConditionsViolated(SpacelogError):
    """Variable packing attempted on columns with unequal coefficients."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


# --- solver ---

class NumericalFailure(SpacelogError):
    """Simplex pivot tolerance breakdown."""


class DimensionMismatch(SpacelogError):
    """Solution vector length does not match the model column count."""


# --- scenario / io ---

class ParseError(SpacelogError):
    """Scenario file could not be parsed."""


class ValidationError(SpacelogError):
    """Scenario parsed but failed validation; carries all diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


class UnknownVariant(SpacelogError):
    """Unrecognized bundled-scenario variant parameter."""


class IoFailure(SpacelogError):
    """File write/read failed."""
