"""Exception types shared across the package."""


class SepfactoryError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(SepfactoryError):
    """Operands have incompatible shapes."""


class NotHermitian(SepfactoryError):
    """Matrix fails its Hermitian-symmetry precondition."""


class NotPSD(SepfactoryError):
    """Matrix has an eigenvalue below the allowed negative tolerance."""


class NoConvergence(SepfactoryError):
    """An iteration exhausted its sweep or retry budget."""


class ZeroTrace(SepfactoryError):
    """A compression or normalization hit a zero trace."""


class ZeroOperator(SepfactoryError):
    """Certificate assembles to the zero operator."""


class RangeMismatch(SepfactoryError):
    """No coefficient operator solves row (i, j) of the triangular factor."""

    def __init__(self, i: int, j: int, residual: float = float("nan")):
        self.i = i
        self.j = j
        self.residual = residual
        super().__init__(
            f"block ({i},{j}) is not expressible as S_({i},{j}) X_{i}"
            f" (consistency residual {residual:.3e})"
        )


class NotSemiSsppt(SepfactoryError):
    """Certificate fails the row-commutation condition."""


class NotCommuting(SepfactoryError):
    """Matrix family fails the normality/commutation preconditions."""


class PreconditionFailed(SepfactoryError):
    """Supplied objects are mutually inconsistent."""


class Unsolvable(SepfactoryError):
    """Factor equation has no solution within tolerance (range condition)."""


class ConditionFailed(SepfactoryError):
    """Neither block-ordering condition holds."""


class NormalityFailed(SepfactoryError):
    """Constructed coefficient operator is not normal within tolerance."""


class DegenerateDraw(SepfactoryError):
    """Random draw degenerated (zero operator) beyond the retry budget."""


class NotContraction(SepfactoryError):
    """Operator norm exceeds 1 beyond the clipping tolerance."""


class FormatError(SepfactoryError):
    """File does not conform to the sepfactory/1 schema."""
