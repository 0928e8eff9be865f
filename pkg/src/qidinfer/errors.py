"""Semantic exception hierarchy.

Every failure mode that callers are expected to branch on gets its own class;
all of them derive from :class:`QidInferError` so a study harness can record
a failed run without guessing which subsystem raised.
"""


class QidInferError(Exception):
    """Base class for all errors raised by this package."""


class LengthMismatch(QidInferError):
    """Array of function values does not match the grid node count."""


class GridMismatch(QidInferError):
    """Two curves/series that must share a grid do not."""


class EmptySample(QidInferError):
    """An operation that needs observations received none."""


class NonPositiveN(QidInferError):
    """Sample size must be a positive integer."""


class NonPositiveBandwidth(QidInferError):
    """Kernel bandwidth must be strictly positive."""


class BadEpsilon(QidInferError):
    """Weight support parameter must lie strictly inside (0, 1)."""


class SingularSystem(QidInferError):
    """Normal equations of the weighted least-squares fit are degenerate."""


class GridTooCoarse(QidInferError):
    """Too few frequency nodes fall inside the active weight band."""


class MissingAnchor(QidInferError):
    """Continuous logarithm needs the frequency grid to contain u = 0."""


class NearZeroModulus(QidInferError):
    """|phi_n(u)| fell below the modulus floor somewhere on the grid.

    Signals that the frequency cutoff is too ambitious for the sample size;
    carries the offending frequency and modulus.
    """

    def __init__(self, u: float, modulus: float, floor: float):
        self.u = float(u)
        self.modulus = float(modulus)
        self.floor = float(floor)
        super().__init__(
            f"|cf({self.u:g})| = {self.modulus:.3e} <= floor {self.floor:.3e}; "
            "reduce the frequency cutoff or increase the sample size"
        )


class BadCutoff(QidInferError):
    """Inversion cutoff exceeds the trusted frequency band."""


class UnsupportedModel(QidInferError):
    """No closed-form characteristic function for this model variant."""


class UnsupportedSpec(QidInferError):
    """The requested oracle is not defined for this model variant."""


class BadSpec(QidInferError):
    """Model parameters violate the variant's domain constraints."""


class SeriesNotConverged(QidInferError):
    """Signed-measure series hit max_terms before reaching the tail tolerance."""

    def __init__(self, max_terms: int, tail_bound: float, tail_tol: float):
        self.max_terms = max_terms
        self.tail_bound = float(tail_bound)
        self.tail_tol = float(tail_tol)
        super().__init__(
            f"series tail bound {self.tail_bound:.3e} > tol {self.tail_tol:.3e} "
            f"after {max_terms} terms (mixture weight too close to 1/2)"
        )


class PTooCloseToOne(QidInferError):
    """Estimated normal weight is too close to 1 for a stable decontamination."""


class DegenerateComponent(QidInferError):
    """An EM variance update collapsed to (numerically) zero."""


class ParseError(QidInferError):
    """Malformed input file; carries the 1-based line number."""

    def __init__(self, line_no: int, content: str):
        self.line_no = int(line_no)
        self.content = content
        super().__init__(f"line {self.line_no}: cannot parse {content!r} as a real number")


class EmptyReport(QidInferError):
    """Plot emission was asked to render an empty study report."""
