"""Exception hierarchy.

Every error raised by the package derives from :class:`CohTransError` and
carries a short machine-readable ``code`` used by the CLI reports.
"""


class CohTransError(Exception):
    code = "error"


class ParseError(CohTransError):
    code = "parse_error"


class NormError(CohTransError):
    code = "norm_error"


class ZeroAmplitudeError(CohTransError):
    code = "zero_amplitude"


class OrderError(CohTransError):
    """Amplitudes handed to a constructor are not in descending order."""

    code = "order_error"


class DimensionMismatch(CohTransError):
    code = "dimension_mismatch"


class DimensionTooLarge(CohTransError):
    code = "dimension_too_large"


class MajorizationError(CohTransError):
    code = "majorization_violated"


class NoCandidateError(CohTransError):
    code = "no_candidate"


class Infeasible(CohTransError):
    """A permutation set admits no physical probability vector.

    ``reason`` is ``"negative"`` when the exact solution has a negative
    component, ``"residual"`` when the linear system has no solution.
    """

    code = "infeasible"

    def __init__(self, reason, detail=""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason
        self.detail = detail


class SingularSystem(Infeasible):
    code = "singular_system"

    def __init__(self, detail=""):
        super().__init__("singular", detail)


class DegenerateGamma(CohTransError):
    code = "degenerate_gamma"


class NoFeasibleSP(CohTransError):
    code = "no_feasible_sp"

    def __init__(self, message, attempts=()):
        super().__init__(message)
        # (PermutationSet, reason) pairs, in enumeration order
        self.attempts = list(attempts)


class BlockMismatch(CohTransError):
    code = "block_mismatch"


class NegativeRadicand(CohTransError):
    code = "negative_radicand"


class NoIntermediateFound(CohTransError):
    code = "no_intermediate_found"


class VerificationError(CohTransError):
    code = "verification_failed"
