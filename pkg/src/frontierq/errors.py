"""Exception hierarchy for frontier estimation failures."""


class FrontierError(Exception):
    """Base class for all numerical/statistical failures in this package."""


class EmptyEffectiveSample(FrontierError):
    """No observation is dominated (componentwise) by the query input level."""


class InvalidTau(FrontierError):
    """Quantile level outside the open interval (0, 1)."""


class IntegerIndex(FrontierError):
    """k * p_hat is an integer, so the effective order-statistic index is ambiguous."""


class ZeroSpacing(FrontierError):
    """Two tail quantiles coincide; the spacing ratio is undefined."""


class NonPositiveRatio(FrontierError):
    """Tail-spacing ratio is not strictly positive; enlarge the tail fraction."""


class ZeroDenominator(FrontierError):
    """The two normalizing order statistics coincide; increase m or k0."""


class DegenerateSystem(FrontierError):
    """The bias-cancelling weight system is singular (k1^(-xi) == k2^(-xi))."""


class RangeTooNarrow(FrontierError):
    """The [h1, h2] range cannot hold the required number of distinct integers."""


class NonPositiveB(FrontierError):
    """The subsample-size formula returned a non-positive value; sample too small."""


class NonFiniteStart(FrontierError):
    """The MCMC initial value has zero posterior density (broken prior window)."""


class SubsampleRetriesExceeded(FrontierError):
    """A degenerate subsample could not be repaired within the retry budget."""


class StudyFailure(FrontierError):
    """Too many replications of a simulation study failed."""
