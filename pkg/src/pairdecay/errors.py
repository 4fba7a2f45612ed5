"""Exception hierarchy shared by all modules.

The CLI maps these onto process exit codes: config problems exit 2,
numeric/domain problems exit 3, resource exhaustion exits 4.
"""


class PairDecayError(Exception):
    """Base class for all library errors."""


class DomainError(PairDecayError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NodeError(PairDecayError):
    """Guidance velocity requested where the probability density underflows.

    Gaussian waves never vanish exactly, but densities below the floor
    (1e-300 in natural units) cannot yield a trustworthy phase gradient.
    """


class UnsupportedVariantError(PairDecayError):
    """Operation requires a different wave variant (e.g. sigma == 0)."""


class ResourceError(PairDecayError):
    """A computation would exceed a hard resource budget (e.g. step count)."""


class NumericError(PairDecayError):
    """A numerical procedure failed to converge to its tolerance."""


class ResolutionError(NumericError):
    """A grid is too coarse to resolve the fastest oscillation present."""


class InfiniteConjugateError(DomainError):
    """Thin-lens object at the focal distance: the conjugate is at infinity."""


class EmptyImageError(PairDecayError):
    """A coincidence scan accepted zero events; no image can be formed."""


class ConfigError(PairDecayError, ValueError):
    """A scenario configuration is malformed or incomplete."""
