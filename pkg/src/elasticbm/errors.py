"""Exception types shared across the package."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach its target; carries diagnostics."""


class InversionUnstableError(RuntimeError):
    """Talbot and Gaver-Stehfest inversions disagree beyond tolerance."""


class ResourceCapError(RuntimeError):
    """A sampler exceeded its configured path-length cap."""
