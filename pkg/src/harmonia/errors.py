"""Exception types raised by the public API."""


class HarmoniaError(ValueError):
    """Base class for configuration and numerical failures."""


class DegenerateConfiguration(HarmoniaError):
    """Points that must be distinct coincide."""


class MonotonicityFailure(HarmoniaError):
    """A bracketing solve failed; the structure likely violates (M)."""


class NotCollinear(HarmoniaError):
    """Two harmonic pairs do not share an axis."""


class NoCommonPerpendicular(HarmoniaError):
    """The two pairs are separating or linked, so no perpendicular exists."""


class NotOnLine(HarmoniaError):
    """A harmonic pair does not lie on the requested line."""


class SamplerStarvation(HarmoniaError):
    """A constrained sampler exhausted its retry budget."""
