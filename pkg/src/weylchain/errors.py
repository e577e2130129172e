"""Exception types shared across the toolkit."""


class WeylchainError(Exception):
    """Base class for toolkit failures."""


class MeshTooCoarseError(WeylchainError):
    """Degree residual exceeded the gate; the caller should refine the mesh."""


class DegenerateImageSimplexError(WeylchainError):
    """An image simplex is nearly flat across a great sphere; refine once."""


class SliceThroughNodeError(WeylchainError):
    """A requested slice passes too close to a band crossing."""


class NotACycleError(WeylchainError):
    """Winding class requested for a chain with nonzero boundary."""


class BoundaryMismatchError(WeylchainError):
    """Two chains represent different charge configurations."""


class InconsistentProfilesError(WeylchainError):
    """Measured slice profiles differ from a candidate chain by a non-constant
    amount; signals a measurement error or a missed node."""


class ChargesUnbalancedError(WeylchainError):
    """Local charges do not cancel; reconstruction is impossible."""


class ZeroLocusError(WeylchainError):
    """The zero set of a field is not a finite set of isolated points."""
