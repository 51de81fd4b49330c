"""Exception types raised by spikegap solvers."""


class SpikegapError(Exception):
    """Base class for all spikegap-specific failures."""


class ConfigurationError(SpikegapError, ValueError):
    """Invalid solver configuration (precision, parameter ranges, ...)."""


class NearDegenerateError(SpikegapError):
    """Requested eigenvector belongs to a cluster too tight to separate."""

    def __init__(self, eigenvalue, cluster_width):
        self.eigenvalue = eigenvalue
        self.cluster_width = cluster_width
        super().__init__(
            f"eigenvalue {eigenvalue!r} sits in a cluster of width "
            f"{cluster_width:.3e}; refusing to compute an eigenvector"
        )


class NoDoubleWellError(SpikegapError):
    """The coherent-state potential has fewer than two local minima."""


class NoBarrierError(SpikegapError):
    """The requested tunneling region is not classically forbidden."""


class MethodInapplicableError(SpikegapError):
    """A semiclassical estimate has no solution in its validity window."""


class NodeNotFoundError(SpikegapError):
    """A wavefunction node never reaches the requested position."""
