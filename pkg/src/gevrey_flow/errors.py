"""Exception types shared across the package."""


class LatticeMismatchError(ValueError):
    """Operands live on different lattices ("lattice mismatch")."""


class OverflowRiskError(ValueError):
    """An exponential weight would leave the double-precision safe range ("overflow risk")."""


class ZeroModeSingularityError(ValueError):
    """A negative frequency exponent was combined with a nonzero mean mode."""


class TailBoundError(ValueError):
    """An infinite-lattice bound cannot be certified from the given parameters."""


class ConfigError(ValueError):
    """A run configuration file failed strict parsing."""


class BlowupAbort(RuntimeError):
    """Simulation aborted: a monitored norm exceeded the growth threshold.

    Carries the abort time, the observed growth factor and the partial
    simulation result accumulated up to the abort.
    """

    def __init__(self, message, t, growth, result=None):
        super().__init__(message)
        self.t = t
        self.growth = growth
        self.result = result


class OffOmegaWarning(UserWarning):
    """The supplied path left the barrier event during a simulation."""


class NonContractionWarning(UserWarning):
    """Successive fixed-point iterates failed to contract geometrically."""
