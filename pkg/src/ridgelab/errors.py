"""Exception types shared across the package."""


class RidgelabError(Exception):
    """Base class for every package-specific error."""


class NotPrime(RidgelabError):
    """A modulus that must be prime is not."""


class InvalidInverse(RidgelabError):
    """Requested the modular inverse of an element that has none (v = 0)."""


class DimensionError(RidgelabError):
    """Array length or modulus does not match the declared grid."""


class DegenerateActivation(RidgelabError):
    """Activation vector is constant and cannot be centered and normalized."""


class NotAdmissible(RidgelabError):
    """Activation/ridgelet pair has a vanishing spectral pairing constant."""


class TooLargeForDense(RidgelabError):
    """A dense table or operator would exceed the configured size limit."""


class NotIsometric(RidgelabError):
    """Ridgelet vector violates the zero-sum / unit-norm conditions, so the
    induced column map is not an isometry."""


class StateNotNormalized(RidgelabError):
    """Register state vector does not have unit l2 norm."""


class NoData(RidgelabError):
    """Dataset ingestion received no rows."""


class InconsistentLabels(RidgelabError):
    """Two examples share an input but carry conflicting labels."""


class InvalidHyperparameter(RidgelabError):
    """A scalar hyperparameter is outside its valid range."""


class DegenerateDistribution(RidgelabError):
    """Node-weight vector is identically zero; no sampling distribution exists."""


class NoNodes(RidgelabError):
    """Subnetwork training called with an empty node set."""


class ConfigError(RidgelabError):
    """Experiment configuration rejected; carries the offending key."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")
