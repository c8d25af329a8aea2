"""Exception hierarchy shared across the package."""


class CdssError(Exception):
    """Base class for all package errors."""


class SchemaError(CdssError):
    """Schema file malformed or inconsistent with the data file."""


class DataError(CdssError):
    """Data file unusable (parse failure, empty after cleaning, ...)."""


class ConfigError(CdssError):
    """Invalid configuration (bad fold counts, class too small, ...)."""


class NumericError(CdssError):
    """Non-finite values where finite numbers are required."""


class MetricError(CdssError):
    """Metric undefined for the given inputs (e.g. single-class labels)."""


class DegenerateWeightsError(CdssError):
    """Voting weights sum to zero."""


class BundleFormatError(CdssError):
    """Serialized model bundle is malformed or has the wrong version."""
