"""Channel-pruning toolkit for EEG decoders.

Scores each electrode's contribution to a trained decoder by gradient
quadrature along a baseline-to-input path, aggregates the scores into a
task-level channel ranking, and sweeps channel density against decoding
accuracy and throughput.
"""
from .errors import ConfigError, DataFormatError, NumericError, PlugselectError

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DataFormatError",
    "NumericError",
    "PlugselectError",
    "__version__",
]
