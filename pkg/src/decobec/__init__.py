"""Light-induced dephasing of trapped condensates: closed forms and a Fock-space oracle."""

__version__ = "0.1.0"

from . import dephasing, doublewell, model, oracle, specfun  # noqa: E402
from .errors import (  # noqa: E402
    AccuracyError,
    ConfigError,
    DecobecError,
    InvalidArgumentError,
    ResourceError,
)

__all__ = [
    "__version__",
    "specfun",
    "model",
    "dephasing",
    "doublewell",
    "oracle",
    "DecobecError",
    "InvalidArgumentError",
    "AccuracyError",
    "ResourceError",
    "ConfigError",
]
