"""Carbon-aware design-space exploration for 2D and 3D DNN accelerators.

The package chains five models: approximate-multiplier characterization
(:mod:`approx3d.approxmul`), accuracy measurement on a bfloat16 proxy network
(:mod:`approx3d.accproxy`), silicon area (:mod:`approx3d.area`), embodied
carbon (:mod:`approx3d.carbon`) and an analytical delay model
(:mod:`approx3d.perf`). :mod:`approx3d.dse` searches the architecture space
for the lowest carbon-delay product.
"""

from .errors import (
    Approx3dError,
    ConfigError,
    DuplicateId,
    GuardError,
    IncompleteRecord,
    InfeasibleArchitecture,
    InvalidArgument,
    NoFeasibleDie,
    UnsupportedWidth,
)

__version__ = "0.1.0"

__all__ = [
    "Approx3dError",
    "ConfigError",
    "DuplicateId",
    "GuardError",
    "IncompleteRecord",
    "InfeasibleArchitecture",
    "InvalidArgument",
    "NoFeasibleDie",
    "UnsupportedWidth",
    "__version__",
]
