"""Interval maps whose repelling fixed point attracts orbit statistics.

The package constructs two explicit degree-two circle maps, each with a
hyperbolically repelling fixed point at 0 (identified with 1).  Despite the
repulsion, time averages of orbits concentrate at that point: for the
"full" variant this happens for every sampled starting point, for the
"physical" variant for a positive-measure set.  The library exposes the
construction itself, exact evaluation of the maps and their derivatives,
the induced first-return machinery the construction is built from, orbit
simulation that stays exact arbitrarily close to the fixed point, and a
verification suite that re-checks every finite property of the build.
"""

from .errors import (
    AtSingularPoint,
    ConstructionFailed,
    DepthExceeded,
    IndexOutOfRange,
    InvalidParam,
    NoConvergence,
    OutOfDomain,
    RepellerError,
    VariantMismatch,
)
from .params import (
    ConstructionParams,
    DerivedConstants,
    Partition,
    PartitionCell,
    Variant,
    params_from_json,
    params_to_json,
    validate,
)
from .branch_f1 import F1Evaluator, build_f1

__version__ = "0.1.0"

__all__ = [
    "AtSingularPoint",
    "ConstructionFailed",
    "ConstructionParams",
    "DepthExceeded",
    "DerivedConstants",
    "F1Evaluator",
    "IndexOutOfRange",
    "InvalidParam",
    "NoConvergence",
    "OutOfDomain",
    "Partition",
    "PartitionCell",
    "RepellerError",
    "Variant",
    "VariantMismatch",
    "build_f1",
    "params_from_json",
    "params_to_json",
    "validate",
    "__version__",
]
