"""Toolkit for deciding when nonlocality is forced onto an unmeasured pair.

Submodules: qcore (states and tensor algebra), states (the named families),
bellopt (Bell functionals, see-saw, Horodecki criterion), sdp (the equality-
constrained solver layer), npa (level-1 outer relaxation), marginal
(compatibility, uniqueness, extension and verdict pipelines), bounds
(closed-form certificates), kvgame (coset game), haarscan (random-state
survey), cli (command line). The names below cover the common workflows;
anything deeper is imported from its submodule.
"""

from .bellopt import (
    Assemblage,
    BellFunctional,
    Correlation,
    Scenario,
    born_correlation,
    horodecki_chsh,
    make_functional,
    seesaw_optimize,
)
from .bounds import LvParams, fef, lv_lower_bound, min_k_for_violation, steering_threshold
from .errors import (
    CapacityError,
    DomainError,
    IncompatibleMarginalsError,
    QtransitError,
    SignalingError,
    SolverFailure,
)
from .haarscan import ScanConfig, classify_sample, run_scan
from .marginal import (
    MarginalSpec,
    TransitivityVerdict,
    VerdictConfig,
    compatible_extremal_overlap,
    exists_compatible_ppt_ac,
    extension_threshold,
    find_compatible_state,
    symmetric_extension_feasible,
    transitivity_verdict,
    w_copies_verdict,
)
from .qcore import (
    DensityOp,
    Ket,
    Layout,
    fidelity,
    haar_random_ket,
    is_ppt,
    load_state,
    partial_trace,
    partial_transpose,
    permute_subsystems,
    save_state,
    tensor,
)
from .states import make_state

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Assemblage",
    "BellFunctional",
    "CapacityError",
    "Correlation",
    "DensityOp",
    "DomainError",
    "IncompatibleMarginalsError",
    "Ket",
    "Layout",
    "LvParams",
    "MarginalSpec",
    "QtransitError",
    "ScanConfig",
    "Scenario",
    "SignalingError",
    "SolverFailure",
    "TransitivityVerdict",
    "VerdictConfig",
    "born_correlation",
    "classify_sample",
    "compatible_extremal_overlap",
    "exists_compatible_ppt_ac",
    "extension_threshold",
    "fef",
    "fidelity",
    "find_compatible_state",
    "haar_random_ket",
    "horodecki_chsh",
    "is_ppt",
    "load_state",
    "lv_lower_bound",
    "make_functional",
    "make_state",
    "min_k_for_violation",
    "partial_trace",
    "partial_transpose",
    "permute_subsystems",
    "run_scan",
    "save_state",
    "seesaw_optimize",
    "steering_threshold",
    "symmetric_extension_feasible",
    "tensor",
    "transitivity_verdict",
    "w_copies_verdict",
]
