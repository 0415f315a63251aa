"""Optimal covariant two-qubit channels from block-reduced semidefinite programs.

The library turns a covariance requirement [R, V2 o V1*] = 0 on a two-qubit
channel's Choi operator into a small parameterized cone program, solves it
with a built-in interior-point method, and checks the result against closed
fidelity formulas and published Kraus decompositions.
"""

from .channel import (
    DIM,
    NotCompletelyPositiveError,
    SchmidtState,
    apply_channel,
    channel_fidelity,
    check_ppt,
    check_tp,
    choi_from_kraus,
    kraus_from_choi,
    plus_operator,
)
from .irreps import (
    CovariantAnsatz,
    IrrepBasis,
    IrrepBlock,
    Scenario,
    commutant_dimension,
    covariant_ansatz,
    group_element,
    rotation_pair,
    table1_basis,
)
from .scenarios import (
    APPENDIX_LABELS,
    CovarianceReport,
    FidelitySurface,
    IdentityRegion,
    SurfacePoint,
    analytic_fidelity,
    appendix_kraus,
    build_problem,
    depolarizing_coordinates,
    grid_sweep,
    harvest_appendix_params,
    identity_region,
    objective_vector,
    published_kraus,
    published_ppt_interval,
    solve_point,
    verify_covariance,
)
from .sdp import Pencil, SdpProblem, SdpSolution, export_json, residuals

__version__ = "0.1.0"

__all__ = [
    "DIM",
    "NotCompletelyPositiveError",
    "SchmidtState",
    "apply_channel",
    "channel_fidelity",
    "check_ppt",
    "check_tp",
    "choi_from_kraus",
    "kraus_from_choi",
    "plus_operator",
    "CovariantAnsatz",
    "IrrepBasis",
    "IrrepBlock",
    "Scenario",
    "commutant_dimension",
    "covariant_ansatz",
    "group_element",
    "rotation_pair",
    "table1_basis",
    "APPENDIX_LABELS",
    "CovarianceReport",
    "FidelitySurface",
    "IdentityRegion",
    "SurfacePoint",
    "analytic_fidelity",
    "appendix_kraus",
    "build_problem",
    "depolarizing_coordinates",
    "grid_sweep",
    "harvest_appendix_params",
    "identity_region",
    "objective_vector",
    "published_kraus",
    "published_ppt_interval",
    "solve_point",
    "verify_covariance",
    "Pencil",
    "SdpProblem",
    "SdpSolution",
    "export_json",
    "residuals",
    "__version__",
]
