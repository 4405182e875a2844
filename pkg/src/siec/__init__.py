"""Scale-induced exceptional criticality toolkit.

Non-Hermitian tight-binding chains coupled to their transpose partner at
infinitesimal strength develop a scale-dependent generalized Brillouin
zone; this package builds those spectra, the biorthogonal entanglement
measures on top of them, and the scans/baselines that locate the
entanglement dip near the critical size.
"""

from __future__ import annotations

from .models import (
    BlochModel,
    MODEL_NAMES,
    chain_obc,
    chain_pbc,
    coupled_ladder,
    hermitian_ssh,
    inversion_operator,
    nh_ssh,
    predefined,
)
from .spectral import (
    EigenSystem,
    RigidityReport,
    eig_biorthogonal,
    phase_rigidity,
    spectral_gap,
)
from .gbz import (
    BoundaryMatchResult,
    GbzResult,
    alpha_constant,
    boundary_match_radius,
    char_poly_roots,
    delta_K,
    gbz_from_spectrum,
    k_grid,
    scale_gbz,
    ssh_params,
    standard_gbz,
)
from .entanglement import (
    CorrelationMatrix,
    EntanglementResult,
    OccupiedProjector,
    ProfileResult,
    SingleCellApprox,
    effective_corr_matrix,
    entanglement,
    entanglement_eigenstate_profile,
    occupied_projector,
    projector_symbol,
    renyi2,
    single_cell_approx,
    truncate,
)
from .harness import (
    DoubledSystem,
    GeneralDipResult,
    ScanRecord,
    SweepCell,
    build_doubled,
    detect_dip,
    dip_scan,
    general_model_dips,
    lambda_expectations,
    log_scaling_fit,
    measurement_identity_check,
    param_sweep,
    ring_entropy,
    thread_budget,
)

__version__ = "0.1.0"

__all__ = [
    "BlochModel", "MODEL_NAMES", "chain_obc", "chain_pbc", "coupled_ladder",
    "hermitian_ssh", "inversion_operator", "nh_ssh", "predefined",
    "EigenSystem", "RigidityReport", "eig_biorthogonal", "phase_rigidity",
    "spectral_gap",
    "BoundaryMatchResult", "GbzResult", "alpha_constant", "boundary_match_radius",
    "char_poly_roots", "delta_K", "gbz_from_spectrum", "k_grid", "scale_gbz",
    "ssh_params", "standard_gbz",
    "CorrelationMatrix", "EntanglementResult", "OccupiedProjector", "ProfileResult",
    "SingleCellApprox", "effective_corr_matrix", "entanglement",
    "entanglement_eigenstate_profile", "occupied_projector", "projector_symbol",
    "renyi2", "single_cell_approx", "truncate",
    "DoubledSystem", "GeneralDipResult", "ScanRecord", "SweepCell", "build_doubled",
    "detect_dip", "dip_scan", "general_model_dips", "lambda_expectations",
    "log_scaling_fit", "measurement_identity_check", "param_sweep", "ring_entropy",
    "thread_budget",
    "__version__",
]
