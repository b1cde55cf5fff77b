from ._core import (
    BasisSet,
    Field,
    Mesh,
    PLaplacianForm,
    SourceSpec,
    TruncationSpec,
    classify_regime,
    cutoff_eta,
    cutoff_eta_prime,
    eval_field,
    gronwall_envelope,
    horizon_radius,
    integrate_json,
    interpolate,
    local_horizon_estimate,
    make_field,
    norm_l2,
    norm_w1p,
    project_l2,
    run_experiment_json,
    w1p_distance,
)

__all__ = [
    "BasisSet",
    "Field",
    "Mesh",
    "PLaplacianForm",
    "SourceSpec",
    "TruncationSpec",
    "classify_regime",
    "cutoff_eta",
    "cutoff_eta_prime",
    "eval_field",
    "gronwall_envelope",
    "horizon_radius",
    "integrate_json",
    "interpolate",
    "local_horizon_estimate",
    "make_field",
    "norm_l2",
    "norm_w1p",
    "project_l2",
    "run_experiment_json",
    "w1p_distance",
]
