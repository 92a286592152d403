"""Python bindings for the exo groupoid C*-algebra toolkit.

Reports come back as plain dicts with the same layout as the CLI's
``results`` section.
"""

from ._core import (
    Function,
    Model,
    __version__,
    certificate,
    cyclic_group,
    extension_criteria,
    free_action,
    free_group,
    growth_stats,
    haagerup_witness_check,
    hyperbolicity_delta,
    load_model,
    lp_norm,
    matrix_coeff_recovery,
    overlap_constant,
    phi_chi_norm,
    power_sequence_norm,
    psd_check,
    reduced_norm,
    threshold_band,
    verify_norm_bound,
    witness_ratio,
)

__all__ = [
    "Function",
    "Model",
    "__version__",
    "certificate",
    "cyclic_group",
    "extension_criteria",
    "free_action",
    "free_group",
    "growth_stats",
    "haagerup_witness_check",
    "hyperbolicity_delta",
    "load_model",
    "lp_norm",
    "matrix_coeff_recovery",
    "overlap_constant",
    "phi_chi_norm",
    "power_sequence_norm",
    "psd_check",
    "reduced_norm",
    "threshold_band",
    "verify_norm_bound",
    "witness_ratio",
]
