"""Semantic-aware cross-check consistency hallucination detection.

The heavy lifting lives in the C++ extension `_sac3`; this package re-exports
its operations.
"""

from ._sac3 import (  # noqa: F401
    Sac3Error,
    accuracy_at_threshold,
    auroc,
    confidence_weighted_score,
    default_config,
    detect,
    histogram,
    is_prime,
    lambda_sweep,
    load_dataset,
    parse_enumerated_list,
    parse_guess_probability,
    parse_yes_no,
    prompt_templates,
    render_perturb_prompt,
    save_dataset,
    score_all,
    score_m,
    score_q,
    score_qm,
    score_sc2,
    synth_prime,
    synth_senator,
    threshold_sweep,
    validate_config,
)

__all__ = [
    "Sac3Error",
    "accuracy_at_threshold",
    "auroc",
    "confidence_weighted_score",
    "default_config",
    "detect",
    "histogram",
    "is_prime",
    "lambda_sweep",
    "load_dataset",
    "parse_enumerated_list",
    "parse_guess_probability",
    "parse_yes_no",
    "prompt_templates",
    "render_perturb_prompt",
    "save_dataset",
    "score_all",
    "score_m",
    "score_q",
    "score_qm",
    "score_sc2",
    "synth_prime",
    "synth_senator",
    "threshold_sweep",
    "validate_config",
]

__version__ = "0.1.0"
