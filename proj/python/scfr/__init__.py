"""Spline continued fraction regression."""

from ._core import (
    Error,
    FitConfig,
    InputError,
    Model,
    cohen_kappa,
    compute_offset,
    eval_basis,
    fit,
    fit_traced,
    gen_gamma,
    gen_sinc,
    kappa_label,
    mean_relative_error,
    penalty_block,
    rmse,
    rmse_by_depth,
    select_knots,
    select_truncation_depth,
    split_out_of_domain,
    split_out_of_sample,
    threshold_counts,
)


def make_config(**fields):
    """FitConfig with the given fields set; ``lambda`` may be spelled ``lam``."""
    cfg = FitConfig()
    for key, value in fields.items():
        key = {"lam": "lambda_", "lambda": "lambda_"}.get(key, key)
        if not hasattr(cfg, key):
            raise TypeError(f"unknown FitConfig field {key!r}")
        setattr(cfg, key, value)
    return cfg


__all__ = [name for name in dir() if not name.startswith("_")]
