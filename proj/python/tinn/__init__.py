from ._tinn import (
    TinnError,
    acc_imp,
    burgers_reference,
    eval_jet,
    evaluate_checkpoint,
    fd_validate_pde,
    forward,
    init_params,
    param_count,
    problem_names,
    relative_l2,
    spectral_reference,
    train,
)

__all__ = [
    "TinnError",
    "acc_imp",
    "burgers_reference",
    "eval_jet",
    "evaluate_checkpoint",
    "fd_validate_pde",
    "forward",
    "init_params",
    "param_count",
    "problem_names",
    "relative_l2",
    "spectral_reference",
    "train",
]
