from ._core import (
    ConfigError,
    DataError,
    DegenerateError,
    Error,
    analyze,
    anova_f,
    cohen_kappa,
    compare,
    default_config,
    evaluate,
    generate_synthetic,
    macro_f1,
    mann_whitney,
    run_scores,
    smote,
    stratified_folds,
    tokenize,
    welch_t,
)

__all__ = [
    "ConfigError",
    "DataError",
    "DegenerateError",
    "Error",
    "analyze",
    "anova_f",
    "cohen_kappa",
    "compare",
    "default_config",
    "evaluate",
    "generate_synthetic",
    "macro_f1",
    "mann_whitney",
    "run_scores",
    "smote",
    "stratified_folds",
    "tokenize",
    "welch_t",
]
