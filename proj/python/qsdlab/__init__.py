"""Python access to the qsdlab state-difference simulator."""

from ._core import (
    ConfigError,
    bch_group_commutator,
    experiment_names,
    expm,
    gaussian_overlap,
    logical_index,
    oracle_equivalence,
    random_hermitian,
    reference_overlaps,
    run_experiment,
    selective_phase,
    trotter_repeat,
)

__all__ = [
    "ConfigError",
    "bch_group_commutator",
    "experiment_names",
    "expm",
    "gaussian_overlap",
    "logical_index",
    "oracle_equivalence",
    "random_hermitian",
    "reference_overlaps",
    "run_experiment",
    "selective_phase",
    "trotter_repeat",
]
