"""Boosting with secant-based weights."""

from ._core import (
    ConstantLossError,
    DataError,
    Dataset,
    Loss,
    Model,
    bregman_secant,
    builtin_losses,
    find_offset,
    load_csv,
    loss_table,
    obi,
    q_star,
    train,
    v_derivative,
)

__all__ = [
    "ConstantLossError",
    "DataError",
    "Dataset",
    "Loss",
    "Model",
    "bregman_secant",
    "builtin_losses",
    "find_offset",
    "load_csv",
    "loss_table",
    "obi",
    "q_star",
    "train",
    "v_derivative",
]
