"""Whitney extension of jets on finite sets, with seminorm and path checks."""

from ._whitney import (
    Decomposition,
    Extension,
    WhitneyError,
    bound,
    build_scenario,
    decompose,
    load_decomposition,
    seminorm,
    split,
    verify,
)

__all__ = [
    "Decomposition",
    "Extension",
    "WhitneyError",
    "bound",
    "build_scenario",
    "decompose",
    "load_decomposition",
    "seminorm",
    "split",
    "verify",
]
