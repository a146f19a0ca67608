"""Experiment registry, runner, output and command line."""
from .emit import HEADER, emit, format_history, format_table
from .experiments import (ExperimentSpec, ResultRow, build_symbol, build_zeros, builtin_registry,
                          figure_experiment, get_experiment, run_experiment, run_one)

__all__ = ["HEADER", "emit", "format_history", "format_table", "ExperimentSpec", "ResultRow",
           "build_symbol", "build_zeros", "builtin_registry", "figure_experiment", "get_experiment",
           "run_experiment", "run_one"]
