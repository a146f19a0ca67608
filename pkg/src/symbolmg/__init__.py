"""Multigrid for circulant and Toeplitz systems with symbol-generated transfer operators."""
from .multigrid import (CycleSpec, Hierarchy, HierarchyError, Smoother, SolveReport, TgmBound,
                        build_hierarchy, mgm_cycle, solve, tgm_bound, tgm_step, work_model)
from .structmat import (CirculantOp, CuttingOp, GCirculantOp, ToeplitzOp, circulant_from_symbol,
                        galerkin_coarse, toeplitz_from_symbol)
from .symbol import (FourierSeries, SymbolZero, TrigPoly, check_tgm_conditions, coarse_symbol,
                     projector_symbol, relocate_zeros, x_squared)
from .transform import dft, idft

__version__ = "0.1.0"

__all__ = [
    "CycleSpec", "Hierarchy", "HierarchyError", "Smoother", "SolveReport", "TgmBound",
    "build_hierarchy", "mgm_cycle", "solve", "tgm_bound", "tgm_step", "work_model",
    "CirculantOp", "CuttingOp", "GCirculantOp", "ToeplitzOp", "circulant_from_symbol",
    "galerkin_coarse", "toeplitz_from_symbol", "FourierSeries", "SymbolZero", "TrigPoly",
    "check_tgm_conditions", "coarse_symbol", "projector_symbol", "relocate_zeros", "x_squared",
    "dft", "idft",
]
