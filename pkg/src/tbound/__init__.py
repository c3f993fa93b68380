"""Combinatorial bounds for T-singularities on surfaces with ample canonical class."""

from .bounds import BoundReport, Check, global_report
from .cfrac import TParams, hj_evaluate, hj_expand, t_params_from_fraction
from .classify import ClassificationError, EiType, classify_contraction
from .configfile import config_from_dict, load_config
from .dualgraph import Configuration, EngineDefect, InputError, build_configuration, contract
from .tchain import TChainData, enumerate_t_chains, is_t_chain

__all__ = [
    "BoundReport", "Check", "ClassificationError", "Configuration", "EiType", "EngineDefect", "InputError",
    "TChainData", "TParams", "build_configuration", "classify_contraction", "config_from_dict", "contract",
    "enumerate_t_chains", "global_report", "hj_evaluate", "hj_expand", "is_t_chain", "load_config",
    "t_params_from_fraction",
]
