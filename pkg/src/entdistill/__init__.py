"""Exact simulation and optimization of two-pair entanglement distillation
(DEJMPS, LOCCNet, NA-LOCCNet) when measurement results reach the referee over
noisy binary symmetric channels."""

from ._backend import name as backend_name
from .objective import ChannelModel, DegenerateProtocolError, EvaluationResult, evaluate
from .optimize import SearchConfig, maximize_theta, optimize_protocol
from .protocol import Protocol, ProtocolParams, dejmps, get_protocol, loccnet, na_loccnet

__version__ = "0.1.0"

__all__ = [
    "ChannelModel",
    "DegenerateProtocolError",
    "EvaluationResult",
    "Protocol",
    "ProtocolParams",
    "SearchConfig",
    "backend_name",
    "dejmps",
    "evaluate",
    "get_protocol",
    "loccnet",
    "maximize_theta",
    "na_loccnet",
    "optimize_protocol",
]
