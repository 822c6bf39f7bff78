"""Deterministic foraging-swarm simulator with goal-based communication."""

from .agent import Controller, FsmState, Robot
from .belief import BeliefMap, CellState, select_cell_random, select_cell_utility
from .comm import (CommConfig, DecodeError, EncodeError, Packet, decode,
                   dequantize_pheromone, encode, quantize_pheromone, recipients)
from .engine import RunMetrics, SimConfig, performance, run_simulation
from .world import Arena, ArenaConfig, ConfigError, Rect, build_arena

__all__ = [
    "Arena", "ArenaConfig", "BeliefMap", "CellState", "CommConfig",
    "ConfigError", "Controller", "DecodeError", "EncodeError", "FsmState",
    "Packet", "Rect", "Robot", "RunMetrics", "SimConfig", "build_arena",
    "decode", "dequantize_pheromone", "encode", "performance",
    "quantize_pheromone", "recipients", "run_simulation",
    "select_cell_random", "select_cell_utility",
]

__version__ = "0.1.0"
