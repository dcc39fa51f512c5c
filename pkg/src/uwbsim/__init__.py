"""Discrete-event simulator for IR-UWB wireless sensor networks:
ALOHA-family MAC protocols with ARQ over a BER-based capture PHY, AODV-lite
relaying, and an experiment sweep harness.
"""

from .kernels import BACKEND
from .simulation import RunConfig, Simulation, run_single

__all__ = ["BACKEND", "RunConfig", "Simulation", "run_single"]
__version__ = "0.1.0"
