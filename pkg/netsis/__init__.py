"""
netsis: discrete-time networked SIS epidemic simulator and stability toolkit.

Simulates x(k+1) = x(k) + h[(I - X(k))B - D]x(k) on a strongly connected
network, classifies the threshold regime, computes the endemic equilibrium,
and checks trajectories against its stability guarantees.
"""

__version__ = "0.1.0"

from netsis.cli import main
from netsis.core.errors import NetsisError
from netsis.core.events import EventBus

__all__ = ["NetsisError", "EventBus", "main", "__version__"]
