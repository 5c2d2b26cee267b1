"""Quantum-dot spin / microcavity Bell-state analyzer simulator."""
from . import cavity, gates, protocols, qstate

__version__ = "0.1.0"

__all__ = ["cavity", "gates", "protocols", "qstate", "__version__"]
