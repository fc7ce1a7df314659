"""Quantum steering ellipsoids: closed-form geometry, simulated finite-count
tomography, quadric fitting, and volume monogamy tests."""

from . import fitquad, monogamy, qstate, steer, tomosim

__version__ = "0.1.0"

__all__ = ["qstate", "steer", "monogamy", "tomosim", "fitquad", "__version__"]
