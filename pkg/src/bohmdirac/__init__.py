"""Bohm-Dirac trajectories on time foliations with kinks.

Subpackages: geometry (leaves, foliations, constant-distance construction),
dirac (plane-wave multi-time wave functions and currents), guidance (chart
currents, the current form, kink flux checks), integrate (event-detecting
ensemble transport), equivariance (sampling and distribution tests), slater
(Maxwell photon guidance and its kink failure), cli / scenario / runio
(reproducible scenario runs).
"""

__version__ = "0.1.0"

from . import geometry, dirac, guidance, integrate, equivariance, slater  # noqa: F401
