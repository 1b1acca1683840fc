"""Schur-Weyl tomography: sampling, exact densities, bounds and their numerical checks."""

__version__ = "0.1.0"

from .schur import LogScalar, schur_eval  # noqa: E402,F401
from .states import fidelity, haar_unitary, random_state, trace_distance  # noqa: E402,F401
