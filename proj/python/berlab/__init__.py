"""BER bounds and detector simulations for BPSK lattice models."""

from berlab._core import *  # noqa: F401,F403
from berlab._core import __version__  # noqa: F401
