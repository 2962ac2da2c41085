"""Discrete log-gas Toeplitz determinants with Fisher-Hartwig symbols."""

from ._loggas import *  # noqa: F401,F403
