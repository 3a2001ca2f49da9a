"""Strongly diagonal realizations of Hermitian symmetric spaces, with numerical certificates."""

__version__ = "0.1.0"

from .algebra import AlgVec, SpaceSpec, build_model
from .dual import build_dual, dual_of, omega_eta_star
from .errors import HssntError
from .realize import (BUILTIN_NAMES, GeneralHMap, OddMap, builtin_odd, dsl_roos_map,
                      gudermann_composite, harish_chandra, odd_calculus, spectral_decompose,
                      symplecto)
from .space import Space, build_space

__all__ = [
    "AlgVec", "SpaceSpec", "build_model", "build_dual", "dual_of", "omega_eta_star",
    "HssntError", "BUILTIN_NAMES", "GeneralHMap", "OddMap", "builtin_odd", "dsl_roos_map",
    "gudermann_composite", "harish_chandra", "odd_calculus", "spectral_decompose", "symplecto",
    "Space", "build_space",
]
