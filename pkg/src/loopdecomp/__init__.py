"""Loop space decompositions of highly connected Poincaré duality complexes.

Symbolic engine with exact mod-p Poincaré series certificates.  The main
entry points are :func:`decompose` (torsion data in, product decomposition of
``ΩM`` out) and the ``loopdecomp`` command line tool.
"""

__version__ = "0.1.0"

from .decomp import (
    DecompositionResult,
    TorsionInput,
    decompose,
    loop_M_decomposition,
    loop_skeleton_wedge_decomposition,
    loop_V_decomposition,
    skeleton_decomposition,
    sphere_bundle_decomposition,
    two_torsion_decomposition,
)
from .dga import FreeDGA, ah_model_V, dga_homology_dims, poly_dims
from .hilton_milnor import hm_expansion, hm_series_check, lyndon_words
from .series import PoincareSeries
from .spaces import mod_p_series, normalize, parse_expr, render, suspend_normalize

__all__ = [
    "DecompositionResult",
    "FreeDGA",
    "PoincareSeries",
    "TorsionInput",
    "ah_model_V",
    "decompose",
    "dga_homology_dims",
    "hm_expansion",
    "hm_series_check",
    "loop_M_decomposition",
    "loop_V_decomposition",
    "loop_skeleton_wedge_decomposition",
    "lyndon_words",
    "mod_p_series",
    "normalize",
    "parse_expr",
    "poly_dims",
    "render",
    "skeleton_decomposition",
    "sphere_bundle_decomposition",
    "suspend_normalize",
    "two_torsion_decomposition",
]
