"""Symbol error probability of regular-convex-polytope constellations on AWGN."""

from polysep.analytic import (
    NoExactFormula,
    SepValue,
    SnrPoint,
    sep_24cell,
    sep_crosspolytope,
    sep_cube,
    sep_dispatch,
    sep_mpsk,
    sep_simplex,
    union_bound,
)
from polysep.geometry import Constellation, generate, table_params
from polysep.montecarlo import McEstimate, simulate_24cell_region, simulate_sep
from polysep.quadrature import NonConvergence, QuadResult
from polysep.specfun import gauss_pdf, log_q, q

__version__ = "0.1.0"

__all__ = [
    "Constellation",
    "McEstimate",
    "NoExactFormula",
    "NonConvergence",
    "QuadResult",
    "SepValue",
    "SnrPoint",
    "gauss_pdf",
    "generate",
    "log_q",
    "q",
    "sep_24cell",
    "sep_crosspolytope",
    "sep_cube",
    "sep_dispatch",
    "sep_mpsk",
    "sep_simplex",
    "simulate_24cell_region",
    "simulate_sep",
    "table_params",
    "union_bound",
]
