"""Exact symmetry integrals of arithmetic functions in short intervals, and
numerical checks of the majorant principle that bounds them."""

from .arith import (
    FunctionTable,
    SieveBasis,
    delta_basis,
    dirichlet_convolve,
    even_extend,
    indicator_basis,
    mobius_invert,
    mobius_sieve,
    restricted_divisor,
)
from .correlate import (
    correlation,
    correlation_all,
    mixed_symmetry_integral,
    signed_window_sum,
    symmetry_integral,
    weighted_correlation_sum,
)
from .expsum import (
    FareyPoint,
    check_nonneg_farey,
    dist_to_int,
    exp_sum,
    farey_enumerate,
    minimal_mean_value,
    mod_inverse,
    sigma_split,
)
from .window import dft_weight, kernel, sgn, weight, weight_table

__version__ = "0.1.0"
