"""Josephy-Newton method for generalized equations with majorant certificates."""

from .avi import AVI, lcp_enumerate, lemke, linearize, solve_avi, strong_regularity_modulus
from .checks import (
    check_majorant_inequality,
    check_second_derivative_bounds,
    check_taylor_bound,
    extremal_problem,
    fit_lipschitz,
    smale_gamma,
)
from .kernels import BACKEND
from .majorant import MajorantSpec, eval_psi, majorant_sequence, newton_map, radii
from .polynomial import Polynomial
from .problem import ProblemInstance, linearization_error, natural_residual
from .sets import SetDescriptor, project

__version__ = "0.1.0"
