"""Brass-Stancu-Kantorovich operators on the unit hypercube.

Submodules: :mod:`bskop.basis` (Bernstein/Stancu bases, BSB operator),
:mod:`bskop.bsk_operator` (BSK operators, moments, norms),
:mod:`bskop.moduli` (smoothness measures), :mod:`bskop.bounds`
(bound constants and ratio reports), :mod:`bskop.convergence`,
:mod:`bskop.expr` and :mod:`bskop.cli` (experiments and command line).
"""

from bskop.basis import (
    OperatorParams,
    bernstein_basis,
    bsb_apply,
    stancu_basis,
    stancu_basis_integral,
)
from bskop.bounds import compute_a_nr, compute_b_r, compute_m_r, verify_theorem
from bskop.bsk_operator import (
    BSKOperator,
    Cell,
    bsk_apply,
    cell_mean,
    central_second_moment,
    moment_first,
    moment_second,
    tensor_weight,
    weight_hypercube_integral,
)
from bskop.convergence import FunctionSpec, emit_report, run_convergence
from bskop.expr import parse_function
from bskop.fields import ScalarField, Singularity, catalog
from bskop.moduli import (
    kfunctional_upper,
    local_modulus,
    lp_modulus,
    mixed_partial,
    sobolev_seminorm,
    tau_modulus,
    tau_property_check,
)
from bskop.quadrature import QuadratureRule

__version__ = "0.1.0"
