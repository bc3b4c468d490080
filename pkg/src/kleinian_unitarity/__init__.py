"""Unitarizability of quantizations of type-A Kleinian singularities.

The algebra ``A_P`` has generators ``e, f, h`` with ``[h,e] = 2e``,
``[h,f] = -2f``, ``ef = P(h-1)``, ``fe = P(h+1)``.  The package builds traces
on it, tests positivity of the induced Hermitian forms, classifies
Harish-Chandra modules, and produces certificates of non-unitarizability.
"""

from .algebra import (
    AlgebraContext,
    AlgebraElement,
    E,
    F,
    H,
    antiinvolution_tau,
    format_element,
    involution_r,
    lifting_report,
    multiply,
    parse_element,
)
from .errors import InputError, KleinianError, NumericalFailure
from .index_tools import (
    argument_profile,
    compose_good_approximations,
    good_approximation_quadratic,
    index,
    index_by_winding,
    root_balance_check,
    nonunitarizability_witness,
)
from .modules import (
    ModuleDescriptor,
    classify_sl2_bimodules,
    enumerate_irreducibles,
    is_unitarizable_module,
    one_dim_bimodule_candidates,
    sl2_form_coefficient,
)
from .numbers import GaussRational, make_exact, parse_number
from .poly import ComplexPoly, nonneg_on_line, rho_count, roots
from .positivity import (
    check_nonunitarity_certificate,
    cone_generator,
    decide_regular_unitarizability,
    explicit_trace,
    gram_matrices,
    independent_petrov_traces,
    is_positive_definite_up_to,
    lp_feasibility,
    reduce_norm_element,
)
from .traces import (
    build_basis,
    delta_P,
    petrov_trace,
    pullback_trace,
    solve_difference,
    trace_from_values,
    weight_function_trace,
)

__version__ = "0.1.0"
