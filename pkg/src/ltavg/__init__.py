"""Prime-splitting statistics of Galois number fields, Hurwitz class numbers,
traces of Frobenius, and the average trace-multiplicity constant, with
desk-scale experiment runners."""

from .classnumber import (
    L1_formula,
    L1_series,
    class_number_h,
    hurwitz_H,
    is_fundamental,
    is_valid_discriminant,
    kronecker,
    unit_count_w,
)
from .curves import (
    CurveModel,
    ReducedCurve,
    SmallField,
    aut_size,
    field_trace,
    frobenius_trace_power,
    isogeny_mass_oracle,
    isomorphism_orbit,
    models_isomorphic,
    point_count_mod_p,
    point_count_mod_q,
    small_field,
    trace_mod_p,
    trace_mod_q,
)
from .experiments import (
    CurveBox,
    box_average,
    box_variance,
    count_box_reductions,
    count_box_reductions_pair,
    deuring_check,
    hurwitz_prime_sum,
    pi_E_rf,
    theta_K,
    weighted_L_average,
)
from .ltconstant import (
    ConstantEstimate,
    constant_product,
    constant_sum,
    finite_product_factor,
    local_factor_2,
    pi_half,
)
from .numberfield import (
    DegreeFPrime,
    GaloisFieldSpec,
    degree_f_primes,
    empirical_norm_residues,
    parse_field,
    reduce_element,
    split_primes_up_to,
)
from .report import ExperimentReport

__version__ = "0.1.0"

__all__ = [
    "ConstantEstimate",
    "CurveBox",
    "CurveModel",
    "DegreeFPrime",
    "ExperimentReport",
    "GaloisFieldSpec",
    "L1_formula",
    "L1_series",
    "ReducedCurve",
    "SmallField",
    "aut_size",
    "box_average",
    "box_variance",
    "class_number_h",
    "constant_product",
    "constant_sum",
    "count_box_reductions",
    "count_box_reductions_pair",
    "degree_f_primes",
    "deuring_check",
    "empirical_norm_residues",
    "field_trace",
    "finite_product_factor",
    "frobenius_trace_power",
    "hurwitz_H",
    "hurwitz_prime_sum",
    "is_fundamental",
    "is_valid_discriminant",
    "isogeny_mass_oracle",
    "isomorphism_orbit",
    "kronecker",
    "local_factor_2",
    "models_isomorphic",
    "parse_field",
    "pi_E_rf",
    "pi_half",
    "point_count_mod_p",
    "point_count_mod_q",
    "reduce_element",
    "small_field",
    "split_primes_up_to",
    "theta_K",
    "trace_mod_p",
    "trace_mod_q",
    "unit_count_w",
    "weighted_L_average",
]
