"""Birkhoff constants, finiteness certificates and Lie-symmetry numerics for planar maps."""

from .dynamics import (
    FirstIntegral,
    bochner_residual,
    check_lie_symmetry,
    isochronous_rescale,
    level_curve_sample,
    lie_symmetry_field,
    newton_periodic,
    period,
    verify_first_integral,
)
from .finiteness import (
    Recurrence,
    build_leading_system,
    certify_finiteness,
    cohen_sign_scan,
    cohen_toeplitz_sequences,
    fibonacci_parity,
)
from .jets import Jet2, JetMap2, jet_arith, jet_compose
from .maps import PlanarMapModel, build_map, model_from_spec, read_map_spec
from .normal_form import b1_closed_form, birkhoff_constants, diagonalize, stability_from_bn
from .rational import RationalFunction, parse_rational
from .spectral import classify_elliptic, find_fixed_points

__version__ = "0.1.0"

__all__ = [
    "FirstIntegral",
    "Jet2",
    "JetMap2",
    "PlanarMapModel",
    "RationalFunction",
    "Recurrence",
    "b1_closed_form",
    "birkhoff_constants",
    "bochner_residual",
    "build_leading_system",
    "build_map",
    "certify_finiteness",
    "check_lie_symmetry",
    "classify_elliptic",
    "cohen_sign_scan",
    "cohen_toeplitz_sequences",
    "diagonalize",
    "fibonacci_parity",
    "find_fixed_points",
    "isochronous_rescale",
    "jet_arith",
    "jet_compose",
    "level_curve_sample",
    "lie_symmetry_field",
    "model_from_spec",
    "newton_periodic",
    "parse_rational",
    "period",
    "read_map_spec",
    "stability_from_bn",
    "verify_first_integral",
]
