"""Dilation constants of unitary tuples: rotation algebras, free and commuting Haar unitaries."""
from .certificate import BoundKind, CertifiedValue
from .dilation import (
    build_commuting_dilation,
    c_theta_constant,
    c_theta_general,
    c_theta_irrational,
    closed_form_constants,
    h_norm_certified,
    tensor_upper_bound,
)
from .matcore import UnitaryTuple
from .rotreps import RationalAngle, ThetaMatrix

__all__ = [
    "BoundKind",
    "CertifiedValue",
    "RationalAngle",
    "ThetaMatrix",
    "UnitaryTuple",
    "build_commuting_dilation",
    "c_theta_constant",
    "c_theta_general",
    "c_theta_irrational",
    "closed_form_constants",
    "h_norm_certified",
    "tensor_upper_bound",
]
