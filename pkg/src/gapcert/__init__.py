"""Certified spectral-gap lower bounds for divergence-form elliptic operators."""

from .certificate import (
    CertificateInputs,
    ConstantChain,
    Section5Constants,
    constant_chain,
    cross_check_full,
    gap_bound,
    potential_strength,
    section5_chain,
    semibound_constant,
    sobolev_pair,
    unit_ball_volume,
    unit_sphere_area,
)
from .logdomain import LogValue

__version__ = "0.1.0"
