"""CRT lattice index codes: construction, side-information gains, uniform designs, AWGN simulation."""

from .codes import Codebook, LinearCode, enumerate_code, min_euclidean_distance
from .designer import (
    DesignError,
    Theorem1Certificate,
    UniformDesign,
    certify_theorem1,
    design_canonical,
    design_sos,
    gaussian_equivalence,
    lift_cartesian,
)
from .errors import InconsistentCodeError, NotApplicableError, ResourceLimitError
from .index_code import CrtIndexCode, GainReport, check_bijectivity, gain_report, verify_prop1
from .lattices import IntegerLattice, construction_a, kissing_number, min_distance, quantize
from .ring_arith import PrimeSet, crt_basis, scalar_collinear, sum_of_squares
from .sim import ChannelConfig, SerCurve, monte_carlo
from .specfile import CodeSpec

__all__ = [
    "ChannelConfig",
    "CodeSpec",
    "Codebook",
    "CrtIndexCode",
    "DesignError",
    "GainReport",
    "InconsistentCodeError",
    "IntegerLattice",
    "LinearCode",
    "NotApplicableError",
    "PrimeSet",
    "ResourceLimitError",
    "SerCurve",
    "Theorem1Certificate",
    "UniformDesign",
    "certify_theorem1",
    "check_bijectivity",
    "construction_a",
    "crt_basis",
    "design_canonical",
    "design_sos",
    "enumerate_code",
    "gain_report",
    "gaussian_equivalence",
    "kissing_number",
    "lift_cartesian",
    "min_distance",
    "min_euclidean_distance",
    "monte_carlo",
    "quantize",
    "scalar_collinear",
    "sum_of_squares",
    "verify_prop1",
]
