"""Integral homology of the Lie ring of strictly upper-triangular matrices."""

__version__ = "0.1.0"
ENGINE_VERSION = "nilhom-engine-1"

from .complex_core import GradedComplex, Monomial, build_summand, cone, summand_size
from .homology import HomologyProfile, homology_profile, smith_normal_form
from .weights import OrbitCertificate, canonicalize, enumerate_weights
from .reduce import ReduceConfig, Reducer, ResourceLimitExceeded, reduce_summand
from .assemble import NilTable, full_table, reference_table, verify_against_paper

__all__ = [
    "GradedComplex", "Monomial", "build_summand", "cone", "summand_size",
    "HomologyProfile", "homology_profile", "smith_normal_form",
    "OrbitCertificate", "canonicalize", "enumerate_weights",
    "ReduceConfig", "Reducer", "ResourceLimitExceeded", "reduce_summand",
    "NilTable", "full_table", "reference_table", "verify_against_paper",
]
