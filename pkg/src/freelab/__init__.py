"""Free probability toolkit: exact Weingarten calculus, free moments over
non-crossing partitions, and Monte Carlo checks of asymptotic freeness for
Wishart and Wigner matrices."""

from .freemoments import (
    CumulantSequence,
    MomentSequence,
    NoncommPolynomial,
    cumulants_to_moments,
    free_additive_convolution,
    free_multiplicative_convolution,
    free_poly_moment,
    free_word_moment,
    genus_zero_moment,
    moments_to_cumulants,
    mp_moments,
    semicircle_moments,
)
from .perm import CycleType, Permutation
from .weingarten import WeingartenTable, asymptotic_phi, haar_conjugation_expectation, weingarten_table

__all__ = [
    "CumulantSequence",
    "CycleType",
    "MomentSequence",
    "NoncommPolynomial",
    "Permutation",
    "WeingartenTable",
    "asymptotic_phi",
    "cumulants_to_moments",
    "free_additive_convolution",
    "free_multiplicative_convolution",
    "free_poly_moment",
    "free_word_moment",
    "genus_zero_moment",
    "haar_conjugation_expectation",
    "moments_to_cumulants",
    "mp_moments",
    "semicircle_moments",
    "weingarten_table",
]

__version__ = "0.1.0"
