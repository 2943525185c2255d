"""CSS codes from non-binary protograph LDPC pairs.

Construction of orthogonal parity-check pairs from commuting permutation
arrays, field extension to GF(2^e) labels, companion-matrix expansion to
binary CSS codes, joint X/Z sum-product decoding over the depolarizing
channel, and Monte Carlo frame-error-rate simulation against the hashing
bound.
"""

from .channel import (ChannelParams, build_prior, hashing_rate,
                      hashing_threshold, sample_error)
from .csscode import CssCode, expand, to_alist, to_coords, verify_orthogonal
from .decoder import (DecodeResult, DecoderGraph, JointDecoder, build_graphs,
                      check_update, compute_syndromes)
from .extend import (CongruenceSystem, ExtendedPair, NoNonzeroSolutionError,
                     build_system, derive_system, extend_pair, howell_form,
                     lift_gamma, solve_delta, solve_system)
from .field import GF2e, poly_from_string, poly_to_string
from .perms import Perm
from .protograph import (GirthBudgetExceeded, PermArrays, ProtoPair,
                         SearchExhausted, assemble, check_condition_a,
                         check_condition_b, check_condition_c, girth,
                         search_arrays)
from .sim import (FerCurve, FerRecord, NoCrossingError, ThresholdEstimate,
                  estimate_threshold, read_csv, run_trials, sweep,
                  wilson_interval, write_csv)

__version__ = "0.1.0"

__all__ = [
    "ChannelParams", "CongruenceSystem", "CssCode", "DecodeResult",
    "DecoderGraph", "ExtendedPair", "FerCurve", "FerRecord", "GF2e",
    "GirthBudgetExceeded", "JointDecoder", "NoCrossingError",
    "NoNonzeroSolutionError", "Perm", "PermArrays", "ProtoPair",
    "SearchExhausted", "ThresholdEstimate", "assemble", "build_graphs",
    "build_prior", "build_system", "check_condition_a", "check_condition_b",
    "check_condition_c", "check_update", "compute_syndromes", "derive_system",
    "estimate_threshold", "expand", "extend_pair", "girth", "hashing_rate",
    "hashing_threshold", "howell_form", "lift_gamma", "poly_from_string",
    "poly_to_string", "read_csv", "run_trials", "sample_error", "search_arrays",
    "solve_delta", "solve_system", "sweep", "to_alist", "to_coords",
    "verify_orthogonal", "wilson_interval", "write_csv",
]
