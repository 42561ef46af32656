"""Finite-scale experiments around sum-product patterns {x + Q(y), xy}.

Logarithmic averages, prime-block inequalities, spectral diagnostics,
structure decompositions, density and pattern tools, and a Ramsey search.
"""

from .avgcore import (HarmonicTable, TruncationLadder, cesaro_average, harmonic, log_average,
                      log_average_ladder)
from .errors import CostGuardError, EmptyBlockError, ParameterError
from .ineq import (InequalityReport, dilation_transfer_gap, multiplicative_vdc, tk_transfer_discrepancy,
                   turan_kubilius_log)
from .kernels import BACKEND
from .patterns import (build_example1, build_example2, density_report, dsharp_estimate, find_patterns,
                       iterated_affine_correlation, valuation_obstruction_check)
from .poly import IntPolynomial
from .primes import PrimeBlock, mertens_log_sum, mertens_reciprocal_sum, sieve_block
from .ramsey import Coloring, Constraints, mr_lower_bound, search_threshold, verify_coloring
from .sequences import SequenceSpec, catalog, parse_sequence
from .sets import SetSpec, parse_set
from .spectral import (correlation_sequence, herglotz_psd_check, isometry_identity_gap, prime_exp_sum,
                       rational_mass)
from .structure import aperiodicity_score, modulus_ladder_decompose, residue_projection

__version__ = "0.1.0"
