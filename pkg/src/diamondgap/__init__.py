"""diamondgap: capacity-gap certification for the half-duplex two-relay
MIMO Gaussian diamond channel.

Water-filling capacities, multihop-MAC covariance selection, the
three-state scheduling LP with its closed-form solution, cut-set upper
bounds, and Monte-Carlo certification of the constant-gap theorem.
"""

from ._backend import backend_name
from .bounds import (CheckRecord, GapReport, LemmaDiffRecord,
                     check_delta_ratio, check_fiedler, check_lemma2,
                     check_prop1, delta_term, gap_report, kappa_formula,
                     lemma1_bound, lemma2_bound, theorem_bound, upper_bound,
                     verify_lemma_diff)
from .capacity import (MacSumResult, WaterfillResult, mac_sum_capacity,
                       waterfill, waterfill_colored)
from .channel import (DiamondChannel, DiamondParams, derive_params,
                      gaussian_matrix, load_channel, random_diamond,
                      random_psd, save_channel)
from .errors import (DegenerateChannelError, DiamondError, DomainError,
                     NotApplicableError, ParseError, SchemaError,
                     SingularMatrixError)
from .protocol import (AchievabilityReport, Branch, GammaForm, MacPentagon,
                       Method, Schedule, achievable_rate, branch_for,
                       brute_force_rmac, closed_form_schedule, gamma_prime,
                       lp_rmac, resolve_rate, select_pentagon)

__version__ = "0.1.0"
