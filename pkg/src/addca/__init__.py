"""Exact measure-theoretic dynamics of additive cellular automata over Z_m."""

from .ca_core import (AdditiveRule, GeneralRule, Word, apply_window, compose_shift,
                      identity_rule, is_surjective, make_rule, parse_rule, power_rule)
from .errors import (AddcaError, BudgetExceeded, ContractViolation, EnumerationRefused,
                     ParseError)
from .events import (AffineEvent, ExactMeasure, blocks, full_space, intersect,
                     iterated_preimage, make_cylinder, measure, parse_event, preimage,
                     shift_event)
from .mixing import (ActionIndex, LatticeRect, MixingReport, action_preimage, cesaro_report,
                     correlation, disjoint_threshold, search_nonfactorizing,
                     strong_mixing_probe, weak_mixing_sum)
from .modlinalg import (IntMatrix, SNFResult, SolutionSet, count_solutions,
                        enumerate_solutions, smith_normal_form, solve_mod)

__version__ = "0.1.0"
