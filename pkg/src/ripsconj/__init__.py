"""Small-cancellation groups, the Rips construction and conjugacy/membership
decision procedures with finite-quotient witnesses."""

from .context import Budget, Conjugate, GroupContext, NonConjugate, SubgroupContext, Undecided
from .presentation import GroupHom, Presentation, parse_presentation
from .rips import RipsParams, rips_build, verify_rips
from .smallcanc import verify_metric, word_problem
from .words import Word

__all__ = [
    "Budget",
    "Conjugate",
    "GroupContext",
    "GroupHom",
    "NonConjugate",
    "Presentation",
    "RipsParams",
    "SubgroupContext",
    "Undecided",
    "Word",
    "parse_presentation",
    "rips_build",
    "verify_metric",
    "verify_rips",
    "word_problem",
]
