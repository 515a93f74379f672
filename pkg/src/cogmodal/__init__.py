"""Model checking for a dynamic logic of beliefs, desires and preferences.

Formulas are parsed by :mod:`cogmodal.syntax`, evaluated on finite
multi-agent models (:mod:`cogmodal.model`, :mod:`cogmodal.checker`), revised
and rewritten by :mod:`cogmodal.dynamics`, analysed as games by
:mod:`cogmodal.games` and fuzz-tested by :mod:`cogmodal.genfuzz`.
"""

from .checker import (
    Checker, VocabularyError, best_d, best_p, believes, check_wt, cond_believes, cond_desires,
    desires, evaluate, pref, rel, rpref, strong_believes, strong_desires, truth_set,
    truth_set_agent, valid_on, worst_d,
)
from .dynamics import (
    RewriteBudgetError, TransformResult, apply_op, conservative_revise, f_transform,
    radical_revise, reduce,
)
from .games import (
    BudgetExceeded, GameError, GameReport, best_response, enumerate_equilibria, game_report,
    nash, rational,
)
from .model import (
    AgentState, Model, ModelError, UnknownAgentError, ValidationReport, WorldRecord,
    dumps_model, load_model, loads_model, save_model, validate_model,
)
from .syntax import (
    DynamicOperatorError, ParseError, expand_attitudes, parse_formula, parse_program, render,
)

__version__ = "0.1.0"
