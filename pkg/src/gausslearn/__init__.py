"""Exact Bayesian learning of a Gaussian state on a social network.

Agents on a connected graph repeatedly announce posterior means and update
by Bayes' rule; estimators are tracked as coefficient vectors over the
private signals.
"""

from .algebra import (FLOAT, RATIONAL, GammaWeights, SpanBasis, bayes_update, combine, gram,
                      select_basis, solve_gamma)
from .engine import AgentState, SimulationTrace, check_stagnation_lemma, init, run, step
from .errors import (ConvergenceBoundError, DimensionError, GenerationError,
                     GraphValidationError, ParameterError, SingularMatrixError)
from .graphs import Graph, GraphMetrics, make_family, metrics, validate

__version__ = "0.1.0"
