"""flpf: pooling factors and greedy scheduling under channel fading.

Analysis is exact-rational end to end (graphs, fading distributions, LPs);
simulation converts to machine numbers only when sampling.
"""

from .fading import (
    FadingStructure,
    GlobalState,
    from_explicit,
    from_iid_bernoulli,
    marginal,
    sample,
    schedule_matrix_for_state,
)
from .interference import (
    InterferenceGraph,
    LinkId,
    ScheduleMatrix,
    interference_degree_graph,
    interference_degree_link,
    maximal_independent_sets,
    validate_graph,
)
from .lpcore import LPResult, RationalLP, feasible
from .pooling import (
    BoundReport,
    BoundValue,
    RegionVerdict,
    attainable,
    bound_report,
    column_sum_lower_bound,
    graph_pooling_factor,
    inverse_degree_bound,
    min_column_sum_lower_bound,
    region_membership,
    subset_pooling_factor,
    subset_pooling_factor_bisection,
    upper_bound_from_triples,
    upper_bound_from_witness_pair,
)

__version__ = "0.1.0"
