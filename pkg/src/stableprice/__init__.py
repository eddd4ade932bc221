"""Exact computation of stable (Walrasian-style) outcomes in combinatorial markets.

Every number is a :class:`fractions.Fraction` and every item set an integer
bit mask. The main entry points are re-exported here.
"""
from .algorithms import (
    budget_additive_approx,
    bucket_certificate,
    single_minded_greedy_stable,
    xos_fractional_certificate,
    zero_utility_prices,
)
from .configlp import (
    Allocation,
    LPSolution,
    build_config_lp,
    fractional_opt,
    integral_opt,
    integrality_gap,
    solve_column_generation,
    solve_exact,
    welfare,
)
from .instances import (
    gen_random_market,
    gen_single_minded_lower,
    gen_submodular_lower,
    gen_xos_lower,
)
from .itemset import CapExceeded, PreconditionError, items_of, mask_of
from .rational import parse_rational, render_rational
from .stability import (
    Outcome,
    best_stable_outcome,
    cross_validate,
    extract_stable_outcome,
    prices_for_allocation,
    stability_ratio,
    stable_exists_on,
    verify_stable,
)
from .valuations import (
    Additive,
    BucketUnit,
    BucketXOS,
    BudgetAdditive,
    ExplicitTable,
    HPlusEpsilonF,
    Market,
    MarketError,
    SingleMinded,
    SymmetricTable,
    UnitDemand,
    XOSExplicit,
    demand,
    is_monotone,
    is_submodular,
    max_utility,
    utility,
)

__version__ = "0.1.0"
