"""Symmetry groups on preference profiles, classical social choice
correspondences, and exact construction of all symmetric resolute refinements."""

from .errors import (
    BudgetExceededError,
    EmptyChoiceSetError,
    InconsistentRuleError,
    NonRegularGroupError,
    SymrefineError,
)
from .permgroup import (
    NO_REVERSAL,
    RHO_ID,
    RHO_REV,
    WITH_REVERSAL,
    GroupElement,
    PartitionSpec,
    Permutation,
    ReversalFlag,
    SymmetryGroup,
    compose,
    format_cycles,
    full_group,
    generate,
    is_conjugate_to_reversal,
    parse_cycles,
    restricted_group,
    reversal_perm,
    trivial_group,
)
from .preferences import (
    DEFAULT_BUDGET,
    LinearOrder,
    Profile,
    act,
    all_orders,
    enumerate_profiles,
    profile_at,
    profile_index,
    relabel,
    reverse,
)
from .rules import (
    ChoiceSet,
    Rule,
    anti_president_refine,
    borda_rule,
    classical_rules,
    copeland_rule,
    is_efficient,
    is_immune_reversal,
    is_immune_type3,
    is_resolute,
    kemeny_argmax,
    kemeny_rule,
    kemeny_score,
    majority_margin,
    margin_matrix,
    minimax_rule,
    pareto_rule,
    president_refine,
    rule_named,
)
from .symmetry import (
    ImpossibilityWitness,
    OrbitRecord,
    OrbitTable,
    impossibility_witness,
    is_consistent,
    is_regular,
    moulin_arith,
    orbit_table,
    p1_p2_nonempty,
    regular_arith,
    rules_equal_on_reps,
)
from .refinement import (
    ChoiceSpace,
    RefinedRule,
    RefinementChoice,
    build_refinement,
    choice_space,
    count_refinements,
    enumerate_refinements,
    export_refinement,
    import_refinement,
    refinement_at,
    space_contained,
    verify_refinement,
)

__version__ = "0.1.0"
