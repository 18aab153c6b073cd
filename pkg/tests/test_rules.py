import itertools

import pytest

from symrefine import (
    ChoiceSet,
    LinearOrder,
    Permutation,
    Profile,
    RHO_ID,
    act,
    anti_president_refine,
    classical_rules,
    enumerate_profiles,
    is_efficient,
    is_immune_reversal,
    is_immune_type3,
    is_resolute,
    kemeny_argmax,
    kemeny_score,
    majority_margin,
    margin_matrix,
    minimax_rule,
    borda_rule,
    pareto_rule,
    president_refine,
    rule_named,
)
from symrefine.errors import BudgetExceededError
from symrefine.rules import Rule

from conftest import (
    CONDORCET_3,
    MINIMAX_P,
    MINIMAX_PHAT,
    random_profile,
    reversed_profile,
)


def padded(order, n):
    """Extend a short ranking with the remaining alternatives in ascending order."""
    rest = [x for x in range(1, n + 1) if x not in order]
    return list(order) + rest


def even_construction(h, n):
    """h/2 voters on 1>2>rest and h/2 on 2>1>rest."""
    q1, q2 = padded([1, 2], n), padded([2, 1], n)
    return Profile.from_columns([q1] * (h // 2) + [q2] * (h // 2))


def odd_construction(h, n):
    """The three-way tie built from six stacked rankings with tuned multiplicities."""
    r = t = k = None
    for r_ in (0, 1):
        for t_ in (0, 1):
            if t_ > r_:
                continue
            k_, rem = divmod(h - 3 - 2 * r_ - 2 * t_, 6)
            if rem == 0 and k_ >= 0:
                r, t, k = r_, t_, k_
    assert r is not None, f"no decomposition for h={h}"
    qs = [
        padded([1, 2, 3], n),
        padded([1, 3, 2], n),
        padded([2, 1, 3], n),
        padded([2, 3, 1], n),
        padded([3, 1, 2], n),
        padded([3, 2, 1], n),
    ]
    multiplicities = [1 + k + r, k + t, k, 1 + k + t, 1 + k, k + r]
    cols = []
    for q, m in zip(qs, multiplicities):
        cols += [q] * m
    return Profile.from_columns(cols), (r, t, k), qs


class TestMargins:
    def test_unanimous_margin(self):
        p = Profile.from_columns([(1, 2, 3)] * 4)
        assert majority_margin(p, 1, 2) == 4

    def test_margin_errors(self):
        p = Profile.from_columns([(1, 2), (2, 1)])
        with pytest.raises(ValueError):
            majority_margin(p, 1, 1)
        with pytest.raises(ValueError):
            majority_margin(p, 0, 1)

    def test_condorcet_margin(self):
        assert majority_margin(CONDORCET_3, 1, 2) == 2

    def test_antisymmetry_sum(self, rng):
        for _ in range(50):
            p = random_profile(rng, 4, 4)
            for x in range(1, 5):
                for y in range(1, 5):
                    if x != y:
                        assert (
                            majority_margin(p, x, y) + majority_margin(p, y, x) == 4
                        )

    def test_reversal_transposes_margins(self, rng):
        for _ in range(50):
            p = random_profile(rng, 3, 3)
            q = reversed_profile(p)
            for x in range(1, 4):
                for y in range(1, 4):
                    if x != y:
                        assert majority_margin(q, x, y) == majority_margin(p, y, x)

    def test_margin_matrix_layout(self):
        w = margin_matrix(CONDORCET_3)
        assert w[0][1] == 2 and w[1][0] == 1 and w[0][0] == 0


class TestChoiceSet:
    def test_members_ascending(self):
        cs = ChoiceSet.of([3, 1], 3)
        assert cs.members == (1, 3)
        assert 1 in cs and 2 not in cs
        assert len(cs) == 2

    def test_singleton(self):
        cs = ChoiceSet.of([2], 3)
        assert cs.is_singleton and cs.only == 2
        with pytest.raises(ValueError):
            ChoiceSet.of([1, 2], 3).only

    def test_rejects_empty_or_out_of_range(self):
        with pytest.raises(ValueError):
            ChoiceSet(0, 3)
        with pytest.raises(ValueError):
            ChoiceSet.of([4], 3)

    def test_map(self):
        from symrefine import parse_cycles

        cs = ChoiceSet.of([1, 3], 3)
        assert cs.map(parse_cycles("(123)", 3)).members == (1, 2)


class TestClassicalRules:
    @pytest.mark.parametrize("h", [2, 4])
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_even_two_way_tie(self, h, n):
        p = even_construction(h, n)
        rules = classical_rules(h, n)
        for name in ("borda", "copeland", "minimax", "kemeny"):
            assert rules[name].winners(p) == (1, 2), name
        orders, best = kemeny_argmax(p)
        assert best == (n * n - n - 1) * h // 2
        assert LinearOrder.of(padded([1, 2], n)) in orders
        assert LinearOrder.of(padded([2, 1], n)) in orders

    @pytest.mark.parametrize("h", [3, 5, 7, 9])
    @pytest.mark.parametrize("n", [3, 4])
    def test_odd_three_way_tie(self, h, n):
        p, (r, t, k), qs = odd_construction(h, n)
        rules = classical_rules(h, n)
        for name in ("borda", "copeland", "minimax", "kemeny"):
            assert rules[name].winners(p) == (1, 2, 3), name
        orders, best = kemeny_argmax(p)
        assert best == 5 + 3 * r + 3 * t + 9 * k + (n * n - n - 6) * h // 2
        for q in (qs[0], qs[3], qs[4]):
            assert LinearOrder.of(q) in orders
            assert kemeny_score(p, LinearOrder.of(q)) == best

    def test_condorcet_cycle_full_tie(self):
        rules = classical_rules(3, 3)
        for name, rule in rules.items():
            assert rule.winners(CONDORCET_3) == (1, 2, 3), name

    def test_unanimous_kemeny(self):
        q = LinearOrder.of([2, 3, 1, 4])
        p = Profile(tuple([q] * 5))
        orders, best = kemeny_argmax(p)
        assert orders == (q,)
        assert best == 5 * 6  # every pair supported by everyone

    def test_kemeny_reversal_equivariance(self, rng):
        rev = Permutation((3, 2, 1))
        for _ in range(50):
            p = random_profile(rng, 3, 3)
            flipped, _ = kemeny_argmax(reversed_profile(p))
            original, _ = kemeny_argmax(p)
            expected = {
                LinearOrder.of(tuple(reversed(q.by_rank))) for q in original
            }
            assert set(flipped) == expected

    def test_pareto_contains_first_ranked(self, rng):
        par = pareto_rule(4, 4)
        for _ in range(200):
            p = random_profile(rng, 4, 4)
            winners = set(par.winners(p))
            assert {c.top for c in p.columns} <= winners

    def test_minimax_reference_profiles(self):
        mm = minimax_rule(5, 4)
        assert mm.winners(MINIMAX_P) == (4,)
        assert mm.winners(reversed_profile(MINIMAX_P)) == (1, 3, 4)
        assert mm.winners(MINIMAX_PHAT) == (4,)
        assert mm.winners(reversed_profile(MINIMAX_PHAT)) == (1, 3, 4)

    def test_memoization(self):
        rule = borda_rule(2, 2)
        p = Profile.from_columns([(1, 2), (2, 1)])
        assert rule.mask(p) == rule.mask(p)
        assert p.encoding in rule._memo


class TestPresidentRefinements:
    def test_condorcet_tie_break(self):
        cop = classical_rules(3, 3)["copeland"]
        assert president_refine(cop, 3).winners(CONDORCET_3) == (1,)
        assert anti_president_refine(cop, 3).winners(CONDORCET_3) == (3,)

    def test_already_resolute_base(self):
        # majority with three voters and two alternatives picks a single winner
        bor = borda_rule(3, 2)
        best = president_refine(bor, 2)
        worst = anti_president_refine(bor, 2)
        for p in enumerate_profiles(3, 2):
            assert best.winners(p) == bor.winners(p) == worst.winners(p)

    def test_minimax_president_reversal_failure(self):
        mm = minimax_rule(5, 4)
        best5 = president_refine(mm, 5)
        worst5 = anti_president_refine(mm, 5)
        assert best5.winners(MINIMAX_P) == (4,)
        assert best5.winners(reversed_profile(MINIMAX_P)) == (4,)
        assert worst5.winners(MINIMAX_PHAT) == (4,)
        assert worst5.winners(reversed_profile(MINIMAX_PHAT)) == (4,)

    def test_out_of_range_individual(self):
        with pytest.raises(ValueError):
            president_refine(borda_rule(3, 2), 4)

    def test_rule_named(self):
        assert rule_named("copeland^3", 3, 3).name == "copeland^3"
        assert rule_named("minimax_5", 5, 4).name == "minimax_5"
        assert rule_named("kemeny", 3, 3).name == "kemeny"
        with pytest.raises(ValueError):
            rule_named("plurality", 3, 3)
        with pytest.raises(ValueError):
            rule_named("borda^9", 3, 3)


class TestAxiomPredicates:
    def test_borda_not_resolute_with_witness(self):
        verdict = is_resolute(classical_rules(3, 3)["borda"])
        assert not verdict.ok
        masked = classical_rules(3, 3)["borda"].winners(verdict.witness)
        assert len(masked) > 1

    def test_majority_resolute_small(self):
        # two alternatives, odd electorate: all four rules pick one winner
        for name in ("borda", "copeland", "minimax", "kemeny"):
            assert is_resolute(classical_rules(3, 2)[name]).ok

    def test_pareto_never_resolute_here(self):
        assert not is_resolute(pareto_rule(2, 2)).ok

    @pytest.mark.parametrize("name", ["pareto", "borda", "copeland", "kemeny"])
    def test_immune_at_three_alternatives(self, name):
        assert is_immune_reversal(classical_rules(3, 3)[name]).ok

    def test_minimax_immune_small(self):
        assert is_immune_reversal(minimax_rule(3, 3)).ok
        assert is_immune_reversal(minimax_rule(2, 4)).ok

    def test_anonymous_scan_matches_full_scan(self):
        # the multiset reduction must agree with the literal profile sweep
        for h, n in [(2, 3), (3, 3), (4, 2)]:
            fast = minimax_rule(h, n)
            slow = Rule(fast.name, h, n, fast.mask_fn, anonymous=False, neutral=True)
            assert is_immune_reversal(fast).ok == is_immune_reversal(slow).ok
            assert is_resolute(fast).ok == is_resolute(slow).ok
            assert is_immune_type3(fast).ok == is_immune_type3(slow).ok

    def test_budget_refusal(self):
        with pytest.raises(BudgetExceededError):
            is_immune_reversal(minimax_rule(6, 4), budget=1000)

    @pytest.mark.parametrize("h,n", [(2, 2), (3, 2), (2, 3), (3, 3)])
    def test_efficiency_exhaustive_small(self, h, n):
        for name, rule in classical_rules(h, n).items():
            assert is_efficient(rule).ok, name

    @pytest.mark.parametrize("h,n", [(5, 3), (5, 4)])
    def test_efficiency_random_larger(self, rng, h, n):
        rules = classical_rules(h, n)
        par = rules["pareto"]
        for _ in range(10_000):
            p = random_profile(rng, h, n)
            allowed = par.mask(p)
            for name, rule in rules.items():
                assert rule.mask(p) & ~allowed == 0, name

    def test_full_symmetry_exhaustive(self):
        # evaluating on a renamed profile = renaming the winners, all of (3,3)
        rules = classical_rules(3, 3)
        from symrefine import GroupElement

        elements = [
            GroupElement(Permutation(phi), Permutation(psi), RHO_ID)
            for phi in itertools.permutations((1, 2, 3))
            for psi in itertools.permutations((1, 2, 3))
        ]
        profiles = list(enumerate_profiles(3, 3))
        for name, rule in rules.items():
            for g in elements:
                table = {}
                for p in profiles:
                    moved = set(rule.winners(act(p, g)))
                    expected = {g.psi(x) for x in rule.winners(p)}
                    assert moved == expected, (name, str(g))

    def test_type3_and_president_immunity(self):
        rules = classical_rules(3, 3)
        for name in ("borda", "copeland"):
            assert is_immune_type3(rules[name]).ok
            for i in (1, 2, 3):
                assert is_immune_reversal(president_refine(rules[name], i)).ok
                assert is_immune_reversal(anti_president_refine(rules[name], i)).ok

    def test_type3_witness_shape(self):
        # a rule that shares winners with its reversal without full ties
        const = Rule("const1", 2, 3, lambda enc: 1, anonymous=True, neutral=False)
        verdict = is_immune_type3(const)
        assert not verdict.ok and verdict.witness is not None
