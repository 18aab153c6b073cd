"""End-to-end case-study reports for the two worked committee sizes.

Reports contain only representative-independent data (counts, size
multisets, verdicts), so they are stable across any re-canonicalization and
suitable as golden files.
"""

from __future__ import annotations

from typing import Callable

from .permgroup import PartitionSpec, WITH_REVERSAL, full_group, restricted_group
from .preferences import DEFAULT_BUDGET, Profile, enumerate_profiles
from .refinement import (
    build_refinement,
    choice_space,
    count_refinements,
    enumerate_refinements,
    space_contained,
)
from .rules import anti_president_refine, classical_rules, president_refine
from .symmetry import is_regular, orbit_table, regular_arith, rules_equal_on_reps

#: The classical three-alternative Condorcet cycle, column i+1 shifted one step.
CONDORCET_3 = Profile.from_rows([[2, 3, 1], [3, 1, 2], [1, 2, 3]])


def _factored(m: int) -> str:
    if m < 1000:
        return str(m)
    parts = []
    d = 2
    while d * d <= m:
        e = 0
        while m % d == 0:
            m //= d
            e += 1
        if e:
            parts.append(f"{d}^{e}" if e > 1 else str(d))
        d += 1
    if m > 1:
        parts.append(str(m))
    return "*".join(parts)


def _multiset_json(counter) -> dict:
    return {str(size): counter[size] for size in sorted(counter)}


def _case_report(
    h: int,
    n: int,
    Y: PartitionSpec,
    Z: PartitionSpec,
    case: str,
    budget: int,
) -> tuple[dict, dict]:
    group = restricted_group(Y, Z, WITH_REVERSAL)
    table = orbit_table(group, budget)
    regular = is_regular(group, table)
    report = {
        "case": case,
        "h": h,
        "n": n,
        "group": {"Y": Y.format(), "Z": Z.format(), "R": "omega", "order": group.order},
        "arith_regular": regular_arith(Y, Z, WITH_REVERSAL),
        "regular": regular.ok,
        "orbits": table.orbit_count,
        "P1": len(table.p1_ids),
        "P2": len(table.p2_ids),
    }
    rules = classical_rules(h, n)
    spaces = {name: choice_space(r, table, budget=budget) for name, r in rules.items()}
    report["pair_set_sizes"] = {
        name: _multiset_json(s.pair_size_multiset()) for name, s in spaces.items()
    }
    report["point_set_sizes"] = {
        name: _multiset_json(s.point_size_multiset()) for name, s in spaces.items()
    }
    counts = {name: count_refinements(s) for name, s in spaces.items()}
    report["counts"] = {name: _factored(c) for name, c in counts.items()}
    report["counts_exact"] = {name: str(c) for name, c in counts.items()}
    report["identities"] = _identities(rules, table)
    report["containments"] = _containments(spaces, counts)
    return report, {"table": table, "rules": rules, "spaces": spaces}


def _identities(rules, table) -> dict:
    pairs = [("kemeny", "minimax"), ("copeland", "kemeny"), ("copeland", "minimax")]
    return {
        f"{a}=={b}": rules_equal_on_reps(rules[a], rules[b], table) for a, b in pairs
    }


def _containments(spaces, counts) -> dict:
    out = {}
    chains = [
        ("kemeny", "borda"),
        ("kemeny", "copeland"),
        ("kemeny", "minimax"),
        ("minimax", "kemeny"),
        ("borda", "pareto"),
        ("copeland", "pareto"),
        ("borda", "copeland"),
        ("copeland", "borda"),
    ]
    for a, b in chains:
        out[f"{a}<={b}"] = space_contained(spaces[a], spaces[b])
    return out


def build_report_5x3(budget: int = DEFAULT_BUDGET) -> dict:
    """Five individuals, three alternatives, the full symmetry group."""
    report, _ctx = _case_report(
        5, 3, PartitionSpec.whole(5), PartitionSpec.whole(3), "5x3", budget
    )
    return report


def build_report_3x3(budget: int = DEFAULT_BUDGET) -> dict:
    """Three individuals, three alternatives, individual 3 distinguished."""
    h, n = 3, 3
    Y = PartitionSpec.of([[1, 2], [3]], h)
    Z = PartitionSpec.whole(n)
    report, ctx = _case_report(h, n, Y, Z, "3x3", budget)
    # The whole undivided group is not regular here; record that contrast.
    full = full_group(h, n)
    report["full_group_regular"] = is_regular(full, orbit_table(full, budget)).ok
    # The two copeland refinements are exactly the tie-breaks by individual 3.
    rules = ctx["rules"]
    table = ctx["table"]
    space = ctx["spaces"]["copeland"]
    encodings = tuple(enumerate_profiles(h, n, budget).iter_encodings())
    family = {
        tuple(build_refinement(space, c).winner_enc(e) for e in encodings)
        for c in enumerate_refinements(space)
    }
    best = president_refine(rules["copeland"], 3)
    worst = anti_president_refine(rules["copeland"], 3)
    president_pair = {
        tuple(r.mask_enc(e).bit_length() for e in encodings) for r in (best, worst)
    }
    report["copeland_family_is_president_pair"] = family == president_pair
    report["condorcet_profile_values"] = {
        "copeland^3": best.winners(CONDORCET_3)[0],
        "copeland_3": worst.winners(CONDORCET_3)[0],
    }
    return report


def build_report(case: str, budget: int = DEFAULT_BUDGET) -> dict:
    builders: dict[str, Callable[[int], dict]] = {
        "5x3": build_report_5x3,
        "3x3": build_report_3x3,
    }
    if case not in builders:
        raise ValueError(f"unknown case {case!r}; expected one of {sorted(builders)}")
    return builders[case](budget)
