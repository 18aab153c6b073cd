"""Shared test fixtures: reference profiles, group catalogs, and independent oracles.

The oracles here deliberately avoid the library's orbit/choice-space
machinery: refinement counts are recomputed from the defining conditions
alone, so the two routes stay independent.
"""

from __future__ import annotations

import itertools
import random

import pytest

from symrefine import (
    GroupElement,
    PartitionSpec,
    Permutation,
    Profile,
    RHO_REV,
    WITH_REVERSAL,
    NO_REVERSAL,
    act,
    all_orders,
    enumerate_profiles,
    restricted_group,
)
from symrefine.preferences import act_encoding, compile_action


# The classical three-alternative cyclic-majority profile.
CONDORCET_3 = Profile.from_rows([[2, 3, 1], [3, 1, 2], [1, 2, 3]])

# Five-individual, four-alternative profiles exhibiting the minimax tie-break
# pathology (matrix layout as printed: row r = everyone's rank-r alternative).
MINIMAX_P = Profile.from_rows(
    [[4, 4, 4, 2, 1], [2, 3, 1, 3, 2], [3, 1, 2, 1, 3], [1, 2, 3, 4, 4]]
)
MINIMAX_PHAT = Profile.from_rows(
    [[1, 4, 4, 2, 4], [2, 3, 1, 3, 2], [3, 1, 2, 1, 3], [4, 2, 3, 4, 1]]
)


def reversal_element(h: int, n: int) -> GroupElement:
    return GroupElement(Permutation.identity(h), Permutation.identity(n), RHO_REV)


def reversed_profile(p: Profile) -> Profile:
    return act(p, reversal_element(p.h, p.n))


def set_partitions(k: int):
    """All partitions of {1..k} as lists of blocks."""
    if k == 0:
        yield []
        return
    for rest in set_partitions(k - 1):
        for i in range(len(rest)):
            yield rest[:i] + [rest[i] + [k]] + rest[i + 1 :]
        yield rest + [[k]]


def all_product_groups(h: int, n: int):
    """Every block-partition product group at (h, n), both with and without reversal."""
    for yb in set_partitions(h):
        Y = PartitionSpec.of(yb, h)
        for zb in set_partitions(n):
            Z = PartitionSpec.of(zb, n)
            for flags in (NO_REVERSAL, WITH_REVERSAL):
                yield Y, Z, flags, restricted_group(Y, Z, flags)


def random_profile(rng: random.Random, h: int, n: int) -> Profile:
    orders = all_orders(n)
    return Profile(tuple(rng.choice(orders) for _ in range(h)))


def rule_function_table(rule, h, n, budget=10**8):
    """All values of a rule, keyed by encoding."""
    return {
        enc: rule.mask_enc(enc)
        for enc in enumerate_profiles(h, n, budget).iter_encodings()
    }


def brute_consistent_function(values: dict, group, psi_tables=None) -> bool:
    """Literal check of the two defining conditions for a resolute map
    (values: encoding -> winner in 1..n)."""
    h, n = group.h, group.n
    for g in group.elements:
        comp = compile_action(g, h, n)
        img = g.psi.images
        for enc, w in values.items():
            moved = values[act_encoding(enc, comp)]
            if g.is_reversal:
                if moved == img[w - 1]:
                    return False
            else:
                if moved != img[w - 1]:
                    return False
    return True


def brute_count_by_product(rule, group, cap=5000):
    """Count consistent resolute refinements by enumerating every choice
    function and filtering; None when the product of choice-set sizes
    exceeds the cap."""
    h, n = group.h, group.n
    encs = list(enumerate_profiles(h, n).iter_encodings())
    per_profile = []
    total = 1
    for enc in encs:
        members = [x for x in range(1, n + 1) if rule.mask_enc(enc) >> (x - 1) & 1]
        per_profile.append(members)
        total *= len(members)
        if total > cap:
            return None
    count = 0
    for combo in itertools.product(*per_profile):
        values = dict(zip(encs, combo))
        if brute_consistent_function(values, group):
            count += 1
    return count


def propagation_orbit_sizes(rule, group, table, orbit_ids=None) -> list:
    """Per-orbit counts of valid refinement seed values, recomputed by
    propagating the defining conditions; independent of the per-orbit
    selection-set machinery.

    Equality conditions are propagated along a generating set of the
    rank-preserving subgroup (their compositions imply every other equality
    condition); the anti-coincidence conditions are then checked literally
    for every reversal-flagged element.
    """
    from symrefine import SymmetryGroup
    from symrefine.permgroup import small_generating_set

    h, n = group.h, group.n
    id_part = SymmetryGroup(h, n, group.rank_preserving_elements())
    pushers = [
        (g, compile_action(g, h, n))
        for gen in small_generating_set(id_part)
        for g in (gen, gen.inverse())
    ]
    rev_comps = [
        (g, compile_action(g, h, n)) for g in group.reversal_elements()
    ]
    gstar = group.default_gstar
    gstar_comp = compile_action(gstar, h, n) if gstar else None

    def try_assign(seeds):
        values = {}
        stack = list(seeds)
        while stack:
            enc, val = stack.pop()
            known = values.get(enc)
            if known is not None:
                if known != val:
                    return None
                continue
            if not rule.mask_enc(enc) >> (val - 1) & 1:
                return None
            values[enc] = val
            for g, comp in pushers:
                stack.append((act_encoding(enc, comp), g.psi(val)))
        for g, comp in rev_comps:
            img = g.psi.images
            for enc, val in values.items():
                if values.get(act_encoding(enc, comp)) == img[val - 1]:
                    return None
        return values

    def orbit_size(rec):
        enc0 = rec.rep.encoding
        local = 0
        for x in range(1, n + 1):
            if not rule.mask_enc(enc0) >> (x - 1) & 1:
                continue
            base = try_assign([(enc0, x)])
            if base is None:
                continue
            if gstar_comp is not None:
                enc1 = act_encoding(enc0, gstar_comp)
                if enc1 not in base:
                    for z in range(1, n + 1):
                        if not rule.mask_enc(enc1) >> (z - 1) & 1:
                            continue
                        if try_assign([(enc0, x), (enc1, z)]) is not None:
                            local += 1
                    continue
            local += 1
        return local

    records = (
        table.records
        if orbit_ids is None
        else [table.records[j] for j in orbit_ids]
    )
    return [orbit_size(rec) for rec in records]


def propagation_count(rule, group, table) -> int:
    """Product of the per-orbit recounts: the independent refinement count."""
    total = 1
    for size in propagation_orbit_sizes(rule, group, table):
        total *= size
    return total


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
