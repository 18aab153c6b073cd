"""Constructing, counting, enumerating, and verifying symmetric resolute refinements.

Given a regular group and a consistent base correspondence, every consistent
resolute refinement is determined by one free selection per orbit: the
winner at the representative when no reversal element exists, and otherwise
either a pair (winner at the representative, winner at its designated
reversal image) for P1 orbits or a single non-fixed winner for P2 orbits.
The family of refinements is exactly the product of those per-orbit sets, so
counting is a product of small integers and enumeration is mixed-radix.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from math import prod
from typing import Iterator

from .errors import EmptyChoiceSetError, InconsistentRuleError
from .permgroup import (
    RHO_ID,
    GroupElement,
    Permutation,
    SymmetryGroup,
    small_generating_set,
)
from .preferences import (
    DEFAULT_BUDGET,
    Profile,
    act,
    act_encoding,
    check_budget,
    compile_action,
    enumerate_profiles,
    profile_space_size,
)
from .rules import Rule, mask_members
from .symmetry import OrbitTable, is_consistent


@dataclass(frozen=True, eq=False)
class ChoiceSpace:
    """The per-orbit selection sets parameterizing all consistent resolute refinements.

    mode "plain" (no reversal element in the group): options[j] lists the
    base rule's winners at representative j.  mode "reversal": P1 orbits get
    ordered pairs (y, z) with z a winner at the gstar-image and z != psi*(y);
    P2 orbits get winners not fixed by the orbit's reversal relabeling.
    """

    table: OrbitTable
    rule: Rule
    mode: str
    gstar: GroupElement | None
    options: tuple[tuple, ...]

    @property
    def group(self) -> SymmetryGroup:
        return self.table.group

    @cached_property
    def psi_star_inv(self) -> Permutation | None:
        return self.gstar.psi.inverse() if self.gstar is not None else None

    def pair_size_multiset(self) -> Counter:
        """Sizes of the P1 pair sets (reversal mode only)."""
        return Counter(len(self.options[j]) for j in self.table.p1_ids)

    def point_size_multiset(self) -> Counter:
        """Sizes of the P2 point sets (reversal mode only)."""
        return Counter(len(self.options[j]) for j in self.table.p2_ids)

    def size_multiset(self) -> Counter:
        return Counter(len(opts) for opts in self.options)


def choice_space(
    rule: Rule,
    table: OrbitTable,
    gstar: GroupElement | None = None,
    budget: int = DEFAULT_BUDGET,
    check_consistency: bool = True,
) -> ChoiceSpace:
    """Compute every per-orbit selection set by evaluating the base rule on
    representatives (and their gstar-images).

    Fails fast with the witness when the rule is not group-consistent, and
    refuses non-regular groups: both preconditions are what make every set
    nonempty, and a partial space would silently produce wrong counts.
    """
    group = table.group
    if check_consistency:
        verdict = is_consistent(rule, group, budget)
        if not verdict.ok:
            raise InconsistentRuleError(rule.name, verdict.witness)
    if not group.has_reversal:
        options = []
        for rec in table.records:
            opts = mask_members(rule.mask(rec.rep))
            if not opts:
                raise EmptyChoiceSetError(rec.orbit_id)
            options.append(tuple(opts))
        return ChoiceSpace(table, rule, "plain", None, tuple(options))
    table.require_regular_data()
    if gstar is None:
        gstar = group.default_gstar
    if gstar not in group or not gstar.is_reversal:
        raise ValueError("gstar must be a reversal-flagged member of the group")
    psi_star = gstar.psi
    options = []
    for rec in table.records:
        winners = mask_members(rule.mask(rec.rep))
        if rec.cls == "P1":
            moved_winners = mask_members(rule.mask(act(rec.rep, gstar)))
            opts = tuple(
                (y, z) for y in winners for z in moved_winners if z != psi_star(y)
            )
        else:
            opts = tuple(x for x in winners if rec.rev_psi(x) != x)
        if not opts:
            raise EmptyChoiceSetError(rec.orbit_id)
        options.append(opts)
    return ChoiceSpace(table, rule, "reversal", gstar, tuple(options))


def count_refinements(space: ChoiceSpace) -> int:
    """Exact number of consistent resolute refinements: the product of set sizes."""
    return prod(len(opts) for opts in space.options)


@dataclass(frozen=True)
class RefinementChoice:
    """One selection per orbit, aligned with the orbit ids of a choice space."""

    selections: tuple

    def validate(self, space: ChoiceSpace) -> None:
        if len(self.selections) != len(space.options):
            raise ValueError("selection count does not match the orbit count")
        for j, (sel, opts) in enumerate(zip(self.selections, space.options)):
            if sel not in opts:
                raise ValueError(f"selection {sel!r} not allowed at orbit {j}")


def enumerate_refinements(space: ChoiceSpace) -> Iterator[RefinementChoice]:
    """All choices in mixed-radix lexicographic order (orbit 0 most significant,
    each per-orbit set in its stored ascending order)."""
    for combo in itertools.product(*space.options):
        yield RefinementChoice(combo)


def refinement_at(space: ChoiceSpace, index: int) -> RefinementChoice:
    """Random access into the enumeration order by mixed-radix decomposition."""
    total = count_refinements(space)
    if not 0 <= index < total:
        raise ValueError(f"index {index} out of range 0..{total - 1}")
    digits = []
    for opts in reversed(space.options):
        index, d = divmod(index, len(opts))
        digits.append(opts[d])
    return RefinementChoice(tuple(reversed(digits)))


@dataclass(frozen=True, eq=False)
class RefinedRule:
    """A resolute refinement evaluated through the transporter index.

    Every profile resolves to (orbit j, transporter g); the winner is the
    stored selection pushed through g's alternative relabeling, with the
    reversal bookkeeping dictated by the orbit class.
    """

    space: ChoiceSpace
    choice: RefinementChoice
    name: str

    @property
    def table(self) -> OrbitTable:
        return self.space.table

    @property
    def h(self) -> int:
        return self.space.group.h

    @property
    def n(self) -> int:
        return self.space.group.n

    def winner_enc(self, enc: bytes) -> int:
        j, g = self.table.index[enc]
        sel = self.choice.selections[j]
        psi = g.psi
        if self.space.mode == "plain":
            return psi(sel)
        rec = self.table.records[j]
        if rec.cls == "P1":
            y, z = sel
            if g.rho is RHO_ID:
                return psi(y)
            return psi(self.space.psi_star_inv(z))
        if g.rho is RHO_ID:
            return psi(sel)
        return psi(rec.rev_psi(sel))

    def winner(self, p: Profile) -> int:
        return self.winner_enc(p.encoding)

    def __call__(self, p: Profile) -> int:
        return self.winner(p)

    def value_table(self, budget: int = DEFAULT_BUDGET) -> dict[bytes, int]:
        """The full encoding -> winner map, in enumeration order."""
        h, n = self.h, self.n
        return {
            enc: self.winner_enc(enc)
            for enc in enumerate_profiles(h, n, budget).iter_encodings()
        }

    def as_rule(self) -> Rule:
        """Adapter exposing the refinement as a (singleton-valued) rule."""
        return Rule(
            self.name,
            self.h,
            self.n,
            lambda enc: 1 << (self.winner_enc(enc) - 1),
            anonymous=False,
            neutral=False,
        )

    def signature(self) -> tuple:
        """Values on representatives (and their gstar-images for P1 orbits):
        a complete identifier of the refinement as a function."""
        vals = [self.winner(rec.rep) for rec in self.table.records]
        if self.space.mode == "reversal":
            vals += [
                self.winner(act(self.table.records[j].rep, self.space.gstar))
                for j in self.table.p1_ids
            ]
        return tuple(vals)


def choice_index(space: ChoiceSpace, choice: RefinementChoice) -> int:
    """Position of a choice in the mixed-radix enumeration order."""
    index = 0
    for sel, opts in zip(choice.selections, space.options):
        index = index * len(opts) + opts.index(sel)
    return index


def build_refinement(
    space: ChoiceSpace,
    choice: RefinementChoice,
    name: str | None = None,
    validate: bool = True,
) -> RefinedRule:
    if validate:
        choice.validate(space)
    if name is None:
        name = (
            f"{space.rule.name}#{choice_index(space, choice)}"
            if validate
            else f"{space.rule.name}#unchecked"
        )
    return RefinedRule(space, choice, name)


class RefinementVerdict:
    """Outcome of verify_refinement; witness is (profile, group element) on failure."""

    def __init__(self, ok, witness=None, reason=""):
        self.ok = ok
        self.witness = witness
        self.reason = reason

    def __bool__(self):
        return self.ok


def verify_refinement(
    refined: RefinedRule,
    base: Rule,
    group: SymmetryGroup,
    elements: str = "reduced",
    budget: int = DEFAULT_BUDGET,
) -> RefinementVerdict:
    """Confirm, independently of how the refinement was built, that it is a
    resolute refinement of the base rule satisfying both consistency conditions.

    elements="all" sweeps every (profile, group element) pair literally.
    elements="reduced" checks a generating set of the rank-preserving part
    plus one reversal element, which decides the same conditions exactly:
    equivariance is multiplicative, and under it all reversal conditions are
    mutually equivalent.
    """
    h, n = group.h, group.n
    check_budget(profile_space_size(h, n), budget, "refinement verification")
    values = refined.value_table(budget)
    for enc, w in values.items():
        if not base.mask_enc(enc) >> (w - 1) & 1:
            return RefinementVerdict(
                False, (Profile.from_encoding(enc, h, n), group.identity),
                "winner outside the base rule's choice set",
            )
    if elements == "all":
        probes = list(group.elements)
    elif elements == "reduced":
        id_part = SymmetryGroup(h, n, group.rank_preserving_elements())
        probes = list(small_generating_set(id_part))
        gstar = group.default_gstar
        if gstar is not None:
            probes.append(gstar)
    else:
        raise ValueError("elements must be 'all' or 'reduced'")
    for g in probes:
        comp = compile_action(g, h, n)
        img = g.psi.images
        if g.is_reversal:
            for enc, w in values.items():
                if values[act_encoding(enc, comp)] == img[w - 1]:
                    return RefinementVerdict(
                        False, (Profile.from_encoding(enc, h, n), g),
                        "unique winner survives a reversal element",
                    )
        else:
            for enc, w in values.items():
                if values[act_encoding(enc, comp)] != img[w - 1]:
                    return RefinementVerdict(
                        False, (Profile.from_encoding(enc, h, n), g),
                        "winner is not equivariant",
                    )
    return RefinementVerdict(True)


def space_contained(inner: ChoiceSpace, outer: ChoiceSpace) -> bool:
    """Whole-family containment: every refinement of `inner`'s rule is one of
    `outer`'s.  Because both families are full products over the same orbits
    and the same gstar, this is exactly componentwise set inclusion."""
    if inner.table is not outer.table or inner.gstar != outer.gstar:
        raise ValueError("containment needs spaces over one table and gstar")
    return all(
        set(a) <= set(b) for a, b in zip(inner.options, outer.options)
    )


def export_refinement(refined: RefinedRule) -> dict:
    """JSON document reconstructing the refinement bit-exactly (see import_refinement)."""
    space = refined.space
    group = space.group
    return {
        "rule": space.rule.name,
        "h": group.h,
        "n": group.n,
        "group": {"generators": [str(g) for g in small_generating_set(group)]},
        "gstar": str(space.gstar) if space.gstar is not None else None,
        "mode": space.mode,
        "count": str(count_refinements(space)),
        "name": refined.name,
        "choices": {
            rec.rep.encoding.hex(): list(sel) if isinstance(sel, tuple) else sel
            for rec, sel in zip(space.table.records, refined.choice.selections)
        },
    }


def import_refinement(doc: dict, budget: int = DEFAULT_BUDGET) -> RefinedRule:
    """Rebuild an exported refinement; canonical representatives make the
    orbit keys stable across runs."""
    from .permgroup import generate, GroupElement as GE
    from .rules import rule_named
    from .symmetry import orbit_table

    h, n = doc["h"], doc["n"]
    gens = [GE.parse(s, h, n) for s in doc["group"]["generators"]]
    group = generate(gens, h, n)
    table = orbit_table(group, budget)
    rule = rule_named(doc["rule"], h, n)
    gstar = GE.parse(doc["gstar"], h, n) if doc["gstar"] else None
    space = choice_space(rule, table, gstar=gstar, budget=budget)
    selections = []
    for rec in table.records:
        raw = doc["choices"][rec.rep.encoding.hex()]
        selections.append(tuple(raw) if isinstance(raw, list) else raw)
    choice = RefinementChoice(tuple(selections))
    return build_refinement(space, choice, name=doc.get("name"))
