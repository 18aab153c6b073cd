"""Orbits, stabilizers, regularity, group-consistency, and impossibility certificates.

The orbit sweep walks profiles in canonical lexicographic order, so every
orbit representative is automatically the lex-min member of its orbit and
all outputs are deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from math import factorial, gcd, lcm
from typing import Iterable, NamedTuple

from .errors import BudgetExceededError, NonRegularGroupError
from .permgroup import (
    RHO_ID,
    RHO_REV,
    GroupElement,
    PartitionSpec,
    Permutation,
    ReversalFlag,
    SymmetryGroup,
    conjugators_to_reversal,
    format_cycles,
    is_conjugate_to_reversal,
    small_generating_set,
)
from .preferences import (
    DEFAULT_BUDGET,
    LinearOrder,
    Profile,
    act,
    act_encoding,
    anonymity_class_count,
    check_budget,
    compile_action,
    enumerate_profiles,
    iter_anonymity_class_encodings,
    profile_space_size,
    relabel,
    reverse,
)
from .rules import Rule, mask_members, pareto_rule, psi_mask_table


@dataclass(frozen=True)
class OrbitRecord:
    """One orbit: its lex-min representative, size, stabilizer, and classification.

    cls is "P1" when the stabilizer contains no reversal-flagged element and
    "P2" otherwise.  For P2 orbits of a regular group, `rev_psi` is the unique
    alternative-relabeling carried by reversal-flagged stabilizer elements and
    `conjugator` is the lex-min permutation conjugating the rank reversal to it.
    """

    orbit_id: int
    rep: Profile
    size: int
    stabilizer: tuple[GroupElement, ...]
    cls: str
    rev_psi: Permutation | None = None
    conjugator: Permutation | None = None


@dataclass(frozen=True, eq=False)
class OrbitTable:
    """All orbits of a group acting on the profile space, plus a transporter index.

    `index` maps every profile encoding to (orbit id, g) with
    profile = act(representative, g); lookups during refinement evaluation
    are O(1).  `defects` lists orbits whose P2 data could not be extracted
    (the mark of a non-regular group).
    """

    group: SymmetryGroup
    records: tuple[OrbitRecord, ...]
    index: dict[bytes, tuple[int, GroupElement]]
    defects: tuple[tuple[int, str], ...] = ()

    @property
    def orbit_count(self) -> int:
        return len(self.records)

    @cached_property
    def p1_ids(self) -> tuple[int, ...]:
        return tuple(r.orbit_id for r in self.records if r.cls == "P1")

    @cached_property
    def p2_ids(self) -> tuple[int, ...]:
        return tuple(r.orbit_id for r in self.records if r.cls == "P2")

    def transporter(self, p: Profile) -> tuple[int, GroupElement]:
        return self.index[p.encoding]

    def require_regular_data(self) -> None:
        if self.defects:
            orbit_id, reason = self.defects[0]
            raise NonRegularGroupError(orbit_id, reason)

    def summary(self) -> str:
        return f"orbits={self.orbit_count} P1={len(self.p1_ids)} P2={len(self.p2_ids)}"

    def to_json(self) -> dict:
        records = []
        for r in self.records:
            records.append(
                {
                    "id": r.orbit_id,
                    "representative": [list(row) for row in r.rep.rows()],
                    "size": r.size,
                    "class": r.cls,
                    "stabilizer": [str(g) for g in r.stabilizer],
                    "psi_j": format_cycles(r.rev_psi) if r.rev_psi else None,
                    "sigma_j": format_cycles(r.conjugator) if r.conjugator else None,
                }
            )
        return {
            "h": self.group.h,
            "n": self.group.n,
            "group_order": self.group.order,
            "orbits": self.orbit_count,
            "P1": len(self.p1_ids),
            "P2": len(self.p2_ids),
            "records": records,
        }


def orbit_table(group: SymmetryGroup, budget: int = DEFAULT_BUDGET) -> OrbitTable:
    """Partition the profile space into orbits by direct expansion.

    Profiles are swept in lexicographic order; an unvisited profile opens a
    new orbit which is expanded by applying every group element, recording
    one transporter per member and the stabilizer of the representative.
    """
    h, n = group.h, group.n
    space = profile_space_size(h, n)
    check_budget(space, budget, f"orbit table at ({h},{n})")
    elements = group.elements
    compiled = [compile_action(g, h, n) for g in elements]
    index: dict[bytes, tuple[int, GroupElement]] = {}
    records: list[OrbitRecord] = []
    defects: list[tuple[int, str]] = []
    for enc in enumerate_profiles(h, n, budget).iter_encodings():
        if enc in index:
            continue
        orbit_id = len(records)
        stab = []
        size = 0
        for g, comp in zip(elements, compiled):
            q = act_encoding(enc, comp)
            if q == enc:
                stab.append(g)
            if q not in index:
                index[q] = (orbit_id, g)
                size += 1
        if size * len(stab) != len(elements):
            raise AssertionError("orbit-stabilizer identity violated")
        rev_psis = {g.psi for g in stab if g.is_reversal}
        cls = "P2" if rev_psis else "P1"
        rev_psi = conjugator = None
        if len(rev_psis) == 1:
            candidate = next(iter(rev_psis))
            if is_conjugate_to_reversal(candidate):
                rev_psi = candidate
                conjugator = conjugators_to_reversal(candidate)[0]
            else:
                defects.append(
                    (orbit_id, f"stabilizer reversal relabel {format_cycles(candidate)} "
                               f"is not conjugate to the rank reversal")
                )
        elif len(rev_psis) > 1:
            defects.append((orbit_id, "stabilizer carries several distinct reversal relabels"))
        records.append(
            OrbitRecord(orbit_id, Profile.from_encoding(enc, h, n), size, tuple(stab),
                        cls, rev_psi, conjugator)
        )
    if sum(r.size for r in records) != space:
        raise AssertionError("orbit sizes do not cover the profile space")
    return OrbitTable(group, tuple(records), index, tuple(defects))


class RegularityVerdict(NamedTuple):
    ok: bool
    offender: OrbitRecord | None


def is_regular(
    group: SymmetryGroup,
    table: OrbitTable | None = None,
    budget: int = DEFAULT_BUDGET,
) -> RegularityVerdict:
    """Stabilizer-shape test: every rank-preserving stabilizer element must leave the
    alternatives alone, and all reversal-flagged ones must share a single relabeling
    conjugate to the rank reversal.  Checking representatives suffices because
    stabilizers along an orbit are conjugate and conjugation preserves the shape."""
    if table is None:
        table = orbit_table(group, budget)
    for rec in table.records:
        if _regular_offence(rec) is not None:
            return RegularityVerdict(False, rec)
    return RegularityVerdict(True, None)


def _regular_offence(rec: OrbitRecord) -> str | None:
    rev_psis = set()
    for g in rec.stabilizer:
        if g.is_reversal:
            rev_psis.add(g.psi)
        elif not g.psi.is_identity():
            return "rank-preserving stabilizer element relabels alternatives"
    if len(rev_psis) > 1:
        return "several distinct reversal relabels"
    if rev_psis and not is_conjugate_to_reversal(next(iter(rev_psis))):
        return "reversal relabel not conjugate to the rank reversal"
    return None


def regular_arith(
    Y: PartitionSpec, Z: PartitionSpec, flags: Iterable[ReversalFlag]
) -> bool:
    """Arithmetic regularity test for the product group of two partitions and a flag set:
    gcd of the individual block sizes must be coprime to lcm((max alternative block)!, |flags|)."""
    flag_count = len(set(flags))
    if flag_count not in (1, 2):
        raise ValueError("flag set must be {id} or {id, rev}")
    g = gcd(*Y.block_sizes) if len(Y.block_sizes) > 1 else Y.block_sizes[0]
    biggest = max(Z.block_sizes)
    return gcd(g, lcm(factorial(biggest), flag_count)) == 1


def moulin_arith(h: int, n: int) -> bool:
    """The classical existence condition for the undivided committee: gcd(h, n!) = 1."""
    return gcd(h, factorial(n)) == 1


class ConsistencyVerdict(NamedTuple):
    ok: bool
    witness: tuple[Profile, GroupElement] | None

    def __bool__(self) -> bool:
        return self.ok


def is_consistent(
    rule: Rule,
    group: SymmetryGroup,
    budget: int = DEFAULT_BUDGET,
    exhaustive: bool = False,
) -> ConsistencyVerdict:
    """Decide group-consistency: equivariance under rank-preserving elements and
    anti-coincidence of unique winners under reversal-flagged ones.

    The default path is exact but avoids the full |group| x |profiles| sweep:
    equivariance is multiplicative in the group element, so checking a small
    generating set of the rank-preserving subgroup decides it everywhere; and
    once equivariance holds, the anti-coincidence conditions of all
    reversal-flagged elements are mutually equivalent, so one such element is
    checked.  `exhaustive=True` forces the literal sweep instead.

    When the profile space exceeds the budget, the declared anonymity and
    neutrality of the rule (validated separately by the test suite) stand in
    for the equivariance check and the reversal condition is scanned over one
    profile per column multiset.
    """
    h, n = group.h, group.n
    if rule.h != h or rule.n != n:
        raise ValueError("rule and group sizes disagree")
    space = profile_space_size(h, n)
    if exhaustive:
        check_budget(space, budget, "exhaustive consistency sweep")
        return _consistency_sweep(rule, group.elements, h, n, budget)
    if space <= budget:
        id_part = SymmetryGroup(h, n, group.rank_preserving_elements())
        gens = small_generating_set(id_part)
        probes = list(gens)
        gstar = group.default_gstar
        if gstar is not None:
            probes.append(gstar)
        return _consistency_sweep(rule, probes, h, n, budget)
    # Over budget: lean on declared symmetry plus the anonymity-class reduction.
    if not (rule.anonymous and rule.neutral):
        raise BudgetExceededError(space, budget, f"consistency of {rule.name}")
    gstar = group.default_gstar
    if gstar is None:
        return ConsistencyVerdict(True, None)
    check_budget(anonymity_class_count(h, n), budget, f"consistency of {rule.name}")
    comp = compile_action(gstar, h, n)
    table = psi_mask_table(gstar.psi.images)
    for enc in iter_anonymity_class_encodings(h, n):
        mask = rule.mask_fn(enc)
        if mask.bit_count() == 1 and rule.mask_fn(act_encoding(enc, comp)) == table[mask]:
            return ConsistencyVerdict(
                False, (Profile.from_encoding(enc, h, n), gstar)
            )
    return ConsistencyVerdict(True, None)


def _consistency_sweep(rule, elements, h, n, budget) -> ConsistencyVerdict:
    for g in elements:
        comp = compile_action(g, h, n)
        table = psi_mask_table(g.psi.images)
        if g.is_reversal:
            for enc in enumerate_profiles(h, n, budget).iter_encodings():
                mask = rule.mask_enc(enc)
                if mask.bit_count() == 1 and rule.mask_enc(act_encoding(enc, comp)) == table[mask]:
                    return ConsistencyVerdict(False, (Profile.from_encoding(enc, h, n), g))
        else:
            for enc in enumerate_profiles(h, n, budget).iter_encodings():
                if rule.mask_enc(act_encoding(enc, comp)) != table[rule.mask_enc(enc)]:
                    return ConsistencyVerdict(False, (Profile.from_encoding(enc, h, n), g))
    return ConsistencyVerdict(True, None)


def rules_equal_on_reps(
    rule_a: Rule,
    rule_b: Rule,
    table: OrbitTable,
    gstar: GroupElement | None = None,
) -> bool:
    """Certify equality of two group-consistent rules from representative data alone.

    Without reversal elements in the group, agreement on every representative
    forces agreement everywhere.  With them, agreement is additionally needed
    on the gstar-image of every P1 representative.  Consistency of both rules
    is the caller's obligation.
    """
    group = table.group
    for rec in table.records:
        if rule_a.mask(rec.rep) != rule_b.mask(rec.rep):
            return False
    if not group.has_reversal:
        return True
    if gstar is None:
        gstar = group.default_gstar
    if gstar is None or not gstar.is_reversal:
        raise ValueError("a reversal-flagged gstar is required for this group")
    for rec in table.records:
        if rec.cls == "P1":
            moved = act(rec.rep, gstar)
            if rule_a.mask(moved) != rule_b.mask(moved):
                return False
    return True


@dataclass(frozen=True)
class ImpossibilityWitness:
    """A machine-checked certificate that no resolute rule can respect the given symmetry.

    kind "relabel": the profile is invariant under renaming individuals by phi
    followed by renaming alternatives by the cycle psi, yet psi fixes no
    undominated alternative — so an equivariant single winner cannot exist.
    kind "reversal": the profile equals its own reversal after renaming
    individuals by phi — so a reversal-avoiding single winner cannot exist.
    """

    kind: str
    profile: Profile
    phi: Permutation
    psi: Permutation | None
    prime: int
    Y: PartitionSpec
    Z: PartitionSpec

    def check(self) -> list[str]:
        """Re-verify the certificate; returns the list of verified facts."""
        p = self.profile
        h, n = p.h, p.n
        facts = []
        if self.phi not in set(_block_perms_cached(self.Y)):
            raise AssertionError("phi does not preserve the individual partition")
        facts.append(f"phi={format_cycles(self.phi)} preserves the individual partition")
        if self.kind == "relabel":
            assert self.psi is not None
            if self.psi not in set(_block_perms_cached(self.Z)):
                raise AssertionError("psi does not preserve the alternative partition")
            facts.append(f"psi={format_cycles(self.psi)} preserves the alternative partition")
            moved = act(
                act(p, GroupElement(self.phi, Permutation.identity(n), RHO_ID)),
                GroupElement(Permutation.identity(h), self.psi, RHO_ID),
            )
            if moved != p:
                raise AssertionError("profile is not invariant under the certificate element")
            facts.append("profile is invariant under (phi, psi, id)")
            undominated = mask_members(pareto_rule(h, n).mask(p))
            if any(self.psi(x) == x for x in undominated):
                raise AssertionError("psi fixes an undominated alternative")
            facts.append(
                f"psi fixes none of the undominated alternatives {list(undominated)}"
            )
        elif self.kind == "reversal":
            moved = act(
                act(p, GroupElement(Permutation.identity(h), Permutation.identity(n), RHO_REV)),
                GroupElement(self.phi, Permutation.identity(n), RHO_ID),
            )
            if moved != p:
                raise AssertionError("profile is not phi-equivalent to its reversal")
            facts.append("profile equals its own reversal after renaming individuals by phi")
        else:
            raise AssertionError(f"unknown certificate kind {self.kind!r}")
        return facts


def _block_perms_cached(partition: PartitionSpec):
    from .permgroup import block_preserving_perms

    return block_preserving_perms(partition)


def _smallest_prime_factor(m: int) -> int:
    d = 2
    while d * d <= m:
        if m % d == 0:
            return d
        d += 1
    return m


def impossibility_witness(
    Y: PartitionSpec, Z: PartitionSpec, flags: Iterable[ReversalFlag]
) -> ImpossibilityWitness:
    """Construct the profile certifying non-existence when the arithmetic test fails.

    A prime dividing both every individual block size and the alternative-side
    lcm either fits inside the largest alternative block (relabel kind: the
    blocks cycle through rotations of a stacked ranking) or forces the
    reversal kind (alternating a ranking with its reversal along each block).
    The certificate is machine-checked before being returned.
    """
    flags = tuple(dict.fromkeys(flags))
    if regular_arith(Y, Z, flags):
        raise ValueError("the arithmetic condition holds; there is nothing to witness")
    h, n = Y.k, Z.k
    blocks_gcd = gcd(*Y.block_sizes) if len(Y.block_sizes) > 1 else Y.block_sizes[0]
    biggest = max(Z.block_sizes)
    pi = _smallest_prime_factor(gcd(blocks_gcd, lcm(factorial(biggest), len(flags))))
    phi = _block_cycles(Y)
    if pi <= biggest:
        big_block = max(Z.blocks, key=len)
        cycle_alts = sorted(big_block)[:pi]
        rest = [x for x in range(1, n + 1) if x not in cycle_alts]
        psi = Permutation.identity(n)
        images = list(psi.images)
        for a, b in zip(cycle_alts, cycle_alts[1:] + cycle_alts[:1]):
            images[a - 1] = b
        psi = Permutation(tuple(images))
        base = LinearOrder.of(cycle_alts + rest)
        columns: dict[int, LinearOrder] = {}
        for block in Y.blocks:
            q = base
            for member in sorted(block):
                columns[member] = q
                q = relabel(psi, q)
        profile = Profile(tuple(columns[i] for i in range(1, h + 1)))
        witness = ImpossibilityWitness("relabel", profile, phi, psi, pi, Y, Z)
    else:
        # pi = 2 with all alternative blocks singletons: only the reversal escape is left.
        idorder = LinearOrder.of(range(1, n + 1))
        flipped = reverse(idorder, RHO_REV)
        columns = {}
        for block in Y.blocks:
            for pos, member in enumerate(sorted(block)):
                columns[member] = idorder if pos % 2 == 0 else flipped
        profile = Profile(tuple(columns[i] for i in range(1, h + 1)))
        witness = ImpossibilityWitness("reversal", profile, phi, None, pi, Y, Z)
    witness.check()
    return witness


def _block_cycles(Y: PartitionSpec) -> Permutation:
    """One full cycle per block, each walking its sorted members."""
    images = list(range(1, Y.k + 1))
    for block in Y.blocks:
        members = sorted(block)
        for a, b in zip(members, members[1:] + members[:1]):
            images[a - 1] = b
    return Permutation(tuple(images))


def p1_p2_nonempty(group: SymmetryGroup) -> tuple[bool, bool]:
    """Predict, without touching the profile space, whether P1 / P2 orbits exist.

    Assumes the group is regular.  P2 orbits exist iff some reversal-flagged
    element relabels alternatives by a conjugate of the rank reversal.  P1
    orbits always exist for three or more alternatives; for exactly two, they
    exist iff some two-block split of the individuals is preserved by no
    reversal-flagged element.
    """
    if not group.has_reversal:
        return (True, False)
    n = group.n
    p2 = any(
        e.is_reversal and is_conjugate_to_reversal(e.psi) for e in group.elements
    )
    if n >= 3:
        return (True, p2)
    swap = Permutation((2, 1))
    gamma = [e.phi for e in group.elements if e.is_reversal and e.psi == swap]
    if not gamma:
        return (True, p2)
    h = group.h
    members = range(2, h + 1)
    for r in range(h):
        for extra in itertools.combinations(members, r):
            side = frozenset((1,) + extra)
            if len(side) == h:
                continue
            if all(frozenset(phi(x) for x in side) != side for phi in gamma):
                return (True, p2)
    return (False, p2)
