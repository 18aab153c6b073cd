"""Classical social choice correspondences and their axiomatic predicates.

Choice sets are bitmasks over alternatives (bit x-1 set means alternative x
is chosen); members are always reported in ascending order.  Evaluators work
on canonical profile encodings so orbit machinery can share memo tables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple

from .permgroup import GroupElement, Permutation, RHO_REV
from .preferences import (
    DEFAULT_BUDGET,
    LinearOrder,
    Profile,
    all_orders,
    anonymity_class_count,
    check_budget,
    compile_action,
    act_encoding,
    enumerate_profiles,
    iter_anonymity_class_encodings,
    profile_space_size,
)


@dataclass(frozen=True)
class ChoiceSet:
    """A nonempty subset of the alternatives {1..n}, stored as a bitmask."""

    mask: int
    n: int

    def __post_init__(self):
        if self.mask <= 0 or self.mask >= 1 << self.n:
            raise ValueError(f"mask {self.mask:#x} not a nonempty subset of 1..{self.n}")

    @staticmethod
    def of(members, n: int) -> "ChoiceSet":
        mask = 0
        for x in members:
            if not 1 <= x <= n:
                raise ValueError(f"alternative {x} out of range 1..{n}")
            mask |= 1 << (x - 1)
        return ChoiceSet(mask, n)

    @property
    def members(self) -> tuple[int, ...]:
        return mask_members(self.mask)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, x: int) -> bool:
        return bool(self.mask >> (x - 1) & 1)

    @property
    def is_singleton(self) -> bool:
        return self.mask.bit_count() == 1

    @property
    def only(self) -> int:
        if not self.is_singleton:
            raise ValueError(f"choice set {self.members} is not a singleton")
        return self.mask.bit_length()

    def map(self, psi: Permutation) -> "ChoiceSet":
        return ChoiceSet(map_mask(self.mask, psi), self.n)


def mask_members(mask: int) -> tuple[int, ...]:
    out = []
    x = 1
    while mask:
        if mask & 1:
            out.append(x)
        mask >>= 1
        x += 1
    return tuple(out)


def map_mask(mask: int, psi: Permutation) -> int:
    """The image bitmask {psi(x) : x in mask}."""
    out = 0
    images = psi.images
    x = 1
    while mask:
        if mask & 1:
            out |= 1 << (images[x - 1] - 1)
        mask >>= 1
        x += 1
    return out


@lru_cache(maxsize=None)
def psi_mask_table(images: tuple[int, ...]) -> tuple[int, ...]:
    """Image of every bitmask under the permutation with the given image tuple."""
    psi = Permutation(images)
    n = psi.degree
    return tuple(map_mask(m, psi) for m in range(1 << n))


class _Tables(NamedTuple):
    orders: tuple[LinearOrder, ...]
    pair_flat: dict[bytes, tuple[int, ...]]  # column -> n*n flat 0/1, entry x,y: x above y
    borda_add: dict[bytes, tuple[int, ...]]  # column -> per-alternative points n - rank
    order_pairs: tuple[tuple[int, ...], ...]  # per order: flat indices of its above-pairs
    tops: tuple[int, ...]


@lru_cache(maxsize=None)
def _tables(n: int) -> _Tables:
    orders = all_orders(n)
    pair_flat = {}
    borda_add = {}
    order_pairs = []
    for q in orders:
        flat = [0] * (n * n)
        pairs = []
        for a in range(n):
            x = q.by_rank[a]
            for b in range(a + 1, n):
                y = q.by_rank[b]
                flat[(x - 1) * n + (y - 1)] = 1
                pairs.append((x - 1) * n + (y - 1))
        pair_flat[q.encoding] = tuple(flat)
        points = [0] * n
        for r, x in enumerate(q.by_rank, start=1):
            points[x - 1] = n - r
        borda_add[q.encoding] = tuple(points)
        order_pairs.append(tuple(sorted(pairs)))
    tops = tuple(q.top for q in orders)
    return _Tables(orders, pair_flat, borda_add, tuple(order_pairs), tops)


def margins_flat(enc: bytes, h: int, n: int) -> list[int]:
    """Flat n*n matrix of pairwise support counts (diagonal stays 0)."""
    pf = _tables(n).pair_flat
    cols = [pf[enc[i * n : (i + 1) * n]] for i in range(h)]
    return [sum(vals) for vals in zip(*cols)]


def margin_matrix(p: Profile) -> tuple[tuple[int, ...], ...]:
    w = margins_flat(p.encoding, p.h, p.n)
    n = p.n
    return tuple(tuple(w[x * n : (x + 1) * n]) for x in range(n))


def majority_margin(p: Profile, x: int, y: int) -> int:
    """How many individuals rank x above y."""
    if x == y:
        raise ValueError("margin needs two distinct alternatives")
    if not (1 <= x <= p.n and 1 <= y <= p.n):
        raise ValueError(f"alternatives must lie in 1..{p.n}")
    return sum(1 for c in p.columns if c.prefers(x, y))


def _argmax_mask(scores) -> int:
    best = max(scores)
    mask = 0
    for i, s in enumerate(scores):
        if s == best:
            mask |= 1 << i
    return mask


@dataclass(frozen=True, eq=False)
class Rule:
    """A total map from profiles to nonempty choice sets at a fixed (h, n).

    `anonymous` / `neutral` are declared symmetries used only to pick faster
    exhaustive-scan strategies; the test suite validates the declarations on
    every built-in rule.  Evaluations are memoized by profile encoding.
    """

    name: str
    h: int
    n: int
    mask_fn: Callable[[bytes], int]
    anonymous: bool = False
    neutral: bool = False
    _memo: dict = field(default_factory=dict, repr=False)

    def mask_enc(self, enc: bytes) -> int:
        m = self._memo.get(enc)
        if m is None:
            m = self.mask_fn(enc)
            self._memo[enc] = m
        return m

    def mask(self, p: Profile) -> int:
        return self.mask_enc(p.encoding)

    def choice(self, p: Profile) -> ChoiceSet:
        return ChoiceSet(self.mask(p), self.n)

    def winners(self, p: Profile) -> tuple[int, ...]:
        return mask_members(self.mask(p))

    def __str__(self) -> str:
        return f"{self.name}@({self.h},{self.n})"


def pareto_rule(h: int, n: int) -> Rule:
    def fn(enc: bytes) -> int:
        w = margins_flat(enc, h, n)
        mask = 0
        for x in range(n):
            row = w[x * n : (x + 1) * n]
            # x survives iff no y beats it unanimously, i.e. someone ranks x above each y
            if all(row[y] >= 1 for y in range(n) if y != x):
                mask |= 1 << x
        return mask

    return Rule("pareto", h, n, fn, anonymous=True, neutral=True)


def borda_rule(h: int, n: int) -> Rule:
    def fn(enc: bytes) -> int:
        ba = _tables(n).borda_add
        cols = [ba[enc[i * n : (i + 1) * n]] for i in range(h)]
        return _argmax_mask([sum(vals) for vals in zip(*cols)])

    return Rule("borda", h, n, fn, anonymous=True, neutral=True)


def copeland_rule(h: int, n: int) -> Rule:
    threshold = (h + 2) // 2  # ceil((h+1)/2): strict majority, ties never count

    def fn(enc: bytes) -> int:
        w = margins_flat(enc, h, n)
        scores = []
        for x in range(n):
            wins = losses = 0
            for y in range(n):
                if y == x:
                    continue
                if w[x * n + y] >= threshold:
                    wins += 1
                if w[y * n + x] >= threshold:
                    losses += 1
            scores.append(wins - losses)
        return _argmax_mask(scores)

    return Rule("copeland", h, n, fn, anonymous=True, neutral=True)


def minimax_rule(h: int, n: int) -> Rule:
    def fn(enc: bytes) -> int:
        w = margins_flat(enc, h, n)
        return _argmax_mask(
            [min(w[x * n + y] for y in range(n) if y != x) for x in range(n)]
        )

    return Rule("minimax", h, n, fn, anonymous=True, neutral=True)


def _kemeny_scores(enc: bytes, h: int, n: int) -> list[int]:
    t = _tables(n)
    w = margins_flat(enc, h, n)
    return [sum(w[i] for i in pairs) for pairs in t.order_pairs]


def kemeny_rule(h: int, n: int) -> Rule:
    def fn(enc: bytes) -> int:
        t = _tables(n)
        scores = _kemeny_scores(enc, h, n)
        best = max(scores)
        mask = 0
        for o, s in enumerate(scores):
            if s == best:
                mask |= 1 << (t.tops[o] - 1)
        return mask

    return Rule("kemeny", h, n, fn, anonymous=True, neutral=True)


def kemeny_score(p: Profile, q: LinearOrder) -> int:
    """Total pairwise support for the ranking q: the sum of margins over its above-pairs."""
    w = margins_flat(p.encoding, p.h, p.n)
    n = p.n
    return sum(
        w[(q.by_rank[a] - 1) * n + (q.by_rank[b] - 1)]
        for a in range(n)
        for b in range(a + 1, n)
    )


def kemeny_argmax(p: Profile) -> tuple[tuple[LinearOrder, ...], int]:
    """All rankings with maximal total pairwise support, plus that maximum."""
    t = _tables(p.n)
    scores = _kemeny_scores(p.encoding, p.h, p.n)
    best = max(scores)
    return tuple(t.orders[o] for o, s in enumerate(scores) if s == best), best


def classical_rules(h: int, n: int) -> dict[str, Rule]:
    return {
        r.name: r
        for r in (
            pareto_rule(h, n),
            borda_rule(h, n),
            copeland_rule(h, n),
            minimax_rule(h, n),
            kemeny_rule(h, n),
        )
    }


def president_refine(base: Rule, i: int) -> Rule:
    """Break ties by individual i's own ranking, best first."""
    return _president(base, i, worst=False)


def anti_president_refine(base: Rule, i: int) -> Rule:
    """Break ties by individual i's own ranking, worst first."""
    return _president(base, i, worst=True)


def _president(base: Rule, i: int, worst: bool) -> Rule:
    if not 1 <= i <= base.h:
        raise ValueError(f"individual {i} out of range 1..{base.h}")
    n = base.n
    lo = (i - 1) * n
    suffix = f"_{i}" if worst else f"^{i}"

    def fn(enc: bytes) -> int:
        mask = base.mask_enc(enc)
        col = enc[lo : lo + n]
        ranked = reversed(col) if worst else col
        for x in ranked:
            if mask >> (x - 1) & 1:
                return 1 << (x - 1)
        raise AssertionError("base rule returned an empty choice set")

    # Picking by one named individual's ranking kills anonymity; neutrality survives.
    return Rule(base.name + suffix, base.h, base.n, fn, anonymous=False, neutral=base.neutral)


_RULE_NAME = re.compile(r"^([a-z]+)(?:(\^|_)(\d+))?$")


def rule_named(name: str, h: int, n: int) -> Rule:
    """Resolve a CLI rule name: a classical rule, optionally with a ^i or _i tie-break suffix."""
    m = _RULE_NAME.match(name.strip())
    if not m:
        raise ValueError(f"unknown rule name: {name!r}")
    base_name, op, idx = m.groups()
    rules = classical_rules(h, n)
    if base_name not in rules:
        raise ValueError(f"unknown rule {base_name!r}; expected one of {sorted(rules)}")
    base = rules[base_name]
    if op is None:
        return base
    i = int(idx)
    return anti_president_refine(base, i) if op == "_" else president_refine(base, i)


class Verdict(NamedTuple):
    """Outcome of an exhaustive predicate: ok, plus a counterexample profile when false."""

    ok: bool
    witness: Profile | None

    def __bool__(self) -> bool:
        return self.ok


def _scan_encodings(rule: Rule, budget: int, what: str):
    """Pick the cheapest exhaustive scan: one profile per column multiset when the
    rule is anonymous (its value only depends on the multiset), else every profile."""
    h, n = rule.h, rule.n
    if rule.anonymous:
        check_budget(anonymity_class_count(h, n), budget, what)
        return iter_anonymity_class_encodings(h, n)
    check_budget(profile_space_size(h, n), budget, what)
    return enumerate_profiles(h, n, budget).iter_encodings()


def _reversal_compiled(h: int, n: int) -> tuple:
    rev = GroupElement(Permutation.identity(h), Permutation.identity(n), RHO_REV)
    return compile_action(rev, h, n)


def is_resolute(rule: Rule, budget: int = DEFAULT_BUDGET) -> Verdict:
    """Does the rule pick a single winner everywhere?"""
    for enc in _scan_encodings(rule, budget, f"resoluteness of {rule.name}"):
        if rule.mask_fn(enc).bit_count() != 1:
            return Verdict(False, Profile.from_encoding(enc, rule.h, rule.n))
    return Verdict(True, None)


def is_efficient(rule: Rule, budget: int = DEFAULT_BUDGET) -> Verdict:
    """Is every winner undominated (never unanimously beaten)?"""
    par = pareto_rule(rule.h, rule.n)
    for enc in _scan_encodings(rule, budget, f"efficiency of {rule.name}"):
        if rule.mask_fn(enc) & ~par.mask_fn(enc):
            return Verdict(False, Profile.from_encoding(enc, rule.h, rule.n))
    return Verdict(True, None)


def is_immune_reversal(rule: Rule, budget: int = DEFAULT_BUDGET) -> Verdict:
    """A unique winner never survives reversing every individual's ranking."""
    comp = _reversal_compiled(rule.h, rule.n)
    for enc in _scan_encodings(rule, budget, f"reversal-bias immunity of {rule.name}"):
        mask = rule.mask_fn(enc)
        if mask.bit_count() == 1 and rule.mask_fn(act_encoding(enc, comp)) == mask:
            return Verdict(False, Profile.from_encoding(enc, rule.h, rule.n))
    return Verdict(True, None)


def is_immune_type3(rule: Rule, budget: int = DEFAULT_BUDGET) -> Verdict:
    """Sharing any winner with the reversed profile forces choosing all alternatives."""
    comp = _reversal_compiled(rule.h, rule.n)
    full = (1 << rule.n) - 1
    for enc in _scan_encodings(rule, budget, f"type-3 immunity of {rule.name}"):
        mask = rule.mask_fn(enc)
        if mask & rule.mask_fn(act_encoding(enc, comp)) and mask != full:
            return Verdict(False, Profile.from_encoding(enc, rule.h, rule.n))
    return Verdict(True, None)
