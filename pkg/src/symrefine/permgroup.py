"""Finite permutations, cycle notation, and subgroups of S_h x S_n x {id, reversal}.

Permutations are dense 1-based image tuples; cycle notation appears only at
I/O boundaries.  Group elements are triples (phi, psi, rho): phi permutes
individuals, psi relabels alternatives, rho optionally reverses every
ranking top-to-bottom.  All values are immutable and safe to share.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Iterator, Sequence


@dataclass(frozen=True)
class Permutation:
    """A bijection of {1..k}, stored as the tuple of images (position r holds the image of r)."""

    images: tuple[int, ...]

    def __post_init__(self):
        k = len(self.images)
        if sorted(self.images) != list(range(1, k + 1)):
            raise ValueError(f"not a permutation of 1..{k}: {self.images}")

    @staticmethod
    def identity(k: int) -> "Permutation":
        return Permutation(tuple(range(1, k + 1)))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for r, img in enumerate(self.images, start=1):
            inv[img - 1] = r
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(img == r for r, img in enumerate(self.images, start=1))

    def cycles(self) -> tuple[tuple[int, ...], ...]:
        """Disjoint cycles, fixed points omitted, each starting at its smallest point."""
        seen = set()
        out = []
        for start in range(1, self.degree + 1):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            x = self(start)
            while x != start:
                cyc.append(x)
                seen.add(x)
                x = self(x)
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return tuple(out)

    def cycle_type(self) -> tuple[int, ...]:
        """Multiset of cycle lengths, fixed points included, sorted descending."""
        lengths = [len(c) for c in self.cycles()]
        lengths += [1] * (self.degree - sum(lengths))
        return tuple(sorted(lengths, reverse=True))

    def __str__(self) -> str:
        return format_cycles(self)


def compose(a: Permutation, b: Permutation) -> Permutation:
    """Right-to-left product: the result maps r to a(b(r))."""
    if a.degree != b.degree:
        raise ValueError(f"degree mismatch: {a.degree} vs {b.degree}")
    ai = a.images
    return Permutation(tuple(ai[x - 1] for x in b.images))


def parse_cycles(text: str, degree: int) -> Permutation:
    """Parse disjoint-cycle notation like "(134)(26)"; "id" is the identity.

    Points above 9 must be separated by commas or spaces inside a cycle.
    """
    s = text.strip()
    if s in ("id", "()", ""):
        return Permutation.identity(degree)
    if s.count("(") != s.count(")") or not s.startswith("(") or not s.endswith(")"):
        raise ValueError(f"malformed cycle text: {text!r}")
    images = list(range(1, degree + 1))
    seen: set[int] = set()
    for chunk in s[1:-1].split(")("):
        if "," in chunk or " " in chunk:
            points = [p for p in chunk.replace(",", " ").split() if p]
        else:
            points = list(chunk)
        try:
            cyc = [int(p) for p in points]
        except ValueError:
            raise ValueError(f"malformed cycle text: {text!r}") from None
        if len(cyc) < 2:
            raise ValueError(f"cycle of length < 2 in {text!r}")
        for p in cyc:
            if not 1 <= p <= degree:
                raise ValueError(f"point {p} out of range 1..{degree} in {text!r}")
            if p in seen:
                raise ValueError(f"repeated point {p} in {text!r}")
            seen.add(p)
        for here, nxt in zip(cyc, cyc[1:] + cyc[:1]):
            images[here - 1] = nxt
    return Permutation(tuple(images))


def format_cycles(perm: Permutation) -> str:
    """Disjoint cycles sorted by smallest point, fixed points omitted; identity prints as "id"."""
    cycles = perm.cycles()
    if not cycles:
        return "id"
    sep = "," if perm.degree > 9 else ""
    return "".join("(" + sep.join(str(p) for p in cyc) + ")" for cyc in cycles)


def reversal_perm(n: int) -> Permutation:
    """The order-reversing permutation r -> n - r + 1."""
    if n < 1:
        raise ValueError("degree must be at least 1")
    return Permutation(tuple(range(n, 0, -1)))


def is_conjugate_to_reversal(psi: Permutation) -> bool:
    """True iff psi has the cycle type of the order reversal: n//2 transpositions plus n%2 fixed points."""
    n = psi.degree
    return psi.cycle_type() == (2,) * (n // 2) + (1,) * (n % 2)


def conjugators_to_reversal(psi: Permutation) -> tuple[Permutation, ...]:
    """All u with psi = u * reversal * u^-1, ordered lexicographically by image tuple."""
    n = psi.degree
    rev = reversal_perm(n)
    out = []
    for images in itertools.permutations(range(1, n + 1)):
        u = Permutation(images)
        if compose(compose(u, rev), u.inverse()) == psi:
            out.append(u)
    return tuple(out)


class ReversalFlag(Enum):
    """The order-two group of rank-reversal flags."""

    IDENTITY = "id"
    REVERSAL = "rev"

    def __mul__(self, other: "ReversalFlag") -> "ReversalFlag":
        if (self is ReversalFlag.REVERSAL) != (other is ReversalFlag.REVERSAL):
            return ReversalFlag.REVERSAL
        return ReversalFlag.IDENTITY

    def inverse(self) -> "ReversalFlag":
        return self

    def as_permutation(self, n: int) -> Permutation:
        if self is ReversalFlag.REVERSAL:
            return reversal_perm(n)
        return Permutation.identity(n)


RHO_ID = ReversalFlag.IDENTITY
RHO_REV = ReversalFlag.REVERSAL

#: Flag sets usable as the third factor of a product group.
NO_REVERSAL = (RHO_ID,)
WITH_REVERSAL = (RHO_ID, RHO_REV)


@dataclass(frozen=True)
class GroupElement:
    """A triple (phi, psi, rho) acting on profiles; the product is componentwise."""

    phi: Permutation
    psi: Permutation
    rho: ReversalFlag

    @staticmethod
    def identity(h: int, n: int) -> "GroupElement":
        return GroupElement(Permutation.identity(h), Permutation.identity(n), RHO_ID)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            compose(self.phi, other.phi),
            compose(self.psi, other.psi),
            self.rho * other.rho,
        )

    def inverse(self) -> "GroupElement":
        return GroupElement(self.phi.inverse(), self.psi.inverse(), self.rho)

    def is_identity(self) -> bool:
        return self.phi.is_identity() and self.psi.is_identity() and self.rho is RHO_ID

    @property
    def is_reversal(self) -> bool:
        return self.rho is RHO_REV

    def key(self) -> bytes:
        """Canonical byte encoding; its ordering is the canonical element order."""
        return bytes(self.phi.images) + bytes(self.psi.images) + bytes((self.is_reversal,))

    def __str__(self) -> str:
        return f"({format_cycles(self.phi)};{format_cycles(self.psi)};{self.rho.value})"

    @staticmethod
    def parse(text: str, h: int, n: int) -> "GroupElement":
        s = text.strip()
        if not (s.startswith("(") and s.endswith(")")):
            raise ValueError(f"malformed group element: {text!r}")
        parts = s[1:-1].split(";")
        if len(parts) != 3:
            raise ValueError(f"expected (phi;psi;rho), got {text!r}")
        rho_text = parts[2].strip()
        if rho_text not in ("id", "rev"):
            raise ValueError(f"rho must be 'id' or 'rev', got {rho_text!r}")
        return GroupElement(
            parse_cycles(parts[0], h),
            parse_cycles(parts[1], n),
            RHO_REV if rho_text == "rev" else RHO_ID,
        )


@dataclass(frozen=True)
class PartitionSpec:
    """A partition of {1..k} into disjoint nonempty blocks, kept sorted for determinism."""

    blocks: tuple[tuple[int, ...], ...]
    k: int

    def __post_init__(self):
        flat = sorted(x for block in self.blocks for x in block)
        if flat != list(range(1, self.k + 1)):
            raise ValueError(f"blocks {self.blocks} do not partition 1..{self.k}")

    @staticmethod
    def of(blocks: Iterable[Iterable[int]], k: int) -> "PartitionSpec":
        normal = tuple(
            sorted((tuple(sorted(set(b))) for b in blocks), key=lambda b: b[0])
        )
        return PartitionSpec(normal, k)

    @staticmethod
    def whole(k: int) -> "PartitionSpec":
        return PartitionSpec.of([range(1, k + 1)], k)

    @staticmethod
    def singletons(k: int) -> "PartitionSpec":
        return PartitionSpec.of([[x] for x in range(1, k + 1)], k)

    @staticmethod
    def parse(text: str, k: int) -> "PartitionSpec":
        """Parse block-list syntax like "1,2|3"."""
        try:
            blocks = [
                [int(tok) for tok in chunk.split(",") if tok.strip()]
                for chunk in text.split("|")
            ]
        except ValueError:
            raise ValueError(f"malformed partition: {text!r}") from None
        return PartitionSpec.of(blocks, k)

    def format(self) -> str:
        return "|".join(",".join(str(x) for x in block) for block in self.blocks)

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)


def block_preserving_perms(partition: PartitionSpec) -> tuple[Permutation, ...]:
    """All permutations mapping each block of the partition onto itself."""
    per_block = []
    for block in partition.blocks:
        per_block.append([dict(zip(block, images)) for images in itertools.permutations(block)])
    out = []
    for assignment in itertools.product(*per_block):
        images = list(range(1, partition.k + 1))
        for mapping in assignment:
            for src, dst in mapping.items():
                images[src - 1] = dst
        out.append(Permutation(tuple(images)))
    return tuple(sorted(out, key=lambda p: p.images))


@dataclass(frozen=True)
class SymmetryGroup:
    """A materialized subgroup of S_h x S_n x {id, rev}: the full element set, canonically sorted."""

    h: int
    n: int
    elements: tuple[GroupElement, ...]
    generators: tuple[GroupElement, ...] = ()

    @property
    def order(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[GroupElement]:
        return iter(self.elements)

    @cached_property
    def _keys(self) -> frozenset[bytes]:
        return frozenset(e.key() for e in self.elements)

    def __contains__(self, element: GroupElement) -> bool:
        return element.key() in self._keys

    @property
    def identity(self) -> GroupElement:
        return GroupElement.identity(self.h, self.n)

    @property
    def has_reversal(self) -> bool:
        return any(e.is_reversal for e in self.elements)

    def reversal_elements(self) -> tuple[GroupElement, ...]:
        return tuple(e for e in self.elements if e.is_reversal)

    def rank_preserving_elements(self) -> tuple[GroupElement, ...]:
        """The subgroup of elements with rho = id (it has index 1 or 2)."""
        return tuple(e for e in self.elements if not e.is_reversal)

    @property
    def default_gstar(self) -> GroupElement | None:
        """The designated reversal element: (id, id, rev) when present, else the canonically least one."""
        rev = self.reversal_elements()
        if not rev:
            return None
        plain = GroupElement(
            Permutation.identity(self.h), Permutation.identity(self.n), RHO_REV
        )
        if plain.key() in self._keys:
            return plain
        return rev[0]

    def validate(self) -> None:
        """Check the closure invariants directly (quadratic; intended for tests)."""
        keys = self._keys
        assert self.identity.key() in keys, "identity missing"
        for a in self.elements:
            assert a.inverse().key() in keys, f"inverse of {a} missing"
            for b in self.elements:
                assert (a * b).key() in keys, f"product {a}*{b} missing"


def _sorted_elements(elements: Iterable[GroupElement]) -> tuple[GroupElement, ...]:
    return tuple(sorted(elements, key=GroupElement.key))


def generate(generators: Sequence[GroupElement], h: int, n: int) -> SymmetryGroup:
    """Close a generator list under products (breadth-first worklist saturation).

    Finiteness makes the product closure a subgroup; inverses appear as powers.
    """
    for g in generators:
        if g.phi.degree != h or g.psi.degree != n:
            raise ValueError(f"generator degrees {g.phi.degree},{g.psi.degree} do not match ({h},{n})")
    ident = GroupElement.identity(h, n)
    found = {ident.key(): ident}
    gens = list(generators)
    frontier = []
    for g in gens:
        if g.key() not in found:
            found[g.key()] = g
            frontier.append(g)
    while frontier:
        fresh = []
        for a in frontier:
            for g in gens:
                c = a * g
                k = c.key()
                if k not in found:
                    found[k] = c
                    fresh.append(c)
        frontier = fresh
    return SymmetryGroup(h, n, _sorted_elements(found.values()), tuple(generators))


def group_from_elements(elements: Iterable[GroupElement], h: int, n: int) -> SymmetryGroup:
    """Wrap an already-closed element set (no closure check; see SymmetryGroup.validate)."""
    return SymmetryGroup(h, n, _sorted_elements(elements))


def restricted_group(
    Y: PartitionSpec, Z: PartitionSpec, flags: Sequence[ReversalFlag] = NO_REVERSAL
) -> SymmetryGroup:
    """The product group of block-preserving individual permutations, block-preserving
    alternative permutations, and the given reversal flags."""
    if RHO_ID not in flags:
        raise ValueError("the flag set must contain the identity flag")
    elements = [
        GroupElement(phi, psi, rho)
        for phi in block_preserving_perms(Y)
        for psi in block_preserving_perms(Z)
        for rho in flags
    ]
    return SymmetryGroup(Y.k, Z.k, _sorted_elements(elements))


def full_group(h: int, n: int) -> SymmetryGroup:
    return restricted_group(PartitionSpec.whole(h), PartitionSpec.whole(n), WITH_REVERSAL)


def trivial_group(h: int, n: int) -> SymmetryGroup:
    return SymmetryGroup(h, n, (GroupElement.identity(h, n),))


def small_generating_set(group: SymmetryGroup) -> tuple[GroupElement, ...]:
    """A greedy generating set; each pick at least doubles the generated subgroup,
    so at most log2(order) elements come back."""
    chosen: list[GroupElement] = []
    closed = {group.identity.key()}
    for e in group.elements:
        if e.key() in closed:
            continue
        chosen.append(e)
        closed = {g.key() for g in generate(chosen, group.h, group.n).elements}
    return tuple(chosen)
