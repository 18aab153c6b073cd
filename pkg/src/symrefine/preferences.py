"""Linear orders on alternatives, preference profiles, and the symmetry action on profiles.

A linear order is the column vector of alternatives read top (rank 1) to
bottom (rank n).  A profile is one column per individual, i.e. the n x h
matrix of the usual textbook layout.  The canonical profile encoding is the
column-major byte string of those vectors; its lexicographic order drives
enumeration and representative selection everywhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import factorial
from typing import Iterable, Iterator, Sequence

from .errors import BudgetExceededError
from .permgroup import RHO_REV, GroupElement, Permutation, ReversalFlag

#: Default cap on the number of profile visits an exhaustive computation may make.
DEFAULT_BUDGET = 10**8


def check_budget(needed: int, budget: int, what: str) -> None:
    if needed > budget:
        raise BudgetExceededError(needed, budget, what)


@dataclass(frozen=True)
class LinearOrder:
    """A strict ranking: by_rank[r-1] is the alternative of rank r (rank 1 is best)."""

    by_rank: tuple[int, ...]

    def __post_init__(self):
        n = len(self.by_rank)
        if sorted(self.by_rank) != list(range(1, n + 1)):
            raise ValueError(f"not a ranking of 1..{n}: {self.by_rank}")

    @staticmethod
    def of(by_rank: Iterable[int]) -> "LinearOrder":
        return LinearOrder(tuple(by_rank))

    @property
    def n(self) -> int:
        return len(self.by_rank)

    @property
    def top(self) -> int:
        return self.by_rank[0]

    @property
    def bottom(self) -> int:
        return self.by_rank[-1]

    def rank(self, x: int) -> int:
        """The rank of alternative x: the number of alternatives weakly above it."""
        if not 1 <= x <= self.n:
            raise ValueError(f"alternative {x} out of range 1..{self.n}")
        return self.by_rank.index(x) + 1

    def prefers(self, x: int, y: int) -> bool:
        return self.rank(x) < self.rank(y)

    @property
    def encoding(self) -> bytes:
        return bytes(self.by_rank)

    def as_permutation(self) -> Permutation:
        """The ranking read as the permutation sending each rank to its alternative."""
        return Permutation(self.by_rank)

    @staticmethod
    def from_permutation(sigma: Permutation) -> "LinearOrder":
        return LinearOrder(sigma.images)


def relabel(psi: Permutation, q: LinearOrder) -> LinearOrder:
    """Rename alternatives: x becomes psi(x), ranks are untouched."""
    if psi.degree != q.n:
        raise ValueError(f"degree mismatch: {psi.degree} vs {q.n}")
    img = psi.images
    return LinearOrder(tuple(img[x - 1] for x in q.by_rank))


def reverse(q: LinearOrder, rho: ReversalFlag) -> LinearOrder:
    """Flip the ranking top-to-bottom when the flag says so."""
    if rho is RHO_REV:
        return LinearOrder(q.by_rank[::-1])
    return q


@lru_cache(maxsize=None)
def all_orders(n: int) -> tuple[LinearOrder, ...]:
    """All n! rankings, sorted lexicographically by their vectors."""
    return tuple(
        LinearOrder(images) for images in itertools.permutations(range(1, n + 1))
    )


@lru_cache(maxsize=None)
def _order_encodings(n: int) -> tuple[bytes, ...]:
    return tuple(q.encoding for q in all_orders(n))


@lru_cache(maxsize=None)
def _order_index(n: int) -> dict[bytes, int]:
    return {enc: i for i, enc in enumerate(_order_encodings(n))}


@dataclass(frozen=True)
class Profile:
    """One ranking per individual; immutable and hashable by its canonical encoding."""

    columns: tuple[LinearOrder, ...]

    def __post_init__(self):
        if not self.columns:
            raise ValueError("a profile needs at least one individual")
        n = self.columns[0].n
        if any(c.n != n for c in self.columns):
            raise ValueError("columns rank different alternative sets")

    @property
    def h(self) -> int:
        return len(self.columns)

    @property
    def n(self) -> int:
        return self.columns[0].n

    @cached_property
    def encoding(self) -> bytes:
        return b"".join(c.encoding for c in self.columns)

    def __hash__(self) -> int:
        return hash(self.encoding)

    def __eq__(self, other) -> bool:
        return isinstance(other, Profile) and self.encoding == other.encoding

    def column(self, i: int) -> LinearOrder:
        """The ranking of individual i (1-based)."""
        return self.columns[i - 1]

    @staticmethod
    def from_columns(columns: Iterable[Sequence[int]]) -> "Profile":
        return Profile(tuple(LinearOrder.of(c) for c in columns))

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int]]) -> "Profile":
        """Build from the printed matrix layout: row r lists each individual's rank-r alternative."""
        h = len(rows[0])
        if any(len(r) != h for r in rows):
            raise ValueError("ragged rows")
        return Profile.from_columns(tuple(row[i] for row in rows) for i in range(h))

    @staticmethod
    def from_encoding(enc: bytes, h: int, n: int) -> "Profile":
        if len(enc) != h * n:
            raise ValueError(f"encoding length {len(enc)} != h*n = {h * n}")
        return Profile.from_columns(enc[i * n : (i + 1) * n] for i in range(h))

    def rows(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(c.by_rank[r] for c in self.columns) for r in range(self.n))

    def act(self, g: GroupElement) -> "Profile":
        return act(self, g)

    def format(self) -> str:
        """The text format: a "h n" header, then the n matrix rows."""
        lines = [f"{self.h} {self.n}"]
        lines += [" ".join(str(x) for x in row) for row in self.rows()]
        return "\n".join(lines) + "\n"

    @staticmethod
    def parse(text: str) -> "Profile":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty profile text")
        head = lines[0].split()
        if len(head) != 2:
            raise ValueError(f"line 1: expected 'h n', got {lines[0]!r}")
        try:
            h, n = int(head[0]), int(head[1])
        except ValueError:
            raise ValueError(f"line 1: expected integers, got {lines[0]!r}") from None
        if len(lines) != n + 1:
            raise ValueError(f"expected {n} matrix rows, got {len(lines) - 1}")
        rows = []
        for lineno, ln in enumerate(lines[1:], start=2):
            toks = ln.split()
            if len(toks) != h:
                raise ValueError(f"line {lineno}: expected {h} entries, got {len(toks)}")
            try:
                rows.append([int(t) for t in toks])
            except ValueError:
                raise ValueError(f"line {lineno}: non-integer entry in {ln!r}") from None
        return Profile.from_rows(rows)

    def __str__(self) -> str:
        return self.format()


def act(p: Profile, g: GroupElement) -> Profile:
    """Apply a symmetry: column i of the result is individual phi^-1(i)'s ranking,
    alternatives relabeled by psi, then reversed when rho says so."""
    if g.phi.degree != p.h or g.psi.degree != p.n:
        raise ValueError(
            f"element degrees ({g.phi.degree},{g.psi.degree}) do not match profile ({p.h},{p.n})"
        )
    phi_inv = g.phi.inverse()
    cols = tuple(
        reverse(relabel(g.psi, p.columns[phi_inv(i) - 1]), g.rho)
        for i in range(1, p.h + 1)
    )
    return Profile(cols)


# Hot path: the same action compiled onto canonical byte encodings.  Column
# relabeling commutes with reversal, so a single translate after the column
# shuffle is enough.

def compile_action(g: GroupElement, h: int, n: int) -> tuple:
    phi_inv = g.phi.inverse()
    slices = tuple(
        slice((phi_inv(i) - 1) * n, phi_inv(i) * n) for i in range(1, h + 1)
    )
    if g.psi.is_identity():
        table = None
    else:
        table = bytes.maketrans(bytes(range(1, n + 1)), bytes(g.psi.images))
    return (slices, table, g.rho is RHO_REV)


def act_encoding(enc: bytes, compiled: tuple) -> bytes:
    slices, table, flip = compiled
    if flip:
        out = b"".join(enc[s][::-1] for s in slices)
    else:
        out = b"".join(enc[s] for s in slices)
    return out.translate(table) if table is not None else out


def profile_space_size(h: int, n: int) -> int:
    return factorial(n) ** h


@dataclass(frozen=True)
class ProfileRange:
    """A contiguous slice of the lexicographic profile enumeration; cheap to split."""

    h: int
    n: int
    start: int
    stop: int

    def __len__(self) -> int:
        return self.stop - self.start

    def split(self, parts: int) -> list["ProfileRange"]:
        """Split into at most `parts` contiguous subranges covering the same span."""
        size = len(self)
        parts = max(1, min(parts, size)) if size else 1
        bounds = [self.start + (size * i) // parts for i in range(parts + 1)]
        return [
            ProfileRange(self.h, self.n, a, b)
            for a, b in zip(bounds, bounds[1:])
            if b > a or size == 0
        ]

    def iter_encodings(self) -> Iterator[bytes]:
        encs = _order_encodings(self.n)
        base = len(encs)
        full = self.start == 0 and self.stop == base**self.h
        if full:
            for combo in itertools.product(encs, repeat=self.h):
                yield b"".join(combo)
            return
        for idx in range(self.start, self.stop):
            yield _encoding_at(idx, self.h, self.n)

    def __iter__(self) -> Iterator[Profile]:
        for enc in self.iter_encodings():
            yield Profile.from_encoding(enc, self.h, self.n)


def _encoding_at(index: int, h: int, n: int) -> bytes:
    encs = _order_encodings(n)
    base = len(encs)
    digits = []
    for _ in range(h):
        index, d = divmod(index, base)
        digits.append(d)
    return b"".join(encs[d] for d in reversed(digits))


def profile_at(index: int, h: int, n: int) -> Profile:
    """The index-th profile in lexicographic enumeration order."""
    size = profile_space_size(h, n)
    if not 0 <= index < size:
        raise ValueError(f"index {index} out of range 0..{size - 1}")
    return Profile.from_encoding(_encoding_at(index, h, n), h, n)


def profile_index(p: Profile) -> int:
    lookup = _order_index(p.n)
    base = factorial(p.n)
    idx = 0
    for c in p.columns:
        idx = idx * base + lookup[c.encoding]
    return idx


def enumerate_profiles(h: int, n: int, budget: int = DEFAULT_BUDGET) -> ProfileRange:
    """The full profile stream in lexicographic order, refused up front when over budget."""
    size = profile_space_size(h, n)
    check_budget(size, budget, f"enumerating all profiles at ({h},{n})")
    return ProfileRange(h, n, 0, size)


def anonymity_class_count(h: int, n: int) -> int:
    """Number of column multisets: C(n! + h - 1, h)."""
    from math import comb

    return comb(factorial(n) + h - 1, h)


def iter_anonymity_class_encodings(h: int, n: int) -> Iterator[bytes]:
    """One representative encoding (sorted columns, the lex-min reordering) per column multiset."""
    encs = _order_encodings(n)
    for combo in itertools.combinations_with_replacement(encs, h):
        yield b"".join(combo)
