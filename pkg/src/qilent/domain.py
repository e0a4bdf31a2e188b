"""Assignments: a partition of the qubits with one content per block.

Contents are ``IDENTITY`` (single qubits only), a :class:`StabArray`, an
:class:`ExtArray` (extended domain only) or ``OPAQUE``.  Assignments are
immutable and store canonical contents, so ``==`` and ``hash`` compare them
as abstract values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from .content import IDENTITY, OPAQUE, Block
from .extended import ExtArray, canonicalize, normalize, valid as ext_valid
from .stabilizer import StabArray, canonical, extract_single, is_valid as stab_valid

KINDS = {"identity", "stabilizer", "extended", "opaque"}


class InvariantError(RuntimeError):
    """An operation produced an ill-formed assignment (a bug, not bad input)."""


def settle(content):
    """Canonical stored form of a block content."""
    if isinstance(content, ExtArray):
        if not content.heart_rows:
            content = StabArray(content.n, content.rows)
        else:
            return canonicalize(content)
    if isinstance(content, StabArray):
        if content.k == 0:
            return OPAQUE
        return canonical(content)
    if content is IDENTITY or content is OPAQUE:
        return content
    raise TypeError(f"not a block content: {content!r}")


def kind(content) -> str:
    if content is IDENTITY:
        return "identity"
    if content is OPAQUE:
        return "opaque"
    if isinstance(content, StabArray):
        return "stabilizer"
    if isinstance(content, ExtArray):
        return "extended"
    raise TypeError(f"not a block content: {content!r}")


def stab(*rows: str) -> StabArray:
    return canonical(StabArray.of(*rows))


Z1 = StabArray(1, ("Z",))
X1 = StabArray(1, ("X",))


@dataclass(frozen=True)
class Assignment:
    n_qubits: int
    blocks: tuple[Block, ...]

    def __init__(self, n_qubits: int, blocks: Iterable):
        blocks = [b if isinstance(b, Block) else Block(*b) for b in blocks]
        blocks = [Block(b.qubits, settle(b.content)) for b in blocks]
        blocks.sort(key=lambda b: b.qubits[0] if b.qubits else -1)
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "blocks", tuple(blocks))
        self._check_partition()

    def _check_partition(self):
        seen = []
        for b in self.blocks:
            if not b.qubits:
                raise InvariantError("empty block")
            seen.extend(b.qubits)
            width = getattr(b.content, "n", None)
            if width is not None and width != len(b.qubits):
                raise InvariantError(f"content of width {width} on block {b.qubits}")
            if b.content is IDENTITY and len(b.qubits) != 1:
                raise InvariantError(f"identity content on multi-qubit block {b.qubits}")
        if sorted(seen) != list(range(self.n_qubits)):
            raise InvariantError(f"blocks {[b.qubits for b in self.blocks]} do not partition {self.n_qubits} qubits")

    # lookups -------------------------------------------------------------

    def block(self, i: int) -> Block:
        for b in self.blocks:
            if i in b.qubits:
                return b
        raise IndexError(f"qubit {i} out of range")

    def content(self, i: int):
        return self.block(i).content

    @property
    def partition(self) -> tuple[tuple[int, ...], ...]:
        return tuple(b.qubits for b in self.blocks)

    # substitution ------------------------------------------------------

    def replace(self, i: int, new, j: int | None = None) -> "Assignment":
        """Replace the block of ``i`` (merged with the block of ``j``, if given).

        ``new`` is either a content, which is put on the removed qubits, or a
        list of blocks that must cover exactly those qubits.
        """
        removed = {self.block(i).qubits}
        if j is not None:
            removed.add(self.block(j).qubits)
        covered = sorted(q for qs in removed for q in qs)
        if isinstance(new, (list, tuple)):
            fresh = [b if isinstance(b, Block) else Block(*b) for b in new]
            got = sorted(q for b in fresh for q in b.qubits)
            if got != covered:
                raise InvariantError(f"replacement covers {got}, expected {covered}")
        else:
            fresh = [Block(tuple(covered), new)]
        kept = [b for b in self.blocks if b.qubits not in removed]
        return Assignment(self.n_qubits, kept + fresh)

    # validity ------------------------------------------------------------

    def well_formed(self, domain: str = "c") -> bool:
        for b in self.blocks:
            c = b.content
            if c is IDENTITY or c is OPAQUE:
                continue
            if isinstance(c, ExtArray):
                if domain != "e" or not ext_valid(c):
                    return False
                continue
            if not stab_valid(c):
                return False
            if domain == "c":
                if c.k != len(b.qubits):
                    return False
                if len(b.qubits) > 1 and any(extract_single(q, c) for q in range(c.n)):
                    return False
        return True

    # presentation --------------------------------------------------------

    def __str__(self) -> str:
        parts = []
        for b in self.blocks:
            c = b.content
            if c is IDENTITY:
                shown = "1"
            elif c is OPAQUE:
                shown = "#"
            else:
                shown = "<" + ",".join(c.rows) + ">"
            parts.append("({" + ",".join(map(str, b.qubits)) + "}," + shown + ")")
        return "{" + ", ".join(parts) + "}"

    def to_dict(self) -> dict:
        blocks = []
        for b in self.blocks:
            entry = {"qubits": list(b.qubits), "kind": kind(b.content)}
            if isinstance(b.content, (StabArray, ExtArray)):
                entry["rows"] = list(b.content.rows)
            blocks.append(entry)
        return {"qubits": self.n_qubits, "blocks": blocks}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "Assignment":
        n = data["qubits"]
        blocks = []
        for entry in data["blocks"]:
            qs = tuple(entry["qubits"])
            k = entry["kind"]
            if k not in KINDS:
                raise ValueError(f"unknown block kind {k!r}")
            if k == "identity":
                content = IDENTITY
            elif k == "opaque":
                content = OPAQUE
            elif k == "stabilizer":
                content = StabArray(len(qs), entry["rows"])
            else:
                content = ExtArray(len(qs), entry["rows"])
            blocks.append(Block(qs, content))
        return cls(n, blocks)

    @classmethod
    def from_json(cls, text: str) -> "Assignment":
        return cls.from_dict(json.loads(text))

    def render(self) -> str:
        """Block-diagonal text picture, one bracketed group per block."""
        n = self.n_qubits
        lines = ["    " + " ".join(f"q{q}" for q in range(n))]
        width = [len(f"q{q}") for q in range(n)]
        for b in self.blocks:
            c = b.content
            if c is IDENTITY:
                rows = ["1"]
            elif c is OPAQUE:
                rows = ["#" * len(b.qubits)]
            else:
                rows = list(c.rows) or ["#" * len(b.qubits)]
            label = "{" + ",".join(map(str, b.qubits)) + "} " + kind(c)
            for k, r in enumerate(rows):
                cells = [
                    (r[b.qubits.index(q)] if q in b.qubits else ".").center(width[q])
                    for q in range(n)
                ]
                tail = f"  {label}" if k == 0 else ""
                lines.append("   [" + " ".join(cells) + "]" + tail)
        return "\n".join(lines)


def zeros(n: int) -> Assignment:
    return Assignment(n, [Block((q,), Z1) for q in range(n)])


def top(n: int) -> Assignment:
    return Assignment(n, [Block(tuple(range(n)), OPAQUE)])


def bottom(n: int) -> Assignment:
    return Assignment(n, [Block((q,), IDENTITY) for q in range(n)])


# content order -----------------------------------------------------------

def leq_s(S, T) -> bool:
    return S is IDENTITY or T is OPAQUE or S == T


def join_s(S, T):
    if leq_s(S, T):
        return T
    if leq_s(T, S):
        return S
    return OPAQUE


def meet_s(S, T):
    if leq_s(S, T):
        return S
    if leq_s(T, S):
        return T
    return IDENTITY


def odot(alpha: Assignment, A) -> object:
    """Content that ``alpha`` gives to the qubit set ``A`` seen as one block.

    The content of a block of ``alpha`` that is exactly ``A``; IDENTITY if
    every qubit of ``A`` is an identity singleton; OPAQUE otherwise.
    """
    A = tuple(sorted(A))
    blocks = {alpha.block(q) for q in A}
    if len(blocks) == 1:
        (b,) = blocks
        if b.qubits == A:
            return b.content
    if all(b.content is IDENTITY for b in blocks):
        return IDENTITY
    return OPAQUE


def refines(p, q) -> bool:
    """Every block of partition ``p`` lies inside a block of ``q``."""
    owner = {x: k for k, blk in enumerate(q) for x in blk}
    return all(len({owner[x] for x in blk}) == 1 for blk in p)


def leq_c(alpha: Assignment, beta: Assignment) -> bool:
    if alpha.n_qubits != beta.n_qubits:
        raise ValueError("assignments over different qubit sets")
    if not refines(alpha.partition, beta.partition):
        return False
    return all(leq_s(odot(alpha, b.qubits), b.content) for b in beta.blocks)


def _partition_join(*partitions) -> list[tuple[int, ...]]:
    parent: dict[int, int] = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in partitions:
        for blk in p:
            for x in blk:
                parent[find(x)] = find(blk[0])
    groups: dict[int, list[int]] = {}
    for x in sorted(parent):
        groups.setdefault(find(x), []).append(x)
    return sorted((tuple(g) for g in groups.values()), key=lambda g: g[0])


def join_c(alpha: Assignment, beta: Assignment) -> Assignment:
    if alpha.n_qubits != beta.n_qubits:
        raise ValueError("assignments over different qubit sets")
    blocks = [
        Block(A, join_s(odot(alpha, A), odot(beta, A)))
        for A in _partition_join(alpha.partition, beta.partition)
    ]
    return Assignment(alpha.n_qubits, blocks)


def meet_c(alpha: Assignment, beta: Assignment) -> Assignment:
    """Greatest lower bound.

    The candidate partition is the common refinement.  A block of either side
    that must be cut, and whose content is not OPAQUE, only allows identity
    singletons below it; the same holds for a block shared by both sides
    whose two contents have no common non-identity lower bound.
    """
    if alpha.n_qubits != beta.n_qubits:
        raise ValueError("assignments over different qubit sets")
    pieces = sorted(
        {tuple(sorted(set(a) & set(b))) for a in alpha.partition for b in beta.partition} - {()},
        key=lambda p: p[0],
    )
    pieces_set = set(pieces)
    forced: set[int] = set()
    for side in (alpha, beta):
        for b in side.blocks:
            if b.qubits not in pieces_set and b.content is not OPAQUE:
                forced.update(b.qubits)
    chosen = []
    for A in pieces:
        if forced & set(A):
            continue
        ca = alpha.block(A[0])
        cb = beta.block(A[0])
        bound_a = ca.content if ca.qubits == A else OPAQUE
        bound_b = cb.content if cb.qubits == A else OPAQUE
        c = meet_s(bound_a, bound_b)
        if c is IDENTITY and len(A) > 1:
            forced.update(A)
            continue
        chosen.append(Block(A, c))
    chosen.extend(Block((q,), IDENTITY) for q in sorted(forced))
    return Assignment(alpha.n_qubits, chosen)


# extended domain ----------------------------------------------------------

def normal_form(gamma: Assignment) -> Assignment:
    blocks = []
    for b in gamma.blocks:
        c = b.content
        if isinstance(c, (StabArray, ExtArray)):
            c = normalize(c)
        blocks.append(Block(b.qubits, c))
    return Assignment(gamma.n_qubits, blocks)


def join_approx(gamma: Assignment, delta: Assignment) -> Assignment:
    """Approximate join of extended assignments, taken through normal forms."""
    return join_c(normal_form(gamma), normal_form(delta))
