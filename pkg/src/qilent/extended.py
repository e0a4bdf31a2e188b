"""Stabilizer arrays whose cells may be hearts.

A heart (``?``) stands for an unknown unitary factor, typically left behind by
a T gate.  Rows without hearts are L-rows and carry the usual projector
meaning; heart rows only record that *some* operator of that shape exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from . import pauli
from .content import OPAQUE, Block
from .stabilizer import StabArray, canonical, member, rref, reduce, update

HEART = pauli.HEART


@dataclass(frozen=True)
class ExtArray:
    n: int
    rows: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        for r in self.rows:
            if len(r) != self.n:
                raise ValueError(f"row {r!r} does not have {self.n} cells")
            pauli.check_row(r)

    @classmethod
    def of(cls, *rows: str) -> "ExtArray":
        return cls(len(rows[0]), rows)

    @classmethod
    def from_stab(cls, S: StabArray) -> "ExtArray":
        return cls(S.n, S.rows)

    @property
    def l_rows(self) -> tuple[str, ...]:
        return tuple(r for r in self.rows if HEART not in r)

    @property
    def heart_rows(self) -> tuple[str, ...]:
        return tuple(r for r in self.rows if HEART in r)

    def __str__(self) -> str:
        return "{" + ",".join(self.rows) + "}"


def _as_ext(E) -> ExtArray:
    return E if isinstance(E, ExtArray) else ExtArray.from_stab(E)


def potential_commute(a: str, b: str) -> bool:
    """Can some substitution of I, X, Y, Z for the hearts make the rows commute?"""
    if len(a) != len(b):
        raise ValueError(f"row length mismatch: {len(a)} vs {len(b)}")
    clashes = 0
    free = 0
    for x, y in zip(a, b):
        if HEART in (x, y):
            if x != "I" and y != "I":
                free += 1
        elif pauli.cells_anticommute(x, y):
            clashes += 1
    return clashes % 2 == 0 or free > 0


def excluded_row(row: str) -> bool:
    """All-I rows and rows with a single non-I cell."""
    return sum(c != "I" for c in row) <= 1


def valid(E) -> bool:
    if E is OPAQUE:
        return True
    E = _as_ext(E)
    if len(E.rows) > E.n:
        return False
    ls = E.l_rows
    if len(rref(map(pauli.to_vector, ls))) != len(ls):
        return False
    if not all(pauli.row_commutes(a, b) for a, b in combinations(ls, 2)):
        return False
    for a, b in combinations(E.rows, 2):
        if (HEART in a or HEART in b) and not potential_commute(a, b):
            return False
    if E.n >= 2 and any(excluded_row(r) for r in E.rows):
        return False
    return True


def normalize(E):
    """Drop heart rows; no L-rows left means no information."""
    if E is OPAQUE:
        return OPAQUE
    E = _as_ext(E)
    ls = E.l_rows
    if not ls:
        return OPAQUE
    return canonical(StabArray(E.n, ls))


def _reduce_heart_row(row: str, l_vectors: list[int], n: int) -> str:
    hearts = [q for q, c in enumerate(row) if c == HEART]
    keep = ~pauli.column_mask(n, hearts)
    basis = rref(v & keep for v in l_vectors)
    v = reduce(pauli.to_vector(row) & keep, basis)
    cells = pauli.from_vector(v, n)
    return "".join(HEART if q in hearts else cells[q] for q in range(n))


def canonicalize(E) -> ExtArray:
    """Deterministic representative under row permutation and multiplication
    by L-rows.

    L-rows go to reduced row-echelon form.  Hearts are absorbing, so
    multiplying an L-row into a heart row never moves its hearts; each heart
    row is therefore reduced modulo the L-span restricted to its heart-free
    columns, which gives a unique coset representative.  Heart rows are then
    sorted.  Products of two heart rows are not undone (they lose cells).
    """
    E = _as_ext(E)
    l_vectors = rref(map(pauli.to_vector, E.l_rows))
    ls = tuple(pauli.from_vector(v, E.n) for v in l_vectors)
    hs = sorted(_reduce_heart_row(r, l_vectors, E.n) for r in E.heart_rows)
    return ExtArray(E.n, ls + tuple(hs))


def _clear_column(i: int, E: ExtArray):
    """Leave at most one row with X/Y in column ``i``, pivoting on an L-row.

    Returns the new rows and the index of the pivot (None if no L-row has
    X/Y there).
    """
    rows = list(E.rows)
    xy = [k for k, r in enumerate(rows) if r[i] in "XY"]
    pivots = [k for k in xy if HEART not in rows[k]]
    if not pivots:
        return rows, xy, None
    p = pivots[0]
    for k in xy:
        if k != p:
            rows[k] = pauli.row_mul(rows[k], rows[p])
    return rows, [p], p


def add_heart(i: int, E) -> ExtArray:
    """Account for a T gate on local qubit ``i``: X/Y cells there become hearts."""
    E = canonicalize(E)
    rows, xy, _ = _clear_column(i, E)
    if not xy:
        return E
    for k in xy:
        rows[k] = rows[k][:i] + HEART + rows[k][i + 1:]
    return canonicalize(ExtArray(E.n, rows))


def _informative(row: str) -> bool:
    # a lone heart says nothing; neither does an all-I row
    weight = sum(c != "I" for c in row)
    return weight > 1 if HEART in row else weight > 0


def meas_e_block(i: int, E):
    """Block-local part of a Z measurement on local qubit ``i``.

    If, after clearing column ``i`` with an L-row pivot, exactly one row has
    X or Y there and no row has a heart there, that row and column ``i`` are
    deleted and the remaining array on the other qubits is returned.
    Otherwise returns None: nothing is known about the rest of the block.
    """
    E = canonicalize(E)
    rows, xy, _ = _clear_column(i, E)
    if len(xy) != 1 or any(r[i] == HEART for r in rows):
        return None
    rest = [r[:i] + r[i + 1:] for k, r in enumerate(rows) if k != xy[0]]
    rest = [r for r in rest if _informative(r)]
    return canonicalize(ExtArray(E.n - 1, rest))


def tensor_e(E, F):
    if E is OPAQUE or F is OPAQUE:
        return OPAQUE
    rows = tuple(r + "I" * F.n for r in E.rows) + tuple("I" * E.n + r for r in F.rows)
    if isinstance(E, ExtArray) or isinstance(F, ExtArray):
        return ExtArray(E.n + F.n, rows)
    return StabArray(E.n + F.n, rows)


def update_e(J, A, E) -> list[Block]:
    """Split off qubits of ``J`` that the L-rows pin to a single Pauli.

    Heart-free contents defer to :func:`qilent.stabilizer.update`.  With
    heart rows present, every split-off qubit gets its Pauli and the rest of
    the block becomes opaque.
    """
    A = tuple(sorted(A))
    if E is OPAQUE:
        return [Block(A, OPAQUE)]
    if isinstance(E, StabArray) or not E.heart_rows:
        return update(J, A, StabArray(E.n, E.l_rows if isinstance(E, ExtArray) else E.rows))
    span = StabArray(E.n, E.l_rows)
    singles = []
    for q in sorted(J):
        if q not in A:
            continue
        c = A.index(q)
        for sigma in "ZXY":
            if member(span, pauli.single(E.n, c, sigma)):
                singles.append(Block((q,), StabArray(1, (sigma,))))
                break
    if not singles:
        return [Block(A, E)]
    split = {b.qubits[0] for b in singles}
    rest = tuple(q for q in A if q not in split)
    return ([Block(rest, OPAQUE)] if rest else []) + singles
