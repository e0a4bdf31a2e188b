"""Signless stabilizer arrays.

A :class:`StabArray` holds independent, pairwise commuting Pauli rows over a
block of ``n`` qubits.  Row operations (permutation and multiplication of one
row into another) do not change the group, so :func:`canonical` picks the
GF(2) reduced row-echelon representative.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from . import pauli
from .content import OPAQUE, Block


@dataclass(frozen=True)
class StabArray:
    n: int
    rows: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        for r in self.rows:
            if len(r) != self.n:
                raise ValueError(f"row {r!r} does not have {self.n} cells")
            pauli.check_row(r, heart_ok=False)

    @classmethod
    def of(cls, *rows: str) -> "StabArray":
        if not rows:
            raise ValueError("use StabArray(n) for an empty array")
        return cls(len(rows[0]), rows)

    @property
    def k(self) -> int:
        return len(self.rows)

    @property
    def full_rank(self) -> bool:
        return self.k == self.n

    def __str__(self) -> str:
        return "<" + ",".join(self.rows) + ">"


def rref(vectors) -> list[int]:
    """Reduced row-echelon basis of GF(2) vectors, highest pivot first."""
    basis: dict[int, int] = {}
    for v in vectors:
        for p, b in basis.items():
            if (v >> p) & 1:
                v ^= b
        if v:
            p = v.bit_length() - 1
            for q in basis:
                if (basis[q] >> p) & 1:
                    basis[q] ^= v
            basis[p] = v
    return [basis[p] for p in sorted(basis, reverse=True)]


def reduce(v: int, basis: list[int]) -> int:
    """Reduce ``v`` against an RREF basis; zero iff ``v`` is in the span."""
    for b in basis:
        if (v >> (b.bit_length() - 1)) & 1:
            v ^= b
    return v


def rank(rows) -> int:
    return len(rref(pauli.to_vector(r) for r in rows))


def is_valid(S: StabArray) -> bool:
    if any(set(r) == {"I"} for r in S.rows):
        return False
    if rank(S.rows) != S.k:
        return False
    return all(pauli.row_commutes(a, b) for a, b in combinations(S.rows, 2))


def validate(S: StabArray) -> None:
    if not is_valid(S):
        raise ValueError(f"not a valid stabilizer array: {S}")


def canonical(S: StabArray) -> StabArray:
    return StabArray(S.n, tuple(pauli.from_vector(v, S.n) for v in rref(map(pauli.to_vector, S.rows))))


def same_group(S: StabArray, T: StabArray) -> bool:
    return S.n == T.n and canonical(S) == canonical(T)


def member(S: StabArray, p: str) -> bool:
    if len(p) != S.n:
        raise ValueError(f"row {p!r} is not over {S.n} qubits")
    basis = rref(map(pauli.to_vector, S.rows))
    return reduce(pauli.to_vector(p), basis) == 0


def tensor(S: StabArray, T: StabArray) -> StabArray:
    left = tuple(r + "I" * T.n for r in S.rows)
    right = tuple("I" * S.n + r for r in T.rows)
    return StabArray(S.n + T.n, left + right)


def permute(S, order):
    """Reorder columns: column ``c`` of the result is column ``order[c]`` of ``S``."""
    rows = tuple("".join(r[o] for o in order) for r in S.rows)
    return type(S)(S.n, rows)


def conj_gate(gate: str, qubits, S):
    """Conjugate every row by a gate on local qubit indices.

    ``gate`` is one of X, Y, Z, H, S (one index) or CX (control, target).
    Works for extended arrays as well, since heart cells have their own rules.
    """
    qubits = tuple(qubits)
    if any(not 0 <= q < S.n for q in qubits):
        raise ValueError(f"qubit index out of range for a {S.n}-qubit block: {qubits}")
    if gate == "CX":
        c, t = qubits
        rows = tuple(pauli.conj_row_cx(r, c, t) for r in S.rows)
    else:
        (q,) = qubits
        rows = tuple(pauli.conj_row_1q(gate, r, q) for r in S.rows)
    return type(S)(S.n, rows)


def meas_st(i: int, S: StabArray) -> StabArray:
    """Z measurement of local qubit ``i`` with the outcome sign dropped."""
    if not S.full_rank:
        raise ValueError("meas_st needs a full-rank stabilizer array")
    rows = list(S.rows)
    anti = [k for k, r in enumerate(rows) if r[i] in "XY"]
    if not anti:
        return S
    p = anti[0]
    for k in anti[1:]:
        rows[k] = pauli.row_mul(rows[k], rows[p])
    rows[p] = pauli.single(S.n, i, "Z")
    return StabArray(S.n, rows)


def _drop_column(row: str, i: int) -> str:
    return row[:i] + row[i + 1:]


def extract_single(i: int, S: StabArray):
    """Split off qubit ``i`` if the group contains Z, X or Y on it alone.

    Returns ``(sigma, rest)`` where ``rest`` lives on the other ``n - 1``
    qubits, or ``None`` when qubit ``i`` cannot be factored out.
    """
    for sigma in "ZXY":
        target = pauli.single(S.n, i, sigma)
        if member(S, target):
            break
    else:
        return None
    # put sigma_i in as an explicit row, keep an independent spanning set
    kept = [target]
    basis = rref([pauli.to_vector(target)])
    for r in S.rows:
        v = pauli.to_vector(r)
        if reduce(v, basis):
            kept.append(r)
            basis = rref(basis + [v])
    rest = []
    for r in kept[1:]:
        if r[i] == sigma:
            r = pauli.row_mul(r, target)
        elif r[i] != "I":
            raise AssertionError("row does not commute with the split-off Pauli")
        rest.append(_drop_column(r, i))
    return sigma, StabArray(S.n - 1, tuple(rest))


def update(J, A, S) -> list[Block]:
    """Factor single-qubit stabilizers on qubits of ``J`` out of block ``A``.

    ``A`` is the block's qubit set (global indices); ``S`` is its content,
    with column ``c`` belonging to the ``c``-th smallest qubit of ``A``.
    Qubits of ``J`` are tried in ascending order.
    """
    A = tuple(sorted(A))
    if S is OPAQUE:
        return [Block(A, OPAQUE)]
    out = []
    for q in sorted(J):
        if q not in A:
            continue
        split = extract_single(A.index(q), S)
        if split is None:
            continue
        sigma, S = split
        out.append(Block((q,), StabArray(1, (sigma,))))
        A = tuple(x for x in A if x != q)
    if A:
        out.append(Block(A, S))
    return out
