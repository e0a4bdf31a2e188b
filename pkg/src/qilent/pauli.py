"""Signless Pauli cells and rows.

Cells are single characters over ``I X Y Z``, plus ``?`` for the heart
cell (an unknown unitary factor).  Rows are plain strings of cells; qubit 0
of a block is the leftmost character.

Signs and phases are never tracked, so the Pauli gates X, Y and Z act as the
identity on cells.
"""

from __future__ import annotations

HEART = "?"
PAULIS = "IXYZ"
CELLS = PAULIS + HEART

ONE_QUBIT_CLIFFORDS = ("X", "Y", "Z", "H", "S")

# symplectic code: bit 1 = x part, bit 0 = z part
_CODE = {"I": 0b00, "Z": 0b01, "X": 0b10, "Y": 0b11}
_FROM_CODE = {v: k for k, v in _CODE.items()}

_CONJ_1Q = {
    "X": {"I": "I", "X": "X", "Y": "Y", "Z": "Z"},
    "Y": {"I": "I", "X": "X", "Y": "Y", "Z": "Z"},
    "Z": {"I": "I", "X": "X", "Y": "Y", "Z": "Z"},
    "H": {"I": "I", "X": "Z", "Y": "Y", "Z": "X"},
    "S": {"I": "I", "X": "Y", "Y": "X", "Z": "Z"},
}

# control (x) target, phases dropped
_CONJ_CX = {
    ("I", "I"): ("I", "I"),
    ("I", "X"): ("I", "X"),
    ("I", "Y"): ("Z", "Y"),
    ("I", "Z"): ("Z", "Z"),
    ("X", "I"): ("X", "X"),
    ("X", "X"): ("X", "I"),
    ("X", "Y"): ("Y", "Z"),
    ("X", "Z"): ("Y", "Y"),
    ("Y", "I"): ("Y", "X"),
    ("Y", "X"): ("Y", "I"),
    ("Y", "Y"): ("X", "Z"),
    ("Y", "Z"): ("X", "Y"),
    ("Z", "I"): ("Z", "I"),
    ("Z", "X"): ("Z", "X"),
    ("Z", "Y"): ("I", "Y"),
    ("Z", "Z"): ("I", "Z"),
}


def _check_cell(c: str) -> None:
    if c not in CELLS or len(c) != 1:
        raise ValueError(f"not a Pauli cell: {c!r}")


def check_row(row: str, heart_ok: bool = True) -> None:
    """Raise ValueError if ``row`` uses characters outside the cell alphabet."""
    alphabet = CELLS if heart_ok else PAULIS
    bad = [c for c in row if c not in alphabet]
    if bad:
        raise ValueError(f"invalid cell(s) {bad!r} in row {row!r}")


def is_heart_row(row: str) -> bool:
    return HEART in row


def cell_mul(a: str, b: str) -> str:
    """Product of two cells with phases discarded; the heart absorbs."""
    _check_cell(a)
    _check_cell(b)
    if a == HEART or b == HEART:
        return HEART
    return _FROM_CODE[_CODE[a] ^ _CODE[b]]


def _same_length(a: str, b: str) -> None:
    if len(a) != len(b):
        raise ValueError(f"row length mismatch: {len(a)} vs {len(b)}")


def row_mul(a: str, b: str) -> str:
    _same_length(a, b)
    return "".join(cell_mul(x, y) for x, y in zip(a, b))


def cells_anticommute(a: str, b: str) -> bool:
    return a != "I" and b != "I" and a != b


def row_commutes(a: str, b: str) -> bool:
    """Symplectic commutation test for two heart-free rows."""
    _same_length(a, b)
    check_row(a, heart_ok=False)
    check_row(b, heart_ok=False)
    return sum(cells_anticommute(x, y) for x, y in zip(a, b)) % 2 == 0


def encode(row: str) -> tuple[int, int]:
    """Split a heart-free row into (x bits, z bits); bit q belongs to qubit q."""
    check_row(row, heart_ok=False)
    x = z = 0
    for q, c in enumerate(row):
        code = _CODE[c]
        x |= (code >> 1) << q
        z |= (code & 1) << q
    return x, z


def decode(x: int, z: int, n: int) -> str:
    return "".join(_FROM_CODE[(((x >> q) & 1) << 1) | ((z >> q) & 1)] for q in range(n))


def to_vector(row: str) -> int:
    """Pack a heart-free row into one integer.

    Qubit 0 occupies the two most significant bits (x above z), so the
    highest set bit is the leftmost column in the order x0, z0, x1, z1, ...
    Heart cells are packed as I.
    """
    v = 0
    for c in row:
        v = (v << 2) | _CODE.get(c, 0)
    return v


def from_vector(v: int, n: int) -> str:
    return "".join(_FROM_CODE[(v >> (2 * (n - 1 - q))) & 0b11] for q in range(n))


def column_mask(n: int, columns) -> int:
    """Vector mask covering both bits of the given qubit columns."""
    m = 0
    for q in columns:
        m |= 0b11 << (2 * (n - 1 - q))
    return m


def conj_1q(gate: str, c: str) -> str:
    """Conjugate one cell by a single-qubit Clifford gate."""
    if gate not in _CONJ_1Q:
        raise ValueError(f"not a one-qubit Clifford gate: {gate!r}")
    _check_cell(c)
    if c == HEART:
        return HEART
    return _CONJ_1Q[gate][c]


def conj_cx(pair: tuple[str, str]) -> tuple[str, str]:
    """Conjugate a (control, target) cell pair by CX.

    A heart on either side turns both cells into hearts.
    """
    c, t = pair
    _check_cell(c)
    _check_cell(t)
    if c == HEART or t == HEART:
        return HEART, HEART
    return _CONJ_CX[c, t]


def t_blocks(c: str) -> bool:
    """True if this cell keeps a row from commuting with Z on its qubit."""
    _check_cell(c)
    return c not in ("I", "Z")


def single(n: int, q: int, c: str) -> str:
    """The row with ``c`` at column ``q`` and I elsewhere."""
    return "I" * q + c + "I" * (n - q - 1)


def conj_row_1q(gate: str, row: str, q: int) -> str:
    return row[:q] + conj_1q(gate, row[q]) + row[q + 1:]


def conj_row_cx(row: str, c: int, t: int) -> str:
    if c == t:
        raise ValueError("CX needs distinct control and target")
    cells = list(row)
    cells[c], cells[t] = conj_cx((cells[c], cells[t]))
    return "".join(cells)
