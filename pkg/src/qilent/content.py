"""Block contents shared by both abstract domains."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


class _Singleton:
    _name = ""
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return self._name

    def __reduce__(self):
        return (type(self), ())


class Identity(_Singleton):
    """The maximally mixed single qubit (bottom of the content order)."""

    _name = "IDENTITY"


class Opaque(_Singleton):
    """No stabilizer information for the block (top of the content order)."""

    _name = "OPAQUE"


IDENTITY = Identity()
OPAQUE = Opaque()


@dataclass(frozen=True)
class Block:
    qubits: tuple[int, ...]
    content: Any

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(sorted(self.qubits)))

    def local(self, q: int) -> int:
        return self.qubits.index(q)
