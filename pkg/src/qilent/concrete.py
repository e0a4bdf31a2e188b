"""Concrete semantics of QIL on dense states.

Qubit 0 is the most significant tensor factor.  :func:`sem_density` works on
partial density matrices; :func:`sem_ensemble` follows every measurement
branch of a pure-state mixture and mixes back to the same matrix.

A ``while q do C od`` runs ``C`` on the outcome-0 part and exits on
outcome 1.  Both simulators cut a loop once the continuing weight drops
below ``tol`` or after ``max_while_iters`` rounds; what is left is reported
as residual trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qil
from .analysis import default_max_iters

GATES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "S": np.diag([1, 1j]).astype(complex),
    "T": np.diag([1, np.exp(1j * np.pi / 4)]),
}
CX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)

DENSITY_LIMIT = 10
ENSEMBLE_LIMIT = 16


@dataclass
class SimConfig:
    max_while_iters: int = field(default_factory=lambda: default_max_iters(256))
    tol: float = 1e-12


@dataclass
class SimReport:
    """Weight left inside loops that hit the iteration cap."""

    residual_trace: float = 0.0
    truncated_loops: int = 0

    @property
    def warning(self) -> str | None:
        if self.residual_trace > 1e-12:
            return f"{self.truncated_loops} loop(s) cut off with residual trace {self.residual_trace:.3e}"
        return None


def pauli_matrix(row: str) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for c in row:
        out = np.kron(out, GATES[c])
    return out


def apply_op(state: np.ndarray, op: np.ndarray, qubits, n: int, offset: int = 0) -> np.ndarray:
    """Apply a 2^k x 2^k operator to tensor axes ``offset + q`` of ``state``."""
    k = len(qubits)
    t = op.reshape((2,) * (2 * k))
    axes = [offset + q for q in qubits]
    out = np.tensordot(t, state, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


# density matrices -------------------------------------------------------------

def zero_density(n: int) -> np.ndarray:
    rho = np.zeros((2**n, 2**n), dtype=complex)
    rho[0, 0] = 1
    return rho


def conjugate(rho: np.ndarray, op: np.ndarray, qubits, n: int) -> np.ndarray:
    t = rho.reshape((2,) * (2 * n))
    t = apply_op(t, op, qubits, n)
    t = apply_op(t, op.conj(), qubits, n, offset=n)
    return t.reshape(2**n, 2**n)


def _n_of(rho: np.ndarray) -> int:
    return int(round(np.log2(rho.shape[0])))


def sem_density(s, rho: np.ndarray, config: SimConfig | None = None, report: SimReport | None = None) -> np.ndarray:
    config = config or SimConfig()
    report = report if report is not None else SimReport()
    n = _n_of(rho)

    def run(s, rho):
        if isinstance(s, qil.Skip):
            return rho
        if isinstance(s, qil.Seq):
            for x in qil.flatten(s):
                rho = run(x, rho)
            return rho
        if isinstance(s, qil.Gate1):
            return conjugate(rho, GATES[s.gate], (s.q,), n)
        if isinstance(s, qil.CX):
            return conjugate(rho, CX, (s.c, s.t), n)
        if isinstance(s, qil.If):
            return run(s.then, conjugate(rho, P0, (s.q,), n)) + run(s.else_, conjugate(rho, P1, (s.q,), n))
        if isinstance(s, qil.While):
            out = np.zeros_like(rho)
            cur = rho
            for _ in range(config.max_while_iters):
                out = out + conjugate(cur, P1, (s.q,), n)
                cur = run(s.body, conjugate(cur, P0, (s.q,), n))
                if np.trace(cur).real < config.tol:
                    break
            else:
                left = np.trace(cur).real
                if left >= config.tol:
                    report.residual_trace += left
                    report.truncated_loops += 1
            return out
        raise TypeError(f"not a core statement: {s!r}")

    body = s.body if isinstance(s, qil.Program) else s
    return run(body, rho)


# ensembles -------------------------------------------------------------------

@dataclass
class Ensemble:
    n: int
    branches: list = field(default_factory=list)  # (weight, unit vector)
    discarded_mass: float = 0.0

    @classmethod
    def pure(cls, vector: np.ndarray) -> "Ensemble":
        v = np.asarray(vector, dtype=complex).ravel()
        n = int(round(np.log2(v.size)))
        norm = np.linalg.norm(v)
        return cls(n, [(float(norm**2), v / norm)])

    @classmethod
    def zeros(cls, n: int) -> "Ensemble":
        v = np.zeros(2**n, dtype=complex)
        v[0] = 1
        return cls(n, [(1.0, v)])

    @property
    def weight(self) -> float:
        return sum(w for w, _ in self.branches)

    def mix(self) -> np.ndarray:
        rho = np.zeros((2**self.n, 2**self.n), dtype=complex)
        for w, v in self.branches:
            rho += w * np.outer(v, v.conj())
        return rho


def _phase_key(v: np.ndarray):
    k = int(np.argmax(np.abs(v) > 1e-9))
    u = v * (abs(v[k]) / v[k])
    return tuple(np.round(u, 9).view(float))


def _merge(branches):
    """Combine branches that are the same ray."""
    merged: dict = {}
    for w, v in branches:
        key = _phase_key(v)
        if key in merged:
            merged[key] = (merged[key][0] + w, merged[key][1])
        else:
            merged[key] = (w, v)
    return list(merged.values())


def _apply_vec(v: np.ndarray, op: np.ndarray, qubits, n: int) -> np.ndarray:
    return apply_op(v.reshape((2,) * n), op, qubits, n).reshape(-1)


def _project(e: Ensemble, q: int, proj: np.ndarray, tol: float) -> Ensemble:
    out = Ensemble(e.n, [], e.discarded_mass)
    for w, v in e.branches:
        u = _apply_vec(v, proj, (q,), e.n)
        p = float(np.vdot(u, u).real)
        if p == 0.0:
            continue
        if w * p < tol:
            out.discarded_mass += w * p
            continue
        out.branches.append((w * p, u / np.sqrt(p)))
    return out


def sem_ensemble(s, e: Ensemble, config: SimConfig | None = None, report: SimReport | None = None) -> Ensemble:
    config = config or SimConfig()
    report = report if report is not None else SimReport()
    n = e.n

    def unitary(e, op, qubits):
        return Ensemble(n, [(w, _apply_vec(v, op, qubits, n)) for w, v in e.branches], e.discarded_mass)

    def run(s, e):
        if isinstance(s, qil.Skip):
            return e
        if isinstance(s, qil.Seq):
            for x in qil.flatten(s):
                e = run(x, e)
            return e
        if isinstance(s, qil.Gate1):
            return unitary(e, GATES[s.gate], (s.q,))
        if isinstance(s, qil.CX):
            return unitary(e, CX, (s.c, s.t))
        if isinstance(s, qil.If):
            zero = _project(e, s.q, P0, config.tol)
            one = _project(e, s.q, P1, config.tol)
            one.discarded_mass -= e.discarded_mass
            a = run(s.then, zero)
            b = run(s.else_, one)
            return Ensemble(n, _merge(a.branches + b.branches), a.discarded_mass + b.discarded_mass)
        if isinstance(s, qil.While):
            exits = []
            mass = e.discarded_mass
            cur = Ensemble(n, e.branches, 0.0)
            for _ in range(config.max_while_iters):
                leave = _project(cur, s.q, P1, config.tol)
                stay = _project(cur, s.q, P0, config.tol)
                mass += leave.discarded_mass + stay.discarded_mass
                exits.extend(leave.branches)
                stay.discarded_mass = 0.0
                cur = run(s.body, stay)
                mass += cur.discarded_mass
                cur.discarded_mass = 0.0
                if cur.weight < config.tol:
                    mass += cur.weight
                    break
            else:
                if cur.weight >= config.tol:
                    report.residual_trace += cur.weight
                    report.truncated_loops += 1
            return Ensemble(n, _merge(exits), mass)
        raise TypeError(f"not a core statement: {s!r}")

    body = s.body if isinstance(s, qil.Program) else s
    return run(body, e)
