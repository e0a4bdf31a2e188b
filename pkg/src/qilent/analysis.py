"""Abstract semantics of QIL over the stabilizer domain ("c") and the
extended stabilizer domain ("e").

Both interpreters share the statement walk; they differ in how T gates,
measurements, splitting and joins are handled.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from . import qil
from .content import IDENTITY, OPAQUE, Block
from .domain import X1, Z1, Assignment, join_approx, join_c
from .extended import ExtArray, add_heart, meas_e_block, tensor_e, update_e
from .pauli import t_blocks
from .stabilizer import StabArray, conj_gate, meas_st, permute, update

DOMAINS = ("c", "e")


class AnalysisError(RuntimeError):
    pass


def default_max_iters(fallback: int) -> int:
    value = os.environ.get("QILENT_MAX_ITERS")
    return int(value) if value else fallback


@dataclass
class AnalysisConfig:
    domain: str = "e"
    max_while_iters: int = field(default_factory=lambda: default_max_iters(1024))
    trace: bool = False
    strict_paper: bool = False

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.max_while_iters < 1:
            raise ValueError("max_while_iters must be at least 1")


# content helpers --------------------------------------------------------------

def conj_content(content, gate: str, local):
    if content is IDENTITY or content is OPAQUE:
        return content
    return conj_gate(gate, local, content)


def merge(a: Block, b: Block, tensor=tensor_e):
    """Tensor two blocks into one with columns in ascending qubit order."""
    qubits = a.qubits + b.qubits
    content = tensor(a.content, b.content)
    order = sorted(range(len(qubits)), key=lambda k: qubits[k])
    if content is not OPAQUE:
        content = permute(content, order)
    return tuple(qubits[k] for k in order), content


def commutes_with_z(content, local: int) -> bool:
    if content is IDENTITY:
        return True
    if content is OPAQUE:
        return False
    return not any(t_blocks(r[local]) for r in content.rows)


# measurement ------------------------------------------------------------------

def meas_c(i: int, alpha: Assignment) -> Assignment:
    b = alpha.block(i)
    if len(b.qubits) == 1:
        return alpha.replace(i, Z1)
    if b.content is OPAQUE:
        rest = tuple(q for q in b.qubits if q != i)
        return alpha.replace(i, [Block((i,), Z1), Block(rest, OPAQUE)])
    measured = meas_st(b.local(i), b.content)
    return alpha.replace(i, update(b.qubits, b.qubits, measured))


def meas_e(i: int, gamma: Assignment) -> Assignment:
    b = gamma.block(i)
    c = b.content
    if len(b.qubits) == 1:
        return gamma.replace(i, Z1)
    rest = tuple(q for q in b.qubits if q != i)
    if isinstance(c, StabArray) and c.full_rank:
        return gamma.replace(i, update(b.qubits, b.qubits, meas_st(b.local(i), c)))
    if c is not OPAQUE:
        remainder = meas_e_block(b.local(i), c)
        if remainder is not None:
            return gamma.replace(i, [Block((i,), Z1)] + update_e(rest, rest, remainder))
    return gamma.replace(i, [Block((i,), Z1), Block(rest, OPAQUE)])


# interpreter ------------------------------------------------------------------

class Interpreter:
    """Runs one abstract semantics; ``trace`` collects (point, snapshot) pairs."""

    def __init__(self, config: AnalysisConfig | None = None):
        self.config = config or AnalysisConfig()
        self.trace: list[tuple[str, Assignment]] = []

    @property
    def extended(self) -> bool:
        return self.config.domain == "e"

    def meas(self, i: int, a: Assignment) -> Assignment:
        return meas_e(i, a) if self.extended else meas_c(i, a)

    def join(self, a: Assignment, b: Assignment) -> Assignment:
        return join_approx(a, b) if self.extended else join_c(a, b)

    def split(self, J, A, content):
        return update_e(J, A, content) if self.extended else update(J, A, content)

    def run(self, program, start: Assignment) -> Assignment:
        body = program.body if isinstance(program, qil.Program) else program
        self.trace = []
        return self.exec(body, start, "")

    def _record(self, point: str, a: Assignment):
        if self.config.trace:
            self.trace.append((point, a))

    def exec(self, s, a: Assignment, path: str) -> Assignment:
        if isinstance(s, qil.Seq):
            for k, x in enumerate(qil.flatten(s)):
                a = self.exec(x, a, f"{path}{k}.")
            return a
        point = path + qil.short(s)
        if isinstance(s, qil.Skip):
            out = a
        elif isinstance(s, qil.Gate1):
            out = self.t_gate(s.q, a) if s.gate == "T" else self.gate1(s.gate, s.q, a)
        elif isinstance(s, qil.CX):
            out = self.cx(s.c, s.t, a)
        elif isinstance(s, qil.If):
            m = self.meas(s.q, a)
            out = self.join(
                self.exec(s.then, m, point + "/then/"),
                self.exec(s.else_, m, point + "/else/"),
            )
        elif isinstance(s, qil.While):
            out = self.while_fix(s.q, s.body, a, point + "/body/")
        elif isinstance(s, (qil.Meas, qil.Init)):
            raise ValueError("desugar the program before analysis")
        else:
            raise TypeError(f"not a statement: {s!r}")
        self._record(point, out)
        return out

    def gate1(self, gate: str, i: int, a: Assignment) -> Assignment:
        b = a.block(i)
        return a.replace(i, conj_content(b.content, gate, (b.local(i),)))

    def t_gate(self, i: int, a: Assignment) -> Assignment:
        b = a.block(i)
        if commutes_with_z(b.content, b.local(i)):
            return a
        if self.extended and b.content is not OPAQUE:
            return a.replace(i, add_heart(b.local(i), b.content))
        return a.replace(i, OPAQUE)

    def cx(self, i: int, j: int, a: Assignment) -> Assignment:
        bi, bj = a.block(i), a.block(j)
        if bi.qubits == bj.qubits:
            conj = conj_content(bi.content, "CX", (bi.local(i), bi.local(j)))
            return a.replace(i, self.split({i, j}, bi.qubits, conj))
        ci, cj = bi.content, bj.content
        if ci == Z1 or cj == X1 or (ci is IDENTITY and cj is IDENTITY):
            return a
        if ci is IDENTITY:
            return a.replace(i, Z1)
        if cj is IDENTITY:
            return a.replace(j, X1)
        qubits, content = merge(bi, bj)
        content = conj_content(content, "CX", (qubits.index(i), qubits.index(j)))
        if self.config.strict_paper:
            return a.replace(i, [Block(qubits, content)], j=j)
        return a.replace(i, self.split({i, j}, qubits, content), j=j)

    def while_fix(self, i: int, body, start: Assignment, path: str = "") -> Assignment:
        """Join of meas(i, g_n) over g_0 = start, g_{n+1} = body(meas(i, g_n)).

        The sequence g_n is deterministic over a finite set, so it becomes
        periodic; once a state repeats every term of the join has been seen.
        """
        seen = {start}
        g = start
        acc = None
        for _ in range(self.config.max_while_iters):
            m = self.meas(i, g)
            acc = m if acc is None else self.join(acc, m)
            g = self.exec(body, m, path)
            if g in seen:
                # the extended join only ever returns normal forms
                return self.join(acc, acc) if self.extended else acc
            seen.add(g)
        raise AnalysisError(
            f"while q{i}: no fixpoint after {self.config.max_while_iters} iterations"
        )


def interp_c(s, alpha: Assignment, **options) -> Assignment:
    return Interpreter(AnalysisConfig(domain="c", **options)).run(s, alpha)


def interp_e(s, gamma: Assignment, **options) -> Assignment:
    return Interpreter(AnalysisConfig(domain="e", **options)).run(s, gamma)


def analyze(program: qil.Program, start: Assignment | None = None, config: AnalysisConfig | None = None):
    """Analyse a program; returns (final assignment, trace)."""
    from .domain import top

    interp = Interpreter(config)
    if start is None:
        start = top(program.n_qubits)
    if start.n_qubits != program.n_qubits:
        raise ValueError(f"start assignment has {start.n_qubits} qubits, program has {program.n_qubits}")
    if not start.well_formed(interp.config.domain):
        raise ValueError("start assignment is not well formed for this domain")
    out = interp.run(program, start)
    return out, interp.trace
