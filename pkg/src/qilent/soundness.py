"""Executable satisfaction checks and a randomized soundness harness.

Deciding separability of a mixed state is hard, so :func:`models_c` and
:func:`models_e` check a sufficient witness on the branches of an ensemble
and answer ``verified`` or ``inconclusive``.  The harness then looks for a
violation of a condition every satisfying state must meet (projector
conditions, the maximally mixed factor, and positivity of the partial
transpose across each block); only those count as hard failures.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from itertools import product

import numpy as np

from . import qil
from .analysis import AnalysisConfig, AnalysisError, Interpreter
from .concrete import CX as CX_MATRIX
from .concrete import (
    GATES,
    Ensemble,
    SimConfig,
    apply_op,
    pauli_matrix,
    sem_density,
    sem_ensemble,
)
from .content import IDENTITY, OPAQUE, Block
from .domain import Assignment, stab
from .extended import ExtArray
from .pauli import single
from .stabilizer import StabArray, conj_gate, extract_single

TOL = 1e-9

VERIFIED = "verified"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Diagnostic:
    block: tuple[int, ...]
    condition: str
    residual: float

    def to_dict(self) -> dict:
        return {"block": list(self.block), "condition": self.condition, "residual": self.residual}


@dataclass
class Verdict:
    status: str
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @classmethod
    def of(cls, diagnostics) -> "Verdict":
        diagnostics = list(diagnostics)
        return cls(INCONCLUSIVE if diagnostics else VERIFIED, diagnostics)

    @property
    def verified(self) -> bool:
        return self.status == VERIFIED


# linear algebra helpers --------------------------------------------------------

def _embed(row: str, qubits, n: int) -> str:
    cells = ["I"] * n
    for q, c in zip(qubits, row):
        cells[q] = c
    return "".join(cells)


def _apply_row(v: np.ndarray, row: str, n: int) -> np.ndarray:
    t = v.reshape((2,) * n)
    for q, c in enumerate(row):
        if c != "I":
            t = apply_op(t, GATES[c], (q,), n)
    return t.reshape(-1)


def reduced_of_vector(v: np.ndarray, qubits, n: int) -> np.ndarray:
    rest = [q for q in range(n) if q not in qubits]
    m = np.transpose(v.reshape((2,) * n), list(qubits) + rest).reshape(2 ** len(qubits), -1)
    return m @ m.conj().T


def _blocked(rho: np.ndarray, qubits, n: int) -> np.ndarray:
    """``rho`` reshaped to (dA, dB, dA, dB) with the ``qubits`` factor first."""
    rest = [q for q in range(n) if q not in qubits]
    order = list(qubits) + rest
    t = np.transpose(rho.reshape((2,) * (2 * n)), order + [n + q for q in order])
    da = 2 ** len(qubits)
    return t.reshape(da, 2**n // da, da, 2**n // da)


def partial_trace(rho: np.ndarray, keep, n: int) -> np.ndarray:
    return np.einsum("ibjb->ij", _blocked(rho, keep, n))


def _check_dims(assignment: Assignment, n: int) -> None:
    if assignment.n_qubits != n:
        raise ValueError(f"assignment over {assignment.n_qubits} qubits, state over {n}")


# witnesses -------------------------------------------------------------------

def _factorization(assignment: Assignment, e: Ensemble):
    n = e.n
    for b in assignment.blocks:
        if len(b.qubits) == n:
            continue
        worst = 0.0
        for w, v in e.branches:
            r = reduced_of_vector(v, b.qubits, n)
            worst = max(worst, 1.0 - float(np.real(np.trace(r @ r))))
        if worst > TOL:
            yield Diagnostic(b.qubits, "factorization", worst)


def _rows_of(content) -> tuple[str, ...]:
    if isinstance(content, ExtArray):
        return content.l_rows
    if isinstance(content, StabArray):
        return content.rows
    return ()


def models_c(alpha: Assignment, e: Ensemble) -> Verdict:
    """Branch-level witness for a stabilizer-domain assignment."""
    _check_dims(alpha, e.n)
    n = e.n
    diags = list(_factorization(alpha, e))
    for b in alpha.blocks:
        for row in _rows_of(b.content):
            full = _embed(row, b.qubits, n)
            worst = 0.0
            for _, v in e.branches:
                mv = _apply_row(v, full, n)
                worst = max(worst, min(np.linalg.norm(mv - v), np.linalg.norm(mv + v)))
            if worst > TOL:
                diags.append(Diagnostic(b.qubits, f"eigenvector {row}", float(worst)))
        if b.content is IDENTITY:
            reduced = sum((w * reduced_of_vector(v, b.qubits, n) for w, v in e.branches), np.zeros((2, 2)))
            residual = np.linalg.norm(reduced - e.weight / 2 * np.eye(2))
            if residual > TOL:
                diags.append(Diagnostic(b.qubits, "maximally mixed", float(residual)))
    return Verdict.of(diags)


def _projector_residuals(gamma: Assignment, rho: np.ndarray):
    n = gamma.n_qubits
    eye = np.eye(2**n)
    for b in gamma.blocks:
        for row in _rows_of(b.content):
            m = pauli_matrix(_embed(row, b.qubits, n))
            residual = np.linalg.norm((eye + m) / 2 @ rho @ (eye - m) / 2)
            if residual > TOL:
                yield Diagnostic(b.qubits, f"projector {row}", float(residual))


def _mixed_factor_residuals(gamma: Assignment, rho: np.ndarray):
    n = gamma.n_qubits
    for b in gamma.blocks:
        if b.content is not IDENTITY:
            continue
        t = _blocked(rho, b.qubits, n)
        rest = np.einsum("aiaj->ij", t)
        expected = np.einsum("ab,ij->aibj", np.eye(2) / 2, rest)
        residual = np.linalg.norm(t - expected)
        if residual > TOL:
            yield Diagnostic(b.qubits, "maximally mixed factor", float(residual))


def models_e(gamma: Assignment, rho: np.ndarray, e: Ensemble) -> Verdict:
    """Witness for an extended assignment; heart rows impose nothing."""
    _check_dims(gamma, e.n)
    if rho.shape != (2**e.n, 2**e.n):
        raise ValueError("density matrix and ensemble disagree on the qubit count")
    diags = list(_factorization(gamma, e))
    diags += _projector_residuals(gamma, rho)
    diags += _mixed_factor_residuals(gamma, rho)
    return Verdict.of(diags)


def necessary_violations(assignment: Assignment, rho: np.ndarray) -> list[Diagnostic]:
    """Conditions any satisfying state meets; a hit refutes the assignment."""
    n = assignment.n_qubits
    diags = list(_projector_residuals(assignment, rho))
    diags += _mixed_factor_residuals(assignment, rho)
    for b in assignment.blocks:
        if len(b.qubits) == n:
            continue
        t = _blocked(rho, b.qubits, n)
        pt = np.transpose(t, (2, 1, 0, 3)).reshape(2**n, 2**n)
        low = float(np.linalg.eigvalsh((pt + pt.conj().T) / 2)[0])
        if low < -TOL:
            diags.append(Diagnostic(b.qubits, "partial transpose", -low))
    return diags


# random programs -------------------------------------------------------------

DEFAULT_WEIGHTS = {"X": 1, "Y": 1, "Z": 1, "H": 3, "S": 2, "T": 2, "CX": 4, "if": 2, "while": 1}


@dataclass(frozen=True)
class GenConfig:
    """Random program shape.

    ``max_depth`` bounds the number of statements in the top-level sequence;
    ``if`` arms take at most half of what is left.  While bodies are a
    single gate.
    """

    seed: int = 0
    n_qubits: int = 3
    max_depth: int = 8
    while_allowed: bool = True
    gate_weights: dict = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))

    def __post_init__(self):
        if not 1 <= self.n_qubits <= 4:
            raise ValueError("random programs use 1 to 4 qubits")
        if self.max_depth < 1:
            raise ValueError("max_depth must be positive")


def _gate(rng: random.Random, n: int, kinds, weights):
    k = rng.choices(kinds, weights)[0]
    if k == "CX":
        c, t = rng.sample(range(n), 2)
        return qil.CX(c, t)
    return qil.Gate1(k, rng.randrange(n))


def _gen_seq(rng: random.Random, cfg: GenConfig, budget: int):
    n = cfg.n_qubits
    w = cfg.gate_weights
    kinds = [k for k in w if w[k] > 0 and not (k == "CX" and n < 2)]
    if not cfg.while_allowed:
        kinds = [k for k in kinds if k != "while"]
    gates = [k for k in kinds if k not in ("if", "while")]
    gate_w = [w[k] for k in gates]
    out = []
    for _ in range(rng.randint(1, budget)):
        k = rng.choices(kinds, [w[k] for k in kinds])[0]
        if k == "if":
            arm = max(1, budget // 2)
            out.append(qil.If(rng.randrange(n), _gen_seq(rng, cfg, arm), _gen_seq(rng, cfg, arm)))
        elif k == "while":
            out.append(qil.While(rng.randrange(n), _gate(rng, n, gates, gate_w)))
        else:
            out.append(_gate(rng, n, [k], [1]))
    return qil.seq(*out)


def gen_program(cfg: GenConfig) -> qil.Program:
    rng = random.Random(cfg.seed)
    return qil.Program(cfg.n_qubits, _gen_seq(rng, cfg, cfg.max_depth))


# random start pairs ----------------------------------------------------------

def haar_state(rng: random.Random, m: int) -> np.ndarray:
    g = np.random.default_rng(rng.getrandbits(64))
    v = g.normal(size=2**m) + 1j * g.normal(size=2**m)
    return v / np.linalg.norm(v)


def random_stabilizer_state(rng: random.Random, m: int, max_tries: int = 100):
    """A random m-qubit stabilizer state with no single-qubit stabilizer.

    Returns ``(StabArray, vector)``; the state is a random Clifford word
    applied to |0...0>.
    """
    for _ in range(max_tries):
        S = StabArray(m, tuple(single(m, q, "Z") for q in range(m)))
        v = np.zeros(2**m, dtype=complex)
        v[0] = 1
        for _ in range(rng.randint(m, 6 * m)):
            if m > 1 and rng.random() < 0.4:
                c, t = rng.sample(range(m), 2)
                S = conj_gate("CX", (c, t), S)
                v = apply_op(v.reshape((2,) * m), CX_MATRIX, (c, t), m).reshape(-1)
            else:
                g = rng.choice("XYZHS")
                q = rng.randrange(m)
                S = conj_gate(g, (q,), S)
                v = apply_op(v.reshape((2,) * m), GATES[g], (q,), m).reshape(-1)
        if m == 1 or not any(extract_single(q, S) for q in range(m)):
            return stab(*S.rows), v
    raise RuntimeError(f"no entangled {m}-qubit stabilizer state found")


def random_partition(rng: random.Random, n: int) -> list[tuple[int, ...]]:
    labels = [rng.randrange(n) for _ in range(n)]
    groups: dict[int, list[int]] = {}
    for q, lab in enumerate(labels):
        groups.setdefault(lab, []).append(q)
    return sorted((tuple(g) for g in groups.values()), key=lambda g: g[0])


def random_assignment(rng: random.Random, n: int, identity: bool = True, opaque: bool = True) -> Assignment:
    blocks = []
    for A in random_partition(rng, n):
        choices = ["stab"] + (["opaque"] if opaque else []) + (["identity"] if identity and len(A) == 1 else [])
        pick = rng.choice(choices)
        if pick == "stab":
            blocks.append(Block(A, random_stabilizer_state(rng, len(A))[0]))
        elif pick == "opaque":
            blocks.append(Block(A, OPAQUE))
        else:
            blocks.append(Block(A, IDENTITY))
    return Assignment(n, blocks)


def random_above(rng: random.Random, alpha: Assignment) -> Assignment:
    """A random assignment at or above ``alpha`` in the stabilizer-domain order."""
    blocks = list(alpha.blocks)
    while len(blocks) > 1 and rng.random() < 0.4:
        a, b = rng.sample(range(len(blocks)), 2)
        merged = Block(tuple(sorted(blocks[a].qubits + blocks[b].qubits)), OPAQUE)
        blocks = [x for k, x in enumerate(blocks) if k not in (a, b)] + [merged]
    blocks = [Block(b.qubits, OPAQUE) if rng.random() < 0.25 else b for b in blocks]
    return Assignment(alpha.n_qubits, blocks)


def start_pair(rng: random.Random, n: int, identity: bool = True):
    """A random assignment together with an ensemble that satisfies it."""
    alpha_blocks = []
    factors = []  # per block: list of (weight, vector on the block)
    for A in random_partition(rng, n):
        m = len(A)
        pick = rng.choice(["stab", "stab", "opaque"] + (["identity"] if identity and m == 1 else []))
        if pick == "stab":
            S, v = random_stabilizer_state(rng, m)
            alpha_blocks.append(Block(A, S))
            factors.append((A, [(1.0, v)]))
        elif pick == "opaque":
            alpha_blocks.append(Block(A, OPAQUE))
            factors.append((A, [(1.0, haar_state(rng, m))]))
        else:
            alpha_blocks.append(Block(A, IDENTITY))
            factors.append((A, [(0.5, np.array([1, 0], dtype=complex)), (0.5, np.array([0, 1], dtype=complex))]))
    order = [q for A, _ in factors for q in A]
    branches = []
    for combo in product(*(f for _, f in factors)):
        w = 1.0
        v = np.ones(1, dtype=complex)
        for wk, vk in combo:
            w *= wk
            v = np.kron(v, vk)
        t = np.transpose(v.reshape((2,) * n), np.argsort(order))
        branches.append((w, t.reshape(-1)))
    return Assignment(n, alpha_blocks), Ensemble(n, branches)


# the suite -------------------------------------------------------------------

@dataclass
class CaseResult:
    domain: str
    verdict: Verdict
    hard: list[Diagnostic]


def check_case(program: qil.Program, alpha: Assignment, e: Ensemble, domains=("c", "e"), sim: SimConfig | None = None):
    sim = sim or SimConfig()
    out_e = sem_ensemble(program, e, sim)
    rho = sem_density(program, e.mix(), sim)
    results = []
    for d in domains:
        abstract = Interpreter(AnalysisConfig(domain=d)).run(program, alpha)
        verdict = models_c(abstract, out_e) if d == "c" else models_e(abstract, rho, out_e)
        results.append((abstract, CaseResult(d, verdict, necessary_violations(abstract, rho))))
    return rho, results


def _dump(program, alpha, e, abstract, rho, result: CaseResult) -> dict:
    return {
        "domain": result.domain,
        "program": qil.pretty(program),
        "start_assignment": alpha.to_dict(),
        "start_state": [[w, [[z.real, z.imag] for z in v]] for w, v in e.branches],
        "abstract_result": abstract.to_dict(),
        "concrete_result": [[[z.real, z.imag] for z in row] for row in rho],
        "violations": [d.to_dict() for d in result.hard],
    }


def soundness_suite(cfg: GenConfig, cases: int, domains=("c", "e"), program: qil.Program | None = None) -> dict:
    """Run ``cases`` random (program, start pair) checks.

    With ``program`` given only the start pairs are random.
    """
    report = {"cases": 0, "verified": 0, "inconclusive": 0, "hard_failures": 0, "counterexamples": []}
    for k in range(cases):
        case_seed = cfg.seed * 1_000_003 + k
        prog = program or gen_program(replace(cfg, seed=case_seed))
        rng = random.Random(case_seed ^ 0x5EED)
        alpha, e = start_pair(rng, prog.n_qubits)
        try:
            rho, results = check_case(prog, alpha, e, domains)
        except AnalysisError as exc:
            report["cases"] += 1
            report["hard_failures"] += 1
            report["counterexamples"].append({"program": qil.pretty(prog), "error": str(exc)})
            continue
        for abstract, r in results:
            report["cases"] += 1
            if r.hard:
                report["hard_failures"] += 1
                report["counterexamples"].append(_dump(prog, alpha, e, abstract, rho, r))
            elif r.verdict.verified:
                report["verified"] += 1
            else:
                report["inconclusive"] += 1
    return report
