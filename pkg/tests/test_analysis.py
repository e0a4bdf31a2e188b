import random
from pathlib import Path

import pytest

from qilent import qil
from qilent.analysis import (
    AnalysisConfig,
    AnalysisError,
    Interpreter,
    analyze,
    interp_c,
    interp_e,
    meas_c,
    meas_e,
)
from qilent.content import IDENTITY, OPAQUE, Block
from qilent.domain import X1, Z1, Assignment, leq_c, normal_form, stab, top, zeros
from qilent.extended import ExtArray
from qilent.soundness import GenConfig, gen_program, random_above, random_assignment

PROGRAMS = Path(__file__).resolve().parent.parent / "programs"
BELL = stab("XX", "ZZ")


def load(name):
    return qil.parse((PROGRAMS / f"{name}.qil").read_text())


def A(n, *blocks):
    return Assignment(n, [Block(tuple(q), c) for q, c in blocks])


def Y1():
    return stab("Y")


# golden programs ---------------------------------------------------------------

def test_ghz():
    assert interp_c(load("ghz"), zeros(3)) == A(3, ((0, 1, 2), stab("XXX", "ZZI", "IZZ")))


def test_sep0():
    assert interp_c(load("sep0"), zeros(3)) == A(3, ((0,), X1), ((1,), Z1), ((2,), Z1))


def test_sep1():
    assert interp_c(load("sep1"), zeros(3)) == zeros(3)


def test_nsep():
    assert interp_c(load("nsep"), zeros(3)) == A(3, ((0,), Z1), ((1, 2), BELL))


def test_exm0():
    start = Assignment.from_json((PROGRAMS / "exm0_init.json").read_text())
    assert start == A(4, ((0, 1), BELL), ((2, 3), BELL))
    assert interp_c(load("exm0"), start) == A(4, ((0,), OPAQUE), ((1,), Z1), ((2, 3), OPAQUE))


def test_exm1_both_domains():
    assert interp_e(load("exm1"), zeros(3)) == zeros(3)
    assert interp_c(load("exm1"), zeros(3)) == A(3, ((0,), Z1), ((1, 2), OPAQUE))


def test_goldens_start_from_anything():
    # every golden program starting with init ignores the start assignment
    for name in ("ghz", "sep0", "sep1", "nsep"):
        assert interp_c(load(name), top(3)) == interp_c(load(name), zeros(3))


def test_extended_domain_agrees_on_clifford_goldens():
    for name in ("ghz", "sep0", "sep1", "nsep"):
        assert interp_e(load(name), zeros(3)) == interp_c(load(name), zeros(3))


def test_extended_results_are_at_least_as_precise():
    for name in ("ghz", "sep0", "sep1", "nsep", "exm1"):
        assert leq_c(normal_form(interp_e(load(name), zeros(3))), interp_c(load(name), zeros(3)))
    start = Assignment.from_json((PROGRAMS / "exm0_init.json").read_text())
    assert leq_c(normal_form(interp_e(load("exm0"), start)), interp_c(load("exm0"), start))


# monotonicity -------------------------------------------------------------------

def test_non_monotone_witness():
    p = load("nonmono")
    alpha = Assignment.from_json((PROGRAMS / "nonmono_alpha.json").read_text())
    beta = Assignment.from_json((PROGRAMS / "nonmono_beta.json").read_text())
    assert alpha == A(2, ((0,), IDENTITY), ((1,), Z1))
    assert beta == A(2, ((0,), X1), ((1,), Z1))
    ra, rb = interp_c(p, alpha), interp_c(p, beta)
    assert ra == top(2)
    assert rb == A(2, ((0,), Y1()), ((1,), OPAQUE))
    assert leq_c(alpha, beta)
    assert leq_c(rb, ra) and not leq_c(ra, rb)


def test_conditional_monotonicity():
    failures = []
    for k in range(500):
        rng = random.Random(k)
        n = rng.randint(1, 4)
        alpha = random_assignment(rng, n, identity=False)
        beta = random_above(rng, alpha)
        p = gen_program(GenConfig(seed=k, n_qubits=n, max_depth=8))
        if not leq_c(interp_c(p, alpha), interp_c(p, beta)):
            failures.append(k)
    assert failures == []


# individual clauses -----------------------------------------------------------

def test_meas_c_clauses():
    ghz = A(3, ((0, 1, 2), stab("XXX", "ZZI", "IZZ")))
    assert meas_c(0, ghz) == zeros(3)
    assert meas_c(0, A(1, ((0,), IDENTITY))) == zeros(1)
    assert meas_c(1, top(3)) == A(3, ((1,), Z1), ((0, 2), OPAQUE))


def test_meas_e_clauses():
    g = A(3, ((0, 1, 2), ExtArray.of("X?X", "ZZI", "ZIZ")))
    assert meas_e(0, g) == zeros(3)
    assert meas_e(0, A(2, ((0, 1), ExtArray.of("??", "ZZ")))) == A(2, ((0,), Z1), ((1,), OPAQUE))
    assert meas_e(0, A(1, ((0,), OPAQUE))) == zeros(1)
    # no row has X or Y on the measured qubit: the rest of the block is lost
    assert meas_e(0, A(3, ((0, 1, 2), stab("ZZI", "ZIZ")))) == A(3, ((0,), Z1), ((1, 2), OPAQUE))


def test_t_commuting_with_z_is_free():
    g = zeros(2)
    for domain in "ce":
        assert Interpreter(AnalysisConfig(domain=domain)).t_gate(0, g) == g
    bell = A(2, ((0, 1), BELL))
    assert Interpreter(AnalysisConfig(domain="c")).t_gate(0, bell) == top(2)
    assert Interpreter(AnalysisConfig(domain="e")).t_gate(0, bell) == A(2, ((0, 1), ExtArray.of("?X", "ZZ")))


def test_cx_clauses():
    interp = Interpreter(AnalysisConfig(domain="c"))
    assert interp.cx(0, 1, A(2, ((0,), Z1), ((1,), Y1()))) == A(2, ((0,), Z1), ((1,), Y1()))
    assert interp.cx(0, 1, A(2, ((0,), Y1()), ((1,), X1))) == A(2, ((0,), Y1()), ((1,), X1))
    assert interp.cx(0, 1, A(2, ((0,), IDENTITY), ((1,), Y1()))) == A(2, ((0,), Z1), ((1,), Y1()))
    assert interp.cx(0, 1, A(2, ((0,), Y1()), ((1,), IDENTITY))) == A(2, ((0,), Y1()), ((1,), X1))
    assert interp.cx(0, 1, A(2, ((0,), X1), ((1,), Z1))) == A(2, ((0, 1), BELL))


def test_merge_clause_matches_strict_mode():
    # multi-qubit blocks never hold single-qubit members, so the extra split
    # after a cross-block CX has nothing to remove on well-formed inputs
    assert interp_c(qil.parse("qubits 2; CX(q0,q1)"), A(2, ((0,), Y1()), ((1,), Z1))) == A(
        2, ((0, 1), stab("YX", "ZZ"))
    )
    for k in range(500):
        rng = random.Random(k)
        n = rng.randint(2, 4)
        p = gen_program(GenConfig(seed=k, n_qubits=n, max_depth=6))
        start = random_assignment(rng, n)
        assert interp_c(p, start) == interp_c(p, start, strict_paper=True)
        assert interp_e(p, start) == interp_e(p, start, strict_paper=True)


# while loops -----------------------------------------------------------------

def test_while_examples():
    for domain in "ce":
        cfg = AnalysisConfig(domain=domain)
        run = lambda src, start: analyze(qil.parse(src), start, cfg)[0]  # noqa: E731
        assert run("qubits 2; while q0 do skip od", zeros(2)) == zeros(2)
        assert run("qubits 2; while q0 do H(q1) od", zeros(2)) == A(2, ((0,), Z1), ((1,), OPAQUE))
        assert run("qubits 2; while q0 do X(q0) od", zeros(2)) == zeros(2)


def test_while_programs_terminate():
    loops = 0
    cfg = GenConfig(n_qubits=3, max_depth=6, gate_weights={"H": 2, "S": 1, "T": 1, "CX": 2, "if": 1, "while": 4})
    for k in range(200):
        p = gen_program(GenConfig(**{**cfg.__dict__, "seed": k}))
        loops += any(isinstance(s, qil.While) for s in _walk(p.body))
        for domain in "ce":
            Interpreter(AnalysisConfig(domain=domain, max_while_iters=1024)).run(p, top(3))
            Interpreter(AnalysisConfig(domain=domain, max_while_iters=1024)).run(p, zeros(3))
    assert loops >= 150


def _walk(s):
    yield s
    if isinstance(s, qil.Seq):
        yield from _walk(s.first)
        yield from _walk(s.second)
    elif isinstance(s, qil.If):
        yield from _walk(s.then)
        yield from _walk(s.else_)
    elif isinstance(s, qil.While):
        yield from _walk(s.body)


def test_iteration_bound_is_enforced(monkeypatch):
    p = qil.parse("qubits 2; while q0 do H(q1) od")
    with pytest.raises(AnalysisError):
        analyze(p, zeros(2), AnalysisConfig(domain="c", max_while_iters=1))
    monkeypatch.setenv("QILENT_MAX_ITERS", "1")
    assert AnalysisConfig().max_while_iters == 1
    with pytest.raises(AnalysisError):
        analyze(p, zeros(2), AnalysisConfig(domain="c"))


# results stay well formed -------------------------------------------------------

def test_results_are_well_formed():
    for k in range(300):
        rng = random.Random(1000 + k)
        n = rng.randint(1, 4)
        p = gen_program(GenConfig(seed=k, n_qubits=n))
        start = random_assignment(rng, n)
        assert interp_c(p, start).well_formed("c")
        assert interp_e(p, start).well_formed("e")


def test_trace_points():
    p = load("nonmono")
    beta = Assignment.from_json((PROGRAMS / "nonmono_beta.json").read_text())
    final, trace = analyze(p, beta, AnalysisConfig(domain="c", trace=True))
    assert [pt for pt, _ in trace] == ["0.CX(q0,q1)", "1.S(q1)", "2.H(q0)", "3.CX(q0,q1)", "4.T(q1)"]
    assert trace[-1][1] == final
    assert analyze(p, beta, AnalysisConfig(domain="c"))[1] == []


def test_analyze_checks_the_start():
    p = load("ghz")
    with pytest.raises(ValueError):
        analyze(p, zeros(2))
    with pytest.raises(ValueError):
        analyze(p, A(3, ((0, 1, 2), ExtArray.of("X?X", "ZZI", "ZIZ"))), AnalysisConfig(domain="c"))
