"""End-to-end solver checks against the reference decision procedure."""

import random
from fractions import Fraction

import pytest

from relucheck.compiler import compile_property
from relucheck.lang import (
    And,
    ArgmaxIs,
    Assignment,
    Compare,
    DistBound,
    GT,
    Implies,
    LE,
    LinExpr,
    LT,
    NetworkDecl,
    Not,
    Or,
    Property,
    ScalarRef,
    TrueF,
    VecEq,
    VectorVar,
    bind,
)
from relucheck.replay import replay
from relucheck.solver import (
    FALSIFIED,
    UNKNOWN,
    VERIFIED,
    SolverConfig,
    solve,
)
from relucheck.solver.search import extract_counterexample

from conftest import mk_net, random_network
from oracle import brute_force_decide


def _net_relus(net) -> int:
    return sum(l.size for l in net.layers if l.activation == "relu")


def _rand_post(rng: random.Random, dims: dict[str, int], depth: int):
    names = sorted(dims)
    if depth == 0 or rng.random() < 0.4:
        kind = rng.randrange(5)
        if kind == 0:
            v = rng.choice(names)
            return ArgmaxIs(v, rng.randrange(dims[v]))
        if kind in (1, 2):
            pairs = [
                (a, b)
                for a in names
                for b in names
                if a < b and dims[a] == dims[b]
            ]
            if pairs:
                a, b = rng.choice(pairs)
                if kind == 1:
                    op = rng.choice((LE, GT))
                    return DistBound(a, b, op, Fraction(rng.randint(0, 3), 2))
                return VecEq(a, b)
        terms = []
        for _ in range(rng.randint(1, 2)):
            v = rng.choice(names)
            c = rng.randint(-2, 2) or 1
            terms.append((Fraction(c), ScalarRef(v, rng.randrange(dims[v]))))
        op = rng.choice(("<=", "<", ">=", ">", "==", "!="))
        return Compare(
            LinExpr(tuple(terms)), op, LinExpr((), Fraction(rng.randint(-2, 2), 2))
        )
    a = _rand_post(rng, dims, depth - 1)
    b = _rand_post(rng, dims, depth - 1)
    return rng.choice((And(a, b), Or(a, b), Implies(a, b), Not(a)))


def make_random_case(rng: random.Random, max_relus: int = 8):
    """Random bound property + networks with a bounded relu count."""
    input_dim = rng.randint(1, 2)
    while True:
        nets = {"f": random_network(rng, "f", input_dim=input_dim)}
        two = rng.random() < 0.5
        if two:
            nets["g"] = random_network(rng, "g", input_dim=input_dim)
        if sum(_net_relus(n) for n in nets.values()) <= max_relus:
            break
    decls = [NetworkDecl("nuv", "f", "f.json")]
    assigns = [Assignment("y1", "f", "x")]
    variables = [VectorVar("x"), VectorVar("y1")]
    if two:
        decls.append(NetworkDecl("spec", "g", "g.json"))
        assigns.append(Assignment("y2", "g", "x"))
        variables.append(VectorVar("y2"))

    box: list = []
    if rng.random() < 0.85:
        for i in range(input_dim):
            box.append(
                Compare(
                    LinExpr((), Fraction(0)),
                    LE,
                    LinExpr(((Fraction(1), ScalarRef("x", i)),)),
                )
            )
            box.append(
                Compare(
                    LinExpr(((Fraction(1), ScalarRef("x", i)),)),
                    LE,
                    LinExpr((), Fraction(1)),
                )
            )
    pre = TrueF()
    for atom in box:
        pre = And(pre, atom) if not isinstance(pre, TrueF) else atom

    dims = {"y1": nets["f"].output_dim}
    if two:
        dims["y2"] = nets["g"].output_dim
    dims["x"] = input_dim
    post = _rand_post(rng, dims, rng.randint(0, 2))

    prop = Property(
        networks=tuple(decls),
        pre=pre,
        assigns=tuple(assigns),
        post=post,
        variables=tuple(variables),
    )
    prop = bind(prop, nets)
    return prop, nets, compile_property(prop, nets)


def test_verdicts_match_phase_enumeration(rng):
    counts = {VERIFIED: 0, FALSIFIED: 0}
    for k in range(120):
        prop, nets, vc = make_random_case(rng)
        want = FALSIFIED if brute_force_decide(vc) else VERIFIED
        result = solve(vc, SolverConfig(timeout=120.0))
        assert result.verdict == want, f"case {k}: {result.verdict} != {want}"
        counts[result.verdict] += 1
        if result.verdict == FALSIFIED:
            inputs = {}
            for name in prop.input_names():
                ids = vc.varmap.vectors[name]
                inputs[name] = tuple(result.model[v] for v in ids)
            outcome = replay(prop, nets, inputs)
            assert outcome.confirmed, outcome.message
    # the generator has to produce a healthy mix or the test means little
    assert counts[VERIFIED] >= 20 and counts[FALSIFIED] >= 20, counts


def test_solver_is_deterministic(rng):
    for _ in range(10):
        prop, nets, vc = make_random_case(rng)
        r1 = solve(vc, SolverConfig(timeout=60.0))
        r2 = solve(vc, SolverConfig(timeout=60.0))
        assert r1.verdict == r2.verdict
        assert r1.model == r2.model
        assert (r1.stats.splits, r1.stats.pivots, r1.stats.propagations) == (
            r2.stats.splits,
            r2.stats.pivots,
            r2.stats.propagations,
        )


def test_parallel_matches_sequential(rng):
    agree = 0
    for _ in range(12):
        prop, nets, vc = make_random_case(rng, max_relus=6)
        seq = solve(vc, SolverConfig(timeout=60.0, threads=1))
        par = solve(vc, SolverConfig(timeout=60.0, threads=2))
        assert par.verdict == seq.verdict
        if par.verdict == FALSIFIED:
            inputs = {
                name: tuple(par.model[v] for v in vc.varmap.vectors[name])
                for name in prop.input_names()
            }
            assert replay(prop, nets, inputs).confirmed
        agree += 1
    assert agree == 12


def test_zero_timeout_reports_unknown(rng):
    prop, nets, vc = make_random_case(rng)
    result = solve(vc, SolverConfig(timeout=0.0))
    assert result.verdict == UNKNOWN
    assert result.reason == "timeout"


def test_counterexample_extraction_covers_all_ports(rng):
    for _ in range(30):
        prop, nets, vc = make_random_case(rng)
        result = solve(vc, SolverConfig(timeout=60.0))
        if result.verdict != FALSIFIED:
            continue
        steps = extract_counterexample(result.model, vc.varmap)
        assert len(steps) == len(prop.assigns)
        for step, assign in zip(steps, prop.assigns):
            assert step["network"] == assign.network
            net = nets[assign.network]
            assert len(step["input"]) == net.input_dim
            assert len(step["output"]) == net.output_dim
            # the model's output window must be the actual network output
            from relucheck.network import evaluate

            out, _ = evaluate(net, step["input"])
            assert tuple(step["output"]) == out


def test_no_relu_network_is_pure_lp():
    nets = {"f": mk_net("f", 1, [([[2]], ["1/2"], "linear")])}
    prop = Property(
        networks=(NetworkDecl("nuv", "f", "f"),),
        pre=Compare(
            LinExpr((), Fraction(0)), LE, LinExpr(((Fraction(1), ScalarRef("x", 0)),))
        ),
        assigns=(Assignment("y", "f", "x"),),
        post=Compare(
            LinExpr(((Fraction(1), ScalarRef("y", 0)),)), GT, LinExpr((), Fraction(0))
        ),
        variables=(VectorVar("x"), VectorVar("y")),
    )
    prop = bind(prop, nets)
    vc = compile_property(prop, nets)
    assert not vc.relus
    result = solve(vc)
    # y = 2x + 1/2 with x >= 0 is always > 0: verified
    assert result.verdict == VERIFIED
    assert result.stats.splits == 0
