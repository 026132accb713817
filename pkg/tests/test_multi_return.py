"""Tuple-returning transducers: let semantics, oracle, and membership."""

import random

import pytest

from mttkit import (
    App,
    ArityMismatch,
    BadInitialRank,
    Call,
    EnvLimitExceeded,
    MrLet,
    MrMtt,
    MrRhs,
    Mtt,
    Out,
    Param,
    RankedAlphabet,
    Tree,
    ZVar,
    eval_mr_io,
    eval_mr_state,
    member_io,
    member_mr_io,
    oracle_eval,
    parse_term,
    validate_mr,
)
from mttkit.families import reverse_pair_instance, reverse_pair_mrtt

from helpers import HARNESS_BUDGET, all_inputs, io_output_set, mutations, random_mtt

CHAIN = RankedAlphabet({"s": 1, "z": 0})


def _schain(k: int) -> Tree:
    return parse_term("s(" * k + "z" + ")" * k)


def _embed(m: Mtt) -> MrMtt:
    """A plain transducer as a dimension-1 tuple transducer: nested calls
    become consecutive single-target lets, evaluated in argument order."""

    def conv(rhs, lets, counter):
        if isinstance(rhs, Param):
            return rhs
        if isinstance(rhs, Out):
            return Out(rhs.sym, tuple(conv(a, lets, counter) for a in rhs.args))
        args = tuple(conv(a, lets, counter) for a in rhs.args)
        counter[0] += 1
        lets.append(MrLet((counter[0],), rhs.state, rhs.child, args))
        return ZVar(counter[0])

    rules = {}
    for key, alts in m.rules.items():
        out = []
        for rhs in alts:
            lets: list = []
            counter = [0]
            term = conv(rhs, lets, counter)
            out.append(MrRhs(tuple(lets), (term,)))
        rules[key] = tuple(out)
    return MrMtt(
        name=m.name + "_mr",
        input_alphabet=m.input_alphabet,
        output_alphabet=m.output_alphabet,
        ranks=dict(m.states),
        dims={q: 1 for q in m.states},
        initial=m.initial,
        rules=rules,
    )


def test_reverse_pair_worked_example():
    m = reverse_pair_mrtt()
    s, t = reverse_pair_instance("aab")
    assert s == _schain(3)
    assert t == parse_term("r(a(a(b(e))),B(A(A(E))))")
    assert member_mr_io(m, s, t)
    assert t in eval_mr_io(m, s)


def test_reverse_pair_rejects_non_reverse():
    m = reverse_pair_mrtt()
    s = _schain(3)
    assert not member_mr_io(m, s, parse_term("r(a(a(b(e))),A(A(B(E))))"))


def test_base_rule_output():
    m = reverse_pair_mrtt()
    assert member_mr_io(m, parse_term("z"), parse_term("r(e,E)"))
    assert eval_mr_io(m, parse_term("z")) == {parse_term("r(e,E)")}


def test_single_step_state_pairs():
    m = reverse_pair_mrtt()
    got = eval_mr_state(m, "q1", _schain(1), (parse_term("E"),))
    want = {
        (parse_term("a(e)"), parse_term("A(E)")),
        (parse_term("b(e)"), parse_term("B(E)")),
    }
    assert got == want


def test_reverse_pair_output_set_is_exactly_the_word_pairs():
    m = reverse_pair_mrtt()
    for k in range(5):
        words = [
            "".join(w)
            for w in __import__("itertools").product("ab", repeat=k)
        ]
        expect = {reverse_pair_instance(w)[1] for w in words}
        got = eval_mr_io(m, _schain(k))
        assert set(got.items) == expect
        assert len(got) == 2 ** k


def test_membership_accepts_all_pairs_rejects_mutations():
    m = reverse_pair_mrtt()
    for k in range(4):
        valid = set(eval_mr_io(m, _schain(k)).items)
        for t in valid:
            assert member_mr_io(m, _schain(k), t)
        for t in list(valid)[:2]:
            for bad in mutations(t, m.output_alphabet):
                assert member_mr_io(m, _schain(k), bad) == (bad in valid)


def test_discarded_binding_still_needs_a_witness():
    m = MrMtt(
        name="strict",
        input_alphabet=CHAIN,
        output_alphabet=RankedAlphabet({"c": 0}),
        ranks={"q0": 0, "dead": 0},
        dims={"q0": 1, "dead": 1},
        initial="q0",
        rules={
            ("q0", "s"): (
                MrRhs((MrLet((1,), "dead", 1, ()),), (Out("c"),)),
            ),
            ("q0", "z"): (MrRhs((), (Out("c"),)),),
            # dead has no rules at all
        },
    )
    validate_mr(m)
    assert member_mr_io(m, parse_term("z", CHAIN), parse_term("c", None))
    assert not member_mr_io(m, _schain(1), parse_term("c", None))
    assert len(eval_mr_io(m, _schain(1))) == 0


def test_validation_errors():
    alpha = RankedAlphabet({"c": 0})
    base = dict(
        name="bad",
        input_alphabet=CHAIN,
        output_alphabet=alpha,
        initial="q0",
    )
    with pytest.raises(BadInitialRank):
        validate_mr(MrMtt(ranks={"q0": 1}, dims={"q0": 1}, rules={}, **base))
    with pytest.raises(BadInitialRank):
        validate_mr(MrMtt(ranks={"q0": 0}, dims={"q0": 2}, rules={}, **base))
    with pytest.raises(ArityMismatch):
        validate_mr(MrMtt(ranks={"q0": 0}, dims={"q0": 1}, rules={
            ("q0", "z"): (MrRhs((), (ZVar(1),)),),
        }, **base))
    with pytest.raises(ArityMismatch):
        # calls cannot be nested inside argument or result terms
        validate_mr(MrMtt(ranks={"q0": 0, "p": 0}, dims={"q0": 1, "p": 1},
                          rules={
            ("q0", "s"): (MrRhs((), (Call("p", 1, ()),)),),
        }, **base))
    with pytest.raises(ArityMismatch):
        # let targets must be the next consecutive z-variables
        validate_mr(MrMtt(ranks={"q0": 0, "p": 0}, dims={"q0": 1, "p": 1},
                          rules={
            ("q0", "s"): (MrRhs((MrLet((2,), "p", 1, ()),), (Out("c"),)),),
        }, **base))
    with pytest.raises(ArityMismatch):
        # result width must match the state's dimension
        validate_mr(MrMtt(ranks={"q0": 0}, dims={"q0": 1}, rules={
            ("q0", "z"): (MrRhs((), (Out("c"), Out("c"))),),
        }, **base))


def test_env_cap_is_a_hard_error():
    m = reverse_pair_mrtt()
    s, t = reverse_pair_instance("ab")
    with pytest.raises(EnvLimitExceeded):
        member_mr_io(m, s, t, env_cap=1)
    assert member_mr_io(m, s, t, env_cap=4)


def test_stats_reports_environment_pressure():
    m = reverse_pair_mrtt()
    s, t = reverse_pair_instance("aba")
    stats = {}
    assert member_mr_io(m, s, t, stats=stats)
    assert stats["max_envs"] >= 2
    assert stats["s_size"] == 4 and stats["t_size"] == 9
    assert stats["entries"] > 0


def test_dimension_one_embedding_matches_plain_engine():
    rng = random.Random(808)
    checked = 0
    for i in range(12):
        m = random_mtt(rng, name=f"r{i}")
        em = _embed(m)
        validate_mr(em)
        for s in all_inputs(4):
            out = io_output_set(m, s)
            if out is None:
                continue
            pool = list(out.items[:3])
            for t in pool[:1]:
                pool.extend(mutations(t, m.output_alphabet)[:3])
            for t in pool:
                assert member_mr_io(em, s, t) == member_io(m, s, t)
                checked += 1
            try:
                mr_set = eval_mr_io(em, s, HARNESS_BUDGET)
            except Exception:
                continue
            assert mr_set == out
    assert checked > 100


def test_argument_evaluation_is_deterministic():
    # one environment and parameter vector always yield one node per
    # argument: results never fork except through let bindings
    m = reverse_pair_mrtt()
    s, t = reverse_pair_instance("ab")
    stats = {}
    member_mr_io(m, s, t, stats=stats)
    # q1 returns pairs; with two live continuations per step the
    # environment count is exactly the number of open choices
    assert stats["max_envs"] == 2
