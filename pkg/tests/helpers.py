"""Builders for randomized transducers, exhaustive inputs, and output
mutations, shared by the module tests and the acceptance suite."""

from __future__ import annotations

import random

from mttkit import (
    App,
    Budget,
    BudgetExceeded,
    Call,
    Mtt,
    Out,
    Param,
    RankedAlphabet,
    Tree,
    enumerate_trees,
    oracle_eval,
)

IN_ALPHA = RankedAlphabet({"a": 2, "b": 1, "e": 0})
# two symbols per rank so single-node label swaps always exist
OUT_ALPHA = RankedAlphabet({"f": 2, "h": 2, "g": 1, "u": 1, "c": 0, "d": 0})

# keeps enumerated output sets small enough for the oracle at |s| <= 8
HARNESS_BUDGET = Budget(max_set_size=20_000, max_tree_size=60,
                        max_steps=2_000_000)


def _random_rhs(rng: random.Random, states: dict[str, int], my_rank: int,
                input_rank: int, depth: int):
    roll = rng.random()
    if depth <= 0 or roll < 0.30:
        if my_rank > 0 and rng.random() < 0.5:
            return Param(rng.randint(1, my_rank))
        return Out(rng.choice(("c", "d")))
    if roll < 0.60 and input_rank > 0:
        q = rng.choice(list(states))
        args = tuple(
            _random_rhs(rng, states, my_rank, input_rank, depth - 1)
            for _ in range(states[q])
        )
        return Call(q, rng.randint(1, input_rank), args)
    sym = rng.choice(("f", "h", "g", "u"))
    kids = tuple(
        _random_rhs(rng, states, my_rank, input_rank, depth - 1)
        for _ in range(OUT_ALPHA.rank(sym))
    )
    return Out(sym, kids)


def random_mtt(rng: random.Random, name: str = "rand") -> Mtt:
    """A small transducer: <= 3 states, ranks <= 2, <= 2 alternatives
    per (state, symbol) pair, possibly partial."""
    n_states = rng.randint(1, 3)
    states = {"q0": 0}
    for i in range(1, n_states):
        states[f"q{i}"] = rng.randint(0, 2)
    rules = {}
    for q, rank in states.items():
        for sym in IN_ALPHA:
            n_alts = rng.choices((0, 1, 2), weights=(15, 55, 30))[0]
            alts = tuple(
                _random_rhs(rng, states, rank, IN_ALPHA.rank(sym), depth=2)
                for _ in range(n_alts)
            )
            if alts:
                rules[(q, sym)] = alts
    return Mtt(
        name=name,
        input_alphabet=IN_ALPHA,
        output_alphabet=OUT_ALPHA,
        states=states,
        initial="q0",
        rules=rules,
    )


def random_det_total_mtt(rng: random.Random, name: str = "det") -> Mtt:
    """Exactly one alternative for every (state, symbol) pair."""
    n_states = rng.randint(1, 3)
    states = {"q0": 0}
    for i in range(1, n_states):
        states[f"q{i}"] = rng.randint(0, 2)
    rules = {
        (q, sym): (_random_rhs(rng, states, rank, IN_ALPHA.rank(sym), depth=2),)
        for q, rank in states.items()
        for sym in IN_ALPHA
    }
    return Mtt(
        name=name,
        input_alphabet=IN_ALPHA,
        output_alphabet=OUT_ALPHA,
        states=states,
        initial="q0",
        rules=rules,
    )


def all_inputs(max_size: int, alphabet: RankedAlphabet = IN_ALPHA) -> list[Tree]:
    return enumerate_trees(alphabet, max_size=max_size)


def _replace_at(t: Tree, path: tuple[int, ...], repl: Tree) -> Tree:
    if not path:
        return repl
    kids = list(t.children)
    kids[path[0]] = _replace_at(kids[path[0]], path[1:], repl)
    return Tree(t.label, tuple(kids))


def mutations(t: Tree, alphabet: RankedAlphabet) -> list[Tree]:
    """Every tree obtained from t by rewriting exactly one node label to
    a different label of the same rank."""
    by_rank: dict[int, list[str]] = {}
    for name in alphabet:
        by_rank.setdefault(alphabet.rank(name), []).append(name)
    out = []

    def walk(node: Tree, path: tuple[int, ...]):
        for other in by_rank[alphabet.rank(node.label)]:
            if other != node.label:
                out.append(_replace_at(t, path, Tree(other, node.children)))
        for i, kid in enumerate(node.children):
            walk(kid, path + (i,))

    walk(t, ())
    return out


def io_output_set(m: Mtt, s: Tree, budget: Budget = HARNESS_BUDGET):
    """The full call-by-value output set for s, or None when enumeration
    blows the harness budget (the caller skips such pairs)."""
    try:
        return oracle_eval(m, "io", App(m.initial, s), budget)
    except BudgetExceeded:
        return None


CHAIN_ALPHA = RankedAlphabet({"a": 1, "e": 0})


def linear_param_mtt() -> Mtt:
    """Nondeterministic, one occurrence of each parameter per side."""
    g = lambda x: Out("g", (x,))
    return Mtt(
        name="lin",
        input_alphabet=RankedAlphabet({"a": 1, "b": 1, "e": 0}),
        output_alphabet=RankedAlphabet({"f": 2, "g": 1, "e": 0}),
        states={"q0": 0, "q": 1, "p": 2},
        initial="q0",
        rules={
            ("q0", "a"): (Call("p", 1, (Out("e"), g(Out("e")))),
                          Call("q", 1, (Out("e"),))),
            ("q0", "b"): (Call("q", 1, (g(Out("e")),)),),
            ("q0", "e"): (Out("e"),),
            ("q", "a"): (Call("q", 1, (g(Param(1)),)),),
            ("q", "b"): (g(Call("q", 1, (Param(1),))),),
            ("q", "e"): (Param(1), g(Param(1))),
            ("p", "a"): (Call("p", 1, (Param(2), Param(1))),),
            ("p", "b"): (Call("p", 1, (g(Param(1)), Param(2))),),
            ("p", "e"): (Out("f", (Param(1), Param(2))),
                         Out("f", (Param(2), Param(1)))),
        },
    )


def leaf_double_mtt() -> Mtt:
    """Copies its parameter exactly twice, at leaf rules only."""
    return Mtt(
        name="leafdouble",
        input_alphabet=CHAIN_ALPHA,
        output_alphabet=RankedAlphabet({"f": 2, "g": 1, "e": 0}),
        states={"q0": 0, "q": 1},
        initial="q0",
        rules={
            ("q0", "a"): (Call("q", 1, (Out("e"),)),),
            ("q0", "e"): (Out("e"),),
            ("q", "a"): (Call("q", 1, (Out("g", (Param(1),)),)),),
            ("q", "e"): (Out("f", (Param(1), Param(1))), Param(1)),
        },
    )


def mixed_double_mtt() -> Mtt:
    """Needs copy bound 2: the doubled parameter draws from a two-element
    set, and call-by-name lets the two occurrences pick different trees."""
    return Mtt(
        name="mixeddouble",
        input_alphabet=CHAIN_ALPHA,
        output_alphabet=RankedAlphabet({"f": 2, "g": 1, "e": 0}),
        states={"q0": 0, "r": 0, "q": 1},
        initial="q0",
        rules={
            ("q0", "a"): (Call("q", 1, (Call("r", 1, ()),)),),
            ("q0", "e"): (Out("e"),),
            ("r", "a"): (Call("r", 1, ()),),
            ("r", "e"): (Out("e"), Out("g", (Out("e"),))),
            ("q", "a"): (Call("q", 1, (Param(1),)),),
            ("q", "e"): (Out("f", (Param(1), Param(1))),),
        },
    )
