"""Small reference transducers and instance builders used by tests,
benchmarks, and the command line examples."""

from __future__ import annotations

from .mtt import Call, Mtt, Out, Param
from .multi_return import MrLet, MrMtt, MrRhs, ZVar
from .tac import Tac, TacMtt, TacRule, TacTransition
from .trees import RankedAlphabet, Tree, tree


def double_mtt() -> Mtt:
    """Nondeterministic doubler: on a^n(e) the call-by-value output set
    has 2^(2^n) trees and the call-by-name set far more; the workhorse
    example for the gap between the two semantics.  Not total: no rule
    reads e in the start state."""
    e = Out("e")
    fy = Out("f", (Param(1), Param(1)))
    gy = Out("g", (Param(1), Param(1)))
    return Mtt(
        name="double",
        input_alphabet=RankedAlphabet({"a": 1, "e": 0}),
        output_alphabet=RankedAlphabet({"f": 2, "g": 2, "e": 0}),
        states={"start": 0, "double": 1},
        initial="start",
        rules={
            ("start", "a"): (Call("double", 1, (Call("double", 1, (e,)),)),),
            ("double", "a"): (Call("double", 1, (Call("double", 1, (Param(1),)),)),),
            ("double", "e"): (fy, gy),
        },
    )


def doubling_mtt() -> Mtt:
    """Deterministic total variant: output on a^n(e) is the full binary
    f-tree of size 2^n - 1, exponential in the input size.  Exercises
    the size abort of the deterministic membership path."""
    return Mtt(
        name="doubling",
        input_alphabet=RankedAlphabet({"a": 1, "e": 0}),
        output_alphabet=RankedAlphabet({"f": 2, "e": 0}),
        states={"q0": 0, "q": 1},
        initial="q0",
        rules={
            ("q0", "a"): (Call("q", 1, (Out("e"),)),),
            ("q0", "e"): (Out("e"),),
            ("q", "a"): (Call("q", 1, (Out("f", (Param(1), Param(1))),)),),
            ("q", "e"): (Param(1),),
        },
    )


def double_instance(n: int) -> tuple[Tree, Tree]:
    """(a^n(e), the all-f output): output size 2^(2^n + 1) - 1; keep n <= 2."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    s = tree("e")
    for _ in range(n):
        s = Tree("a", (s,))
    t = tree("e")
    for _ in range(2 ** n):
        t = Tree("f", (t, t))
    return s, t


def copyfree_mtt() -> Mtt:
    """Deterministic, total, copy-free accumulator: a^k(e) maps to
    f^(k-1)(g(e)), so input and output sizes match.  Used for timing
    because membership work grows smoothly with instance size."""
    return Mtt(
        name="copyfree",
        input_alphabet=RankedAlphabet({"a": 1, "e": 0}),
        output_alphabet=RankedAlphabet({"f": 1, "g": 1, "e": 0}),
        states={"start": 0, "acc": 1},
        initial="start",
        rules={
            ("start", "a"): (Call("acc", 1, (Out("g", (Out("e"),)),)),),
            ("start", "e"): (Out("e"),),
            ("acc", "a"): (Call("acc", 1, (Out("f", (Param(1),)),)),),
            ("acc", "e"): (Param(1),),
        },
    )


def copyfree_instance(n: int) -> tuple[Tree, Tree]:
    """Matching (s, t) with |s| = |t| = n, n >= 2."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    s = tree("e")
    for _ in range(n - 1):
        s = Tree("a", (s,))
    t = Tree("g", (tree("e"),))
    for _ in range(n - 2):
        t = Tree("f", (t,))
    return s, t


def reverse_pair_mrtt() -> MrMtt:
    """Two-component state whose returned pairs are always mutual
    reverses: on s^k(z) the outputs are r(w(e), reverse(w)(E)) for every
    word w over {a, b} of length k.  A single-return transducer cannot
    couple two nondeterministic calls this way."""
    A_E = Out("A", (Out("E"),))
    B_E = Out("B", (Out("E"),))

    def let_q1(arg):
        return MrLet((1, 2), "q1", 1, (arg,))

    return MrMtt(
        name="revpair",
        input_alphabet=RankedAlphabet({"s": 1, "z": 0}),
        output_alphabet=RankedAlphabet(
            {"r": 2, "a": 1, "b": 1, "A": 1, "B": 1, "e": 0, "E": 0}),
        ranks={"q0": 0, "q1": 1},
        dims={"q0": 1, "q1": 2},
        initial="q0",
        rules={
            ("q0", "s"): (
                MrRhs((let_q1(A_E),),
                      (Out("r", (Out("a", (ZVar(1),)), ZVar(2))),)),
                MrRhs((let_q1(B_E),),
                      (Out("r", (Out("b", (ZVar(1),)), ZVar(2))),)),
            ),
            ("q0", "z"): (MrRhs((), (Out("r", (Out("e"), Out("E"))),)),),
            ("q1", "s"): (
                MrRhs((let_q1(Out("A", (Param(1),))),),
                      (Out("a", (ZVar(1),)), ZVar(2))),
                MrRhs((let_q1(Out("B", (Param(1),))),),
                      (Out("b", (ZVar(1),)), ZVar(2))),
            ),
            ("q1", "z"): (MrRhs((), (Out("e"), Param(1))),),
        },
    )


def reverse_pair_instance(word: str) -> tuple[Tree, Tree]:
    """(s^k(z), r(word(e), reversed-uppercase(E))) for a word over {a, b}."""
    if any(ch not in "ab" for ch in word):
        raise ValueError(f"word must be over letters a and b, got {word!r}")
    s = tree("z")
    for _ in word:
        s = Tree("s", (s,))
    lo = tree("e")
    for ch in reversed(word):
        lo = Tree(ch, (lo,))
    hi = tree("E")
    for ch in word:
        hi = Tree(ch.upper(), (hi,))
    return s, Tree("r", (lo, hi))


def equal_pair_tacmtt() -> TacMtt:
    """Accepts (pi(s1, s2), e) exactly when s1 equals s2: the equality
    guard compares the two children as shared-DAG nodes, a domain no
    plain regular look-ahead can express."""
    alphabet = RankedAlphabet({"pi": 2, "a": 1, "e": 0})
    aut = Tac(alphabet, (
        TacTransition("e", (), target="p"),
        TacTransition("a", ("p",), target="p"),
        TacTransition("pi", ("p", "p"), target="p"),
    ))
    return TacMtt(
        name="eqpair",
        input_alphabet=alphabet,
        output_alphabet=RankedAlphabet({"e": 0}),
        states={"q0": 0},
        initial="q0",
        rules={
            ("q0", "pi"): (
                TacRule(Out("e"), lookahead=("p", "p"), eq=((1, 2),)),
            ),
        },
        tac=aut,
    )
