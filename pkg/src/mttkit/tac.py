"""Bottom-up look-ahead automata with equality and disequality constraints.

A transition (sym, child states, eq, neq, target) applies at a node when
the children reached the listed states and every constrained child pair
is equal (eq) respectively different (neq) as subtrees.  Subtree
comparisons are reference comparisons on the input's own minimal DAG, so
each check is constant time.

The automaton must behave total-deterministically on the given input:
exactly one transition per node.  This is enforced while running, not
statically, since constraint satisfiability is input-dependent.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    ArityMismatch,
    NotDeterministic,
    NotTotal,
    UnknownState,
    UnknownSymbol,
)
from .io_membership import DemandEngine
from .mtt import MttClass, Mtt, Rhs, validate
from .oracle import check_input_tree
from .trees import (
    RankedAlphabet,
    Tree,
    TreeDag,
    build_dag,
    format_term,
    recursion_room,
)


@dataclass(frozen=True)
class TacTransition:
    sym: str
    states: tuple[str, ...]
    eq: tuple[tuple[int, int], ...] = ()
    neq: tuple[tuple[int, int], ...] = ()
    target: str = ""


@dataclass
class Tac:
    """A look-ahead automaton; its state set is whatever transitions mention."""

    input_alphabet: RankedAlphabet
    transitions: tuple[TacTransition, ...]

    def states(self) -> set[str]:
        out = set()
        for tr in self.transitions:
            out.add(tr.target)
            out.update(tr.states)
        return out

    def check(self) -> None:
        for tr in self.transitions:
            if tr.sym not in self.input_alphabet:
                raise UnknownSymbol(f"look-ahead transition on undeclared symbol {tr.sym!r}")
            r = self.input_alphabet.rank(tr.sym)
            if r != len(tr.states):
                raise ArityMismatch(
                    f"look-ahead transition on {tr.sym!r} lists {len(tr.states)} "
                    f"child states, symbol has rank {r}"
                )
            for i, j in tuple(tr.eq) + tuple(tr.neq):
                if not (1 <= i <= r and 1 <= j <= r):
                    raise ArityMismatch(
                        f"constraint ({i},{j}) out of range for rank {r} symbol {tr.sym!r}"
                    )


def _constraints_ok(tr: TacTransition, kid_refs) -> bool:
    for i, j in tr.eq:
        if kid_refs[i - 1] != kid_refs[j - 1]:
            return False
    for i, j in tr.neq:
        if kid_refs[i - 1] == kid_refs[j - 1]:
            return False
    return True


def _run_nodes(a: Tac, dag: TreeDag, nodes) -> dict[int, str]:
    """Look-ahead states for the given DAG nodes, children first."""
    by_sym: dict[str, list[TacTransition]] = {}
    for tr in a.transitions:
        by_sym.setdefault(tr.sym, []).append(tr)
    states: dict[int, str] = {}
    for v in nodes:
        kid_refs = dag.kids[v]
        kid_states = tuple(states[c] for c in kid_refs)
        chosen = None
        for tr in by_sym.get(dag.labels[v], ()):
            if tr.states != kid_states or not _constraints_ok(tr, kid_refs):
                continue
            if chosen is not None:
                raise NotDeterministic(
                    f"two look-ahead transitions apply at subtree "
                    f"{_describe(dag, v)}"
                )
            chosen = tr
        if chosen is None:
            raise NotTotal(f"no look-ahead transition applies at subtree {_describe(dag, v)}")
        states[v] = chosen.target
    return states


def _describe(dag: TreeDag, v: int) -> str:
    text = format_term(dag.expand(v))
    return text if len(text) <= 60 else text[:57] + "..."


def run_tac(a: Tac, dag: TreeDag, v: int) -> str:
    """The look-ahead state of the subtree at node v."""
    dag._check(v)
    a.check()
    reach = set()
    stack = [v]
    while stack:
        u = stack.pop()
        if u not in reach:
            reach.add(u)
            stack.extend(dag.kids[u])
    return _run_nodes(a, dag, sorted(reach))[v]


@dataclass(frozen=True)
class TacRule:
    """A guarded rule alternative.

    lookahead None matches any child states; eq/neq constrain input
    children by subtree (dis)equality.
    """

    rhs: Rhs
    lookahead: tuple[str, ...] | None = None
    eq: tuple[tuple[int, int], ...] = ()
    neq: tuple[tuple[int, int], ...] = ()


@dataclass
class TacMtt:
    """A transducer whose rules are guarded by a look-ahead automaton."""

    name: str
    input_alphabet: RankedAlphabet
    output_alphabet: RankedAlphabet
    states: dict[str, int]
    initial: str
    rules: dict[tuple[str, str], tuple[TacRule, ...]]
    tac: Tac

    def plain(self) -> Mtt:
        """The underlying transducer with all guards dropped."""
        return Mtt(
            name=self.name,
            input_alphabet=self.input_alphabet,
            output_alphabet=self.output_alphabet,
            states=dict(self.states),
            initial=self.initial,
            rules={k: tuple(r.rhs for r in alts) for k, alts in self.rules.items()},
        )


def validate_tac_mtt(tm: TacMtt) -> MttClass:
    """Structural checks for rules, guards, and the look-ahead automaton.

    The returned classification describes the guard-free rule table;
    guardedness itself is enforced dynamically per input.
    """
    cls = validate(tm.plain())
    tm.tac.check()
    known = tm.tac.states()
    for (q, sym), alts in tm.rules.items():
        r = tm.input_alphabet.rank(sym)
        for rule in alts:
            if rule.lookahead is not None:
                if len(rule.lookahead) != r:
                    raise ArityMismatch(
                        f"rule {q}/{sym}: guard lists {len(rule.lookahead)} "
                        f"look-ahead states, symbol has rank {r}"
                    )
                for p in rule.lookahead:
                    if p not in known:
                        raise UnknownState(
                            f"rule {q}/{sym}: look-ahead state {p!r} not in the automaton"
                        )
            for i, j in tuple(rule.eq) + tuple(rule.neq):
                if not (1 <= i <= r and 1 <= j <= r):
                    raise ArityMismatch(
                        f"rule {q}/{sym}: constraint ({i},{j}) out of range for rank {r}"
                    )
    return cls


def member_io_tac(tm: TacMtt, s: Tree, t: Tree, stats: dict | None = None) -> bool:
    """Membership for a look-ahead transducer under call-by-value semantics.

    The look-ahead automaton runs first over the input's minimal DAG;
    rule alternatives whose guard matches at a node are then pooled, and
    the same demand-driven automaton as member_io decides the verdict.
    Equality guards compare input subtrees, so they use the input's DAG;
    output reasoning uses the candidate output's DAG.  The two stores are
    independent.
    """
    validate_tac_mtt(tm)
    check_input_tree(tm, s)
    if not tm.output_alphabet.is_well_ranked(t):
        return False
    s_dag, s_root = build_dag(s)
    la = _run_nodes(tm.tac, s_dag, range(s_dag.node_count()))
    t_dag, t_root = build_dag(t)

    def alts_for(node, q):
        alts = tm.rules.get((q, s_dag.labels[node]), ())
        if not alts:
            return ()
        kid_refs = s_dag.kids[node]
        kid_states = tuple(la[c] for c in kid_refs)
        picked = []
        for rule in alts:
            if rule.lookahead is not None and rule.lookahead != kid_states:
                continue
            if not _constraints_ok(rule, kid_refs):
                continue
            if rule.rhs not in picked:
                picked.append(rule.rhs)
        return tuple(picked)

    engine = DemandEngine(s_dag, t_dag, alts_for)
    with recursion_room(8 * s.size):
        verdict = t_root in engine.demand(s_root, tm.initial, ())
    if stats is not None:
        stats.update(
            s_size=s.size, t_size=t.size,
            s_dag_nodes=s_dag.node_count(), t_dag_nodes=t_dag.node_count(),
            entries=engine.entry_count(),
        )
    return verdict
