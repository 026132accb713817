"""Call-by-name membership for transducers with bounded parameter copying.

Under call-by-name, different occurrences of one parameter may expand to
different trees, so the automaton binds each parameter to a *set* of
candidate-output DAG nodes instead of a single node.  When at most c
copies of any parameter can ever occur, sets of size at most c suffice
and the automaton stays polynomial for fixed c.  The empty set plays the
role BOTTOM plays for call-by-value: a parameter that need not produce
any subtree of the candidate output.

The copy bound c is declared by the caller and trusted; a wrong bound can
only under-approximate.  estimate_copy_bound is a desk-scale sanity check
for declared bounds, not a decision procedure.
"""

from __future__ import annotations

from itertools import combinations, product

from .mtt import Mtt, Out, Param, validate
from .oracle import Budget, Evaluator, OI, check_input_tree, param_index
from .trees import Tree, build_dag, enumerate_trees


class NonConforming:
    """Sentinel: the sweep saw more parameter copies than the threshold."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NonConforming"


NON_CONFORMING = NonConforming()


def _eval_fc(rhs, betabar, kid_tables, by_label, kids_of, intern) -> set:
    # result nodes rhs can produce when parameter i may use any node in betabar[i]
    if isinstance(rhs, Param):
        return set(betabar[rhs.index - 1])
    if isinstance(rhs, Out):
        kid_sets = [_eval_fc(a, betabar, kid_tables, by_label, kids_of, intern)
                    for a in rhs.args]
        out: set = set()
        for ks in kid_sets:
            if not ks:
                return out
        cands = by_label.get(rhs.sym, ())
        count = 1
        for ks in kid_sets:
            count *= len(ks)
        if count <= len(cands):
            for ubar in product(*kid_sets):
                ref = intern.get((rhs.sym, ubar))
                if ref is not None:
                    out.add(ref)
        else:
            for v in cands:
                if all(u in kid_sets[i] for i, u in enumerate(kids_of[v])):
                    out.add(v)
        return out
    kid_sets = [_eval_fc(a, betabar, kid_tables, by_label, kids_of, intern)
                for a in rhs.args]
    out = set()
    table = kid_tables[rhs.child - 1]
    for (q, gammabar), vs in table.items():
        if q != rhs.state:
            continue
        if all(set(g) <= kid_sets[i] for i, g in enumerate(gammabar)):
            out |= vs
    return out


def member_oi_fc(m: Mtt, c: int, s: Tree, t: Tree, stats: dict | None = None) -> bool:
    """Is t an output of m on s under call-by-name, trusting copy bound c?"""
    if not isinstance(c, int) or c < 1:
        raise ValueError(f"copy bound must be a positive int, got {c!r}")
    validate(m)
    check_input_tree(m, s)
    if not m.output_alphabet.is_well_ranked(t):
        return False
    t_dag, t_root = build_dag(t)
    by_label = t_dag.nodes_by_label()
    kids_of = t_dag.kids
    intern = t_dag.intern
    refs = range(t_dag.node_count())
    # parameter bindings: ascending tuples of at most c distinct nodes
    betas = [()]
    for k in range(1, min(c, t_dag.node_count()) + 1):
        betas.extend(combinations(refs, k))
    betas = tuple(betas)

    s_dag, s_root = build_dag(s)
    tables: list[dict] = []
    for v in range(s_dag.node_count()):
        sym = s_dag.labels[v]
        kid_tables = [tables[kid] for kid in s_dag.kids[v]]
        table: dict = {}
        for q, rank in m.states.items():
            alts = m.alternatives(q, sym)
            if not alts:
                continue
            for betabar in product(betas, repeat=rank):
                acc: set = set()
                for rhs in alts:
                    acc |= _eval_fc(rhs, betabar, kid_tables, by_label, kids_of, intern)
                if acc:
                    table[(q, betabar)] = frozenset(acc)
        tables.append(table)

    verdict = t_root in tables[s_root].get((m.initial, ()), ())
    if stats is not None:
        stats.update(
            s_size=s.size, t_size=t.size,
            s_dag_nodes=s_dag.node_count(), t_dag_nodes=t_dag.node_count(),
            entries=sum(len(vs) for tb in tables for vs in tb.values()),
        )
    return verdict


def estimate_copy_bound(m: Mtt, depth: int, limit: int = 8,
                        budget: Budget | None = None):
    """Max parameter-occurrence count over all state denotations up to depth.

    Enumerates every input tree up to the given depth, evaluates each
    state on it under call-by-name, and counts occurrences of each formal
    parameter in the resulting trees.  Returns the maximum, or
    NON_CONFORMING once the count exceeds the threshold; a count that
    keeps growing with depth means no finite bound exists.
    """
    validate(m)
    ev = Evaluator(m, OI, budget or Budget())
    best = 0
    for s in enumerate_trees(m.input_alphabet, max_depth=depth):
        for q in m.states:
            for out in ev.state_set(q, s):
                counts: dict[int, int] = {}
                for node in out.subtrees():
                    i = param_index(node)
                    if i is not None:
                        counts[i] = counts.get(i, 0) + 1
                if counts:
                    best = max(best, max(counts.values()))
                if best > limit:
                    return NON_CONFORMING
    return best
