"""Multi-return transducers: states return tuples of trees.

A state of dimension D maps an input subtree and parameter values to a
set of D-tuples of output trees.  Right-hand sides are a sequence of
let-bindings, each calling a state on an input child and naming the
components of one returned tuple, followed by a result tuple built from
output symbols, parameters y_i, and let-bound variables z_j.  Calls
never nest inside terms, which is what keeps membership tractable here
even though the call-by-value translation can relate one input to
exponentially many outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .errors import (ArityMismatch, BadInitialRank, EnvLimitExceeded,
                     UnknownState)
from .mtt import Out, Param
from .oracle import (Budget, TreeSet, _Meter, check_input_tree, io_subst,
                     y_leaf)
from .trees import BOTTOM, RankedAlphabet, Tree, build_dag


@dataclass(frozen=True)
class ZVar:
    """Reference to a let-bound tuple component, 1-based."""

    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"z-variable index must be >= 1, got {self.index}")


@dataclass(frozen=True)
class MrLet:
    """let (z_i, .., z_{i+D-1}) = state[x_child](args)"""

    targets: tuple[int, ...]
    state: str
    child: int
    args: tuple = ()


@dataclass(frozen=True)
class MrRhs:
    lets: tuple[MrLet, ...]
    result: tuple  # terms over Out / Param / ZVar


@dataclass
class MrMtt:
    name: str
    input_alphabet: RankedAlphabet
    output_alphabet: RankedAlphabet
    ranks: dict[str, int]
    dims: dict[str, int]
    initial: str
    rules: dict = field(default_factory=dict)  # (state, sym) -> tuple[MrRhs, ...]

    def rank(self, state: str) -> int:
        if state not in self.ranks:
            raise UnknownState(f"unknown state {state!r}")
        return self.ranks[state]

    def dim(self, state: str) -> int:
        if state not in self.dims:
            raise UnknownState(f"unknown state {state!r}")
        return self.dims[state]

    def alternatives(self, state: str, sym: str) -> tuple[MrRhs, ...]:
        alts = self.rules.get((state, sym), ())
        seen, out = set(), []
        for r in alts:
            if r not in seen:
                seen.add(r)
                out.append(r)
        return tuple(out)


def _check_term(m: MrMtt, term, n_z: int, state_rank: int, where: str) -> None:
    if isinstance(term, Param):
        if not 1 <= term.index <= state_rank:
            raise ArityMismatch(
                f"{where}: parameter y{term.index} out of range for rank {state_rank}")
        return
    if isinstance(term, ZVar):
        if not 1 <= term.index <= n_z:
            raise ArityMismatch(
                f"{where}: z{term.index} is not bound at this point")
        return
    if isinstance(term, Out):
        if term.sym not in m.output_alphabet:
            raise ArityMismatch(
                f"{where}: {term.sym!r} is not an output symbol")
        if m.output_alphabet.rank(term.sym) != len(term.args):
            raise ArityMismatch(
                f"{where}: {term.sym!r} expects "
                f"{m.output_alphabet.rank(term.sym)} arguments, got {len(term.args)}")
        for a in term.args:
            _check_term(m, a, n_z, state_rank, where)
        return
    raise ArityMismatch(f"{where}: calls may not appear inside terms: {term!r}")


def validate_mr(m: MrMtt) -> None:
    """Structural checks; raises on the first violation found."""
    if set(m.ranks) != set(m.dims):
        raise UnknownState("ranks and dims must cover the same states")
    for q, d in m.dims.items():
        if d < 1:
            raise ArityMismatch(f"state {q!r} has dimension {d}, must be >= 1")
        if m.ranks[q] < 0:
            raise ArityMismatch(f"state {q!r} has negative rank")
    if m.initial not in m.ranks:
        raise BadInitialRank(f"initial state {m.initial!r} is not declared")
    if m.ranks[m.initial] != 0 or m.dims[m.initial] != 1:
        raise BadInitialRank(
            f"initial state must have rank 0 and dimension 1, "
            f"got rank {m.ranks[m.initial]} dimension {m.dims[m.initial]}")
    for (q, sym), alts in m.rules.items():
        if q not in m.ranks:
            raise UnknownState(f"rule for unknown state {q!r}")
        if sym not in m.input_alphabet:
            raise ArityMismatch(f"rule for unknown input symbol {sym!r}")
        k = m.input_alphabet.rank(sym)
        rank = m.ranks[q]
        dim = m.dims[q]
        where = f"rule {q}/{sym}"
        for rhs in alts:
            n_z = 0
            for let in rhs.lets:
                if let.state not in m.ranks:
                    raise UnknownState(f"{where}: call to unknown state {let.state!r}")
                if not 1 <= let.child <= k:
                    raise ArityMismatch(
                        f"{where}: child x{let.child} out of range for {sym!r}/{k}")
                if let.targets != tuple(range(n_z + 1, n_z + 1 + m.dims[let.state])):
                    raise ArityMismatch(
                        f"{where}: let targets {let.targets} must be the next "
                        f"{m.dims[let.state]} consecutive z-variables after z{n_z}")
                if len(let.args) != m.ranks[let.state]:
                    raise ArityMismatch(
                        f"{where}: {let.state!r} expects {m.ranks[let.state]} "
                        f"arguments, got {len(let.args)}")
                for a in let.args:
                    _check_term(m, a, n_z, rank, where)
                n_z += m.dims[let.state]
            if len(rhs.result) != dim:
                raise ArityMismatch(
                    f"{where}: result tuple has {len(rhs.result)} components, "
                    f"state dimension is {dim}")
            for term in rhs.result:
                _check_term(m, term, n_z, rank, where)


def _term_tree(term, ys: tuple, zs: tuple) -> Tree:
    if isinstance(term, Param):
        return ys[term.index - 1]
    if isinstance(term, ZVar):
        return zs[term.index - 1]
    return Tree(term.sym, tuple(_term_tree(a, ys, zs) for a in term.args))


class MrEvaluator:
    """Call-by-value tuple semantics, memoized per (state, input subtree).

    Denotations carry formal parameters as y-leaves; eval_mr_state
    substitutes actual arguments afterwards, so one memo entry serves
    every argument vector.
    """

    def __init__(self, m: MrMtt, budget: Budget | None = None):
        validate_mr(m)
        self.m = m
        self.budget = budget or Budget()
        self._meter = _Meter(self.budget, prune_size=None)
        self._memo: dict = {}

    def state_tuples(self, state: str, s: Tree) -> frozenset:
        """All tuples of parameterized trees the state yields on s."""
        key = (state, s)
        got = self._memo.get(key)
        if got is not None:
            return got
        m = self.m
        formals = tuple(y_leaf(i) for i in range(1, m.rank(state) + 1))
        acc: set = set()
        for rhs in m.alternatives(state, s.label):
            acc |= self._rhs_tuples(rhs, s, formals)
            self._meter.check_set(acc)
        result = frozenset(acc)
        self._memo[key] = result
        return result

    def _rhs_tuples(self, rhs: MrRhs, s: Tree, formals: tuple) -> set:
        envs: set = {()}
        for let in rhs.lets:
            callee = self.state_tuples(let.state, s.children[let.child - 1])
            new_envs: set = set()
            for zs in envs:
                actuals = tuple(_term_tree(a, formals, zs) for a in let.args)
                for tup in callee:
                    self._meter.tick()
                    bound = tuple(self._apply_args(comp, actuals) for comp in tup)
                    new_envs.add(zs + bound)
            envs = new_envs
            self._meter.check_set(envs)
        out: set = set()
        for zs in envs:
            self._meter.tick()
            out.add(tuple(_term_tree(term, formals, zs) for term in rhs.result))
        return out

    def _apply_args(self, comp: Tree, ys: tuple) -> Tree:
        # components are parameterized in the *callee's* y's; lets in this
        # rhs use terms over the caller's scope, already ground here
        if not ys:
            return comp
        sets = io_subst((comp,), [(y,) for y in ys], self.budget)
        (only,) = sets
        return only


def eval_mr_state(m: MrMtt, state: str, s: Tree, args: tuple[Tree, ...],
                  budget: Budget | None = None) -> frozenset:
    """Tuples produced by one state on s with ground argument trees."""
    ev = MrEvaluator(m, budget)
    if len(args) != m.rank(state):
        raise ArityMismatch(
            f"state {state!r} expects {m.rank(state)} arguments, got {len(args)}")
    b = ev.budget
    out: set = set()
    for tup in ev.state_tuples(state, s):
        subbed = []
        for comp in tup:
            if args:
                sets = io_subst((comp,), [(a,) for a in args], b)
                (comp,) = sets
            subbed.append(comp)
        out.add(tuple(subbed))
    return frozenset(out)


def eval_mr_io(m: MrMtt, s: Tree, budget: Budget | None = None) -> TreeSet:
    """The translation's output set on s (initial state, dimension 1)."""
    tuples = eval_mr_state(m, m.initial, s, (), budget)
    return TreeSet(tup[0] for tup in tuples)


def _live_after(rhs: MrRhs) -> list[frozenset[int]]:
    """live[i] = z-indices read by lets i+1.. or the result tuple."""

    def zreads(term, acc):
        if isinstance(term, ZVar):
            acc.add(term.index)
        elif isinstance(term, Out):
            for a in term.args:
                zreads(a, acc)

    live: list[frozenset[int]] = [None] * (len(rhs.lets) + 1)  # type: ignore
    acc: set[int] = set()
    for term in rhs.result:
        zreads(term, acc)
    live[len(rhs.lets)] = frozenset(acc)
    for i in range(len(rhs.lets) - 1, -1, -1):
        for a in rhs.lets[i].args:
            zreads(a, acc)
        live[i] = frozenset(acc)
    return live


def _arg_ref(term, ybar: tuple, env: dict, dag) -> int:
    """Evaluate an argument term to a candidate-output node, or BOTTOM."""
    if isinstance(term, Param):
        return ybar[term.index - 1]
    if isinstance(term, ZVar):
        return env[term.index]
    refs = []
    for a in term.args:
        r = _arg_ref(a, ybar, env, dag)
        if r == BOTTOM:
            return BOTTOM
        refs.append(r)
    return dag.lookup(term.sym, tuple(refs))


def member_mr_io(m: MrMtt, s: Tree, t: Tree, env_cap: int = 100_000,
                 stats: dict | None = None) -> bool:
    """Is t an output of m on s under call-by-value?

    Bottom-up over the input: for every input subtree, state, and vector
    of candidate nodes (or BOTTOM) for the parameters, collect the tuples
    of candidate nodes the state can return.  Let-bindings are processed
    left to right over environment sets projected to live variables; a
    rule whose environment set exceeds env_cap raises EnvLimitExceeded
    rather than silently degrading.
    """
    validate_mr(m)
    check_input_tree(m, s)
    if not m.output_alphabet.is_well_ranked(t):
        return False
    t_dag, t_root = build_dag(t)
    vees = tuple(range(t_dag.node_count())) + (BOTTOM,)
    s_dag, s_root = build_dag(s)
    tables: list[dict] = []
    max_envs = 0
    for v in range(s_dag.node_count()):
        sym = s_dag.labels[v]
        kid_tables = [tables[kid] for kid in s_dag.kids[v]]
        table: dict = {}
        for q, rank in m.ranks.items():
            alts = m.alternatives(q, sym)
            if not alts:
                continue
            for ybar in product(vees, repeat=rank):
                acc: set = set()
                for rhs in alts:
                    live = _live_after(rhs)
                    # environment = refs for the z-vars that are both bound
                    # and still needed, in ascending index order
                    envs: set = {()}
                    order: list = []
                    bound = 0
                    for i, let in enumerate(rhs.lets):
                        callee = kid_tables[let.child - 1]
                        bound += len(let.targets)
                        next_order = [j for j in sorted(live[i + 1])
                                      if j <= bound]
                        new_envs: set = set()
                        for packed in envs:
                            env = dict(zip(order, packed))
                            argrefs = tuple(_arg_ref(a, ybar, env, t_dag)
                                            for a in let.args)
                            tuples = callee.get((let.state, argrefs))
                            if not tuples:
                                continue
                            for tup in tuples:
                                for zi, ref in zip(let.targets, tup):
                                    env[zi] = ref
                                new_envs.add(tuple(env[j] for j in next_order))
                        envs = new_envs
                        order = next_order
                        if len(envs) > env_cap:
                            raise EnvLimitExceeded(
                                f"rule {q}/{sym}: {len(envs)} environments "
                                f"after let {i + 1}, cap is {env_cap}")
                        max_envs = max(max_envs, len(envs))
                    # tuples may carry BOTTOM components: a returned tree that
                    # is no subtree of t is legal as long as the caller never
                    # uses that component in the final output
                    for packed in envs:
                        env = dict(zip(order, packed))
                        acc.add(tuple(_arg_ref(term, ybar, env, t_dag)
                                      for term in rhs.result))
                if acc:
                    table[(q, ybar)] = frozenset(acc)
        tables.append(table)
    verdict = (t_root,) in tables[s_root].get((m.initial, ()), ())
    if stats is not None:
        stats.update(
            s_size=s.size, t_size=t.size,
            s_dag_nodes=s_dag.node_count(), t_dag_nodes=t_dag.node_count(),
            entries=sum(len(vs) for tb in tables for vs in tb.values()),
            max_envs=max_envs,
        )
    return verdict
