"""Macro tree transducer model: rule right-hand sides, validation, classes.

A transducer has states with ranks (accumulating parameter counts), an
initial state of rank 0, and rules indexed by (state, input symbol).
A right-hand side is a tree over output symbols, parameters y_i, and
state calls q[x_j](args).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    ArityMismatch,
    BadInitialRank,
    UnknownState,
    UnknownSymbol,
)
from .trees import RankedAlphabet


@dataclass(frozen=True)
class Out:
    """An output-symbol node in a right-hand side."""

    sym: str
    args: tuple = ()


@dataclass(frozen=True)
class Param:
    """An accumulating parameter y_index (1-based)."""

    index: int


@dataclass(frozen=True)
class Call:
    """A state call q[x_child](args); child is a 1-based input variable."""

    state: str
    child: int
    args: tuple = ()


Rhs = Out | Param | Call


def rhs_size(r: Rhs) -> int:
    stack, n = [r], 0
    while stack:
        node = stack.pop()
        n += 1
        if not isinstance(node, Param):
            stack.extend(node.args)
    return n


def walk_rhs(r: Rhs):
    """Yield every node of a right-hand side, parent before children."""
    stack = [r]
    while stack:
        node = stack.pop()
        yield node
        if not isinstance(node, Param):
            stack.extend(reversed(node.args))


@dataclass
class Mtt:
    """A macro tree transducer.

    rules maps (state, input symbol) to the alternatives for that pair;
    alternatives are kept in written order but mean a set.
    """

    name: str
    input_alphabet: RankedAlphabet
    output_alphabet: RankedAlphabet
    states: dict[str, int]
    initial: str
    rules: dict[tuple[str, str], tuple[Rhs, ...]]

    def rank(self, state: str) -> int:
        try:
            return self.states[state]
        except KeyError:
            raise UnknownState(f"state {state!r} is not declared") from None

    def alternatives(self, state: str, sym: str) -> tuple[Rhs, ...]:
        """Rule alternatives for (state, sym), structurally de-duplicated."""
        alts = self.rules.get((state, sym), ())
        if len(alts) < 2:
            return alts
        seen, out = set(), []
        for r in alts:
            if r not in seen:
                seen.add(r)
                out.append(r)
        return tuple(out)

    def size(self) -> int:
        """Total node count over all right-hand sides."""
        return sum(rhs_size(r) for alts in self.rules.values() for r in alts)


@dataclass(frozen=True)
class MttClass:
    """Classification flags computed by validate."""

    deterministic: bool
    total: bool
    linear_input: bool
    linear_params: bool
    max_state_rank: int


def check_rhs(m: Mtt, rhs: Rhs, state_rank: int, input_rank: int, where: str) -> None:
    """Structural well-formedness of one right-hand side."""
    for node in walk_rhs(rhs):
        if isinstance(node, Param):
            if not 1 <= node.index <= state_rank:
                raise ArityMismatch(
                    f"{where}: parameter y{node.index} out of range for rank {state_rank}"
                )
        elif isinstance(node, Out):
            if node.sym not in m.output_alphabet:
                raise UnknownSymbol(f"{where}: output symbol {node.sym!r} not declared")
            r = m.output_alphabet.rank(node.sym)
            if r != len(node.args):
                raise ArityMismatch(
                    f"{where}: output symbol {node.sym!r} has rank {r}, got {len(node.args)} args"
                )
        else:
            if node.state not in m.states:
                raise UnknownState(f"{where}: state {node.state!r} not declared")
            if not 1 <= node.child <= input_rank:
                raise ArityMismatch(
                    f"{where}: input variable x{node.child} out of range for rank {input_rank}"
                )
            r = m.states[node.state]
            if r != len(node.args):
                raise ArityMismatch(
                    f"{where}: state {node.state!r} takes {r} parameters, got {len(node.args)}"
                )


def _linear(rhs: Rhs, kind) -> bool:
    seen = set()
    for node in walk_rhs(rhs):
        if kind == "input" and isinstance(node, Call):
            if node.child in seen:
                return False
            seen.add(node.child)
        elif kind == "param" and isinstance(node, Param):
            if node.index in seen:
                return False
            seen.add(node.index)
    return True


def validate(m: Mtt) -> MttClass:
    """Check structural well-formedness and classify the transducer.

    deterministic: at most one alternative per (state, symbol), after
    structural de-duplication.  total: at least one alternative for every
    (state, symbol) pair.  Linearity is per right-hand side.
    """
    if m.initial not in m.states:
        raise UnknownState(f"initial state {m.initial!r} is not declared")
    if m.states[m.initial] != 0:
        raise BadInitialRank(
            f"initial state {m.initial!r} has rank {m.states[m.initial]}, expected 0"
        )
    for (q, sym), alts in m.rules.items():
        if q not in m.states:
            raise UnknownState(f"rule for undeclared state {q!r}")
        if sym not in m.input_alphabet:
            raise UnknownSymbol(f"rule on undeclared input symbol {sym!r}")
        where = f"rule {q}/{sym}"
        for rhs in alts:
            check_rhs(m, rhs, m.states[q], m.input_alphabet.rank(sym), where)

    deterministic = True
    total = True
    linear_input = True
    linear_params = True
    for q in m.states:
        for sym in m.input_alphabet:
            alts = m.alternatives(q, sym)
            if len(alts) > 1:
                deterministic = False
            if not alts:
                total = False
            for rhs in alts:
                if linear_input and not _linear(rhs, "input"):
                    linear_input = False
                if linear_params and not _linear(rhs, "param"):
                    linear_params = False
    return MttClass(
        deterministic=deterministic,
        total=total,
        linear_input=linear_input,
        linear_params=linear_params,
        max_state_rank=max(m.states.values(), default=0),
    )
