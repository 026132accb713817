"""Ranked alphabets, ground trees, and maximally shared tree DAGs.

A tree is an immutable node: a string label plus a tuple of child trees.
The DAG store interns every distinct subtree exactly once, so two nodes
are the same subtree iff they carry the same integer reference.  The
reference BOTTOM stands for "not a subtree of the stored tree".
"""

from __future__ import annotations

import re
import sys
from contextlib import contextmanager
from itertools import product

from .errors import (
    ArityMismatch,
    BottomAccess,
    ChildIndexOutOfRange,
    ParseError,
    RankViolation,
    UnknownSymbol,
)

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
# x1, y1, z1, ... are reserved for rule variables and may not name symbols.
RESERVED_RE = re.compile(r"[xyz][1-9][0-9]*\Z")

NodeRef = int
BOTTOM: NodeRef = -1


class RankedAlphabet:
    """A finite set of symbol names, each with a fixed arity."""

    __slots__ = ("symbols",)

    def __init__(self, symbols):
        symbols = dict(symbols)
        for name, rank in symbols.items():
            if not isinstance(name, str) or not NAME_RE.fullmatch(name):
                raise UnknownSymbol(f"bad symbol name {name!r}")
            if RESERVED_RE.fullmatch(name):
                raise UnknownSymbol(
                    f"symbol {name!r} collides with the reserved variable namespace"
                )
            if not isinstance(rank, int) or rank < 0:
                raise RankViolation(f"symbol {name!r} has bad rank {rank!r}")
        self.symbols = symbols

    def rank(self, name: str) -> int:
        try:
            return self.symbols[name]
        except KeyError:
            raise UnknownSymbol(f"symbol {name!r} is not declared") from None

    def __contains__(self, name) -> bool:
        return name in self.symbols

    def __iter__(self):
        return iter(self.symbols)

    def __eq__(self, other):
        if not isinstance(other, RankedAlphabet):
            return NotImplemented
        return self.symbols == other.symbols

    def __repr__(self):
        inner = ", ".join(f"{n}:{r}" for n, r in self.symbols.items())
        return f"RankedAlphabet({{{inner}}})"

    def check_tree(self, t: "Tree") -> None:
        """Raise UnknownSymbol/ArityMismatch unless t is well formed here."""
        stack = [t]
        while stack:
            node = stack.pop()
            r = self.rank(node.label)
            if r != len(node.children):
                raise ArityMismatch(
                    f"symbol {node.label!r} has rank {r} but {len(node.children)} children"
                )
            stack.extend(node.children)

    def is_well_ranked(self, t: "Tree") -> bool:
        try:
            self.check_tree(t)
        except (UnknownSymbol, ArityMismatch):
            return False
        return True


class Tree:
    """An immutable ranked tree.  Size and hash are computed once, bottom-up."""

    __slots__ = ("label", "children", "size", "_hash")

    def __init__(self, label: str, children=()):
        self.label = label
        self.children = tuple(children)
        n = 1
        for c in self.children:
            n += c.size
        self.size = n
        self._hash = hash((label, self.children))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Tree):
            return NotImplemented
        # iterative compare: bench trees are deep, recursion is not safe
        stack = [(self, other)]
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            if (
                a._hash != b._hash
                or a.size != b.size
                or a.label != b.label
                or len(a.children) != len(b.children)
            ):
                return False
            stack.extend(zip(a.children, b.children))
        return True

    def __repr__(self):
        return f"Tree({format_term(self)!r})"

    def subtrees(self):
        """Yield every node of the tree, parent before child."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


def tree(label: str, *children: Tree) -> Tree:
    """Shorthand constructor: tree('f', tree('e'), tree('e'))."""
    return Tree(label, children)


def parse_term(text: str, alphabet: RankedAlphabet | None = None) -> Tree:
    """Parse `name` / `name(term,...,term)` text into a Tree.

    Rank-0 parentheses are optional: `e` and `e()` denote the same tree.
    When an alphabet is given, symbols and arities are checked as nodes
    are built.
    """
    tokens = _tokenize(text)
    pos = 0

    def fail(msg, at):
        line = text.count("\n", 0, at) + 1
        col = at - (text.rfind("\n", 0, at) + 1) + 1
        raise ParseError(msg, line, col)

    def make(name, children, at):
        if alphabet is not None:
            if name not in alphabet:
                fail(f"symbol {name!r} is not declared", at)
            r = alphabet.rank(name)
            if r != len(children):
                fail(f"symbol {name!r} expects {r} children, got {len(children)}", at)
        return Tree(name, children)

    # stack frames: [name, position, children list]
    stack = []
    result = None
    while True:
        if pos >= len(tokens):
            fail("unexpected end of input", len(text))
        tok, at = tokens[pos]
        if not NAME_RE.fullmatch(tok):
            fail(f"expected a symbol name, got {tok!r}", at)
        pos += 1
        if pos < len(tokens) and tokens[pos][0] == "(":
            pos += 1
            if pos < len(tokens) and tokens[pos][0] == ")":
                pos += 1
                node = make(tok, (), at)
            else:
                stack.append([tok, at, []])
                continue
        else:
            node = make(tok, (), at)
        # reduce: attach the finished node upward as far as possible
        while True:
            if not stack:
                result = node
                break
            if pos >= len(tokens):
                fail("unexpected end of input", len(text))
            sep, sat = tokens[pos]
            stack[-1][2].append(node)
            if sep == ",":
                pos += 1
                break
            if sep == ")":
                pos += 1
                name, nat, children = stack.pop()
                node = make(name, tuple(children), nat)
                continue
            fail(f"expected ',' or ')', got {sep!r}", sat)
        if result is not None:
            break
    if pos != len(tokens):
        fail(f"trailing input {tokens[pos][0]!r}", tokens[pos][1])
    return result


_TERM_TOKEN_RE = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*|[(),])")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TERM_TOKEN_RE.match(text, pos)
        if m is None:
            rest = text[pos:].lstrip()
            if not rest:
                break
            at = len(text) - len(rest)
            line = text.count("\n", 0, at) + 1
            col = at - (text.rfind("\n", 0, at) + 1) + 1
            raise ParseError(f"unexpected character {rest[0]!r}", line, col)
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    return tokens


def format_term(t: Tree) -> str:
    """Render a tree in term syntax; rank-0 symbols print without parens."""
    out = []
    work = [t]
    while work:
        item = work.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        out.append(item.label)
        if item.children:
            out.append("(")
            work.append(")")
            last = len(item.children) - 1
            for j, c in enumerate(reversed(item.children)):
                work.append(c)
                if j != last:
                    work.append(",")
    return "".join(out)


def term_sort_key(t: Tree):
    """A total structural order: by size, then by rendered text."""
    return (t.size, format_term(t))


def substitute(t: Tree, bindings: dict[str, Tree]) -> Tree:
    """Replace every leaf whose label is bound, simultaneously.

    Substituted trees are inserted verbatim and never rescanned, so
    bindings like y1 -> g(y1) terminate.  A bound name occurring with
    children is a rank violation.
    """
    if not bindings:
        return t

    def go(node):
        if node.label in bindings:
            if node.children:
                raise RankViolation(
                    f"cannot substitute for {node.label!r}: it has children here"
                )
            return bindings[node.label]
        if not node.children:
            return node
        new = tuple(go(c) for c in node.children)
        if all(a is b for a, b in zip(new, node.children)):
            return node
        return Tree(node.label, new)

    return go(t)


class TreeDag:
    """Minimal DAG of one tree: every distinct subtree is one node.

    Node references are ints issued in creation order, so children always
    precede parents.  The intern table maps (label, child refs) to the
    unique node carrying them.
    """

    __slots__ = ("labels", "kids", "intern", "root")

    def __init__(self):
        self.labels: list[str] = []
        self.kids: list[tuple[NodeRef, ...]] = []
        self.intern: dict[tuple, NodeRef] = {}
        self.root: NodeRef = BOTTOM

    def _add(self, label, kid_refs):
        key = (label, kid_refs)
        ref = self.intern.get(key)
        if ref is None:
            ref = len(self.labels)
            self.labels.append(label)
            self.kids.append(kid_refs)
            self.intern[key] = ref
        return ref

    def node_count(self) -> int:
        return len(self.labels)

    def _check(self, v: NodeRef):
        if v == BOTTOM:
            raise BottomAccess("bottom has no label or children")
        if not 0 <= v < len(self.labels):
            raise BottomAccess(f"node reference {v} is not in this DAG")

    def label(self, v: NodeRef) -> str:
        self._check(v)
        return self.labels[v]

    def arity(self, v: NodeRef) -> int:
        self._check(v)
        return len(self.kids[v])

    def child(self, v: NodeRef, i: int) -> NodeRef:
        """1-based child access."""
        self._check(v)
        ks = self.kids[v]
        if not 1 <= i <= len(ks):
            raise ChildIndexOutOfRange(
                f"child {i} of a node with {len(ks)} children"
            )
        return ks[i - 1]

    def children(self, v: NodeRef) -> tuple[NodeRef, ...]:
        self._check(v)
        return self.kids[v]

    def lookup(self, label: str, kid_refs: tuple[NodeRef, ...]) -> NodeRef:
        """The node carrying (label, kid_refs), or BOTTOM if there is none."""
        return self.intern.get((label, kid_refs), BOTTOM)

    def rho(self, t: Tree) -> NodeRef:
        """Map a tree to its node in this DAG, or BOTTOM if not a subtree."""
        # post-order with an explicit stack; short-circuits on BOTTOM
        done: dict[int, NodeRef] = {}
        stack = [(t, False)]
        while stack:
            node, expanded = stack.pop()
            if id(node) in done:
                continue
            if not expanded:
                stack.append((node, True))
                stack.extend((c, False) for c in node.children)
                continue
            refs = tuple(done[id(c)] for c in node.children)
            if BOTTOM in refs:
                ref = BOTTOM
            else:
                ref = self.intern.get((node.label, refs), BOTTOM)
            if ref == BOTTOM and node is t:
                return BOTTOM
            done[id(node)] = ref
        return done[id(t)]

    def expand(self, v: NodeRef) -> Tree:
        """Rebuild the tree rooted at a node."""
        self._check(v)
        built: dict[NodeRef, Tree] = {}
        stack = [(v, False)]
        while stack:
            ref, expanded = stack.pop()
            if ref in built:
                continue
            if not expanded:
                stack.append((ref, True))
                stack.extend((c, False) for c in self.kids[ref])
                continue
            built[ref] = Tree(self.labels[ref], tuple(built[c] for c in self.kids[ref]))
        return built[v]

    def nodes_by_label(self) -> dict[str, tuple[NodeRef, ...]]:
        index: dict[str, list[NodeRef]] = {}
        for ref, label in enumerate(self.labels):
            index.setdefault(label, []).append(ref)
        return {k: tuple(v) for k, v in index.items()}


def build_dag(t: Tree) -> tuple[TreeDag, NodeRef]:
    """Intern a tree into a fresh minimal DAG; returns (dag, root reference)."""
    dag = TreeDag()
    done: dict[int, NodeRef] = {}
    stack = [(t, False)]
    while stack:
        node, expanded = stack.pop()
        if id(node) in done:
            continue
        if not expanded:
            stack.append((node, True))
            stack.extend((c, False) for c in node.children)
            continue
        refs = tuple(done[id(c)] for c in node.children)
        done[id(node)] = dag._add(node.label, refs)
    dag.root = done[id(t)]
    return dag, dag.root


def enumerate_trees(
    alphabet: RankedAlphabet,
    *,
    max_size: int | None = None,
    max_depth: int | None = None,
) -> list[Tree]:
    """All trees over the alphabet within a size or depth bound.

    Exactly one bound must be given.  The result order is deterministic:
    ascending bound, then declaration order of symbols.
    """
    if (max_size is None) == (max_depth is None):
        raise ValueError("give exactly one of max_size, max_depth")
    names = list(alphabet.symbols)
    if max_size is not None:
        by_size: dict[int, list[Tree]] = {}
        for size in range(1, max_size + 1):
            acc = []
            for name in names:
                r = alphabet.rank(name)
                if r == 0:
                    if size == 1:
                        acc.append(Tree(name))
                    continue
                budget = size - 1
                if budget < r:
                    continue
                for split in _compositions(budget, r):
                    for kids in product(*(by_size[s] for s in split)):
                        acc.append(Tree(name, kids))
            by_size[size] = acc
        return [t for size in range(1, max_size + 1) for t in by_size[size]]
    exact: dict[int, list[Tree]] = {}
    upto: dict[int, list[Tree]] = {0: []}
    for depth in range(1, max_depth + 1):
        acc = []
        for name in names:
            r = alphabet.rank(name)
            if r == 0:
                if depth == 1:
                    acc.append(Tree(name))
                continue
            if depth == 1:
                continue
            for kids in product(upto[depth - 1], repeat=r):
                if max(_depth(k) for k in kids) == depth - 1:
                    acc.append(Tree(name, kids))
        exact[depth] = acc
        upto[depth] = upto[depth - 1] + acc
    return upto[max_depth]


def _depth(t: Tree) -> int:
    best = 0
    stack = [(t, 1)]
    while stack:
        node, d = stack.pop()
        if d > best:
            best = d
        stack.extend((c, d + 1) for c in node.children)
    return best


def _compositions(total: int, parts: int):
    """All tuples of `parts` positive ints summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@contextmanager
def recursion_room(extra: int):
    """Temporarily widen the recursion limit for work on deep trees."""
    old = sys.getrecursionlimit()
    need = 1000 + extra
    if need > old:
        sys.setrecursionlimit(need)
    try:
        yield
    finally:
        sys.setrecursionlimit(old)
