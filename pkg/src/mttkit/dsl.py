"""Text format for transducers.

    mtt double {
      input { a: 1, e: 0 }
      output { f: 2, e: 0 }
      state q0: 0 init
      state q: 1

      rule q0(a(x1)) -> q[x1](e)
      rule q(a(x1))(y1) -> q[x1](f(y1, y1))
      rule q(e)(y1) -> f(y1, y1)
    }

Patterns name input children x1..xk in order, parameters y1..ym in
order.  State calls in right-hand sides select the child in brackets:
q[x1](args).  Look-ahead-guarded rules add `when (s1, s2; eq 1 2)`
between the parameter list and the arrow, with the automaton declared in
a `tac { trans sym(s1, s2; eq 1 2) -> s ... }` block.  Multi-return
transducers start with `mrtt`, declare `state q: rank/dim`, and write
right-hand sides as let-bindings over z-variables ending in a result
tuple: `let (z1, z2) = q[x1](e) in (z2, a(z1))`.  `#` starts a comment.

Parsing is lenient about anything validate() can check later: it
resolves names and shapes, then runs the structural validator so both
kinds of errors surface on load.
"""

from __future__ import annotations

import re

from .errors import ParseError
from .mtt import Call, Mtt, Out, Param, validate
from .multi_return import MrLet, MrMtt, MrRhs, ZVar, validate_mr
from .tac import Tac, TacMtt, TacRule, TacTransition, validate_tac_mtt
from .trees import RankedAlphabet

KEYWORDS = frozenset(
    "mtt mrtt input output state rule init when eq neq tac trans let in".split())

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<comment>#[^\n]*)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<int>[0-9]+)"
    r"|(?P<arrow>->)"
    r"|(?P<punct>[{}()\[\],:;/=])"
)

_XVAR_RE = re.compile(r"x([1-9][0-9]*)\Z")
_YVAR_RE = re.compile(r"y([1-9][0-9]*)\Z")
_ZVAR_RE = re.compile(r"z([1-9][0-9]*)\Z")


class _Tok:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}",
                             line=line, column=col)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind if kind in ("name", "int") else chunk,
                             chunk, line, col))
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    toks.append(_Tok("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def next(self) -> _Tok:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def at(self, kind: str) -> bool:
        return self.toks[self.pos].kind == kind

    def at_word(self, word: str) -> bool:
        t = self.toks[self.pos]
        return t.kind == "name" and t.text == word

    def error(self, msg: str, tok: _Tok | None = None):
        t = tok or self.peek()
        raise ParseError(msg, line=t.line, column=t.col)

    def expect(self, kind: str) -> _Tok:
        if not self.at(kind):
            self.error(f"expected {kind!r}, found {self.peek().text!r}")
        return self.next()

    def expect_word(self, word: str) -> _Tok:
        if not self.at_word(word):
            self.error(f"expected {word!r}, found {self.peek().text!r}")
        return self.next()

    def name(self, what: str) -> str:
        t = self.peek()
        if t.kind != "name":
            self.error(f"expected {what}, found {t.text!r}")
        if t.text in KEYWORDS:
            self.error(f"{t.text!r} is a reserved word, cannot be a {what}")
        return self.next().text

    def integer(self, what: str) -> int:
        t = self.peek()
        if t.kind != "int":
            self.error(f"expected {what}, found {t.text!r}")
        return int(self.next().text)

    # indexed variable like x3 / y2 / z1
    def ivar(self, regex, letter: str) -> int:
        t = self.peek()
        m = regex.match(t.text) if t.kind == "name" else None
        if m is None:
            self.error(f"expected a {letter}-variable, found {t.text!r}")
        self.next()
        return int(m.group(1))


def _parse_alphabet(p: _Parser, what: str) -> RankedAlphabet:
    p.expect("{")
    symbols: dict[str, int] = {}
    while not p.at("}"):
        tok = p.peek()
        sym = p.name(f"{what} symbol")
        if sym in symbols:
            p.error(f"duplicate symbol {sym!r}", tok)
        p.expect(":")
        symbols[sym] = p.integer("rank")
        if p.at(","):
            p.next()
    p.expect("}")
    if not symbols:
        p.error(f"empty {what} alphabet")
    return RankedAlphabet(symbols)


def _parse_guard_body(p: _Parser, k: int, what: str):
    """states? (';' (eq|neq) i j)* inside parens; k = expected arity."""
    states: list[str] = []
    eq: list[tuple[int, int]] = []
    neq: list[tuple[int, int]] = []
    if p.at("name") and not (p.at_word("eq") or p.at_word("neq")):
        states.append(p.name(f"{what} state"))
        while p.at(","):
            p.next()
            states.append(p.name(f"{what} state"))
        if len(states) != k:
            p.error(f"{what} lists {len(states)} child states, need {k}")
    while p.at(";"):
        p.next()
        if p.at_word("eq"):
            p.next()
            eq.append((p.integer("child index"), p.integer("child index")))
        elif p.at_word("neq"):
            p.next()
            neq.append((p.integer("child index"), p.integer("child index")))
        else:
            p.error("expected 'eq' or 'neq' after ';'")
    return (tuple(states) if states else None), tuple(eq), tuple(neq)


def _parse_pattern(p: _Parser, input_alphabet: RankedAlphabet):
    """sym or sym(x1, .., xk); children must be x1..xk in order."""
    tok = p.peek()
    sym = p.name("input symbol")
    if sym not in input_alphabet:
        p.error(f"{sym!r} is not an input symbol", tok)
    k = input_alphabet.rank(sym)
    seen = 0
    if p.at("("):
        p.next()
        while not p.at(")"):
            tok = p.peek()
            i = p.ivar(_XVAR_RE, "x")
            seen += 1
            if i != seen:
                p.error(f"pattern children must be x1..x{k} in order", tok)
            if p.at(","):
                p.next()
        p.expect(")")
    if seen != k:
        p.error(f"{sym!r} has rank {k}, pattern names {seen} children", tok)
    return sym, k


def _parse_params(p: _Parser) -> int:
    """Optional (y1, .., ym); returns m."""
    if not p.at("("):
        return 0
    p.next()
    seen = 0
    while not p.at(")"):
        tok = p.peek()
        i = p.ivar(_YVAR_RE, "y")
        seen += 1
        if i != seen:
            p.error("parameters must be y1..ym in order", tok)
        if p.at(","):
            p.next()
    p.expect(")")
    return seen


def _parse_term(p: _Parser, *, calls: bool, zvars: bool):
    t = p.peek()
    if t.kind == "name" and _YVAR_RE.match(t.text):
        p.next()
        return Param(int(t.text[1:]))
    if zvars and t.kind == "name" and _ZVAR_RE.match(t.text):
        p.next()
        return ZVar(int(t.text[1:]))
    sym = p.name("term")
    if p.at("["):
        if not calls:
            p.error("state calls may only appear in let-bindings here", t)
        p.next()
        child = p.ivar(_XVAR_RE, "x")
        p.expect("]")
        args = _parse_args(p, calls=calls, zvars=zvars)
        return Call(sym, child, args)
    args = _parse_args(p, calls=calls, zvars=zvars)
    return Out(sym, args)


def _parse_args(p: _Parser, *, calls: bool, zvars: bool) -> tuple:
    if not p.at("("):
        return ()
    p.next()
    args = []
    while not p.at(")"):
        args.append(_parse_term(p, calls=calls, zvars=zvars))
        if p.at(","):
            p.next()
    p.expect(")")
    return tuple(args)


def _parse_mr_body(p: _Parser) -> MrRhs:
    lets = []
    while p.at_word("let"):
        p.next()
        targets = []
        if p.at("("):
            p.next()
            while not p.at(")"):
                targets.append(p.ivar(_ZVAR_RE, "z"))
                if p.at(","):
                    p.next()
            p.expect(")")
        else:
            targets.append(p.ivar(_ZVAR_RE, "z"))
        p.expect("=")
        state = p.name("state")
        p.expect("[")
        child = p.ivar(_XVAR_RE, "x")
        p.expect("]")
        args = _parse_args(p, calls=False, zvars=True)
        p.expect_word("in")
        lets.append(MrLet(tuple(targets), state, child, args))
    if p.at("("):
        p.next()
        result = []
        while not p.at(")"):
            result.append(_parse_term(p, calls=False, zvars=True))
            if p.at(","):
                p.next()
        p.expect(")")
    else:
        result = [_parse_term(p, calls=False, zvars=True)]
    return MrRhs(tuple(lets), tuple(result))


def parse_transducer(text: str, *, check: bool = True):
    """Parse one transducer block; returns Mtt, TacMtt, or MrMtt.

    With check=True (the default) the structural validator runs after
    parsing, so rank and range violations raise even though the grammar
    itself does not track them.
    """
    p = _Parser(text)
    if p.at_word("mtt"):
        kind = "mtt"
    elif p.at_word("mrtt"):
        kind = "mrtt"
    else:
        p.error("file must start with 'mtt' or 'mrtt'")
    p.next()
    name = p.name("transducer name")
    p.expect("{")

    input_alphabet = output_alphabet = None
    states: dict[str, int] = {}
    dims: dict[str, int] = {}
    initial = None
    rules: dict = {}
    guarded: dict = {}
    any_when = False
    first_when: _Tok | None = None
    tac_transitions = None

    while not p.at("}"):
        if p.at_word("input"):
            tok = p.next()
            if input_alphabet is not None:
                p.error("duplicate input section", tok)
            input_alphabet = _parse_alphabet(p, "input")
        elif p.at_word("output"):
            tok = p.next()
            if output_alphabet is not None:
                p.error("duplicate output section", tok)
            output_alphabet = _parse_alphabet(p, "output")
        elif p.at_word("state"):
            p.next()
            tok = p.peek()
            q = p.name("state name")
            if q in states:
                p.error(f"duplicate state {q!r}", tok)
            p.expect(":")
            states[q] = p.integer("rank")
            if kind == "mrtt":
                p.expect("/")
                dims[q] = p.integer("dimension")
            if p.at_word("init"):
                tok = p.next()
                if initial is not None:
                    p.error("more than one state marked init", tok)
                initial = q
        elif p.at_word("rule"):
            tok = p.next()
            if input_alphabet is None or output_alphabet is None or not states:
                p.error("rules must follow alphabet and state sections", tok)
            q = p.name("state")
            if q not in states:
                p.error(f"rule for undeclared state {q!r}", tok)
            p.expect("(")
            sym, k = _parse_pattern(p, input_alphabet)
            p.expect(")")
            m_params = _parse_params(p)
            if m_params != states[q]:
                p.error(f"state {q!r} has rank {states[q]}, "
                        f"rule lists {m_params} parameters", tok)
            la, eq, neq = None, (), ()
            if p.at_word("when"):
                wtok = p.next()
                if kind == "mrtt":
                    p.error("when-guards are not supported on mrtt rules", wtok)
                any_when = True
                first_when = first_when or wtok
                p.expect("(")
                la, eq, neq = _parse_guard_body(p, k, "when-guard")
                p.expect(")")
            p.expect("->")
            if kind == "mrtt":
                rhs = _parse_mr_body(p)
                rules.setdefault((q, sym), []).append(rhs)
            else:
                rhs = _parse_term(p, calls=True, zvars=False)
                rules.setdefault((q, sym), []).append(rhs)
                guarded.setdefault((q, sym), []).append(
                    TacRule(rhs, lookahead=la, eq=eq, neq=neq))
        elif p.at_word("tac"):
            tok = p.next()
            if kind == "mrtt":
                p.error("mrtt files cannot declare a tac block", tok)
            if tac_transitions is not None:
                p.error("duplicate tac block", tok)
            if input_alphabet is None:
                p.error("tac block must follow the input section", tok)
            p.expect("{")
            tac_transitions = []
            while not p.at("}"):
                p.expect_word("trans")
                stok = p.peek()
                sym = p.name("input symbol")
                if sym not in input_alphabet:
                    p.error(f"{sym!r} is not an input symbol", stok)
                k = input_alphabet.rank(sym)
                la, eq, neq = (), (), ()
                if p.at("("):
                    p.next()
                    la, eq, neq = _parse_guard_body(p, k, "transition")
                    p.expect(")")
                    la = la or ()
                if len(la) != k:
                    p.error(f"{sym!r} has rank {k}, transition lists "
                            f"{len(la)} child states", stok)
                p.expect("->")
                target = p.name("look-ahead state")
                tac_transitions.append(
                    TacTransition(sym, la, eq=eq, neq=neq, target=target))
            p.expect("}")
        else:
            p.error(f"unexpected {p.peek().text!r} in transducer body")
    p.expect("}")
    p.expect("eof")

    if input_alphabet is None:
        raise ParseError("missing input section", line=1, column=1)
    if output_alphabet is None:
        raise ParseError("missing output section", line=1, column=1)
    if initial is None:
        raise ParseError("no state marked init", line=1, column=1)
    if any_when and tac_transitions is None:
        p.error("when-guards need a tac block declaring the automaton",
                first_when)

    if kind == "mrtt":
        m = MrMtt(name=name, input_alphabet=input_alphabet,
                  output_alphabet=output_alphabet, ranks=states, dims=dims,
                  initial=initial,
                  rules={k2: tuple(v) for k2, v in rules.items()})
        if check:
            validate_mr(m)
        return m
    if tac_transitions is not None:
        tm = TacMtt(name=name, input_alphabet=input_alphabet,
                    output_alphabet=output_alphabet, states=states,
                    initial=initial,
                    rules={k2: tuple(v) for k2, v in guarded.items()},
                    tac=Tac(input_alphabet, tuple(tac_transitions)))
        if check:
            validate_tac_mtt(tm)
        return tm
    m = Mtt(name=name, input_alphabet=input_alphabet,
            output_alphabet=output_alphabet, states=states, initial=initial,
            rules={k2: tuple(v) for k2, v in rules.items()})
    if check:
        validate(m)
    return m


def _fmt_term(t, parts: list[str]) -> None:
    if isinstance(t, Param):
        parts.append(f"y{t.index}")
    elif isinstance(t, ZVar):
        parts.append(f"z{t.index}")
    elif isinstance(t, Call):
        parts.append(f"{t.state}[x{t.child}]")
        _fmt_args(t.args, parts)
    else:
        parts.append(t.sym)
        _fmt_args(t.args, parts)


def _fmt_args(args, parts: list[str]) -> None:
    if not args:
        return
    parts.append("(")
    for i, a in enumerate(args):
        if i:
            parts.append(", ")
        _fmt_term(a, parts)
    parts.append(")")


def _fmt_alphabet(a: RankedAlphabet) -> str:
    inner = ", ".join(f"{sym}: {a.rank(sym)}" for sym in sorted(a))
    return "{ " + inner + " }"


def _fmt_rule_head(q: str, sym: str, k: int, rank: int) -> str:
    head = f"rule {q}({sym}"
    if k:
        head += "(" + ", ".join(f"x{i}" for i in range(1, k + 1)) + ")"
    head += ")"
    if rank:
        head += "(" + ", ".join(f"y{i}" for i in range(1, rank + 1)) + ")"
    return head


def _fmt_guard(la, eq, neq) -> str:
    head = ", ".join(la) if la else ""
    cons = "".join(f"; eq {i} {j}" for i, j in eq)
    cons += "".join(f"; neq {i} {j}" for i, j in neq)
    if not head and cons:
        cons = cons[2:]
    return f" when ({head}{cons})"


def format_transducer(m) -> str:
    """Canonical text for an Mtt, TacMtt, or MrMtt; parses back equal."""
    is_mr = isinstance(m, MrMtt)
    is_tac = isinstance(m, TacMtt)
    lines = [f"{'mrtt' if is_mr else 'mtt'} {m.name} {{"]
    lines.append(f"  input {_fmt_alphabet(m.input_alphabet)}")
    lines.append(f"  output {_fmt_alphabet(m.output_alphabet)}")
    ranks = m.ranks if is_mr else m.states
    for q, rank in ranks.items():
        d = f"/{m.dims[q]}" if is_mr else ""
        mark = " init" if q == m.initial else ""
        lines.append(f"  state {q}: {rank}{d}{mark}")
    lines.append("")
    for (q, sym), alts in m.rules.items():
        k = m.input_alphabet.rank(sym)
        head = _fmt_rule_head(q, sym, k, ranks[q])
        for alt in alts:
            parts: list[str] = []
            if is_mr:
                for let in alt.lets:
                    tg = (f"z{let.targets[0]}" if len(let.targets) == 1 else
                          "(" + ", ".join(f"z{i}" for i in let.targets) + ")")
                    parts.append(f"let {tg} = {let.state}[x{let.child}]")
                    _fmt_args(let.args, parts)
                    parts.append(" in ")
                if len(alt.result) == 1:
                    _fmt_term(alt.result[0], parts)
                else:
                    parts.append("(")
                    for i, r in enumerate(alt.result):
                        if i:
                            parts.append(", ")
                        _fmt_term(r, parts)
                    parts.append(")")
                lines.append(f"  {head} -> {''.join(parts)}")
            elif is_tac:
                guard = ("" if not alt.lookahead and not alt.eq and not alt.neq
                         else _fmt_guard(alt.lookahead, alt.eq, alt.neq))
                parts = []
                _fmt_term(alt.rhs, parts)
                lines.append(f"  {head}{guard} -> {''.join(parts)}")
            else:
                parts = []
                _fmt_term(alt, parts)
                lines.append(f"  {head} -> {''.join(parts)}")
    if is_tac:
        lines.append("")
        lines.append("  tac {")
        for tr in m.tac.transitions:
            bits = ", ".join(tr.states)
            for i, j in tr.eq:
                bits += f"; eq {i} {j}"
            for i, j in tr.neq:
                bits += f"; neq {i} {j}"
            inner = f"({bits})" if bits else ""
            lines.append(f"    trans {tr.sym}{inner} -> {tr.target}")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"
