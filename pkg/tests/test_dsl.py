"""Transducer text format: round-trips, leniency, error positions."""

import pytest

from mttkit.dsl import format_transducer, parse_transducer
from mttkit.errors import ArityMismatch, ParseError
from mttkit.families import (copyfree_mtt, double_mtt, doubling_mtt,
                             equal_pair_tacmtt, reverse_pair_mrtt)
from mttkit.mtt import Mtt, validate
from mttkit.multi_return import MrMtt, validate_mr
from mttkit.sat import build_sat_mtt
from mttkit.tac import TacMtt

FAMILIES = (double_mtt, doubling_mtt, copyfree_mtt, equal_pair_tacmtt,
            reverse_pair_mrtt, build_sat_mtt)


@pytest.mark.parametrize("make", FAMILIES, ids=lambda f: f.__name__)
def test_round_trip(make):
    m = make()
    text = format_transducer(m)
    again = parse_transducer(text)
    assert again == m
    assert format_transducer(again) == text


def test_parse_returns_matching_model_kind():
    assert isinstance(parse_transducer(format_transducer(double_mtt())), Mtt)
    assert isinstance(
        parse_transducer(format_transducer(equal_pair_tacmtt())), TacMtt)
    assert isinstance(
        parse_transducer(format_transducer(reverse_pair_mrtt())), MrMtt)


DOC_EXAMPLE = """
mtt double {
  input { a: 1, e: 0 }
  output { f: 2, e: 0 }
  state q0: 0 init
  state q: 1

  rule q0(a(x1)) -> q[x1](e)
  rule q(a(x1))(y1) -> q[x1](f(y1, y1))
  rule q(e)(y1) -> f(y1, y1)
}
"""


def test_parse_basic_example():
    m = parse_transducer(DOC_EXAMPLE)
    assert m.name == "double"
    assert m.states == {"q0": 0, "q": 1}
    assert m.initial == "q0"
    assert set(m.rules) == {("q0", "a"), ("q", "a"), ("q", "e")}
    assert validate(m).deterministic


def test_comments_and_layout_do_not_matter():
    squeezed = DOC_EXAMPLE.replace("\n  ", "\n").replace("(y1)", "( y1 )")
    commented = squeezed.replace("state q: 1", "state q: 1 # helper state")
    assert parse_transducer(commented) == parse_transducer(DOC_EXAMPLE)


def test_alternatives_accumulate_in_source_order():
    text = DOC_EXAMPLE.replace(
        "rule q(e)(y1) -> f(y1, y1)",
        "rule q(e)(y1) -> f(y1, y1)\n  rule q(e)(y1) -> e")
    m = parse_transducer(text)
    alts = m.rules[("q", "e")]
    assert len(alts) == 2
    assert alts[0].sym == "f" and alts[1].sym == "e"
    assert not validate(m).deterministic


def _expect_error(text: str, fragment: str, line: int | None = None):
    with pytest.raises(ParseError) as e:
        parse_transducer(text)
    assert fragment in str(e.value)
    if line is not None:
        assert e.value.line == line
    return e.value


def test_header_errors():
    _expect_error("widget w {}", "must start with", 1)
    _expect_error("mtt rule {}", "reserved word", 1)
    _expect_error("mtt m { input { a: 1 } input { a: 1 } }",
                  "duplicate input section")
    _expect_error("mtt m { input { } }", "empty input alphabet")
    _expect_error("mtt m { input { a: 1, a: 0 } }", "duplicate symbol")
    _expect_error("mtt m @", "unexpected character", 1)


def test_missing_section_errors():
    _expect_error("mtt m { output { e: 0 } state q0: 0 init }",
                  "missing input section")
    _expect_error("mtt m { input { e: 0 } state q0: 0 init }",
                  "missing output section")
    _expect_error("mtt m { input { e: 0 } output { e: 0 } state q0: 0 }",
                  "no state marked init")


def test_state_and_rule_errors():
    base = "mtt m {{ input {{ a: 1, e: 0 }} output {{ e: 0 }} {0} }}"
    _expect_error(base.format("state q0: 0 init state q0: 1"),
                  "duplicate state")
    _expect_error(base.format("state q0: 0 init state q1: 0 init"),
                  "more than one state marked init")
    _expect_error(base.format("state q0: 0 init rule q1(e) -> e"),
                  "undeclared state")
    _expect_error("mtt m { rule q0(e) -> e }",
                  "rules must follow alphabet and state sections")
    _expect_error(base.format("state q0: 0 init rule q0(zz) -> e"),
                  "not an input symbol")
    _expect_error(base.format("state q0: 0 init rule q0(a) -> e"),
                  "rank 1, pattern names 0")
    _expect_error(base.format("state q0: 0 init rule q0(a(x2)) -> e"),
                  "must be x1..x1 in order")
    _expect_error(base.format("state q0: 0 init rule q0(e)(y1) -> y1"),
                  "rank 0, rule lists 1 parameters")
    _expect_error(base.format("state q0: 1 init rule q0(e)(y2) -> e"),
                  "parameters must be y1..ym in order")


def test_error_positions_point_at_the_offender():
    err = _expect_error("mtt m {\n  input { a: 1, e: 0 }\n"
                        "  output { e: 0 }\n  state q0: 0 init\n"
                        "  rule q0(b(x1)) -> e\n}",
                        "not an input symbol", line=5)
    assert err.column == 11


def test_trailing_junk_rejected():
    _expect_error(DOC_EXAMPLE + "mtt extra {}", "expected 'eof'")


def test_guard_errors():
    _expect_error(
        "mtt m { input { a: 1, e: 0 } output { e: 0 } state q0: 0 init\n"
        "  rule q0(a(x1)) when (p) -> e }",
        "when-guards need a tac block", line=2)
    _expect_error(
        "mtt m { input { pi: 2, e: 0 } output { e: 0 } state q0: 0 init\n"
        "  rule q0(pi(x1, x2)) when (p; eq 1 2) -> e\n"
        "  tac { trans e -> p trans pi(p, p) -> p } }",
        "lists 1 child states, need 2")
    _expect_error(
        "mtt m { input { e: 0 } output { e: 0 } state q0: 0 init\n"
        "  rule q0(e) when (; foo) -> e\n  tac { trans e -> p } }",
        "expected 'eq' or 'neq'")
    _expect_error(
        "mtt m { input { e: 0 } output { e: 0 } state q0: 0 init\n"
        "  rule q0(e) -> e\n  tac { trans e -> p }\n"
        "  tac { trans e -> p } }",
        "duplicate tac block", line=4)
    _expect_error(
        "mtt m { input { a: 1, e: 0 } output { e: 0 } state q0: 0 init\n"
        "  rule q0(e) -> e\n  tac { trans a -> p } }",
        "rank 1, transition lists 0")
    _expect_error(
        "mtt m { tac { trans e -> p } }",
        "tac block must follow the input section")


def test_validation_runs_on_load():
    bad_arity = DOC_EXAMPLE.replace("f(y1, y1)", "f(y1)")
    with pytest.raises(ArityMismatch):
        parse_transducer(bad_arity)
    m = parse_transducer(bad_arity, check=False)
    with pytest.raises(ArityMismatch):
        validate(m)


MR_EXAMPLE = """
mrtt rot {
  input { s: 1, z: 0 }
  output { a: 1, b: 0, pair: 2 }
  state q0: 0/1 init
  state q: 0/2

  rule q0(s(x1)) -> let (z1, z2) = q[x1] in (pair(z1, a(z2)))
  rule q0(z) -> pair(b, b)
  rule q(z) -> (b, b)
  rule q(s(x1)) -> let (z1, z2) = q[x1] in (a(z1), z2)
}
"""


def test_parse_mr_features():
    m = parse_transducer(MR_EXAMPLE)
    assert isinstance(m, MrMtt)
    assert m.ranks == {"q0": 0, "q": 0}
    assert m.dims == {"q0": 1, "q": 2}
    r = m.rules[("q0", "s")][0]
    assert r.lets[0].targets == (1, 2)
    assert len(r.result) == 1
    # single-target lets may omit the parens
    single = MR_EXAMPLE.replace("let (z1, z2) = q[x1] in (a(z1), z2)",
                                "let z1 = q0[x1] in (a(z1), b)")
    assert isinstance(parse_transducer(single), MrMtt)


def test_mr_errors():
    _expect_error(MR_EXAMPLE.replace("state q0: 0/1 init",
                                     "state q0: 0 init"),
                  "expected '/'")
    _expect_error(MR_EXAMPLE.replace("rule q0(z) -> pair(b, b)",
                                     "rule q0(z) when (p) -> pair(b, b)"),
                  "when-guards are not supported on mrtt")
    _expect_error(MR_EXAMPLE.replace("rule q0(z) -> pair(b, b)",
                                     "rule q0(z) -> q[x1]"),
                  "state calls may only appear in let-bindings")
    _expect_error(MR_EXAMPLE + "\ntac { trans z -> p }",
                  "expected 'eof'")
    unbound = MR_EXAMPLE.replace("rule q0(z) -> pair(b, b)",
                                 "rule q0(z) -> pair(z1, b)")
    with pytest.raises(Exception):
        parse_transducer(unbound)
    assert isinstance(parse_transducer(unbound, check=False), MrMtt)


def test_mrtt_rejects_tac_block():
    text = MR_EXAMPLE.replace(
        "rule q0(z) -> pair(b, b)",
        "rule q0(z) -> pair(b, b)\n  tac { trans z -> p }")
    _expect_error(text, "mrtt files cannot declare a tac block")


def test_formatted_text_is_plain_ascii():
    for make in FAMILIES:
        text = format_transducer(make())
        assert text.isascii()
        assert text.endswith("}\n")
