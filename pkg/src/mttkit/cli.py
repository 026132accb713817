"""Command line front end.

Subcommands: validate, member, sat, bench.  Membership exit codes are
0 = yes/sat, 1 = no/unsat, 2 = unknown, 3 = any diagnosed error (bad
usage, parse failure, engine/model mismatch).  Budgets for the
enumeration paths come from flags, falling back to the MTTKIT_MAX_SET
and MTTKIT_MAX_STEPS environment variables, then to built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from .bench import FAMILIES, bench_family, fit_power_law
from .errors import MttError
from .dsl import format_transducer, parse_transducer
from .io_membership import member_det, member_io
from .mtt import Mtt, validate
from .multi_return import MrMtt, member_mr_io, validate_mr
from .oi_fc import member_oi_fc
from .oracle import IO, NO, OI, UNKNOWN, YES, Budget, oracle_member
from .sat import SAT, UNSAT, build_sat_mtt, encode, parse_dimacs, sat_check_small
from .tac import TacMtt, member_io_tac, validate_tac_mtt
from .trees import format_term, parse_term

ENGINES = ("io", "oi-fc", "io-tac", "mr-io", "det", "oracle")

_EXIT = {YES: 0, NO: 1, UNKNOWN: 2, SAT: 0, UNSAT: 1}


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors, which collides with "unknown"
    def error(self, message):
        self.exit(3, f"{self.prog}: error: {message}\n")


def _budget(args) -> Budget:
    def pick(flag, env, default):
        if flag is not None:
            return flag
        raw = os.environ.get(env, "").strip()
        return int(raw) if raw else default

    return Budget(
        max_set_size=pick(args.max_set, "MTTKIT_MAX_SET", 100_000),
        max_tree_size=getattr(args, "max_tree", None),
        max_steps=pick(args.max_steps, "MTTKIT_MAX_STEPS", 10_000_000),
    )


def _budget_or_none(args) -> Budget | None:
    # distinguish "nothing asked for" so callees can apply their own default
    if (args.max_set is None and args.max_steps is None
            and not os.environ.get("MTTKIT_MAX_SET", "").strip()
            and not os.environ.get("MTTKIT_MAX_STEPS", "").strip()):
        return None
    return _budget(args)


def _load_transducer(path: str):
    return parse_transducer(Path(path).read_text())


def _load_term(path: str):
    return parse_term(Path(path).read_text())


def _emit(record: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(record))
        return
    for key, value in record.items():
        if key == "stats":
            for sk in sorted(value):
                print(f"{sk}: {value[sk]}")
        else:
            print(f"{key}: {value}")


def _bool(x: bool) -> str:
    return "true" if x else "false"


def cmd_validate(args) -> int:
    try:
        m = _load_transducer(args.file)
        record: dict = {"name": m.name}
        if isinstance(m, TacMtt):
            cls = validate_tac_mtt(m)
            record["kind"] = "mtt+tac"
            record["lookahead_states"] = len(m.tac.states())
            record["transitions"] = len(m.tac.transitions)
        elif isinstance(m, MrMtt):
            validate_mr(m)
            record["kind"] = "mrtt"
            record["states"] = len(m.ranks)
            record["m"] = max(m.ranks.values())
            record["max_dimension"] = max(m.dims.values())
            record["rules"] = sum(len(v) for v in m.rules.values())
            _emit(record, args.json)
            return 0
        else:
            cls = validate(m)
            record["kind"] = "mtt"
        record["deterministic"] = _bool(cls.deterministic)
        record["total"] = _bool(cls.total)
        record["linear_input"] = _bool(cls.linear_input)
        record["linear_params"] = _bool(cls.linear_params)
        record["m"] = cls.max_state_rank
        record["states"] = len(m.states)
        record["rules"] = sum(len(v) for v in m.rules.values())
        _emit(record, args.json)
        return 0
    except (MttError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _run_member(args, m, s, t) -> tuple[str, dict]:
    stats: dict = {}
    engine = args.engine
    if engine == "io":
        if not isinstance(m, Mtt):
            raise MttError("engine io needs a plain mtt file")
        return (YES if member_io(m, s, t, stats=stats) else NO), stats
    if engine == "oi-fc":
        if not isinstance(m, Mtt):
            raise MttError("engine oi-fc needs a plain mtt file")
        ok = member_oi_fc(m, args.copy_bound, s, t, stats=stats)
        return (YES if ok else NO), stats
    if engine == "io-tac":
        if not isinstance(m, TacMtt):
            raise MttError("engine io-tac needs an mtt file with a tac block")
        return (YES if member_io_tac(m, s, t, stats=stats) else NO), stats
    if engine == "mr-io":
        if not isinstance(m, MrMtt):
            raise MttError("engine mr-io needs an mrtt file")
        ok = member_mr_io(m, s, t, env_cap=args.env_cap, stats=stats)
        return (YES if ok else NO), stats
    if engine == "det":
        if not isinstance(m, Mtt):
            raise MttError("engine det needs a plain mtt file")
        ok = member_det([m], args.mode, s, t)
        stats.update(s_size=s.size, t_size=t.size)
        return (YES if ok else NO), stats
    if not isinstance(m, Mtt):
        raise MttError("engine oracle needs a plain mtt file")
    verdict = oracle_member(m, args.mode, s, t, _budget(args), stats=stats)
    return verdict, stats


def cmd_member(args) -> int:
    try:
        m = _load_transducer(args.mtt)
        s = _load_term(args.s)
        t = _load_term(args.t)
        t0 = time.perf_counter()
        verdict, stats = _run_member(args, m, s, t)
        elapsed = time.perf_counter() - t0
    except (MttError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    record = {
        "result": verdict,
        "engine": args.engine,
        "elapsed_ms": round(elapsed * 1000, 3),
        "stats": stats,
    }
    _emit(record, args.json)
    return _EXIT[verdict]


def cmd_sat(args) -> int:
    try:
        f = parse_dimacs(Path(args.cnf).read_text())
        inst = encode(f)
        out_dir = Path(args.out_dir) if args.out_dir else Path(args.cnf).parent
        out_dir.mkdir(parents=True, exist_ok=True)
        stem = Path(args.cnf).stem
        s_file = out_dir / f"{stem}.s.term"
        t_file = out_dir / f"{stem}.t.term"
        s_file.write_text(format_term(inst.s) + "\n")
        t_file.write_text(format_term(inst.t) + "\n")
        t0 = time.perf_counter()
        verdict = sat_check_small(f, _budget_or_none(args))
        elapsed = time.perf_counter() - t0
    except (MttError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    record = {
        "result": verdict,
        "engine": "oracle-oi",
        "elapsed_ms": round(elapsed * 1000, 3),
        "stats": {"n": f.n, "m": f.m, "s_size": inst.s.size,
                  "t_size": inst.t.size},
        "s_file": str(s_file),
        "t_file": str(t_file),
    }
    _emit(record, args.json)
    return _EXIT[verdict]


def _parse_ns(spec: str) -> list[int]:
    spec = spec.strip()
    if not spec:
        return []
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in spec.split(",") if part.strip()]


def cmd_bench(args) -> int:
    try:
        ns = _parse_ns(args.ns)
        rows = bench_family(args.family, ns, repeats=args.repeats)
    except (MttError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    exponent = fit_power_law(rows)
    if args.json:
        print(json.dumps({
            "family": args.family,
            "rows": [vars(r) for r in rows],
            "exponent": exponent,
        }))
        return 0
    print(f"family: {args.family}")
    for r in rows:
        if r.seconds is None:
            print(f"n: {r.n}  {r.note}")
        else:
            print(f"n: {r.n}  s_size: {r.s_size}  t_size: {r.t_size}  "
                  f"seconds: {r.seconds:.6f}")
    if exponent is not None:
        print(f"exponent: {exponent:.3f}")
    return 0


def cmd_sat_mtt(args) -> int:
    # convenience: dump the fixed formula generator in DSL form
    sys.stdout.write(format_transducer(build_sat_mtt()))
    return 0


def build_parser() -> _Parser:
    p = _Parser(prog="mttkit",
                description="translation membership for macro tree transducers")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="parse a transducer file and "
                       "report its class", add_help=True)
    v.add_argument("file")
    v.add_argument("--json", action="store_true")
    v.set_defaults(fn=cmd_validate)

    mem = sub.add_parser("member", help="decide whether (s, t) is in the "
                         "transducer's translation")
    mem.add_argument("--engine", choices=ENGINES, required=True)
    mem.add_argument("--mode", choices=(IO, OI), default=IO,
                     help="semantics for the det and oracle engines")
    mem.add_argument("--copy-bound", type=int, default=1,
                     help="parameter copy bound for oi-fc")
    mem.add_argument("--env-cap", type=int, default=100_000,
                     help="environment-set cap for mr-io")
    mem.add_argument("--max-set", type=int, default=None)
    mem.add_argument("--max-steps", type=int, default=None)
    mem.add_argument("--max-tree", type=int, default=None)
    mem.add_argument("--json", action="store_true")
    mem.add_argument("mtt")
    mem.add_argument("s")
    mem.add_argument("t")
    mem.set_defaults(fn=cmd_member)

    sat = sub.add_parser("sat", help="decide a tiny DIMACS 3-CNF by "
                         "translation membership")
    sat.add_argument("cnf")
    sat.add_argument("--out-dir", default=None,
                     help="where to write the encoded .term files")
    sat.add_argument("--max-set", type=int, default=None)
    sat.add_argument("--max-steps", type=int, default=None)
    sat.add_argument("--json", action="store_true")
    sat.set_defaults(fn=cmd_sat, max_tree=None)

    b = sub.add_parser("bench", help="time the io engine on an instance family")
    b.add_argument("family", choices=FAMILIES)
    b.add_argument("--ns", required=True,
                   help="sizes: comma list '50,100,200' or range '4..12'")
    b.add_argument("--repeats", type=int, default=3)
    b.add_argument("--json", action="store_true")
    b.set_defaults(fn=cmd_bench)

    g = sub.add_parser("sat-mtt", help="print the fixed 3-CNF generator "
                       "transducer")
    g.set_defaults(fn=cmd_sat_mtt)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
