"""Command-line entry point ``atg``.

Exit codes: 0 success, 2 invalid input, 3 infeasible configuration,
4 internal assertion (a verified invariant failed).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .clusters import failure_bound, threshold_bounds
from .codes import CodeValidationError, CssCode, bundled_code_path, logical_basis, parse_code_file
from .decoder import EXACT, MODES, DecodeError
from .ghz import InfeasiblePattern, ghz_layers, ghz_stabilizers
from .graph import bell_pattern, build_atg
from .harness import SweepConfig, parse_pattern, run_sweep
from .mbqc import mbqc_check, tableau_round_trip
from .noise import NoiseConfig
from .stabilizers import bell_stabilizers, element_to_json
from .tableau import ORACLE_CAP, OracleCapExceeded, oracle_cross_check

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_ASSERT = 0, 2, 3, 4


class UsageError(ValueError):
    pass


def load_code(name_or_path: str) -> CssCode:
    """A JSON path, or the name of a bundled code (422, steane, hgp13)."""
    path = Path(name_or_path)
    if not path.exists():
        bundled = bundled_code_path(name_or_path)
        if bundled.exists():
            path = bundled
        else:
            raise FileNotFoundError(f"code file {name_or_path} not found (and no bundled code of that name)")
    return parse_code_file(path)


def _emit(obj, out: str | None = None) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _pattern_arg(args):
    name, m = parse_pattern(args.pattern)
    if getattr(args, "m", None) is not None:
        name, m = "ghz", args.m
    return name, m


def _stabilizer_sets(g, name, m):
    lb = logical_basis(g.code)
    if name == "bell":
        s0, s1 = bell_stabilizers(g, lb)
        return bell_pattern(g), s0, s1
    pat = ghz_layers(g.T, m)
    s0, s1 = ghz_stabilizers(g, pat, lb)
    return pat.measurement(g), s0, s1


def cmd_validate(args) -> int:
    code = load_code(args.code)
    from .codes import distance_bruteforce

    d = code.d
    if d is None and code.n <= 25:
        d = distance_bruteforce(code)
    _emit({"name": code.name, "n": code.n, "k": code.k, "m_x": code.m_x, "m_z": code.m_z,
           "ell": code.ell, "d": d, "valid": True})
    return EXIT_OK


def cmd_build(args) -> int:
    g = build_atg(load_code(args.code), args.T)
    obj = g.to_json()
    obj["n_vertices"] = g.n_vertices
    obj["n_edges"] = len(g.edges)
    _emit(obj, args.out)
    return EXIT_OK


def cmd_stabilizers(args) -> int:
    g = build_atg(load_code(args.code), args.T)
    name, m = _pattern_arg(args)
    pat, s0, s1 = _stabilizer_sets(g, name, m)
    _emit({"pattern": name if name == "bell" else f"ghz({m})",
           "unmeasured_layers": list(pat.unmeasured_layers),
           "s0": [element_to_json(g, e, pat.measured_mask) for e in s0],
           "s1": [element_to_json(g, e, pat.measured_mask) for e in s1]}, args.out)
    return EXIT_OK


def cmd_trial(args) -> int:
    from .decoder import Pipeline
    from .noise import make_rng

    g = build_atg(load_code(args.code), args.T)
    name, m = _pattern_arg(args)
    pat, s0, s1 = _stabilizer_sets(g, name, m)
    out = Pipeline(g, pat, s0, s1, args.mode).run(args.p, make_rng(args.seed))
    _emit(out.to_json(g))
    return EXIT_OK if out.cluster_weight_ok is not False else EXIT_ASSERT


def _sweep(args, name, m) -> int:
    cfg = SweepConfig(load_code(args.code), args.T, tuple(args.p), args.trials, args.seed, name, m, args.mode,
                      Path(args.out) if args.out else None, args.format, args.timing, args.threads)
    res = run_sweep(cfg)
    if args.out is None:
        sys.stdout.write(res.to_csv() if args.format == "csv" else res.to_json())
    return EXIT_OK


def cmd_sweep(args) -> int:
    name, m = _pattern_arg(args)
    return _sweep(args, name, m)


def cmd_ghz(args) -> int:
    return _sweep(args, "ghz", args.m)


def cmd_mbqc_check(args) -> int:
    code = load_code(args.code)
    rep = mbqc_check(code, args.T, args.trials, args.seed, args.p)
    obj = rep.to_json()
    ok = rep.ok
    if args.oracle:
        res = tableau_round_trip(code, args.T, args.seed)
        bad = sum(not ok_ for _, ok_ in res)
        obj["tableau_locations"] = len(res)
        obj["tableau_mismatches"] = bad
        ok = ok and not bad
    obj["ok"] = ok
    _emit(obj)
    return EXIT_OK if ok else EXIT_ASSERT


def cmd_oracle_check(args) -> int:
    g = build_atg(load_code(args.code), args.T)
    if g.n_vertices > ORACLE_CAP:
        raise OracleCapExceeded(f"{g.n_vertices} qubits exceed the oracle cap {ORACLE_CAP}")
    name, m = _pattern_arg(args)
    pat, s0, s1 = _stabilizer_sets(g, name, m)
    rep = oracle_cross_check(g, pat, NoiseConfig(args.p, args.seed), args.trials, s0, s1, mode=args.mode)
    _emit(rep.to_json())
    return EXIT_OK if rep.ok else EXIT_ASSERT


def _frac(x: Fraction) -> dict:
    return {"exact": str(x), "float": float(x)}


def cmd_bounds(args) -> int:
    code = load_code(args.code) if args.code else None
    if args.ell is None and code is None:
        raise UsageError("give --ell or --code")
    ell = args.ell if args.ell is not None else code.ell
    b = threshold_bounds(ell)
    obj = {"ell": ell, "z": b.z, "p0": _frac(b.p0), "p1": _frac(b.p1), "p2": _frac(b.p2), "p_star": _frac(b.p_star)}
    if args.p is not None:
        if code is None or args.T is None:
            raise UsageError("--p needs --code and --T")
        fb = failure_bound(code, args.T, args.p, b)
        obj["failure_bound"] = {"span_x": fb.span_x, "span_z": fb.span_z, "logical_x": fb.logical_x,
                                "logical_z": fb.logical_z, "total": fb.total, "upper_bound_only": True}
    _emit(obj)
    return EXIT_OK


def _prob(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not a probability")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="atg", description="Alternating Tanner graph state preparation toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def code_arg(p):
        p.add_argument("--code", required=True, help="code JSON file or bundled name (422, steane, hgp13)")

    def pattern_args(p):
        p.add_argument("--pattern", default="bell", help="bell or ghz(m)")
        p.add_argument("--m", type=int, default=None, help="number of unmeasured layers (implies ghz)")

    p = sub.add_parser("validate", help="check a code file and print its parameters")
    code_arg(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("build", help="emit the ATG as JSON")
    code_arg(p)
    p.add_argument("--T", type=_positive, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("stabilizers", help="emit S0 and S1 with factorization status")
    code_arg(p)
    p.add_argument("--T", type=_positive, required=True)
    pattern_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stabilizers)

    p = sub.add_parser("trial", help="run one trial and print the outcome as JSON")
    code_arg(p)
    p.add_argument("--T", type=_positive, required=True)
    p.add_argument("--p", type=_prob, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=MODES, default=EXACT)
    pattern_args(p)
    p.set_defaults(func=cmd_trial)

    for name, helptext in (("sweep", "Monte Carlo sweep over p"), ("ghz", "sweep with a GHZ pattern")):
        p = sub.add_parser(name, help=helptext)
        code_arg(p)
        p.add_argument("--T", type=_positive, required=True)
        p.add_argument("--p", type=_prob, nargs="+", required=True)
        p.add_argument("--trials", type=_positive, default=1000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--mode", choices=MODES, default=EXACT)
        p.add_argument("--out")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--threads", type=_positive, default=None, help="worker processes (default ATG_THREADS or CPU count)")
        p.add_argument("--timing", action="store_true", help="fill the secs column with wall time")
        if name == "sweep":
            pattern_args(p)
            p.set_defaults(func=cmd_sweep)
        else:
            p.add_argument("--m", type=int, required=True)
            p.set_defaults(func=cmd_ghz)

    p = sub.add_parser("mbqc-check", help="repeated-measurement versus foliated syndromes")
    code_arg(p)
    p.add_argument("--T", type=_positive, required=True)
    p.add_argument("--trials", type=_positive, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=_prob, default=0.1)
    p.add_argument("--oracle", action="store_true", help="also run every single-error location through the tableau")
    p.set_defaults(func=cmd_mbqc_check)

    p = sub.add_parser("oracle-check", help="frame simulation against the stabilizer tableau")
    code_arg(p)
    p.add_argument("--T", type=_positive, required=True)
    p.add_argument("--p", type=_prob, required=True)
    p.add_argument("--trials", type=_positive, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=MODES, default=EXACT)
    pattern_args(p)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("bounds", help="threshold constants and the union-bound failure estimate")
    p.add_argument("--ell", type=_positive)
    p.add_argument("--code")
    p.add_argument("--T", type=_positive)
    p.add_argument("--p", type=_prob)
    p.set_defaults(func=cmd_bounds)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CodeValidationError, FileNotFoundError, UsageError) as exc:
        print(f"atg: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (InfeasiblePattern, OracleCapExceeded, DecodeError) as exc:
        print(f"atg: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except AssertionError as exc:
        print(f"atg: internal assertion failed: {exc}", file=sys.stderr)
        return EXIT_ASSERT
    except ValueError as exc:
        print(f"atg: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
