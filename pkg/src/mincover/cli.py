"""Command-line entry point: ``mincover <command> ...``.

Exit status: 0 when nothing failed, 1 when some check failed, 2 for usage,
parse and hypothesis errors, 3 when the node budget ran out.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from fractions import Fraction
from pathlib import Path

from .config import OUTPUT_FORMATS, RunConfig
from .constructions import (
    GENERATORS,
    build_digraph_family,
    example1_linear,
    example2_cyclic,
    search_conjecture,
    summarize_search,
)
from .encoding import pair_design, run_encoding, verify_bounded_degree_bound
from .family import FamilyError, SetFamily, UncoverableError, to_fraction, weight
from .io import ParseError, format_cover_family, format_family, read_digraph, read_family
from .kernels import GapViolation, HypothesisError, kernel_decompose
from .ledger import LedgerError, SearchLedger
from .report import VerdictReport, VerificationError, fraction_str
from .spread import monte_carlo_capture, verify_spread
from .transversal import BudgetExceeded, c_weight, enumerate_minimal_covers, tau_with_witness
from .verify import CHECKS, CONSTRUCTIONS, run_verification

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

log = logging.getLogger("mincover")


def _rational(text: str) -> Fraction:
    try:
        return to_fraction(text)
    except (ValueError, ZeroDivisionError, TypeError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _emit(cfg: RunConfig, payload: dict, text: str) -> None:
    if cfg.output_format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _emit_report(cfg: RunConfig, rep: VerdictReport, timing: bool) -> None:
    if cfg.output_format == "json":
        print(rep.to_json(timing))
    else:
        line = rep.to_text()
        if timing and rep.elapsed is not None:
            line += f" ({rep.elapsed:.3f}s)"
        print(line)


def _exit_for(reports) -> int:
    return EXIT_FAIL if any(r.verdict == "fails" for r in reports) else EXIT_OK


def cmd_tau(args, cfg: RunConfig) -> int:
    F = read_family(args.family)
    t, cover = tau_with_witness(F, budget=cfg.node_budget)
    _emit(cfg, {"tau": t, "cover": sorted(cover)}, f"tau {t}\ncover {' '.join(map(str, sorted(cover))) or '{}'}")
    return EXIT_OK


def cmd_covers(args, cfg: RunConfig) -> int:
    F = read_family(args.family)
    cap = args.cap if args.cap is not None else F.n
    lam = args.lam if args.lam is not None else Fraction(F.n)
    covers = enumerate_minimal_covers(F, cap, budget=cfg.node_budget, threads=cfg.threads)
    c = covers.weight(lam)
    uniform_check = F.uniformity is not None and lam == F.n and cap == F.n
    if cfg.output_format == "json":
        payload = {
            "covers": [sorted(C) for C in covers],
            "cap": cap,
            "lambda": fraction_str(lam),
            "c": fraction_str(c),
            "source": covers.source_family_hash,
        }
        if uniform_check:
            payload["at_most_one"] = c <= 1
        print(json.dumps(payload, sort_keys=True))
    else:
        sys.stdout.write(format_cover_family(covers))
        print(f"# c_{fraction_str(lam)} = {fraction_str(c)}")
        if uniform_check:
            print(f"# c_n <= 1: {'yes' if c <= 1 else 'NO'}")
    return EXIT_FAIL if uniform_check and c > 1 else EXIT_OK


def cmd_weight(args, cfg: RunConfig) -> int:
    F = read_family(args.family)
    lam = args.lam if args.lam is not None else Fraction(F.n)
    w = weight(F, lam)
    payload = {"lambda": fraction_str(lam), "weight": fraction_str(w)}
    if args.covers:
        payload["c"] = fraction_str(c_weight(F, lam, args.cap if args.cap is not None else F.n,
                                             budget=cfg.node_budget, threads=cfg.threads))
    text = "\n".join(f"{k} {v}" for k, v in payload.items())
    _emit(cfg, payload, text)
    return EXIT_OK


def _construct(args) -> SetFamily:
    if args.kind == "example1":
        return build_digraph_family(example1_linear(args.n or 4))
    if args.kind == "example2":
        return build_digraph_family(example2_cyclic(args.t or 2))
    if args.kind == "digraph":
        if not args.digraph:
            raise ValueError("construct digraph needs --digraph FILE")
        return build_digraph_family(read_digraph(args.digraph))
    if args.kind == "k6-design":
        return pair_design(6)
    raise ValueError(f"unknown construction {args.kind!r}")


def cmd_construct(args, cfg: RunConfig) -> int:
    F = _construct(args)
    text = format_family(F)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        log.info("wrote %d sets to %s", len(F), args.out)
        if cfg.output_format == "json":
            print(json.dumps({"sets": len(F), "ground": F.ground, "uniformity": F.uniformity, "path": args.out}))
        else:
            print(f"{len(F)} sets over {F.ground} elements written to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_decompose(args, cfg: RunConfig) -> int:
    F = read_family(args.family)
    dec = kernel_decompose(F, args.k)
    if isinstance(dec, GapViolation):
        _emit(
            cfg,
            {"gap_violation": [dec.i, dec.j], "intersection": dec.size},
            f"gap violation: members {dec.i} and {dec.j} share {dec.size} elements",
        )
        return EXIT_OK
    payload = {"classes": [list(c) for c in dec.classes], "cores": [sorted(c) for c in dec.cores]}
    text = "\n".join(
        f"class {i}: members {' '.join(map(str, c))}  core size {len(core)}"
        for i, (c, core) in enumerate(zip(dec.classes, dec.cores))
    )
    _emit(cfg, payload, text)
    return EXIT_OK


def cmd_spread(args, cfg: RunConfig) -> int:
    F = read_family(args.family)
    R = args.R if args.R is not None else Fraction(F.n, 2)
    reports = [verify_spread(F, R, args.s_max, budget=cfg.node_budget)]
    if args.delta is not None:
        m = args.m if args.m is not None else math.ceil(math.log2(F.n) + 10)
        reports.append(
            monte_carlo_capture(F, args.delta, m, R, trials=args.trials, seed=cfg.seed,
                                s_max=args.s_max, threads=cfg.threads, budget=cfg.node_budget)
        )
    for rep in reports:
        _emit_report(cfg, rep, args.timing)
    return _exit_for(reports)


def cmd_encode(args, cfg: RunConfig) -> int:
    F = read_family(args.family)
    n = args.n or F.n
    if args.l is not None:
        rep = verify_bounded_degree_bound(F, args.l, n, budget=cfg.node_budget)
        _emit_report(cfg, rep, args.timing)
        return _exit_for([rep])
    run = run_encoding(F, n, budget=cfg.node_budget)
    payload = {
        "covers": len(run.covers),
        "simple": len(run.simple),
        "ambiguous": len(run.ambiguous),
        "chains": sum(len(c) for c in run.chains.values()),
        "w_J": fraction_str(run.weight_all),
        "w_J1": fraction_str(run.weight_simple),
        "w_J2": fraction_str(run.weight_ambiguous),
        "c_n": fraction_str(run.c_n),
    }
    _emit(cfg, payload, "\n".join(f"{k} {v}" for k, v in payload.items()))
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    reports = run_verification(
        args.lemma,
        args.source,
        count=args.count,
        seed=cfg.seed,
        threads=cfg.threads,
        budget=cfg.node_budget,
        n=args.n,
        k=args.k,
        l=args.l,
        t=args.t,
        R=args.R,
        trials=args.trials,
        s_max=args.s_max,
        max_m=args.max_m,
        max_block=args.max_block,
    )
    for rep in reports:
        _emit_report(cfg, rep, args.timing)
    counts: dict[str, int] = {}
    for rep in reports:
        counts[rep.verdict] = counts.get(rep.verdict, 0) + 1
    print(f"{args.lemma}: " + ", ".join(f"{v} {k}" for k, v in sorted(counts.items())), file=sys.stderr)
    return _exit_for(reports)


def cmd_search(args, cfg: RunConfig) -> int:
    ledger = SearchLedger(cfg.ledger_path)
    records = list(
        search_conjecture(args.n, args.generator, args.instances, cfg.seed, ledger=ledger, node_budget=cfg.node_budget)
    )
    summary = summarize_search(records)
    if cfg.output_format == "json":
        for rec in records:
            print(rec.to_json())
        print(json.dumps({"summary": summary}, sort_keys=True))
    else:
        print(
            f"n={summary['n']} instances={summary['instances']} applicable={summary['applicable']} "
            f"min_sum_a={summary['min_sum_a']} binom(n,2)={summary['binom_n2']}"
        )
        for h in summary["counterexamples"]:
            print(f"counterexample {h}")
    return EXIT_FAIL if summary["counterexamples"] else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    def flags(default):
        g = argparse.ArgumentParser(add_help=False)
        g.add_argument("--threads", type=int, default=default, help="worker threads")
        g.add_argument("--budget", type=int, default=default, help="branch-node budget for enumeration")
        g.add_argument("--seed", type=int, default=default, help="random seed")
        g.add_argument("--format", dest="output_format", choices=OUTPUT_FORMATS, default=default)
        g.add_argument("--ledger", dest="ledger_path", default=default, help="search ledger path")
        g.add_argument("--timing", action="store_true", default=default or False, help="include elapsed times")
        g.add_argument("-v", "--verbose", action="store_true", default=default or False)
        return g

    # Flags are accepted before or after the command; the copy on each
    # command suppresses its defaults so it cannot overwrite earlier values.
    common = flags(argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="mincover", description="Exact minimal-cover enumeration and weight checks for set families.", parents=[flags(None)])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("tau", parents=[common], help="covering number and an optimal cover")
    s.add_argument("family")
    s.set_defaults(func=cmd_tau)

    s = sub.add_parser("covers", parents=[common], help="minimal covers and their weight")
    s.add_argument("family")
    s.add_argument("--cap", type=int)
    s.add_argument("--lambda", dest="lam", type=_rational)
    s.set_defaults(func=cmd_covers)

    s = sub.add_parser("weight", parents=[common], help="weight of a family")
    s.add_argument("family")
    s.add_argument("--lambda", dest="lam", type=_rational)
    s.add_argument("--covers", action="store_true", help="also print the minimal-cover weight")
    s.add_argument("--cap", type=int)
    s.set_defaults(func=cmd_weight)

    s = sub.add_parser("construct", parents=[common], help="write a built family")
    s.add_argument("kind", choices=CONSTRUCTIONS)
    s.add_argument("--n", type=int)
    s.add_argument("--t", type=int)
    s.add_argument("--digraph", help="tournament file for kind=digraph")
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("decompose", parents=[common], help="kernel classes of a gap-free family")
    s.add_argument("family")
    s.add_argument("--k", type=_rational, required=True)
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("spread", parents=[common], help="spread witness and capture estimate")
    s.add_argument("family")
    s.add_argument("--R", type=_rational)
    s.add_argument("--s-max", type=int, default=2)
    s.add_argument("--delta", type=_rational)
    s.add_argument("--m", type=int, help="rounds of thinning (default ceil(log2 n + 10))")
    s.add_argument("--trials", type=int, default=100_000)
    s.set_defaults(func=cmd_spread)

    s = sub.add_parser("encode", parents=[common], help="chain encoding of the minimal covers")
    s.add_argument("family")
    s.add_argument("--n", type=int)
    s.add_argument("--l", type=int, help="also check the bounded-degree bound with this l")
    s.set_defaults(func=cmd_encode)

    s = sub.add_parser("verify", parents=[common], help="run a named check on a batch of instances")
    s.add_argument("lemma", choices=sorted(CHECKS))
    s.add_argument("source", help="file:<path>, random:<seed> or construction:<kind>")
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--n", type=int)
    s.add_argument("--k", type=_rational)
    s.add_argument("--l", type=int)
    s.add_argument("--t", type=int)
    s.add_argument("--R", type=_rational)
    s.add_argument("--trials", type=int)
    s.add_argument("--s-max", type=int)
    s.add_argument("--max-m", type=int)
    s.add_argument("--max-block", type=int)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("search", parents=[common], help="block-deficiency search with a ledger")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--generator", choices=GENERATORS, default="tournaments")
    s.add_argument("--instances", type=int, default=1000, help="maximum number of instances")
    s.set_defaults(func=cmd_search)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = RunConfig.from_env(
            threads=args.threads,
            node_budget=args.budget,
            seed=args.seed,
            output_format=args.output_format,
            ledger_path=args.ledger_path,
        )
        return args.func(args, cfg)
    except VerificationError as exc:
        print(f"mincover: check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except BudgetExceeded as exc:
        print(f"mincover: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ParseError, FamilyError, UncoverableError, HypothesisError, LedgerError, ValueError, KeyError, OSError) as exc:
        print(f"mincover: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
