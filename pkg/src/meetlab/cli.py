"""Command-line front end: ``meetlab <subcommand> ...``.

Exit codes: 0 success, 1 verification failure (or numerical error),
2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .adversary import policy_from_json, policy_to_json, solve_meeting
from .errors import AllTimedOut, InvalidParams, MeetlabError, ParseError, ValidationError
from .graph import FAMILIES, generate, parse_graph, serialize
from .hidden import find_hidden, phi_atomic_matrix, phi_tilde_matrix, theorem1_matrix
from .hitting import (
    ext_hitting_formula, ext_hitting_oracle, hitting_times, triangle_residual_extended,
    triangle_residual_original,
)
from .simulate import SCHEDULERS, make_scheduler, monte_carlo, worker_count
from .states import StateSpace, build_walk
from .suite import (
    SWEEP_COLUMNS, VerifyOptions, VerifyReport, suite_graphs, sweep_row, verify_graph,
)

log = logging.getLogger("meetlab")


# -- helpers ---------------------------------------------------------------------

def _load_graph(args):
    if args.graph:
        text = sys.stdin.read() if args.graph == "-" else open(args.graph).read()
        return parse_graph(text)
    if args.family:
        if args.n is None:
            raise InvalidParams("--family needs --n")
        return generate(args.family, args.n, k=args.k, seed=args.seed)
    raise InvalidParams("give a graph with --graph FILE or --family NAME --n N")


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(rows, header=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(x) -> str:
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def _table(labels, M) -> str:
    rows = [[lab] + [_num(v) for v in row] for lab, row in zip(labels, M)]
    return _csv(rows, [""] + list(labels))


def _json(obj) -> str:
    return json.dumps(obj, indent=2, default=float) + "\n"


# -- subcommands -------------------------------------------------------------------

def cmd_gen(args) -> int:
    if not args.family:
        raise InvalidParams("gen needs --family")
    g = _load_graph(args)
    if args.format == "json":
        _emit(args, _json({"n": g.n, "m": g.m, "edges": [list(e) for e in g.edges]}))
    else:
        _emit(args, serialize(g))
    return 0


def cmd_hitting(args) -> int:
    g = _load_graph(args)
    h = hitting_times(g)
    if args.atomic:
        labels = [f"v:{v}" for v in range(g.n)]
        table = h.values
        eh = None
    else:
        ss = StateSpace(g)
        eh = ext_hitting_oracle(ss) if args.oracle else ext_hitting_formula(ss, h)
        labels, table = ss.labels(), eh.values
    if args.check_triangle:
        r_v = triangle_residual_original(h)
        rows = [("triangle_vertices", r_v, g.n ** 3)]
        if eh is not None:
            r_s, k = triangle_residual_extended(eh, seed=args.seed or 0)
            rows.append(("triangle_states", r_s, k))
        worst = max(r for _, r, _ in rows)
        if args.format == "json":
            _emit(args, _json({name: {"max_residual": r, "triples": k} for name, r, k in rows}))
        else:
            _emit(args, _csv([(a, _num(b), c) for a, b, c in rows], ["check", "max_residual", "triples"]))
        return 0 if worst <= args.tol else 1
    if args.format == "json":
        _emit(args, _json({"states": labels, "source": "atomic" if args.atomic else eh.source,
                           "values": table.tolist()}))
    else:
        _emit(args, _table(labels, table))
    return 0


def cmd_hidden(args) -> int:
    g = _load_graph(args)
    ss = StateSpace(g)
    h = hitting_times(g)
    rep = find_hidden(ext_hitting_formula(ss, h), ss, h)
    if args.relation:
        R = rep.relation.astype(int)
        if args.format == "json":
            _emit(args, _json({"states": ss.labels(), "relation": R.tolist()}))
        else:
            _emit(args, _table(ss.labels(), R))
        return 0
    info = {
        "hidden_states": rep.hidden_labels(),
        "chosen_hidden": ss.label(rep.chosen_hidden),
        "atomic_hidden_vertex": rep.atomic_hidden_vertex,
    }
    if args.format == "json":
        _emit(args, _json(info))
    else:
        _emit(args, _csv([("hidden_states", " ".join(info["hidden_states"])),
                          ("chosen_hidden", info["chosen_hidden"]),
                          ("atomic_hidden_vertex", info["atomic_hidden_vertex"])],
                         ["key", "value"]))
    return 0


def cmd_meeting(args) -> int:
    g = _load_graph(args)
    mode = "nonatomic" if args.mode in ("nonatomic", "non-atomic") else "atomic"
    sol = solve_meeting(g, mode, tol=args.tol, max_iters=args.max_iters)
    walk = sol.walk
    h = hitting_times(g)
    if mode == "nonatomic":
        ss = walk
        eh = ext_hitting_formula(ss, h)
        phi = phi_tilde_matrix(eh, sol.hidden)
        hs = ss.states[sol.hidden]
        thm = theorem1_matrix(h, hs.x, hs.y)
        used = str(hs)
    else:
        phi = phi_atomic_matrix(h, sol.hidden)
        thm = None
        used = f"v:{sol.hidden}"
    if args.policy_out:
        with open(args.policy_out, "w") as fh:
            json.dump(policy_to_json(sol), fh, indent=1)
    if args.pairs == "all":
        pairs = [(a, b) for a in range(walk.size) for b in range(walk.size)]
    else:
        s1, sep, s2 = args.pairs.partition(",")
        if not sep:
            raise InvalidParams("--pairs expects 'all' or '<s1>,<s2>'")
        pairs = [(walk.lookup(s1), walk.lookup(s2))]
    rows = []
    for a, b in pairs:
        both_orig = a < g.n and b < g.n
        t1 = thm[a, b] if thm is not None and both_orig else None
        rows.append({
            "config": f"{walk.label(a)},{walk.label(b)}",
            "M": float(sol.values[a, b]),
            "Phi": float(phi[a, b]),
            "theorem1": None if t1 is None else float(t1),
            "slack": float(phi[a, b] - sol.values[a, b]),
        })
    if args.format == "json":
        _emit(args, _json({"mode": mode, "hidden": used, "iterations": sol.iterations,
                           "residual": sol.residual, "rows": rows}))
    else:
        _emit(args, _csv(
            [[r["config"], _num(r["M"]), _num(r["Phi"]),
              "" if r["theorem1"] is None else _num(r["theorem1"]), _num(r["slack"])] for r in rows],
            ["config", "M", "Phi", "theorem1", "slack"]))
    return 0


def cmd_simulate(args) -> int:
    policy = None
    if args.scheduler == "optimal":
        if not args.policy:
            raise InvalidParams("--scheduler optimal needs --policy FILE")
        with open(args.policy) as fh:
            walk, policy = policy_from_json(fh.read())
    else:
        walk = build_walk(_load_graph(args), args.mode)
    sched = make_scheduler(args.scheduler, walk, policy)
    if args.start:
        s1, sep, s2 = args.start.partition(",")
        if not sep:
            raise InvalidParams("--start expects '<s1>,<s2>'")
        start = (s1, s2)
    else:
        start = ("v:0", f"v:{walk.graph.adjacency[0][0]}")
    max_rounds = args.max_rounds or (10_000 if args.meet_mode == "original" else 1_000_000)
    try:
        summary = monte_carlo(walk, sched, start, args.seed or 0, args.trials, max_rounds,
                              args.meet_mode)
        all_out = False
    except AllTimedOut as exc:
        summary, all_out = exc.summary, True
    out = summary.to_dict()
    out.update(scheduler=args.scheduler, mode=walk.mode, start=",".join(start),
               meet_mode=args.meet_mode, max_rounds=max_rounds, all_timed_out=all_out)
    if args.histogram_out:
        with open(args.histogram_out, "w") as fh:
            fh.write(_csv(sorted(summary.histogram.items()), ["round", "count"]))
    if args.format == "csv":
        out.pop("histogram")
        _emit(args, _csv([(k, v) for k, v in out.items()], ["key", "value"]))
    else:
        _emit(args, _json(out))
    return 0


def cmd_verify(args) -> int:
    opts = VerifyOptions(tol=args.tol, sim_trials=args.trials, sim_rounds=args.rounds,
                         seed=args.seed or 0)
    if args.graph or args.family:
        graphs = [(args.graph or f"{args.family}-{args.n}", _load_graph(args))]
    else:
        graphs = suite_graphs()
    report = VerifyReport()
    for name, g in graphs:
        log.info("verifying %s", name)
        verify_graph(g, name, opts, report)
    if args.format == "json":
        _emit(args, _json(report.to_dict()))
    else:
        lines = [c.line() for c in report.checks]
        lines.append("")
        lines.append("checks -> results:")
        lines.extend(f"  {k}: {v}" for k, v in report.mapping().items())
        lines.append("")
        lines.append(f"overall: {'PASS' if report.passed else 'FAIL'} "
                     f"({sum(c.passed for c in report.checks)}/{len(report.checks)} checks)")
        _emit(args, "\n".join(lines) + "\n")
    return 0 if report.passed else 1


def cmd_sweep(args) -> int:
    if not args.family:
        raise InvalidParams("sweep needs --family")
    if args.n_min > args.n_max:
        raise InvalidParams("--n-min exceeds --n-max")
    sizes = range(args.n_min, args.n_max + 1)
    with ThreadPoolExecutor(worker_count()) as pool:
        rows = list(pool.map(lambda n: sweep_row(args.family, n, args.k, args.seed), sizes))
    if args.format == "json":
        _emit(args, _json(rows))
    else:
        _emit(args, _csv([[_num(r[c]) if r[c] != "" else "" for c in SWEEP_COLUMNS] for r in rows],
                         SWEEP_COLUMNS))
    return 0


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), help="default: json for simulate, csv otherwise")
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("-o", "--out", help="write output to a file instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--graph", help="edge-list file ('-' for stdin)")
    source.add_argument("--family", choices=FAMILIES)
    source.add_argument("--n", type=int)
    source.add_argument("--k", type=int, help="clique size for lollipop")
    source.add_argument("--seed", type=int)

    p = argparse.ArgumentParser(prog="meetlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gen", parents=[common, source], help="generate a graph")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("hitting", parents=[common, source], help="hitting-time tables")
    sp.add_argument("--oracle", action="store_true", help="solve the state chain directly")
    sp.add_argument("--atomic", action="store_true", help="plain hitting times on G")
    sp.add_argument("--check-triangle", action="store_true")
    sp.set_defaults(func=cmd_hitting)

    sp = sub.add_parser("hidden", parents=[common, source], help="hidden states and vertex")
    sp.add_argument("--relation", action="store_true", help="print the full EHT relation")
    sp.set_defaults(func=cmd_hidden)

    sp = sub.add_parser("meeting", parents=[common, source], help="worst-case meeting times")
    sp.add_argument("--mode", choices=("atomic", "nonatomic", "non-atomic"), default="nonatomic")
    sp.add_argument("--max-iters", type=int, default=1_000_000)
    sp.add_argument("--policy-out")
    sp.add_argument("--pairs", default="all")
    sp.set_defaults(func=cmd_meeting)

    sp = sub.add_parser("simulate", parents=[common, source], help="Monte Carlo trials")
    sp.add_argument("--scheduler", choices=SCHEDULERS[:4], default="random")
    sp.add_argument("--policy", help="policy JSON from 'meeting --policy-out'")
    sp.add_argument("--mode", choices=("atomic", "nonatomic"), default="nonatomic")
    sp.add_argument("--start")
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--max-rounds", type=int)
    sp.add_argument("--meet-mode", choices=("any", "original"), default="any")
    sp.add_argument("--histogram-out")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("verify", parents=[common, source],
                        help="run every check (default: the built-in graph suite)")
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--rounds", type=int, default=10_000)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sweep", parents=[common, source], help="growth table over sizes")
    sp.add_argument("--n-min", type=int, required=True)
    sp.add_argument("--n-max", type=int, required=True)
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = "json" if args.command == "simulate" else "csv"
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ParseError, ValidationError, InvalidParams, OSError) as exc:
        print(f"meetlab: error: {exc}", file=sys.stderr)
        return 2
    except MeetlabError as exc:
        print(f"meetlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
