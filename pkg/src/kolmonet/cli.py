"""Command-line interface; every command prints one JSON report.

Exit status: 0 on success, 1 on a FAIL verdict or failed check, 2 on bad
input (argument or file validation).
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .bits import parse_bits, render_bits
from .complexity import ComplexityOracle, DescriptionSystem, c_model_default, is_above


class UsageError(ValueError):
    pass


def _jsonable(obj):
    if is_above(obj):
        return "ABOVE_BUDGET"
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float) and obj == float("inf"):
        return "inf"
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return str(obj)


def threads() -> int:
    raw = os.environ.get("KOLMONET_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"KOLMONET_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise UsageError("KOLMONET_THREADS must be >= 1")
    return value


def _write_csv(path: str, rows: list[dict]) -> None:
    if not rows:
        Path(path).write_text("", encoding="utf-8")
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _jsonable(v) for k, v in row.items()})


def _oracle(args) -> ComplexityOracle:
    system = DescriptionSystem.load(args.system) if getattr(args, "system", None) else DescriptionSystem()
    return ComplexityOracle(system)


def _instance(args) -> dict[str, str]:
    from .networks import get_network, read_instance

    strings = read_instance(args.instance)
    net = get_network(args.topology) if getattr(args, "topology", None) else None
    if net is not None:
        missing = [v for v in net.variables if v not in strings]
        if missing:
            raise UsageError(f"instance lacks strings {missing} for topology {net.tag}")
    return strings


def _pair(text: str | None):
    from .networks import TransmissionPair

    if text is None:
        return None
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError("--pair takes 'p,q' with '-' for an empty string")
    return TransmissionPair(parse_bits(parts[0]), parse_bits(parts[1]))


# ---------------------------------------------------------------- commands

def cmd_complexity(args):
    oracle = _oracle(args)
    u, v = parse_bits(args.u), parse_bits(args.v)
    value = oracle.complexity(u, v, args.budget)
    witness = None if is_above(value) else oracle.witness(u, v)
    return {"u": render_bits(u), "v": render_bits(v), "complexity": value,
            "witness": None if witness is None else render_bits(witness)}, 0, {}


def cmd_identities(args):
    from .identities import IdentityCheckFailed, bundled_checks

    if not args.bundle:
        raise UsageError("identities needs --bundle")
    try:
        report = bundled_checks(max_variables=args.max_variables, trials=args.trials, seed=args.seed)
    except IdentityCheckFailed as exc:
        return {"failed_item": exc.item, "report": exc.report.as_dict()}, 1, {}
    return report.as_dict(), 0 if report.passed else 1, {}


def _analyze(args):
    from .networks import (
        TransmissionPair,
        all_cuts,
        cut_bound,
        feasibility,
        get_network,
        metrics,
        minimal_value_formulas,
        quantity_values,
    )

    net = get_network(args.topology)
    strings = _instance(args)
    oracle = _oracle(args)
    pair = _pair(args.pair)
    if pair is None:
        # literal programs for each receiver's output
        outs = {n.channel: "1" + strings[n.output] for n in net.nodes}
        pair = TransmissionPair(outs["p"], outs.get("q", ""))
    c_model = args.c_model if args.c_model is not None else c_model_default(max(len(s) for s in strings.values()) or 1)
    feas = feasibility(net, strings, pair, args.epsilon, oracle)
    values = quantity_values(net, strings, oracle)
    result = {
        "topology": net.tag,
        "pair": {"p": render_bits(pair.p), "q": render_bits(pair.q)},
        "feasibility": {"feasible": feas.feasible, "values": feas.values},
        "metrics": metrics(net, strings, pair, oracle).as_dict(),
        "cut_bounds": [dict(cut=list(cb.cut), value=cb.value, a=list(cb.a), b=list(cb.b), raw=cb.raw,
                            slack=cb.slack, choices=cb.choices)
                       for cb in (cut_bound(net, c, strings, args.epsilon, oracle, c_model) for c in all_cuts(net))],
        "quantities": values,
        "minimal_value_formulas": minimal_value_formulas(net, values),
    }
    return result, 0, {"c_model": c_model}


def _search(args):
    from .search import SearchBudget, check_objectives, enumerate_feasible, pareto_frontier

    strings = _instance(args)
    oracle = _oracle(args)
    objectives = check_objectives(o.strip() for o in args.objectives.split(","))
    budget = SearchBudget(args.budget, args.max_pairs, args.time_cap)
    stream = enumerate_feasible(args.topology, strings, args.epsilon, oracle, budget)
    points = list(stream)
    warnings = []
    if stream.partial:
        warnings.append("search budget exhausted; results are partial")
    warnings.append("labels enumerated up to the program-length budget only")
    if not points:
        return {"feasible_pairs": 0, "frontier": [], "simultaneous": None}, 0, {"warnings": warnings}
    front = pareto_frontier(points, objectives)
    rows = [{**r, "p": render_bits(r["p"]), "q": render_bits(r["q"])} for r in front.rows()]
    if args.csv:
        _write_csv(args.csv, rows)
    return {
        "feasible_pairs": len(points),
        "objectives": list(objectives),
        "frontier": rows,
        "minima": front.minima,
        "simultaneous": front.simultaneous,
    }, 0, {"warnings": warnings}


def _witness(args):
    from .networks import read_instance
    from .search import SearchBudget, consistent_pair_witness, exact_f_min, info_distance_witness

    s = read_instance(args.instance)
    oracle = _oracle(args)
    budget = SearchBudget(args.budget)
    need = {"infodist": "xy", "muchnik": "xyz", "fmin": "xyzw"}[args.kind]
    missing = [v for v in need if v not in s]
    if missing:
        raise UsageError(f"witness kind {args.kind} needs strings {missing}")
    if args.kind == "infodist":
        rep = info_distance_witness(oracle, s["x"], s["y"], budget)
    elif args.kind == "muchnik":
        rep = consistent_pair_witness(oracle, s["x"], s["y"], s["z"], budget, args.slack)
    else:
        rep = exact_f_min(oracle, s["x"], s["y"], s["z"], s["w"], budget)
    return rep.as_dict(), 0, {"warnings": [] if rep.found else [rep.note]}


def _game_spec(args):
    from .games import default_spec, spec_from_params

    if args.params:
        try:
            params = tuple(int(t) for t in args.params.split(","))
        except ValueError:
            raise UsageError("--params takes comma-separated integers") from None
        return spec_from_params(args.theorem, args.epsilon, params, args.l, args.horizon)
    return default_spec(args.theorem, args.epsilon, args.l, args.horizon)


def _game_params(args):
    from .games import validate_params

    spec = _game_spec(args)
    check = validate_params(spec)
    return {"spec": spec.as_dict(), "ok": check.ok,
            "inequalities": [i.as_dict() for i in check.table]}, 0 if check.ok else 1, {}


def _game_run(args):
    from .games import InvalidSpec, greedy_adversary, random_adversary, run_game, scripted_adversary
    from .games.transcript import write_transcript

    spec = _game_spec(args)
    if args.adversary == "random":
        adversary = random_adversary(args.seed, args.policy, args.max_events)
    elif args.adversary == "greedy":
        adversary = greedy_adversary(args.max_events)
    elif args.adversary.startswith("script:"):
        path = args.adversary[len("script:"):]
        if not Path(path).is_file():
            raise UsageError(f"script file not found: {path}")
        adversary = scripted_adversary(path)
    else:
        raise UsageError("--adversary must be random, greedy or script:FILE")
    try:
        game, _ = run_game(spec, args.seed, adversary)
    except InvalidSpec as exc:
        return {"spec": spec.as_dict(), "invalid": exc.violated}, 2, {}
    report = game.report()
    path = args.transcript or f"{spec.theorem.lower()}_e{spec.epsilon}_l{spec.l}_s{args.seed}.jsonl"
    write_transcript(path, game.records)
    report["transcript"] = path
    code = 0 if report["verdict"]["verdict"] == "PASS" else 1
    return report, code, {"tab_overhead": 4}


def _proxy(args):
    from .proxy import REFERENCE, ncd_report, proxy_metrics, read_manifest

    entries = read_manifest(args.corpus)
    for path, _ in entries:
        if not path.is_file():
            raise UsageError(f"corpus file missing: {path}")
    warnings = ["compressor estimates, not exact complexities"]
    if args.proxy_cmd == "ncd":
        return ncd_report(REFERENCE, [p for p, _ in entries]), 0, {"warnings": warnings}
    from .networks import get_network

    net = get_network(args.topology)
    by_role: dict[str, bytes] = {}
    for path, role in entries:
        by_role.setdefault(role, path.read_bytes())
    needed = list(net.variables) + ["p"] + (["q"] if net.tag != "b" else [])
    missing = [r for r in needed if r not in by_role]
    if missing:
        raise UsageError(f"corpus lacks roles {missing}")
    m = proxy_metrics(net, by_role, (by_role["p"], by_role.get("q", b"")), REFERENCE)
    return {"topology": net.tag, "compressor": REFERENCE.name, "metrics": m.as_dict()}, 0, {"warnings": warnings}


# ------------------------------------------------------------------ parser

def _topology(parser):
    parser.add_argument("--topology", required=True, choices=list("abcdef"))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kolmonet", description=__doc__.splitlines()[0])
    p.add_argument("--output", help="write the report here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("complexity", help="exact C(u|v) with a witness program")
    c.add_argument("--system", help="description-system table file (default: empty table)")
    c.add_argument("--u", required=True)
    c.add_argument("--v", default="-")
    c.add_argument("--budget", type=int)
    c.set_defaults(func=cmd_complexity)

    i = sub.add_parser("identities", help="symbolic and numeric identity checks")
    i.add_argument("--bundle", action="store_true")
    i.add_argument("--trials", type=int, default=1000)
    i.add_argument("--seed", type=int, default=0)
    i.add_argument("--max-variables", type=int, default=5)
    i.set_defaults(func=cmd_identities)

    n = sub.add_parser("net", help="network analysis, search and witnesses")
    nsub = n.add_subparsers(dest="net_cmd", required=True)
    a = nsub.add_parser("analyze")
    _topology(a)
    a.add_argument("--instance", required=True)
    a.add_argument("--epsilon", type=int, required=True)
    a.add_argument("--pair")
    a.add_argument("--system")
    a.add_argument("--c-model", type=float)
    a.set_defaults(func=_analyze)
    s = nsub.add_parser("search")
    _topology(s)
    s.add_argument("--instance", required=True)
    s.add_argument("--epsilon", type=int, required=True)
    s.add_argument("--objectives", default="cp,cq,cpq,private_disclosure")
    s.add_argument("--budget", type=int, default=6, help="maximum label length")
    s.add_argument("--max-pairs", type=int)
    s.add_argument("--time-cap", type=float)
    s.add_argument("--system")
    s.add_argument("--csv")
    s.set_defaults(func=_search)
    w = nsub.add_parser("witness")
    w.add_argument("--kind", required=True, choices=["infodist", "muchnik", "fmin"])
    w.add_argument("--instance", required=True)
    w.add_argument("--budget", type=int, default=6)
    w.add_argument("--slack", type=int, default=6)
    w.add_argument("--system")
    w.set_defaults(func=_witness)

    g = sub.add_parser("game", help="enumeration games")
    gsub = g.add_subparsers(dest="game_cmd", required=True)
    for name, func in (("run", _game_run), ("params", _game_params)):
        gp = gsub.add_parser(name)
        gp.add_argument("--theorem", required=True, choices=["GAP_CPQ_E", "GAP_PRIV_E", "GAP_CPQ_F", "GAP_PRIV_F"])
        gp.add_argument("--epsilon", type=int, required=True)
        gp.add_argument("--l", type=int, default=0)
        gp.add_argument("--params", help="n,m,j or n,m,k,j (default: closed-form choice)")
        gp.add_argument("--horizon", type=int)
        if name == "run":
            gp.add_argument("--adversary", required=True, help="random, greedy or script:FILE")
            gp.add_argument("--seed", type=int, default=0)
            gp.add_argument("--policy", default="biased", choices=["biased", "uniform"])
            gp.add_argument("--max-events", type=int, default=2000)
            gp.add_argument("--transcript", help="transcript path (default: derived from theorem, epsilon, l and seed)")
        gp.set_defaults(func=func)

    x = sub.add_parser("proxy", help="compressor-based estimates")
    x.add_argument("proxy_cmd", choices=["ncd", "metrics"])
    x.add_argument("--corpus", required=True, help="manifest file: path<TAB>role per line")
    x.add_argument("--topology", default="a", choices=list("abcdef"))
    x.set_defaults(func=_proxy)
    return p


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "output")}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        n_threads = threads()
        result, code, extra = args.func(args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"kolmonet: error: {exc}", file=sys.stderr)
        return 2
    report = {
        "command": argv,
        "config": {**_config(args), "threads": n_threads},
        "seed": getattr(args, "seed", None),
        "result": result,
        "constants": {k: v for k, v in extra.items() if k != "warnings"},
        "warnings": extra.get("warnings", []),
    }
    text = json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
