"""Exhaustive search over transmission pairs, Pareto frontiers and witnesses.

Everything here is exhaustive within a :class:`SearchBudget`; nothing is
heuristic. Ties are broken length-lex on ``p`` then ``q``.
"""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .bits import encode_pair, encode_tuple, lexkey, strings_upto
from .complexity import ComplexityOracle, is_above, programs_producing, reachable, run_or_none
from .networks import (
    OBJECTIVES,
    Metrics,
    Network,
    TransmissionPair,
    check_strings,
    get_network,
    metrics,
)


@dataclass(frozen=True)
class SearchBudget:
    max_program_length: int = 6
    max_pairs: int | None = None
    time_cap: float | None = None

    def __post_init__(self):
        if self.max_program_length < 0:
            raise ValueError("max_program_length must be >= 0")


@dataclass
class ParetoPoint:
    pair: TransmissionPair
    metrics: Metrics

    def key(self):
        return lexkey(self.pair.p), lexkey(self.pair.q)

    def row(self) -> dict:
        return {"p": self.pair.p, "q": self.pair.q, **self.metrics.as_dict()}


def _label_candidates(net: Network, strings: Mapping[str, str], channel: str, epsilon: int,
                      oracle: ComplexityOracle, max_len: int) -> list[str]:
    """Labels for one channel that pass both of its own feasibility tests."""
    if net.tag == "b" and channel == "q":
        return [""]
    everything = encode_tuple(*(strings[v] for v in net.variables))
    if epsilon <= 0:
        return []
    # labels simple given everything: outputs of programs shorter than epsilon,
    # unless scanning all short strings is cheaper
    if epsilon - 1 <= max_len:
        pool = [s for s in reachable(oracle.system, everything, epsilon - 1) if len(s) <= max_len]
    else:
        pool = list(strings_upto(max_len))
    node = next(n for n in net.nodes if n.channel == channel)
    out = []
    for label in pool:
        if is_above(c := oracle.C(label, everything)) or c >= epsilon:
            continue
        c = oracle.C(strings[node.output], (label, strings[node.input]))
        if not is_above(c) and c < epsilon:
            out.append(label)
    return sorted(out, key=lexkey)


class enumerate_feasible:
    """Iterate every feasible pair within budget, length-lex over p then q.

    After iteration, ``partial`` tells whether the pair or time cap cut the
    stream short and ``examined`` counts the pairs looked at.
    """

    def __init__(self, net: Network | str, strings: Mapping[str, str], epsilon: int,
                 oracle: ComplexityOracle, budget: SearchBudget | None = None):
        self.net = get_network(net)
        self.strings = check_strings(self.net, strings)
        self.epsilon = epsilon
        self.oracle = oracle
        self.budget = budget or SearchBudget()
        self.partial = False
        self.examined = 0

    def candidates(self) -> tuple[list[str], list[str]]:
        L = self.budget.max_program_length
        ps = _label_candidates(self.net, self.strings, "p", self.epsilon, self.oracle, L)
        qs = _label_candidates(self.net, self.strings, "q", self.epsilon, self.oracle, L)
        return ps, qs

    def __iter__(self) -> Iterator[ParetoPoint]:
        self.partial = False
        self.examined = 0
        start = time.monotonic()
        ps, qs = self.candidates()
        for p in ps:
            for q in qs:
                if self.budget.max_pairs is not None and self.examined >= self.budget.max_pairs:
                    self.partial = True
                    return
                if self.budget.time_cap is not None and time.monotonic() - start > self.budget.time_cap:
                    self.partial = True
                    return
                self.examined += 1
                pair = TransmissionPair(p, q)
                yield ParetoPoint(pair, metrics(self.net, self.strings, pair, self.oracle))


def _vector(point: ParetoPoint, objectives: Sequence[str]) -> tuple:
    return tuple(getattr(point.metrics, o) for o in objectives)


def _dominates(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b)) and a != b


@dataclass
class Frontier:
    objectives: tuple[str, ...]
    points: list[ParetoPoint]
    minima: dict[str, object]
    simultaneous: bool
    simultaneous_point: ParetoPoint | None = None

    def rows(self) -> list[dict]:
        return [pt.row() for pt in self.points]


def check_objectives(objectives: Iterable[str]) -> tuple[str, ...]:
    objectives = tuple(objectives)
    bad = [o for o in objectives if o not in OBJECTIVES]
    if bad or not objectives:
        raise ValueError(f"objectives must be a nonempty subset of {OBJECTIVES}; got {objectives}")
    return objectives


def pareto_frontier(points: Iterable[ParetoPoint], objectives: Sequence[str] = ("cp", "cq", "cpq", "private_disclosure")) -> Frontier:
    """Non-dominated points; equal objective vectors keep the length-lex least pair."""
    objectives = check_objectives(objectives)
    best: dict[tuple, ParetoPoint] = {}
    for pt in points:
        vec = _vector(pt, objectives)
        if any(is_above(v) for v in vec):
            continue
        if vec not in best or pt.key() < best[vec].key():
            best[vec] = pt
    if not best:
        raise ValueError("pareto_frontier needs at least one point with finite metrics")
    # sort by vector so a sweep only compares against earlier keepers
    ordered = sorted(best.items(), key=lambda kv: kv[0])
    kept: list[tuple[tuple, ParetoPoint]] = []
    for vec, pt in ordered:
        if not any(_dominates(k, vec) for k, _ in kept):
            kept.append((vec, pt))
    minima = {o: min(v[i] for v in best) for i, o in enumerate(objectives)}
    target = tuple(minima[o] for o in objectives)
    hit = best.get(target)
    frontier = sorted((pt for _, pt in kept), key=ParetoPoint.key)
    return Frontier(objectives, frontier, minima, hit is not None, hit)


# ---------------------------------------------------------------- witnesses

@dataclass
class WitnessReport:
    kind: str
    found: bool
    pair: TransmissionPair | None
    slack: dict[str, object] = field(default_factory=dict)
    examined: int = 0
    note: str = ""

    def as_dict(self) -> dict:
        d = asdict(self)
        d["pair"] = None if self.pair is None else {"p": self.pair.p, "q": self.pair.q}
        return d


def _producers(oracle: ComplexityOracle, target: str, condition: str, max_len: int) -> list[str]:
    return programs_producing(oracle.system, target, condition, max_len)


def _absent(kind: str, budget: SearchBudget, examined: int) -> WitnessReport:
    return WitnessReport(kind, False, None, examined=examined,
                         note=f"no witness among programs of length <= {budget.max_program_length}")


def _min_pair(oracle: ComplexityOracle, ps: list[str], qs: list[str]):
    best = None
    for p in ps:
        for q in qs:
            c = oracle.C(encode_pair(p, q))
            key = (c, lexkey(p), lexkey(q))
            if best is None or key < best[0]:
                best = (key, p, q)
    return best


def info_distance_witness(oracle: ComplexityOracle, x: str, y: str, budget: SearchBudget | None = None) -> WitnessReport:
    """Pair (p, q) translating x to y and back, with least C(p,q)."""
    budget = budget or SearchBudget()
    ps = _producers(oracle, y, x, budget.max_program_length)
    qs = _producers(oracle, x, y, budget.max_program_length)
    if not ps or not qs:
        return _absent("infodist", budget, len(ps) * len(qs))
    (cpq, _, _), p, q = _min_pair(oracle, ps, qs)
    target = max(oracle.C(y, x), oracle.C(x, y))
    return WitnessReport("infodist", True, TransmissionPair(p, q),
                         {"Cpq": cpq, "max(C(y|x),C(x|y))": target, "slack": cpq - target},
                         examined=len(ps) * len(qs))


def _consistent_pairs(labels: list[str]) -> Iterator[tuple[str, str]]:
    present = set(labels)
    for p in labels:
        for cut in range(len(p) + 1):
            pre = p[:cut]
            if pre in present:
                yield p, pre
                if pre != p:
                    yield pre, p


def consistent_pair_witness(oracle: ComplexityOracle, x: str, y: str, z: str,
                            budget: SearchBudget | None = None, slack: int = 6) -> WitnessReport:
    """Prefix-consistent (p, q) with C(z|p,x) <= slack and C(z|q,y) <= slack.

    Minimises max(|p|, |q|), then length-lex on (p, q). I(q:y) is reported
    but no bound on it is asserted.
    """
    budget = budget or SearchBudget()
    labels = list(strings_upto(budget.max_program_length))
    ok_p = {s for s in labels if oracle.C(z, (s, x)) <= slack}
    ok_q = {s for s in labels if oracle.C(z, (s, y)) <= slack}
    best = None
    examined = 0
    for p, q in _consistent_pairs(labels):
        examined += 1
        if p in ok_p and q in ok_q:
            key = (max(len(p), len(q)), lexkey(p), lexkey(q))
            if best is None or key < best[0]:
                best = (key, p, q)
    if best is None:
        return _absent("muchnik", budget, examined)
    _, p, q = best
    return WitnessReport("muchnik", True, TransmissionPair(p, q), {
        "|p|-C(z|x)": len(p) - oracle.C(z, x),
        "|q|-C(z|y)": len(q) - oracle.C(z, y),
        "C(p,q|z)": oracle.C(encode_pair(p, q), z),
        "I(q:y)": oracle.info(q, y),
        "slack_s": slack,
    }, examined=examined)


def exact_f_min(oracle: ComplexityOracle, x: str, y: str, z: str, w: str,
                budget: SearchBudget | None = None) -> WitnessReport:
    """min C(p,q) over run(p,x)=y and run(q,w)=z within budget."""
    budget = budget or SearchBudget()
    ps = _producers(oracle, y, x, budget.max_program_length)
    qs = _producers(oracle, z, w, budget.max_program_length)
    if not ps or not qs:
        return _absent("fmin", budget, len(ps) * len(qs))
    (cpq, _, _), p, q = _min_pair(oracle, ps, qs)
    return WitnessReport("fmin", True, TransmissionPair(p, q), {"f": cpq, "C(y|x)": oracle.C(y, x),
                                                               "C(z|w)": oracle.C(z, w)},
                         examined=len(ps) * len(qs))


def validate_witness(oracle: ComplexityOracle, report: WitnessReport, x: str, y: str,
                     z: str | None = None, w: str | None = None, slack: int = 6) -> bool:
    """Re-check a witness from scratch with a fresh oracle on the same system."""
    if not report.found:
        return True
    fresh = ComplexityOracle(oracle.system, oracle.budget_slack)
    p, q = report.pair.p, report.pair.q
    if report.kind == "infodist":
        return (run_or_none(fresh.system, p, x) == y and run_or_none(fresh.system, q, y) == x
                and fresh.C(encode_pair(p, q)) == report.slack["Cpq"])
    if report.kind == "fmin":
        return (run_or_none(fresh.system, p, x) == y and run_or_none(fresh.system, q, w) == z
                and fresh.C(encode_pair(p, q)) == report.slack["f"])
    if report.kind == "muchnik":
        consistent = p.startswith(q) or q.startswith(p)
        return consistent and fresh.C(z, (p, x)) <= slack and fresh.C(z, (q, y)) <= slack
    raise ValueError(f"unknown witness kind {report.kind!r}")
