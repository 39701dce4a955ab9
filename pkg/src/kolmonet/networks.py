"""The six two-receiver topologies, transmission feasibility and metrics.

Every topology has a sender holding all strings and one or two receivers,
each with an input string, a wanted output string and one incoming channel.
Channel labels are ``p`` (to node 2) and ``q`` (to node 3). Conditions on
several strings use right-nested pairing in the order listed by
``Network.variables``; an eavesdropper observes ``[p, q]`` (just ``p`` on the
single-channel topology ``b``).
"""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .bits import encode_tuple, parse_bits
from .complexity import ABOVE_BUDGET, ComplexityOracle, _sub, c_model_default, is_above


@dataclass(frozen=True)
class Node:
    name: int
    input: str
    output: str
    channel: str


@dataclass(frozen=True)
class Network:
    tag: str
    variables: tuple[str, ...]
    nodes: tuple[Node, ...]
    private: tuple[str, ...]

    @property
    def channels(self) -> tuple[str, ...]:
        return tuple(node.channel for node in self.nodes)

    def node(self, name: int) -> Node:
        for node in self.nodes:
            if node.name == name:
                return node
        raise KeyError(name)


TOPOLOGIES: dict[str, Network] = {
    "a": Network("a", ("w", "x", "y", "z"), (Node(2, "x", "y", "p"), Node(3, "w", "z", "q")), ("w", "x")),
    "b": Network("b", ("x", "y"), (Node(2, "x", "y", "p"),), ("x",)),
    "c": Network("c", ("x", "y"), (Node(2, "x", "y", "p"), Node(3, "y", "x", "q")), ()),
    "d": Network("d", ("x", "y", "z"), (Node(2, "x", "z", "p"), Node(3, "y", "z", "q")), ("x", "y")),
    "e": Network("e", ("x", "y", "z"), (Node(2, "x", "y", "p"), Node(3, "x", "z", "q")), ("x",)),
    "f": Network("f", ("x", "y", "z"), (Node(2, "x", "y", "p"), Node(3, "y", "z", "q")), ("x",)),
}


def get_network(tag: str | Network) -> Network:
    if isinstance(tag, Network):
        return tag
    try:
        return TOPOLOGIES[tag]
    except KeyError:
        raise ValueError(f"unknown topology {tag!r}; expected one of a-f") from None


@dataclass(frozen=True)
class TransmissionPair:
    p: str
    q: str = ""

    def labels(self) -> dict[str, str]:
        return {"p": self.p, "q": self.q}


def _tuple(strings: Mapping[str, str], names: Iterable[str]) -> str:
    return encode_tuple(*(strings[n] for n in names))


def observed(net: Network, pair: TransmissionPair) -> str:
    """The string an eavesdropper sees on all channels."""
    labels = pair.labels()
    return encode_tuple(*(labels[c] for c in net.channels))


def check_strings(net: Network, strings: Mapping[str, str]) -> dict[str, str]:
    missing = [v for v in net.variables if v not in strings]
    if missing:
        raise ValueError(f"topology {net.tag} needs strings {missing}")
    return {v: strings[v] for v in net.variables}


def conditions(net: Network, strings: Mapping[str, str], pair: TransmissionPair,
               oracle: ComplexityOracle) -> dict[str, object]:
    """Every defining conditional complexity of an information transmission."""
    strings = check_strings(net, strings)
    everything = _tuple(strings, net.variables)
    labels = pair.labels()
    out: dict[str, object] = {}
    for node in net.nodes:
        out[f"C({node.channel}|{','.join(net.variables)})"] = oracle.C(labels[node.channel], everything)
    for node in net.nodes:
        out[f"C({node.output}|{node.channel},{node.input})"] = oracle.C(
            strings[node.output], (labels[node.channel], strings[node.input]))
    return out


def achieved_epsilon(values: Mapping[str, object]):
    vals = list(values.values())
    return ABOVE_BUDGET if any(is_above(v) for v in vals) else max(vals)


@dataclass
class Feasibility:
    feasible: bool
    values: dict[str, object]
    achieved_epsilon: object


def feasibility(net: Network | str, strings: Mapping[str, str], pair: TransmissionPair, epsilon: int,
                oracle: ComplexityOracle) -> Feasibility:
    """Is ``pair`` an ``epsilon`` information transmission (all values < epsilon)?"""
    net = get_network(net)
    values = conditions(net, strings, pair, oracle)
    eps = achieved_epsilon(values)
    ok = not is_above(eps) and eps < epsilon
    return Feasibility(ok, values, eps)


@dataclass
class Metrics:
    achieved_epsilon: object
    cp: object
    cq: object
    cpq: object
    total_disclosure: object
    private_disclosure: object
    proxy: bool = False

    def as_dict(self) -> dict:
        return {k: (str(v) if is_above(v) else v) for k, v in asdict(self).items()}


OBJECTIVES = ("cp", "cq", "cpq", "private_disclosure", "total_disclosure")


def metrics(net: Network | str, strings: Mapping[str, str], pair: TransmissionPair,
            oracle: ComplexityOracle) -> Metrics:
    net = get_network(net)
    strings = check_strings(net, strings)
    if "q" not in net.channels:
        pair = TransmissionPair(pair.p, "")
    seen = observed(net, pair)
    cpq = oracle.C(seen)
    return Metrics(
        achieved_epsilon=achieved_epsilon(conditions(net, strings, pair, oracle)),
        cp=oracle.C(pair.p),
        cq=oracle.C(pair.q),
        cpq=cpq,
        total_disclosure=_sub(cpq, oracle.C(seen, _tuple(strings, net.variables))),
        private_disclosure=_sub(cpq, oracle.C(seen, _tuple(strings, net.private))),
    )


def group_disclosure(net: Network | str, strings: Mapping[str, str], pair: TransmissionPair,
                     group: Sequence[str], oracle: ComplexityOracle):
    """I(channels : group) for any nonempty group of the topology's strings."""
    net = get_network(net)
    strings = check_strings(net, strings)
    order = [v for v in net.variables if v in set(group)]
    if not order or len(order) != len(set(group)):
        raise ValueError(f"group {group!r} is not a nonempty subset of {net.variables}")
    seen = observed(net, pair)
    return _sub(oracle.C(seen), oracle.C(seen, _tuple(strings, order)))


# ------------------------------------------------------------------ cuts

def cut_exclusions(net: Network, cut: Sequence[int]) -> list[tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]]:
    """All valid ``(A, B, excluded)`` choices for a cut.

    An input may be dropped from ``A`` when it is an output of a cut node
    that can still be decoded from the channel labels and the remaining
    inputs (closure over cut nodes).
    """
    nodes = [net.node(n) for n in sorted(set(cut))]
    inputs = sorted({n.input for n in nodes}, key=net.variables.index)
    outputs = tuple(sorted({n.output for n in nodes}, key=net.variables.index))
    excludable = [v for v in inputs if v in outputs]
    choices = []
    for size in range(len(excludable) + 1):
        for dropped in itertools.combinations(excludable, size):
            known = set(inputs) - set(dropped)
            changed = True
            while changed:
                changed = False
                for node in nodes:
                    if node.input in known and node.output not in known:
                        known.add(node.output)
                        changed = True
            if set(dropped) <= known:
                a = tuple(v for v in inputs if v not in dropped)
                choices.append((a, outputs, dropped))
    return choices


@dataclass
class CutBound:
    cut: tuple[int, ...]
    value: float
    raw: object  # C(B|A) for the best exclusion choice
    a: tuple[str, ...]
    b: tuple[str, ...]
    slack: float
    choices: dict[str, object] = field(default_factory=dict)


def cut_bound(net: Network | str, cut: Sequence[int], strings: Mapping[str, str], epsilon: int,
              oracle: ComplexityOracle, c_model: float | None = None) -> CutBound:
    """Lower bound C(B|A) - |cut| * epsilon - c_model on the total disclosure."""
    net = get_network(net)
    if not cut:
        raise ValueError("a cut needs at least one receiver node")
    strings = check_strings(net, strings)
    if c_model is None:
        c_model = c_model_default(max((len(s) for s in strings.values()), default=1))
    best = None
    choices = {}
    for a, b, dropped in cut_exclusions(net, cut):
        raw = oracle.C(_tuple(strings, b), _tuple(strings, a))
        choices[f"C({','.join(b)}|{','.join(a)})"] = raw
        if not is_above(raw) and (best is None or raw > best[0]):
            best = (raw, a, b)
    raw, a, b = best
    slack = len(set(cut)) * epsilon + c_model
    return CutBound(tuple(sorted(set(cut))), raw - slack, raw, a, b, slack, choices)


def all_cuts(net: Network | str) -> list[tuple[int, ...]]:
    net = get_network(net)
    names = [n.name for n in net.nodes]
    return [c for size in range(1, len(names) + 1) for c in itertools.combinations(names, size)]


# -------------------------------------------------------------- formulas

class _NotAProfileFunction:
    def __repr__(self) -> str:
        return "NOT_A_PROFILE_FUNCTION"

    __str__ = __repr__


NOT_A_PROFILE_FUNCTION = _NotAProfileFunction()

REQUIRED_QUANTITIES: dict[str, tuple[str, ...]] = {
    "a": ("C(y|x)", "C(z|w)"),
    "b": ("C(y|x)",),
    "c": ("C(y|x)", "C(x|y)"),
    "d": ("C(z|x)", "C(z|y)", "I(x:z|y)", "I(y:z|x)"),
    "e": ("C(y|x)", "C(z|x)", "C(y,z|x)"),
    "f": ("C(y|x)", "C(z|y)", "C(y,z|x)"),
}


def _max(*values):
    try:
        return max(values)
    except TypeError:
        import sympy

        return sympy.Max(*values)


def minimal_value_formulas(net: Network | str, values: Mapping[str, object]) -> dict[str, object]:
    """Closed-form minima of C(p), C(q), C(p,q) and the private disclosure.

    ``values`` maps quantity names (see :data:`REQUIRED_QUANTITIES`) to
    numbers or sympy expressions; the arithmetic is exact either way. On
    topology ``b`` there is no second channel, so ``minCq`` is None.
    """
    net = get_network(net)
    missing = [k for k in REQUIRED_QUANTITIES[net.tag] if k not in values]
    if missing:
        raise ValueError(f"topology {net.tag} needs {missing}")
    v = values
    if net.tag == "a":
        return {"minCp": v["C(y|x)"], "minCq": v["C(z|w)"],
                "minCpq": NOT_A_PROFILE_FUNCTION, "minPrivate": NOT_A_PROFILE_FUNCTION}
    if net.tag == "b":
        return {"minCp": v["C(y|x)"], "minCq": None, "minCpq": v["C(y|x)"], "minPrivate": 0}
    if net.tag == "c":
        return {"minCp": v["C(y|x)"], "minCq": v["C(x|y)"],
                "minCpq": _max(v["C(y|x)"], v["C(x|y)"]), "minPrivate": 0}
    if net.tag == "d":
        return {"minCp": v["C(z|x)"], "minCq": v["C(z|y)"],
                "minCpq": _max(v["C(z|x)"], v["C(z|y)"]),
                "minPrivate": _max(v["I(x:z|y)"], v["I(y:z|x)"])}
    if net.tag == "e":
        return {"minCp": v["C(y|x)"], "minCq": v["C(z|x)"], "minCpq": v["C(y,z|x)"], "minPrivate": 0}
    return {"minCp": v["C(y|x)"], "minCq": v["C(z|y)"],
            "minCpq": _max(v["C(y,z|x)"], v["C(z|y)"]),
            "minPrivate": _max(0, v["C(z|y)"] - v["C(y,z|x)"])}


def quantity_values(net: Network | str, strings: Mapping[str, str], oracle: ComplexityOracle) -> dict[str, object]:
    """Evaluate the quantities a topology's formulas need, against an oracle."""
    net = get_network(net)
    s = check_strings(net, strings)
    out = {}
    for name in REQUIRED_QUANTITIES[net.tag]:
        body = name[2:-1]
        if name.startswith("I("):
            sides, given = body.split("|")
            a, b = sides.split(":")
            out[name] = oracle.info(s[a], s[b], s[given])
        else:
            target, given = body.split("|")
            out[name] = oracle.C(_tuple(s, target.split(",")), _tuple(s, given.split(",")))
    return out


# ---------------------------------------------------------------- harness

@dataclass
class Claim:
    """A claimed bound ``formula(strings, oracle)`` on a metric."""

    name: str
    formula: Callable[[Mapping[str, str], ComplexityOracle], float]
    quantity: str
    direction: str  # "lower" or "upper"


@dataclass
class HarnessReport:
    claim: str
    direction: str
    instances: int
    instances_without_pairs: int
    worst_margin: float | None
    violations: int
    tolerance: float
    worst_instance: dict | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def bound_harness(claim: Claim, net: Network | str, instances: Iterable[Mapping[str, str]], epsilon: int,
                  oracle: ComplexityOracle, budget=None, tolerance: float = 0.0) -> HarnessReport:
    """Measure a claimed bound over feasible pairs found by exhaustive search.

    For a lower bound the margin is ``formula - quantity`` maximised over all
    feasible pairs; for an upper bound it is ``min quantity - formula`` (the
    slack of the best witness). A margin above ``tolerance`` is a violation.
    """
    from .search import SearchBudget, enumerate_feasible

    net = get_network(net)
    budget = budget or SearchBudget()
    count = empty = violations = 0
    worst = None
    worst_instance = None
    for strings in instances:
        count += 1
        target = claim.formula(strings, oracle)
        values = [getattr(pt.metrics, claim.quantity) for pt in enumerate_feasible(net, strings, epsilon, oracle, budget)]
        values = [v for v in values if not is_above(v)]
        if not values:
            empty += 1
            continue
        if claim.direction == "lower":
            margin = max(target - v for v in values)
        else:
            margin = min(values) - target
        if margin > tolerance:
            violations += 1
        if worst is None or margin > worst:
            worst, worst_instance = margin, dict(strings)
    return HarnessReport(claim.name, claim.direction, count, empty, worst, violations, tolerance, worst_instance)


def read_instance(path) -> dict[str, str]:
    """Parse ``name=value`` lines (``-`` for the empty string, ``#`` comments)."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            name, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"line {lineno}: expected name=value")
            out[name.strip()] = parse_bits(value)
    return out


def parse_instance_text(text: str) -> dict[str, str]:
    out = {}
    for part in text.replace(";", "\n").splitlines():
        part = part.strip()
        if part:
            name, _, value = part.partition("=")
            out[name.strip()] = parse_bits(value)
    return out
