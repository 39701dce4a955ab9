"""Constructor-versus-enumerator games.

An adversary streams :class:`Tighten` events (declared upper bounds on
conditional complexity). The constructor keeps a candidate triple
``(x, y, z)`` whose invariant is evaluated from declared data only; when it
breaks, the constructor reselects and writes fresh entries into its
function graph ``A``. Everything is deterministic given the game parameters, the seed
and the event stream.
"""
from __future__ import annotations

import hashlib
import json
import random
from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable

from ..bits import encode_pair, lex_next, nth_string, try_decode_pair
from .params import (
    GameSpec,
    break_bounds,
    key_length,
    program_threshold,
    simplification_cap,
    total_simplification_cap,
    validate_params,
)
from .tables import AGraph, BoundTable, CapacityExhausted

RUNNING = "running"
STUCK = "constructor_stuck"
HORIZON = "horizon_reached"

SAMPLE_CAP = 10 ** 5
SCAN_CAP = 10 ** 5


class InvalidSpec(ValueError):
    def __init__(self, violated: list[str]):
        super().__init__("parameters violate: " + "; ".join(violated))
        self.violated = violated


class GameHalted(RuntimeError):
    pass


@dataclass(frozen=True)
class Tighten:
    """Declare C(u|v) <= bound."""

    u: str
    v: str
    bound: int

    def as_dict(self) -> dict:
        return {"u": self.u, "v": self.v, "bound": self.bound}


@dataclass
class EventResult:
    accepted: bool
    reason: str | None = None
    broke: str | None = None


@dataclass
class Verdict:
    passed: bool
    witness: dict | None
    checked_pairs: int
    constants: dict
    detail: str = ""

    @property
    def label(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def as_dict(self) -> dict:
        return {"verdict": self.label, **asdict(self)}


@dataclass
class ViolationCount:
    condition: str
    exact: int
    bound: int | Fraction
    universe: int
    limit: Fraction
    assumptions_hold: bool

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.exact, self.universe)

    @property
    def ok(self) -> bool:
        within = self.exact <= self.bound
        return within and (not self.assumptions_hold or self.fraction < self.limit)

    def as_dict(self) -> dict:
        return {"condition": self.condition, "exact": self.exact, "bound": str(self.bound),
                "universe_log2": self.universe.bit_length() - 1, "fraction": float(self.fraction),
                "limit": str(self.limit), "assumptions_hold": self.assumptions_hold, "ok": self.ok}


class Game:
    """Shared machinery; subclasses supply the theorem-specific rules."""

    theorem = ""
    fraction_limit = Fraction(1, 4)

    def __init__(self, spec: GameSpec, seed: int = 0):
        check = validate_params(spec)
        if not check.ok:
            raise InvalidSpec(check.violated)
        self.spec = spec
        self.seed = seed
        self.rng = random.Random(seed)
        self.table = BoundTable()
        self.agraph = AGraph()
        self.status = RUNNING
        self.stuck_reason: str | None = None
        self.events = 0
        self.accepted = 0
        self.rejected = 0
        self.candidate_changes = 0
        self.breaks: Counter = Counter()
        self.ledgers: dict[str, Counter] = {}
        self.total_simplifications = 0
        self.records: list[dict] = []
        e = spec.epsilon
        self.cond_level = e - 1
        self.p_level = spec.m + e - 1
        self.q_level = spec.k + e - 1
        self.pair_level = spec.j + e - 1
        self.candidate = ("0" * spec.n, "0" * spec.m, "0" * spec.k)
        self.records.append({"type": "header", "spec": spec.as_dict(), "seed": seed})
        self._initialise()

    # ---- hooks
    def _initialise(self) -> None:
        self._simplify()
        self._log_candidate("initial")

    def violations(self, triple=None) -> list[str]:
        raise NotImplementedError

    def _qualifies(self, triple) -> bool:
        raise NotImplementedError

    def _simplify(self) -> None:
        raise NotImplementedError

    def _verdict_pair(self, p: str, q: str, cpq) -> str | None:
        raise NotImplementedError

    def _lemma_assumptions(self) -> str | None:
        if self.total_simplifications >= total_simplification_cap(self.spec):
            return "total simplifications reached the selection lemma's assumption"
        return None

    # ---- program sets over declared data
    def programs_y(self, x: str, y: str) -> list[str]:
        return sorted(p for p, b in self.table.given_pair(x, y).items()
                      if b <= self.cond_level and self.table.get(p) <= self.p_level)

    def programs_z(self, x: str, y: str, z: str) -> list[str]:
        raise NotImplementedError

    def program_pairs(self, triple=None) -> list[tuple[str, str]]:
        x, y, z = triple or self.candidate
        qs = self.programs_z(x, y, z)
        if not qs:
            return []
        return [(p, q) for p in self.programs_y(x, y) for q in qs]

    def low_pairs(self, triple=None) -> list[tuple[str, str]]:
        return [(p, q) for p, q in self.program_pairs(triple)
                if self.table.get(encode_pair(p, q)) <= self.pair_level]

    # ---- event handling
    def apply_event(self, event: Tighten) -> EventResult:
        if self.status != RUNNING:
            raise GameHalted(f"game is {self.status}")
        self.events += 1
        reason = self.table.check(event.u, event.v, event.bound)
        record = {"type": "event", "seq": self.events, **event.as_dict()}
        if reason is not None:
            self.rejected += 1
            record.update(accepted=False, reason=reason)
            self.records.append(record)
            self._check_horizon()
            return EventResult(False, reason)
        old = self.table.get(event.u, event.v)
        self.table.declare(event.u, event.v, event.bound)
        self.accepted += 1
        record.update(accepted=True)
        self.records.append(record)
        broke = None
        try:
            broke = self._react(event, old)
        except CapacityExhausted as exc:
            self._stuck(f"fresh-key capacity exhausted: {exc}")
        if self.status == RUNNING and self.violations():
            self._stuck("invariant not restored after reaction")
        self._check_horizon()
        return EventResult(True, None, broke)

    def _react(self, event: Tighten, old) -> str | None:
        if not self.violations():
            return None
        kind = self._classify(event)
        self.breaks[kind] += 1
        self._reselect(kind)
        return kind

    def _classify(self, event: Tighten) -> str:
        if event.v == "" and event.bound <= self.pair_level and any(
                encode_pair(p, q) == event.u for p, q in self.low_pairs()):
            return "pair_complexity"
        return "new_program"

    def _reselect(self, reason: str) -> None:
        assumption = self._lemma_assumptions()
        if assumption is not None:
            self._stuck(assumption)
            return
        triple = self.select_candidate()
        if triple is None:
            return
        self.candidate = triple
        self.candidate_changes += 1
        self._log_candidate(reason)
        self._simplify()

    def _check_horizon(self) -> None:
        if self.status == RUNNING and self.events >= self.spec.effective_horizon:
            self.status = HORIZON

    def _stuck(self, reason: str) -> None:
        self.status = STUCK
        self.stuck_reason = reason
        self.records.append({"type": "reaction", "seq": self.events, "kind": "stuck", "reason": reason})

    def _log_candidate(self, reason: str) -> None:
        self.records.append({"type": "reaction", "seq": self.events, "kind": "candidate",
                             "reason": reason, "triple": list(self.candidate)})

    def _add_entry(self, namespace: str, condition: str, output: str, length: int, ledger: str,
                   ledger_key: str) -> None:
        r = self.agraph.add(namespace, condition, output, length)
        self.ledgers.setdefault(ledger, Counter())[ledger_key] += 1
        self.total_simplifications += 1
        self.records.append({"type": "reaction", "seq": self.events, "kind": "a_entry",
                             "namespace": namespace, "condition": condition, "key": r, "output": output})

    # ---- candidate selection
    def _random_triple(self) -> tuple[str, str, str]:
        s = self.spec
        return (nth_string(self.rng.getrandbits(s.n), s.n), nth_string(self.rng.getrandbits(s.m), s.m),
                nth_string(self.rng.getrandbits(s.k), s.k))

    def _scan(self) -> Iterable[tuple[str, str, str]]:
        s = self.spec
        count = 0
        for xi in range(2 ** s.n):
            for yi in range(2 ** s.m):
                for zi in range(2 ** s.k):
                    count += 1
                    if count > SCAN_CAP:
                        return
                    yield nth_string(xi, s.n), nth_string(yi, s.m), nth_string(zi, s.k)

    def select_candidate(self) -> tuple[str, str, str] | None:
        """Seeded rejection sampling, then a length-lex scan; None means stuck."""
        for _ in range(SAMPLE_CAP):
            triple = self._random_triple()
            if self._qualifies(triple):
                return triple
        for triple in self._scan():
            if self._qualifies(triple):
                return triple
        self._stuck("no qualifying candidate within the search caps")
        return None

    # ---- verdict
    def verdict(self) -> Verdict:
        constants = {"tab_overhead": 4, "namespaces": self.agraph.namespaces(),
                     "note": "C_A bounds stand in for conditional complexity up to the table overhead"}
        if self.status == STUCK:
            return Verdict(False, None, 0, constants, f"constructor stuck: {self.stuck_reason}")
        pairs = self.program_pairs()
        for p, q in pairs:
            cpq = self.table.get(encode_pair(p, q))
            problem = self._verdict_pair(p, q, cpq)
            if problem is not None:
                return Verdict(False, {"p": p, "q": q, "C(p,q)": cpq if cpq != float("inf") else None},
                               len(pairs), constants, problem)
        extra = self._verdict_extra()
        if extra is not None:
            return Verdict(False, None, len(pairs), constants, extra)
        return Verdict(True, None, len(pairs), constants)

    def _verdict_extra(self) -> str | None:
        return None

    # ---- ledgers and counting
    def ledger_within_bounds(self) -> dict[str, tuple[int, int, bool]]:
        """Observed break counts against the strict closed-form bounds."""
        bounds = break_bounds(self.spec)
        return {name: (self.breaks.get(name, 0), bound, self.breaks.get(name, 0) < bound)
                for name, bound in bounds.items() if name in self.breaks or name in bounds}

    def conditions(self) -> list[str]:
        raise NotImplementedError

    def count_violations(self, condition: str, **where) -> ViolationCount:
        method = getattr(self, "_count_" + condition, None)
        if method is None or condition not in self.conditions() + ["y_per_program"]:
            raise ValueError(f"{self.theorem} has no counting condition {condition!r}")
        return method(**where)

    def _count_y_per_program(self, p: str | None = None, x: str | None = None) -> ViolationCount:
        """Strings under one condition [p, x] at level < epsilon (max over conditions if unspecified)."""
        if p is not None:
            conds = [encode_pair(p, x if x is not None else self.candidate[0])]
        else:
            conds = list(self.table.conditions())
        exact = max((sum(1 for b in self.table.under(v).values() if b <= self.cond_level) for v in conds), default=0)
        bound = 2 ** self.spec.epsilon - 1
        return ViolationCount("y_per_program", exact, bound, 2 ** self.spec.m, Fraction(1), True)

    def _count_simplified(self, ledger: str, cap: int, universe: int, name: str) -> ViolationCount:
        counts = self.ledgers.get(ledger, Counter())
        exact = sum(1 for c in counts.values() if c >= cap)
        total = sum(counts.values())
        bound = Fraction(total, cap)
        assumptions = self.total_simplifications < total_simplification_cap(self.spec)
        return ViolationCount(name, exact, bound, universe, self.fraction_limit, assumptions)

    def _low_yz(self, x: str) -> set[tuple[str, str]]:
        """(y, z) of the right lengths having a program pair of low pair complexity."""
        s = self.spec
        out = set()
        for (p, q), b in self.table.components("").items():
            if b > self.pair_level or self.table.get(p) > self.p_level or self.table.get(q) > self.q_level:
                continue
            ys = [y for y, c in self.table.under(encode_pair(p, x)).items() if c <= self.cond_level and len(y) == s.m]
            for y in ys:
                for z in self._z_for(q, x, y):
                    out.add((y, z))
        return out

    def _z_for(self, q: str, x: str, y: str) -> list[str]:
        raise NotImplementedError

    def _count_low_program_pairs(self, x: str | None = None) -> ViolationCount:
        x = x if x is not None else self.candidate[0]
        s = self.spec
        exact = len(self._low_yz(x))
        assumptions = s.j + 3 * s.epsilon <= s.m + s.k - self._pair_margin()
        return ViolationCount("low_program_pairs", exact, 2 ** (s.j + 3 * s.epsilon), 2 ** (s.m + s.k),
                              self.fraction_limit, assumptions)

    def _pair_margin(self) -> int:
        return 2

    def _many_programs(self, name: str, labels: Iterable[str], count) -> ViolationCount:
        s = self.spec
        t = program_threshold(s)
        exact = sum(1 for u in labels if count(u) >= t)
        universe = 2 ** (s.m if name == "y_many_programs" else s.k)
        bound = Fraction(2 ** (2 * s.epsilon) * universe, t)
        return ViolationCount(name, exact, bound, universe, self.fraction_limit, True)

    def _count_y_many_programs(self, x: str | None = None) -> ViolationCount:
        x = x if x is not None else self.candidate[0]
        labels = [u for u in self.table.labels_given_right(x) if len(u) == self.spec.m]
        return self._many_programs("y_many_programs", labels, lambda y: len(self.programs_y(x, y)))

    # ---- replay support
    def state(self) -> dict:
        return {
            "spec": self.spec.as_dict(),
            "seed": self.seed,
            "status": self.status,
            "candidate": list(self.candidate),
            "bounds": sorted([u, v, b] for (u, v), b in self.table.items()),
            "agraph": sorted([ns, c, r, o] for (ns, c, r), o in self.agraph.entries.items()),
            "used": sorted([ns, c, n, k] for (ns, c, n), k in self.agraph.used.items()),
            "ledgers": {name: sorted(c.items()) for name, c in sorted(self.ledgers.items())},
            "breaks": sorted(self.breaks.items()),
            "counters": [self.events, self.accepted, self.rejected, self.candidate_changes,
                         self.total_simplifications],
            "rng": hashlib.sha256(repr(self.rng.getstate()).encode()).hexdigest(),
        }

    def fingerprint(self) -> str:
        return hashlib.sha256(json.dumps(self.state(), sort_keys=True).encode()).hexdigest()

    def report(self) -> dict:
        v = self.verdict()
        return {
            "spec": self.spec.as_dict(),
            "seed": self.seed,
            "status": self.status,
            "stuck_reason": self.stuck_reason,
            "events": {"total": self.events, "accepted": self.accepted, "rejected": self.rejected},
            "candidate_changes": self.candidate_changes,
            "candidate": list(self.candidate),
            "breaks": {k: {"observed": o, "bound_log2": b.bit_length() - 1, "ok": ok}
                       for k, (o, b, ok) in self.ledger_within_bounds().items()},
            "ledger_maxima": {name: max(c.values(), default=0) for name, c in sorted(self.ledgers.items())},
            "simplifications": self.total_simplifications,
            "budget_convention": "declared counts at level l are at most 2^(l+1)-1; fresh keys of length l at most 2^l",
            "verdict": v.as_dict(),
            "fingerprint": self.fingerprint(),
        }


# --------------------------------------------------------------- network (e)

class _NetworkE(Game):
    def programs_z(self, x: str, y: str, z: str) -> list[str]:
        return sorted(q for q, b in self.table.given_pair(x, z).items()
                      if b <= self.cond_level and self.table.get(q) <= self.q_level)

    def _z_for(self, q: str, x: str, y: str) -> list[str]:
        return [z for z, c in self.table.under(encode_pair(q, x)).items()
                if c <= self.cond_level and len(z) == self.spec.k]

    def _count_z_many_programs(self, x: str | None = None) -> ViolationCount:
        x = x if x is not None else self.candidate[0]
        labels = [u for u in self.table.labels_given_right(x) if len(u) == self.spec.k]
        return self._many_programs("z_many_programs", labels, lambda z: len(self.programs_z(x, "", z)))


class GapCpqE(_NetworkE):
    """x advances on every new suitable pair; (y, z) is reselected otherwise."""

    theorem = "GAP_CPQ_E"
    fraction_limit = Fraction(1)

    def conditions(self) -> list[str]:
        return ["low_program_pairs", "y_many_programs", "z_many_programs"]

    def _pair_margin(self) -> int:
        return 0

    def violations(self, triple=None) -> list[str]:
        x, y, z = triple or self.candidate
        out = []
        ca = self.agraph.complexity(encode_pair(y, z), x)
        if ca is None or ca > self.spec.j:
            out.append("C_A(y,z|x) <= j")
        if self.low_pairs((x, y, z)):
            out.append("no suitable pair for the candidate")
        return out

    def _simplify(self) -> None:
        x, y, z = self.candidate
        self._add_entry("main", x, encode_pair(y, z), self.spec.j, "x", x)

    def _new_suitable(self, event: Tighten, old) -> bool:
        if event.v != "":
            return False
        t = self.table
        u, b = event.u, event.bound
        parts = try_decode_pair(u)
        if parts is not None and old > self.pair_level >= b:
            if t.get(parts[0]) <= self.p_level and t.get(parts[1]) <= self.q_level:
                return True
        if old > self.p_level >= b:
            for q in t.pairs_of(u):
                if t.get(encode_pair(u, q)) <= self.pair_level and t.get(q) <= self.q_level:
                    return True
            for p in t.pairs_with(u):
                if t.get(encode_pair(p, u)) <= self.pair_level and t.get(p) <= self.p_level:
                    return True
        return False

    def _react(self, event: Tighten, old) -> str | None:
        if self._new_suitable(event, old):
            self.breaks["suitable_pair"] += 1
            x = lex_next(self.candidate[0])
            if x is None:
                self._stuck("no lex-next first string left")
                return "suitable_pair"
            self._choose_yz(x, "suitable_pair")
            return "suitable_pair"
        if self.violations():
            self.breaks["program_condition"] += 1
            per_x = self.ledgers.setdefault("program_condition_per_x", Counter())
            per_x[self.candidate[0]] += 1
            self._choose_yz(self.candidate[0], "program_condition")
            return "program_condition"
        return None

    def _choose_yz(self, x: str, reason: str) -> None:
        s = self.spec
        if self.agraph.remaining("main", x, s.j) <= 0:
            self._stuck("fresh-key capacity exhausted for the first string")
            return
        for _ in range(SAMPLE_CAP):
            y = nth_string(self.rng.getrandbits(s.m), s.m)
            z = nth_string(self.rng.getrandbits(s.k), s.k)
            if not self.low_pairs((x, y, z)):
                break
        else:
            for yi in range(min(2 ** (s.m + s.k), SCAN_CAP)):
                y, z = nth_string(yi >> s.k, s.m), nth_string(yi & (2 ** s.k - 1), s.k)
                if not self.low_pairs((x, y, z)):
                    break
            else:
                self._stuck("no (y, z) outside the bad set within the search caps")
                return
        self.candidate = (x, y, z)
        self.candidate_changes += 1
        self._log_candidate(reason)
        self._simplify()

    def _qualifies(self, triple) -> bool:
        return not self.low_pairs(triple)

    def _verdict_pair(self, p, q, cpq):
        x, y, z = self.candidate
        ca = self.agraph.complexity(encode_pair(y, z), x)
        if ca is None:
            return "no A-certified upper bound on C(y,z|x)"
        if cpq < ca + self.spec.epsilon:
            return f"C(p,q)={cpq} < C_A(y,z|x)+eps={ca + self.spec.epsilon}"
        return None

    def ledger_within_bounds(self):
        bounds = break_bounds(self.spec)
        per_x = self.ledgers.get("program_condition_per_x", Counter())
        worst = max(per_x.values(), default=0)
        return {
            "suitable_pair": (self.breaks.get("suitable_pair", 0), bounds["suitable_pair"],
                              self.breaks.get("suitable_pair", 0) < bounds["suitable_pair"]),
            "program_condition_per_x": (worst, bounds["program_condition_per_x"],
                                        worst < bounds["program_condition_per_x"]),
        }


class GapPrivE(_NetworkE):
    """Any break picks a fresh triple, then simplifies all program pairs w.r.t. x."""

    theorem = "GAP_PRIV_E"

    def conditions(self) -> list[str]:
        return ["x_simplifications", "low_program_pairs", "y_many_programs", "z_many_programs"]

    def violations(self, triple=None) -> list[str]:
        x, y, z = triple or self.candidate
        out = []
        pairs = self.program_pairs((x, y, z))
        if any(self.table.get(encode_pair(p, q)) <= self.pair_level for p, q in pairs):
            out.append("C(p,q) >= j+eps for program pairs")
        if any((self.agraph.complexity(encode_pair(p, q), x) or 10 ** 9) > self.spec.j for p, q in pairs):
            out.append("C_A(p,q|x) <= j for program pairs")
        return out

    def _qualifies(self, triple) -> bool:
        x, y, z = triple
        t = program_threshold(self.spec)
        if self.ledgers.get("x", Counter())[x] >= simplification_cap(self.spec):
            return False
        if len(self.programs_y(x, y)) >= t or len(self.programs_z(x, y, z)) >= t:
            return False
        return not self.low_pairs(triple)

    def _simplify(self) -> None:
        x = self.candidate[0]
        for p, q in self.program_pairs():
            out = encode_pair(p, q)
            if self.agraph.complexity(out, x) is None:
                self._add_entry("main", x, out, self.spec.j, "x", x)

    def _verdict_pair(self, p, q, cpq):
        ca = self.agraph.complexity(encode_pair(p, q), self.candidate[0])
        if ca is None:
            return "program pair not simplified"
        if cpq - ca < self.spec.epsilon:
            return f"C(p,q)-C_A(p,q|x)={cpq - ca} < eps"
        return None

    def _count_x_simplifications(self) -> ViolationCount:
        return self._count_simplified("x", simplification_cap(self.spec), 2 ** self.spec.n, "x_simplifications")


# --------------------------------------------------------------- network (f)

class _NetworkF(Game):
    def programs_z(self, x: str, y: str, z: str) -> list[str]:
        return sorted(q for q, b in self.table.given_pair(y, z).items()
                      if b <= self.cond_level and self.table.get(q) <= self.q_level)

    def _z_for(self, q: str, x: str, y: str) -> list[str]:
        return [z for z, c in self.table.under(encode_pair(q, y)).items()
                if c <= self.cond_level and len(z) == self.spec.k]

    def _count_z_many_programs(self, x: str | None = None, y: str | None = None) -> ViolationCount:
        y = y if y is not None else self.candidate[1]
        labels = [u for u in self.table.labels_given_right(y) if len(u) == self.spec.k]
        return self._many_programs("z_many_programs", labels, lambda z: len(self.programs_z("", y, z)))


class GapCpqF(_NetworkF):
    """Breaks pick a fresh triple; then [y,z] is simplified w.r.t. x and z w.r.t. y."""

    theorem = "GAP_CPQ_F"

    def conditions(self) -> list[str]:
        return ["x_simplifications", "y_simplifications", "low_program_pairs"]

    def violations(self, triple=None) -> list[str]:
        x, y, z = triple or self.candidate
        out = []
        if self.low_pairs((x, y, z)):
            out.append("C(p,q) >= j+eps for program pairs")
        if (self.agraph.complexity(encode_pair(y, z), x, "x") or 10 ** 9) > self.spec.j:
            out.append("C_A(y,z|x) <= j")
        if (self.agraph.complexity(z, y, "y") or 10 ** 9) > self.spec.j:
            out.append("C_A(z|y) <= j")
        return out

    def _qualifies(self, triple) -> bool:
        x, y, z = triple
        cap = simplification_cap(self.spec)
        if self.ledgers.get("x", Counter())[x] >= cap or self.ledgers.get("y", Counter())[y] >= cap:
            return False
        return not self.low_pairs(triple)

    def _simplify(self) -> None:
        x, y, z = self.candidate
        if self.agraph.complexity(encode_pair(y, z), x, "x") is None:
            self._add_entry("x", x, encode_pair(y, z), self.spec.j, "x", x)
        if self.agraph.complexity(z, y, "y") is None:
            self._add_entry("y", y, z, self.spec.j, "y", y)

    def _verdict_pair(self, p, q, cpq):
        x, y, z = self.candidate
        a = self.agraph.complexity(encode_pair(y, z), x, "x")
        b = self.agraph.complexity(z, y, "y")
        if a is None or b is None:
            return "missing A-certified upper bound"
        if cpq < max(a, b) + self.spec.epsilon:
            return f"C(p,q)={cpq} < max(C_A(y,z|x),C_A(z|y))+eps"
        return None

    def _count_x_simplifications(self) -> ViolationCount:
        return self._count_simplified("x", simplification_cap(self.spec), 2 ** self.spec.n, "x_simplifications")

    def _count_y_simplifications(self) -> ViolationCount:
        return self._count_simplified("y", simplification_cap(self.spec), 2 ** self.spec.m, "y_simplifications")


class GapPrivF(_NetworkF):
    """Like the network-(e) private game, with a lower bound on C(y,z|x) and
    simplifications under the condition [x, bin(l)]."""

    theorem = "GAP_PRIV_F"
    fraction_limit = Fraction(1, 8)

    @property
    def l_bits(self) -> str:
        return format(self.spec.l, "b")

    def condition_for(self, x: str) -> str:
        return encode_pair(x, self.l_bits)

    def conditions(self) -> list[str]:
        return ["x_simplifications", "low_yz_given_x", "low_program_pairs", "y_many_programs", "z_many_programs"]

    def _pair_margin(self) -> int:
        return 3

    def violations(self, triple=None) -> list[str]:
        x, y, z = triple or self.candidate
        s = self.spec
        out = []
        if self.table.get(encode_pair(y, z), x) < s.k - s.l:
            out.append("C(y,z|x) >= k-l")
        pairs = self.program_pairs((x, y, z))
        if any(self.table.get(encode_pair(p, q)) <= self.pair_level for p, q in pairs):
            out.append("C(p,q) >= j+eps for program pairs")
        cond = self.condition_for(x)
        if any((self.agraph.complexity(encode_pair(p, q), cond) or 10 ** 9) > s.j - s.l for p, q in pairs):
            out.append("C_A(p,q|x,l) <= j-l for program pairs")
        return out

    def _classify(self, event: Tighten) -> str:
        x, y, z = self.candidate
        if event.u == encode_pair(y, z) and event.v == x and event.bound < self.spec.k - self.spec.l:
            return "yz_given_x"
        return super()._classify(event)

    def _qualifies(self, triple) -> bool:
        x, y, z = triple
        s = self.spec
        t = program_threshold(s)
        if self.ledgers.get("x", Counter())[self.condition_for(x)] >= simplification_cap(s):
            return False
        if self.table.get(encode_pair(y, z), x) < s.k - s.l:
            return False
        if len(self.programs_y(x, y)) >= t or len(self.programs_z(x, y, z)) >= t:
            return False
        return not self.low_pairs(triple)

    def _simplify(self) -> None:
        cond = self.condition_for(self.candidate[0])
        for p, q in self.program_pairs():
            out = encode_pair(p, q)
            if self.agraph.complexity(out, cond) is None:
                self._add_entry("main", cond, out, key_length(self.spec), "x", cond)

    def _verdict_pair(self, p, q, cpq):
        s = self.spec
        ca = self.agraph.complexity(encode_pair(p, q), self.condition_for(self.candidate[0]))
        if ca is None:
            return "program pair not simplified"
        if cpq - ca < s.l + s.epsilon:
            return f"C(p,q)-C_A(p,q|x,l)={cpq - ca} < l+eps"
        return None

    def _verdict_extra(self):
        x, y, z = self.candidate
        s = self.spec
        declared = self.table.get(encode_pair(y, z), x)
        if declared < s.k - s.l:
            return f"C(y,z|x) <= {declared} < k-l, so C(z|y)-C(y,z|x) can exceed l+O(1)"
        return None

    def _count_x_simplifications(self) -> ViolationCount:
        return self._count_simplified("x", simplification_cap(self.spec), 2 ** self.spec.n, "x_simplifications")

    def _count_low_yz_given_x(self, x: str | None = None) -> ViolationCount:
        x = x if x is not None else self.candidate[0]
        s = self.spec
        exact = sum(1 for (y, z), b in self.table.components(x).items()
                    if b < s.k - s.l and len(y) == s.m and len(z) == s.k)
        return ViolationCount("low_yz_given_x", exact, 2 ** (s.k - s.l) - 1, 2 ** (s.m + s.k),
                              self.fraction_limit, s.k - s.l <= s.m + s.k - 3)


GAMES = {cls.theorem: cls for cls in (GapCpqE, GapPrivE, GapCpqF, GapPrivF)}


def new_game(spec: GameSpec, seed: int = 0) -> Game:
    return GAMES[spec.theorem](spec, seed)


def apply_event(game: Game, event: Tighten) -> EventResult:
    return game.apply_event(event)


def select_candidate(game: Game):
    return game.select_candidate()


def count_violations(game: Game, condition: str, **where) -> ViolationCount:
    return game.count_violations(condition, **where)


def verdict(game: Game) -> Verdict:
    return game.verdict()


def all_counts(game: Game) -> list[ViolationCount]:
    return [game.count_violations(c) for c in game.conditions() + ["y_per_program"]]


def run_game(spec: GameSpec, seed: int, adversary, max_events: int | None = None,
             snapshot_every: int | None = None) -> tuple[Game, list[list[ViolationCount]]]:
    """Play ``adversary`` against a fresh constructor until the stream ends,
    the horizon is reached, ``max_events`` pass, or the constructor sticks."""
    game = new_game(spec, seed)
    snapshots = []
    while game.status == RUNNING and (max_events is None or game.events < max_events):
        event = adversary.next_event(game)
        if event is None:
            break
        game.apply_event(event)
        if snapshot_every and game.events % snapshot_every == 0:
            snapshots.append(all_counts(game))
    if snapshot_every:
        snapshots.append(all_counts(game))
    game.records.append({"type": "verdict", **game.verdict().as_dict(), "fingerprint": game.fingerprint()})
    return game, snapshots


def replay(records: Iterable[dict]) -> Game:
    """Rebuild a game from transcript records by re-feeding its events."""
    records = list(records)
    header = next(r for r in records if r.get("type") == "header")
    spec = GameSpec(**header["spec"])
    game = new_game(spec, header["seed"])
    for rec in records:
        if rec.get("type") == "event":
            if game.status != RUNNING:
                break
            game.apply_event(Tighten(rec["u"], rec["v"], rec["bound"]))
    return game
