"""Sparse declared-bound table and the constructor's function graph."""
from __future__ import annotations

from collections import defaultdict

from ..bits import nth_string, try_decode_pair
from ..complexity import TAB_OVERHEAD, DescriptionSystem, program_count_bound


class BudgetError(ValueError):
    """A declaration would put too many strings at or below some level."""


class MonotonicityError(ValueError):
    """A declaration would raise an existing bound."""


class CapacityExhausted(RuntimeError):
    """No fresh key of the requested length is left for a condition."""


class BoundTable:
    """Declared upper bounds on C(u|v); absent means +infinity.

    Bounds only decrease, and for every condition ``v`` and level ``l`` at
    most ``2^(l+1) - 1`` strings may sit at or below ``l``. Secondary
    indexes make the games' queries proportional to the declared data:

    * ``pairs_of(a)`` / ``pairs_with(b)``: unconditional labels that decode
      as pairs ``[a, b]``;
    * ``given_pair(b, u)``: for conditions ``[a, b]``, the map ``a -> C(u|[a,b])``;
    * ``under(v)`` and ``labels_given_right(b)``: reverse views of the above;
    * ``components(v)``: for labels ``u = [s, t]``, the map ``(s, t) -> C(u|v)``.
    """

    def __init__(self):
        self.bounds: dict[tuple[str, str], int] = {}
        self._hist: dict[str, dict[int, int]] = defaultdict(lambda: defaultdict(int))
        self._by_left: dict[str, set[str]] = defaultdict(set)
        self._by_right: dict[str, set[str]] = defaultdict(set)
        self._given: dict[tuple[str, str], dict[str, int]] = defaultdict(dict)
        self._components: dict[str, dict[tuple[str, str], int]] = defaultdict(dict)
        self._by_condition: dict[str, dict[str, int]] = defaultdict(dict)
        self._right_labels: dict[str, set[str]] = defaultdict(set)

    def __len__(self) -> int:
        return len(self.bounds)

    def get(self, u: str, v: str = "") -> float:
        return self.bounds.get((u, v), float("inf"))

    def count_at_most(self, v: str, level: int) -> int:
        return sum(c for lvl, c in self._hist.get(v, {}).items() if lvl <= level)

    def check(self, u: str, v: str, bound: int) -> str | None:
        """Reason the declaration would be rejected, or None if allowed."""
        if bound < 0:
            return "negative bound"
        old = self.bounds.get((u, v))
        if old is not None and bound > old:
            return f"monotonicity: C(u|v) already <= {old}"
        if old is not None and bound == old:
            return None
        hist = self._hist.get(v, {})
        top = old - 1 if old is not None else max([bound, *hist.keys()])
        levels = sorted({bound, *(lvl for lvl in hist if bound <= lvl <= top)})
        running = sum(c for lvl, c in hist.items() if lvl < bound)
        for lvl in levels:
            running += hist.get(lvl, 0)
            if running + 1 > program_count_bound(lvl):
                return f"budget: more than {program_count_bound(lvl)} strings at level <= {lvl}"
        return None

    def declare(self, u: str, v: str, bound: int) -> int | None:
        """Record ``C(u|v) <= bound``; returns the previous bound."""
        reason = self.check(u, v, bound)
        if reason is not None:
            cls = MonotonicityError if reason.startswith("monotonicity") else BudgetError
            raise cls(reason)
        old = self.bounds.get((u, v))
        if old == bound:
            return old
        hist = self._hist[v]
        if old is not None:
            hist[old] -= 1
            if not hist[old]:
                del hist[old]
        hist[bound] += 1
        self.bounds[(u, v)] = bound
        self._by_condition[v][u] = bound
        if old is None:
            if v == "":
                parts = try_decode_pair(u)
                if parts is not None:
                    self._by_left[parts[0]].add(parts[1])
                    self._by_right[parts[1]].add(parts[0])
        vparts = try_decode_pair(v)
        if vparts is not None:
            self._given[(vparts[1], u)][vparts[0]] = bound
            self._right_labels[vparts[1]].add(u)
        uparts = try_decode_pair(u)
        if uparts is not None:
            self._components[v][uparts] = bound
        return old

    def pairs_of(self, a: str) -> set[str]:
        return self._by_left.get(a, set())

    def pairs_with(self, b: str) -> set[str]:
        return self._by_right.get(b, set())

    def given_pair(self, b: str, u: str) -> dict[str, int]:
        return self._given.get((b, u), {})

    def under(self, v: str) -> dict[str, int]:
        """All declared ``u -> C(u|v)`` for one condition."""
        return self._by_condition.get(v, {})

    def labels_given_right(self, b: str) -> set[str]:
        """Labels ``u`` with some declaration under a condition ``[a, b]``."""
        return self._right_labels.get(b, set())

    def components(self, v: str) -> dict[tuple[str, str], int]:
        return self._components.get(v, {})

    def conditions(self):
        return self._hist.keys()

    def items(self):
        return self.bounds.items()


class AGraph:
    """Graph of the constructor's function A, with per-namespace keys.

    Keys for a (namespace, condition) pair are handed out in lex order
    within each length, so at most ``2^length`` keys of a length exist.
    """

    def __init__(self):
        self.entries: dict[tuple[str, str, str], str] = {}
        self._best: dict[tuple[str, str, str], int] = {}
        self.used: dict[tuple[str, str, int], int] = defaultdict(int)

    def __len__(self) -> int:
        return len(self.entries)

    def fresh_key(self, namespace: str, condition: str, length: int) -> str:
        count = self.used.get((namespace, condition, length), 0)
        if count >= 2 ** length:
            raise CapacityExhausted(f"all {2 ** length} keys of length {length} used for this condition")
        return nth_string(count, length)

    def remaining(self, namespace: str, condition: str, length: int) -> int:
        return 2 ** length - self.used.get((namespace, condition, length), 0)

    def add(self, namespace: str, condition: str, output: str, length: int) -> str:
        r = self.fresh_key(namespace, condition, length)
        self.entries[(namespace, condition, r)] = output
        self.used[(namespace, condition, length)] += 1
        key = (namespace, condition, output)
        self._best[key] = min(self._best.get(key, length), length)
        return r

    def complexity(self, output: str, condition: str, namespace: str = "main") -> int | None:
        """C_A(output|condition): shortest key, None when no entry exists."""
        return self._best.get((namespace, condition, output))

    def namespaces(self) -> list[str]:
        return sorted({ns for ns, _, _ in self.entries})


def export_agraph(graph: AGraph, base: DescriptionSystem | None = None) -> tuple[DescriptionSystem, int]:
    """Materialise A as a description-system table.

    With several namespaces each key is prefixed by a fixed-width namespace
    index. Returns the system and the per-query overhead in bits over C_A.
    """
    names = graph.namespaces()
    width = max(1, (len(names) - 1).bit_length()) if len(names) > 1 else 0
    system = base or DescriptionSystem()
    for (ns, condition, r), output in sorted(graph.entries.items()):
        prefix = nth_string(names.index(ns), width) if width else ""
        system = system.extend(prefix + r, condition, output)
    return system, TAB_OVERHEAD + width
