"""Finite description systems and their exact conditional complexity.

A program is dispatched on its prefix:

======  ===========  ==============================================
prefix  name         result on condition ``v``
======  ===========  ==============================================
1u      LIT          ``u``
01      ID           ``v``
0010    FST          left component of ``v`` read as a pair
0011    SND          right component of ``v`` read as a pair
0001    APPLY        ``run(a, b)`` where ``v = [a, b]``
0000r   TAB          table entry for ``(r, v)``
======  ===========  ==============================================

ID, FST, SND and APPLY match only the exact opcode string; anything else
(``""``, ``"0"``, ``"011"`` ...) is undefined. Complexity is plain, not
prefix-free, and is computed exactly: every program falls into exactly one
of the rows above, so the minimum over all programs up to the budget is the
minimum over the per-row candidates. :func:`exhaustive_complexity` gets the
same number by running every program and is kept as an independent check.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .bits import (
    check_bits,
    encode_tuple,
    lexkey,
    parse_bits,
    render_bits,
    strings_upto,
    try_decode_pair,
)

LIT = "1"
ID = "01"
FST = "0010"
SND = "0011"
APPLY = "0001"
TAB = "0000"

#: Length of the shortest program that re-runs a program stored in the
#: condition, i.e. ``C(y | [p, x]) <= APPLY_COST`` whenever ``run(p, x) = y``.
APPLY_COST = len(APPLY)
TAB_OVERHEAD = len(TAB)
DEFAULT_RECURSION_CAP = 8
DEFAULT_BUDGET_SLACK = 8

Condition = Union[str, Sequence[str]]


class RecursionCapExceeded(RuntimeError):
    """Nested APPLY went deeper than the configured cap."""


class TableConflict(ValueError):
    """A table entry would bind ``(r, condition)`` to a second output."""


class _AboveBudget:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ABOVE_BUDGET"

    __str__ = __repr__

    def __reduce__(self):
        return (_AboveBudget, ())


#: Marker returned when no program within the budget produces the target.
ABOVE_BUDGET = _AboveBudget()


def is_above(value) -> bool:
    return value is ABOVE_BUDGET


def as_condition(v: Condition) -> str:
    if isinstance(v, str):
        return v
    return encode_tuple(*v)


@dataclass(frozen=True)
class DescriptionSystem:
    """The opcode machine plus an append-only lookup table.

    ``table`` maps ``(r, condition)`` to an output. Extension returns a new
    system and leaves this one untouched.
    """

    table: Mapping[tuple[str, str], str] = field(default_factory=dict)
    recursion_cap: int = DEFAULT_RECURSION_CAP

    def __post_init__(self):
        # (condition, output) -> lex-least key, for the TAB candidate
        best: dict[tuple[str, str], str] = {}
        for (r, cond), out in self.table.items():
            slot = (cond, out)
            if slot not in best or lexkey(r) < lexkey(best[slot]):
                best[slot] = r
        object.__setattr__(self, "_best_key", best)
        object.__setattr__(self, "table", dict(self.table))

    def __hash__(self):
        return hash((frozenset(self.table.items()), self.recursion_cap))

    def extend(self, r: str, condition: Condition, output: str) -> "DescriptionSystem":
        r, output = check_bits(r), check_bits(output)
        cond = as_condition(condition)
        existing = self.table.get((r, cond))
        if existing is not None:
            if existing != output:
                raise TableConflict(
                    f"key {render_bits(r)} under {render_bits(cond)} already "
                    f"maps to {render_bits(existing)}"
                )
            return self
        table = dict(self.table)
        table[(r, cond)] = output
        return DescriptionSystem(table, self.recursion_cap)

    def lookup(self, r: str, condition: str) -> str | None:
        return self.table.get((r, condition))

    def best_key(self, condition: str, output: str) -> str | None:
        return self._best_key.get((condition, output))

    @classmethod
    def from_lines(cls, lines: Iterable[str], **kwargs) -> "DescriptionSystem":
        system = cls(**kwargs)
        for lineno, raw in enumerate(lines, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ValueError(f"line {lineno}: expected 3 tab-separated fields")
            r, cond, out = (parse_bits(f) for f in fields)
            system = system.extend(r, cond, out)
        return system

    @classmethod
    def load(cls, path, **kwargs) -> "DescriptionSystem":
        with open(path, encoding="utf-8") as fh:
            return cls.from_lines(fh, **kwargs)

    def dump(self, path) -> None:
        rows = sorted(self.table.items(), key=lambda kv: (lexkey(kv[0][1]), lexkey(kv[0][0])))
        lines = ["# r\tcondition\toutput"]
        for (r, cond), out in rows:
            lines.append("\t".join(render_bits(s) for s in (r, cond, out)))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


EMPTY_SYSTEM = DescriptionSystem()


def run(system: DescriptionSystem, program: str, condition: str, _depth: int = 0) -> str | None:
    """Execute ``program`` on ``condition``.

    Returns None when the result is undefined; raises
    :class:`RecursionCapExceeded` when nested APPLY exceeds the cap.
    """
    if program.startswith(LIT):
        return program[1:]
    if program == ID:
        return condition
    if program.startswith(TAB):
        return system.lookup(program[4:], condition)
    if program in (FST, SND, APPLY):
        parts = try_decode_pair(condition)
        if parts is None:
            return None
        left, right = parts
        if program == FST:
            return left
        if program == SND:
            return right
        if _depth + 1 > system.recursion_cap:
            raise RecursionCapExceeded(f"APPLY nested deeper than {system.recursion_cap}")
        return run(system, left, right, _depth + 1)
    return None


def run_or_none(system: DescriptionSystem, program: str, condition: str) -> str | None:
    try:
        return run(system, program, condition)
    except RecursionCapExceeded:
        return None


def shortest_program(system: DescriptionSystem, u: str, v: str) -> str:
    """Lex-least among the shortest programs for ``u`` given ``v``.

    LIT always qualifies, so the result is always defined.
    """
    best = LIT + u
    if u == v:
        best = min(best, ID, key=lexkey)
    parts = try_decode_pair(v)
    if parts is not None:
        left, right = parts
        if left == u:
            best = min(best, FST, key=lexkey)
        if right == u:
            best = min(best, SND, key=lexkey)
        if lexkey(APPLY) < lexkey(best) and run_or_none(system, left, right) == u:
            best = APPLY
    key = system.best_key(v, u)
    if key is not None:
        best = min(best, TAB + key, key=lexkey)
    return best


def all_programs(max_len: int) -> Iterator[str]:
    return strings_upto(max_len)


def exhaustive_complexity(system: DescriptionSystem, u: str, v: str, budget: int):
    """Brute-force C(u|v): run every program of length <= budget."""
    for program in all_programs(budget):
        if run_or_none(system, program, v) == u:
            return len(program)
    return ABOVE_BUDGET


def reachable(system: DescriptionSystem, condition: str, max_len: int) -> dict[str, str]:
    """Map each output reachable by a program of length <= max_len to its
    length-lex first program."""
    out: dict[str, str] = {}
    for program in all_programs(max_len):
        result = run_or_none(system, program, condition)
        if result is not None and result not in out:
            out[result] = program
    return out


def programs_producing(system: DescriptionSystem, target: str, condition: str, max_len: int) -> list[str]:
    """Every program of length <= max_len that maps ``condition`` to ``target``."""
    return [p for p in all_programs(max_len) if run_or_none(system, p, condition) == target]


class ComplexityOracle:
    """Exact C(u|v) relative to a :class:`DescriptionSystem`.

    ``budget_slack`` sets the default search budget ``|u| + budget_slack``;
    values beyond the budget come back as :data:`ABOVE_BUDGET`. Results are
    memoised; the system snapshot is immutable so the cache never goes stale.
    """

    def __init__(self, system: DescriptionSystem | None = None, budget_slack: int = DEFAULT_BUDGET_SLACK):
        self.system = system if system is not None else EMPTY_SYSTEM
        self.budget_slack = budget_slack
        self._cache: dict[tuple[str, str], str] = {}

    def witness(self, u: str, v: Condition = "") -> str:
        cond = as_condition(v)
        key = (u, cond)
        prog = self._cache.get(key)
        if prog is None:
            prog = shortest_program(self.system, u, cond)
            self._cache[key] = prog
        return prog

    def complexity(self, u: Condition, v: Condition = "", budget: int | None = None):
        u = as_condition(u)
        prog = self.witness(u, v)
        limit = len(u) + self.budget_slack if budget is None else budget
        return len(prog) if len(prog) <= limit else ABOVE_BUDGET

    C = complexity

    def info(self, x: Condition, y: Condition, z: Condition | None = None):
        """I(x:y) = C(y) - C(y|x), or I(x:y|z) = C(y|z) - C(y|[x,z])."""
        x, y = as_condition(x), as_condition(y)
        if z is None:
            return _sub(self.C(y), self.C(y, x))
        z = as_condition(z)
        return _sub(self.C(y, z), self.C(y, (x, z)))

    def joint_info(self, x: Condition, y: Condition, z: Condition | None = None):
        """J(x:y|z) = C(x|z) + C(y|z) - C([x,y]|z)."""
        x, y = as_condition(x), as_condition(y)
        zc = "" if z is None else as_condition(z)
        return _sub(_add(self.C(x, zc), self.C(y, zc)), self.C((x, y), zc))

    def extended(self, r: str, condition: Condition, output: str) -> "ComplexityOracle":
        return ComplexityOracle(self.system.extend(r, condition, output), self.budget_slack)


def complexity(oracle: ComplexityOracle, u: Condition, v: Condition = "", budget: int | None = None):
    return oracle.complexity(u, v, budget)


def extend_table(system: DescriptionSystem, r: str, condition: Condition, output: str) -> DescriptionSystem:
    return system.extend(r, condition, output)


def _add(a, b):
    if is_above(a) or is_above(b):
        return ABOVE_BUDGET
    return a + b


def _sub(a, b):
    if is_above(a) or is_above(b):
        return ABOVE_BUDGET
    return a - b


@dataclass
class Profile:
    """Joint complexities of every nonempty subset of the given strings.

    Keys are index tuples in the order produced by
    ``itertools.combinations`` (singletons first, the full tuple last); the
    joint string of a subset is the right-nested pairing of its members.
    """

    names: tuple[str, ...]
    strings: tuple[str, ...]
    values: dict[tuple[int, ...], object]

    def __getitem__(self, names: str | tuple[str, ...]):
        if isinstance(names, str):
            names = tuple(names.split(",")) if "," in names else (names,)
        idx = tuple(sorted(self.names.index(n) for n in names))
        return self.values[idx]

    def labelled(self) -> dict[str, object]:
        return {
            "C(" + ",".join(self.names[i] for i in key) + ")": value
            for key, value in self.values.items()
        }


def subsets(k: int) -> list[tuple[int, ...]]:
    return [c for size in range(1, k + 1) for c in itertools.combinations(range(k), size)]


def profile(oracle: ComplexityOracle, strings: Sequence[str], names: Sequence[str] | None = None) -> Profile:
    if not 2 <= len(strings) <= 4:
        raise ValueError("a profile takes 2 to 4 strings")
    names = tuple(names) if names else ("x", "y", "z", "w")[: len(strings)]
    values = {
        key: oracle.C(encode_tuple(*(strings[i] for i in key))) for key in subsets(len(strings))
    }
    return Profile(names, tuple(strings), values)


@dataclass
class DerivedQuantities:
    profile: Profile
    info: dict[str, object]


def derived_quantities(oracle: ComplexityOracle, strings: Sequence[str], names: Sequence[str] | None = None) -> DerivedQuantities:
    """Profile plus every I(a:b), I(a:b|c), J(a:b), J(a:b|c) over distinct names."""
    prof = profile(oracle, strings, names)
    named = dict(zip(prof.names, prof.strings))
    info: dict[str, object] = {}
    for a, b in itertools.permutations(prof.names, 2):
        info[f"I({a}:{b})"] = oracle.info(named[a], named[b])
        info[f"J({a}:{b})"] = oracle.joint_info(named[a], named[b])
        for c in prof.names:
            if c in (a, b):
                continue
            info[f"I({a}:{b}|{c})"] = oracle.info(named[a], named[b], named[c])
            info[f"J({a}:{b}|{c})"] = oracle.joint_info(named[a], named[b], named[c])
    return DerivedQuantities(prof, info)


def program_count_bound(level: int) -> int:
    """Number of programs of length <= level: 2^(level+1) - 1."""
    return 2 ** (level + 1) - 1


def c_model_default(n_max: int) -> float:
    """Default slack for finite-scale cut bounds: 2 log2(n) + 8."""
    return 2 * math.log2(max(n_max, 1)) + 8
