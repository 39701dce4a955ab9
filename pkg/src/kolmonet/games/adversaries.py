"""Event sources for the games.

Every adversary exposes ``next_event(game) -> Tighten | None``; ``None``
ends the stream. Random and greedy adversaries only emit events the bound
table accepts; the scripted one replays a file verbatim, so its bad events
are rejected by the game and logged.
"""
from __future__ import annotations

import random
from pathlib import Path

from ..bits import encode_pair
from .engine import Game, Tighten
from .params import GameSpec
from .transcript import event_records, read_transcript

DEFAULT_RANDOM_EVENTS = 2000
DEFAULT_GREEDY_EVENTS = 10 ** 4


def _label(index: int) -> str:
    """The index-th nonempty string in length-lex order."""
    return format(index + 2, "b")[1:]


def z_condition(game: Game, q: str, triple=None) -> str:
    x, y, _ = triple or game.candidate
    return encode_pair(q, y if game.theorem in ("GAP_CPQ_F", "GAP_PRIV_F") else x)


class RandomAdversary:
    """Seeded budget-respecting stream, biased toward the current candidate.

    ``policy`` is ``"biased"`` (mostly candidate-related events) or
    ``"uniform"`` (event kinds drawn evenly, including unrelated noise).
    """

    KINDS = ("low_label", "cond_y", "cond_z", "pair", "yz_given_x", "stale", "noise")

    def __init__(self, seed: int = 0, policy: str = "biased", max_events: int = DEFAULT_RANDOM_EVENTS,
                 pool_size: int = 8):
        if policy not in ("biased", "uniform"):
            raise ValueError("policy must be 'biased' or 'uniform'")
        self.rng = random.Random(f"adversary:{seed}")
        self.policy = policy
        self.max_events = max_events
        self.emitted = 0
        pick = lambda: "".join(self.rng.choice("01") for _ in range(self.rng.randint(1, 8)))
        self.p_pool = [pick() for _ in range(pool_size)]
        self.q_pool = [pick() for _ in range(pool_size)]
        self.history: list[tuple[str, str, str]] = []

    def _weights(self, game: Game) -> list[float]:
        if self.policy == "uniform":
            return [1.0] * len(self.KINDS)
        yz = 1.0 if game.theorem == "GAP_PRIV_F" else 0.0
        return [3.0, 4.0, 4.0, 3.0, yz, 0.5, 0.5]

    def _propose(self, game: Game, kind: str) -> Tighten:
        r = self.rng
        x, y, z = game.candidate
        eps = game.spec.epsilon
        if kind == "low_label":
            label = r.choice(self.p_pool + self.q_pool)
            return Tighten(label, "", r.randint(game.p_level - 2, game.q_level + 1))
        if kind == "cond_y":
            return Tighten(y, encode_pair(r.choice(self.p_pool), x), r.randint(0, eps))
        if kind == "cond_z":
            return Tighten(z, z_condition(game, r.choice(self.q_pool)), r.randint(0, eps))
        if kind == "pair":
            pair = encode_pair(r.choice(self.p_pool), r.choice(self.q_pool))
            return Tighten(pair, "", r.randint(game.pair_level - 1, game.pair_level + 1))
        if kind == "yz_given_x":
            s = game.spec
            return Tighten(encode_pair(y, z), x, r.randint(max(0, s.k - s.l - 2), s.k - s.l + 1))
        if kind == "stale" and self.history:
            ox, oy, _ = r.choice(self.history)
            return Tighten(oy, encode_pair(r.choice(self.p_pool), ox), r.randint(0, eps))
        u = "".join(r.choice("01") for _ in range(r.randint(0, 12)))
        v = "".join(r.choice("01") for _ in range(r.randint(0, 12)))
        return Tighten(u, v, r.randint(0, 20))

    def next_event(self, game: Game) -> Tighten | None:
        if self.emitted >= self.max_events:
            return None
        if not self.history or self.history[-1] != game.candidate:
            self.history.append(game.candidate)
        weights = self._weights(game)
        for _ in range(32):
            kind = self.rng.choices(self.KINDS, weights)[0]
            event = self._propose(game, kind)
            if game.table.check(event.u, event.v, event.bound) is None:
                self.emitted += 1
                return event
        # fall back to a long fresh label, which is always within budget
        u = "1" + format(self.emitted, "b") + "0" * 24
        self.emitted += 1
        return Tighten(u, "", 40 + len(u))


class GreedyAdversary:
    """Always plays toward the break needing the fewest further events.

    Plans are recomputed after each event, so the stream adapts to the
    constructor's reselections. The stream ends when no plan fits the
    budget or after ``max_events``. Break kinds named in ``skip``
    (``yz_given_x``, ``new_program``, ``suitable_pair``, ``program_pair``)
    are never planned.
    """

    def __init__(self, max_events: int = DEFAULT_GREEDY_EVENTS, width: int = 6, skip: tuple[str, ...] = ()):
        self.max_events = max_events
        self.skip = frozenset(skip)
        self.width = width
        self.emitted = 0
        self.fresh = 0
        self.low: list[str] = []
        self._cursor = 0
        self.turn = 0

    def _fresh_label(self, game: Game) -> str:
        while True:
            label = _label(self.fresh)
            if game.table.get(label) == float("inf"):
                return label
            self.fresh += 1

    def _allowed(self, game: Game, events: list[Tighten]) -> bool:
        return all(game.table.check(e.u, e.v, e.bound) is None for e in events)

    def _pair_plan(self, game: Game, p: str, q: str, need_programs: bool, need_pair: bool) -> list[Tighten]:
        x, y, z = game.candidate
        t = game.table
        plan = []
        if t.get(p) > game.p_level:
            plan.append(Tighten(p, "", game.p_level))
        if t.get(q) > game.q_level:
            plan.append(Tighten(q, "", game.q_level))
        if need_programs:
            if t.get(y, encode_pair(p, x)) > game.cond_level:
                plan.append(Tighten(y, encode_pair(p, x), game.cond_level))
            zc = z_condition(game, q)
            if t.get(z, zc) > game.cond_level:
                plan.append(Tighten(z, zc, game.cond_level))
        if need_pair and t.get(encode_pair(p, q)) > game.pair_level:
            plan.append(Tighten(encode_pair(p, q), "", game.pair_level))
        return plan

    def _plans(self, game: Game):
        x, y, z = game.candidate
        s = game.spec
        if game.theorem == "GAP_PRIV_F":
            yield "yz_given_x", [Tighten(encode_pair(y, z), x, s.k - s.l - 1)]
        py, qz = game.programs_y(x, y), game.programs_z(x, y, z)
        low = [lab for lab in self.low if game.table.get(lab) <= min(game.p_level, game.q_level)]
        self.low = low
        fresh = self._fresh_label(game)
        ps = (py + [lab for lab in low if lab not in py])[: self.width] + [fresh]
        qs = (qz + [lab for lab in low if lab not in qz])[: self.width] + [fresh]
        if game.theorem in ("GAP_PRIV_E", "GAP_PRIV_F"):
            # a new program next to an existing one leaves a pair unsimplified
            if qz:
                for p in ps:
                    if p not in py:
                        yield "new_program", self._pair_plan(game, p, qz[0], True, False)
            if py:
                for q in qs:
                    if q not in qz:
                        yield "new_program", self._pair_plan(game, py[0], q, True, False)
        if game.theorem == "GAP_CPQ_E" and len(low) >= 2:
            n = len(low)
            for step in range(n * n):
                idx = (self._cursor + step) % (n * n)
                p, q = low[idx // n], low[idx % n]
                if game.table.get(encode_pair(p, q)) > game.pair_level:
                    self._cursor = idx
                    yield "suitable_pair", self._pair_plan(game, p, q, False, True)
                    break
        for p in ps:
            for q in qs:
                yield "program_pair", self._pair_plan(game, p, q, True, True)

    def next_event(self, game: Game) -> Tighten | None:
        if self.emitted >= self.max_events:
            return None
        best: dict[str, list[Tighten]] = {}
        for category, plan in self._plans(game):
            if not plan or category in self.skip or (category in best and len(best[category]) <= len(plan)):
                continue
            if self._allowed(game, plan):
                best[category] = plan
        if not best:
            return None
        cheapest = min(len(p) for p in best.values())
        # rotate among equally cheap kinds of break
        ties = [c for c in sorted(best) if len(best[c]) == cheapest]
        event = best[ties[self.turn % len(ties)]][0]
        self.turn += 1
        if event.v == "" and event.bound in (game.p_level, game.q_level) and event.u not in self.low:
            self.low.append(event.u)
            self.fresh += 1
        self.emitted += 1
        return event


class ScriptedAdversary:
    """Replays events from a transcript-format file or record list."""

    def __init__(self, source):
        if isinstance(source, (str, Path)):
            source = read_transcript(source)
        self.events = [Tighten(**rec) for rec in event_records(source)]
        self.position = 0

    def next_event(self, game: Game) -> Tighten | None:
        if self.position >= len(self.events):
            return None
        event = self.events[self.position]
        self.position += 1
        return event


def random_adversary(seed: int = 0, policy: str = "biased", max_events: int = DEFAULT_RANDOM_EVENTS) -> RandomAdversary:
    return RandomAdversary(seed, policy, max_events)


def greedy_adversary(max_events: int = DEFAULT_GREEDY_EVENTS, skip: tuple[str, ...] = ()) -> GreedyAdversary:
    return GreedyAdversary(max_events, skip=skip)


def scripted_adversary(source) -> ScriptedAdversary:
    return ScriptedAdversary(source)


def _break_initial(spec: GameSpec) -> list[dict]:
    """Events that break the invariant of the lex-first candidate."""
    x, y, z = "0" * spec.n, "0" * spec.m, "0" * spec.k
    e = spec.epsilon
    p, q = "1", "10"
    zc = encode_pair(q, y if spec.theorem in ("GAP_CPQ_F", "GAP_PRIV_F") else x)
    events = [
        {"u": p, "v": "", "bound": spec.m + e - 1},
        {"u": q, "v": "", "bound": spec.k + e - 1},
        {"u": y, "v": encode_pair(p, x), "bound": e - 1},
        {"u": z, "v": zc, "bound": e - 1},
        {"u": encode_pair(p, q), "v": "", "bound": spec.j + e - 1},
    ]
    if spec.theorem == "GAP_PRIV_F":
        events.append({"u": encode_pair(y, z), "v": x, "bound": spec.k - spec.l - 1})
    return events


def corner_case_scripts(spec: GameSpec) -> dict[str, list[dict]]:
    """Three scripted edge cases: a monotonicity violation, a budget
    overflow and unrelated noise, each followed by a real break."""
    brk = _break_initial(spec)
    level = 1
    overflow = [{"u": _label(i + 100), "v": "111", "bound": level} for i in range(2 ** (level + 1))]
    noise = [{"u": _label(i + 500), "v": _label(i + 900), "bound": 3} for i in range(20)]
    return {
        "monotonicity": [brk[0], {**brk[0], "bound": brk[0]["bound"] + 1}] + brk[1:],
        "budget": overflow + brk,
        "unrelated": noise + brk,
    }
