"""Game parameters: default formulas, inequality checks and break-count bounds."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

THEOREMS = ("GAP_CPQ_E", "GAP_PRIV_E", "GAP_CPQ_F", "GAP_PRIV_F")


@dataclass(frozen=True)
class Inequality:
    name: str
    lhs: int
    rhs: int

    @property
    def ok(self) -> bool:
        return self.lhs <= self.rhs

    def as_dict(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "ok": self.ok}


@dataclass(frozen=True)
class GameSpec:
    theorem: str
    epsilon: int
    n: int
    m: int
    k: int
    j: int
    l: int = 0
    horizon: int | None = None

    def __post_init__(self):
        if self.theorem not in THEOREMS:
            raise ValueError(f"unknown theorem {self.theorem!r}; expected one of {THEOREMS}")
        if self.epsilon < 1:
            raise ValueError("epsilon must be >= 1")
        if self.l < 0:
            raise ValueError("l must be >= 0")
        if self.l and self.theorem != "GAP_PRIV_F":
            raise ValueError("l is only used by GAP_PRIV_F")
        if min(self.n, self.m, self.k, self.j) < 1:
            raise ValueError("lengths and threshold must be positive")

    @property
    def effective_horizon(self) -> int:
        return self.horizon if self.horizon is not None else 4 * total_break_bound(self)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["horizon"] = self.horizon
        return d


def default_spec(theorem: str, epsilon: int, l: int = 0, horizon: int | None = None) -> GameSpec:
    """Parameters from the construction's closed-form choice."""
    e = epsilon
    if theorem == "GAP_CPQ_E":
        n, m, j = 8 * e + 2, 5 * e + 1, 7 * e + 2
        return GameSpec(theorem, e, n, m, m, j, 0, horizon)
    if theorem == "GAP_PRIV_E":
        n, m, j = 5 * e + 8, 9 * e + 10, 15 * e + 18
        return GameSpec(theorem, e, n, m, m, j, 0, horizon)
    if theorem == "GAP_CPQ_F":
        n = 5 * e + 6
        return GameSpec(theorem, e, n, n, n, 7 * e + 10, 0, horizon)
    if theorem == "GAP_PRIV_F":
        n = 9 * e + l + 16
        return GameSpec(theorem, e, n, 7 * e + 15, n, 13 * e + l + 28, l, horizon)
    raise ValueError(f"unknown theorem {theorem!r}")


def spec_from_params(theorem: str, epsilon: int, params: tuple[int, ...], l: int = 0,
                     horizon: int | None = None) -> GameSpec:
    """Accept ``n,m,j`` for the network-(e) games or ``n,m,k,j`` for any."""
    if len(params) == 3:
        if theorem not in ("GAP_CPQ_E", "GAP_PRIV_E"):
            raise ValueError(f"{theorem} needs n,m,k,j")
        n, m, j = params
        return GameSpec(theorem, epsilon, n, m, m, j, l, horizon)
    if len(params) == 4:
        n, m, k, j = params
        return GameSpec(theorem, epsilon, n, m, k, j, l, horizon)
    raise ValueError("params must be n,m,j or n,m,k,j")


def inequalities(spec: GameSpec) -> list[Inequality]:
    """The displayed inequalities of each construction, as exponents or sizes."""
    e, n, m, k, j, l = spec.epsilon, spec.n, spec.m, spec.k, spec.j, spec.l
    t = spec.theorem
    if t == "GAP_CPQ_E":
        return [
            Inequality("j+3e <= 2m", j + 3 * e, 2 * m),
            Inequality("max{j,m}+e <= n", max(j, m) + e, n),
            Inequality("m+2e+1 <= j", m + 2 * e + 1, j),
        ]
    if t == "GAP_PRIV_E":
        return [
            Inequality("(2^(j+e)+2^(n+m+2e))*2^(4e+4) <= 2^(n+j-3)",
                       (2 ** (j + e) + 2 ** (n + m + 2 * e)) * 2 ** (4 * e + 4), 2 ** (n + j - 3)),
            Inequality("j+3e <= 2m-2", j + 3 * e, 2 * m - 2),
            Inequality("2^(2e+2)*2^(2e+2) <= 2^(j-1)", 2 ** (4 * e + 4), 2 ** (j - 1)),
        ]
    if t == "GAP_CPQ_F":
        return [
            Inequality("2^(j+e)+2^(n+m+2e)+2^(m+k+2e) <= 2^(min{n,m}+j-2)",
                       2 ** (j + e) + 2 ** (n + m + 2 * e) + 2 ** (m + k + 2 * e), 2 ** (min(n, m) + j - 2)),
            Inequality("j+3e <= m+k-2", j + 3 * e, m + k - 2),
        ]
    return [
        Inequality("max{n+k-l,j+e,n+m+2e,m+k+2e+1} <= n+j-l-4e-12",
                   max(n + k - l, j + e, n + m + 2 * e, m + k + 2 * e + 1), n + j - l - 4 * e - 12),
        Inequality("max{k-l,j+3e} <= m+k-3", max(k - l, j + 3 * e), m + k - 3),
        Inequality("4e+6 <= j-l-1", 4 * e + 6, j - l - 1),
    ]


@dataclass
class Validation:
    ok: bool
    table: list[Inequality] = field(default_factory=list)

    @property
    def violated(self) -> list[str]:
        return [f"{i.name} ({i.lhs} > {i.rhs})" for i in self.table if not i.ok]


def validate_params(spec: GameSpec) -> Validation:
    table = inequalities(spec)
    return Validation(all(i.ok for i in table), table)


def break_bounds(spec: GameSpec) -> dict[str, int]:
    """Strict upper bounds on how often each kind of break can occur."""
    e, n, m, k, j, l = spec.epsilon, spec.n, spec.m, spec.k, spec.j, spec.l
    t = spec.theorem
    if t == "GAP_CPQ_E":
        return {
            "suitable_pair": 2 ** (max(j, m) + e),
            "program_condition_per_x": 2 ** (m + e) * 2 ** e + 2 ** (m + e) * 2 ** e,
        }
    if t == "GAP_PRIV_E":
        return {"pair_complexity": 2 ** (j + e), "new_program": 2 ** (n + m + 2 * e)}
    if t == "GAP_CPQ_F":
        return {"pair_complexity": 2 ** (j + e), "new_program": 2 ** (n + m + 2 * e) + 2 ** (m + k + 2 * e)}
    return {
        "yz_given_x": 2 ** (n + k - l),
        "pair_complexity": 2 ** (j + e),
        "new_program": 2 ** (max(m, k) + e) + 2 ** (n + m + 2 * e) + 2 ** (m + k + 2 * e),
    }


def total_break_bound(spec: GameSpec) -> int:
    b = break_bounds(spec)
    if spec.theorem == "GAP_CPQ_E":
        # every x is used at most once; reselections are bounded per x
        return b["suitable_pair"] * (1 + b["program_condition_per_x"])
    return sum(b.values())


def program_threshold(spec: GameSpec) -> int:
    """Selection requires fewer than this many programs for y (and for z)."""
    return 2 ** (2 * spec.epsilon + (3 if spec.theorem == "GAP_PRIV_F" else 2))


def simplification_cap(spec: GameSpec) -> int:
    """Selection requires fewer than this many earlier simplifications per condition."""
    if spec.theorem == "GAP_PRIV_E":
        return 2 ** (spec.j - 1)
    if spec.theorem == "GAP_CPQ_F":
        return 2 ** spec.j
    if spec.theorem == "GAP_PRIV_F":
        return 2 ** (spec.j - spec.l - 1)
    return 2 ** spec.j


def total_simplification_cap(spec: GameSpec) -> int:
    """The selection lemma assumes fewer total simplifications than this."""
    if spec.theorem == "GAP_PRIV_E":
        return 2 ** (spec.n + spec.j - 3)
    if spec.theorem == "GAP_CPQ_F":
        return 2 ** (min(spec.n, spec.m) + spec.j - 2)
    if spec.theorem == "GAP_PRIV_F":
        return 2 ** (spec.n + spec.j - spec.l - 4)
    return 2 ** (spec.n + spec.j)


def key_length(spec: GameSpec) -> int:
    return spec.j - spec.l if spec.theorem == "GAP_PRIV_F" else spec.j
