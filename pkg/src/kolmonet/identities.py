"""Shannon-level identity and certificate checking.

Every expression is reduced to its vector of joint-entropy coordinates
``H(S)`` (one per nonempty variable subset) with exact rational
coefficients. Two expressions are identical iff their vectors agree; a
nonnegativity claim is certified by writing the target as a nonnegative
combination of conditional entropies and conditional mutual informations.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

MAX_VARIABLES = 5

class ExpressionSyntaxError(ValueError):
    pass


class CertificateError(ValueError):
    pass


class IdentityCheckFailed(AssertionError):
    """A bundled check failed; ``item`` names it."""

    def __init__(self, item: str, report: "BundleReport | None" = None):
        super().__init__(f"check failed: {item}")
        self.item = item
        self.report = report


def _subset(names: Iterable[str]) -> frozenset:
    return frozenset(n for n in names if n)


class Expr:
    """A linear combination of joint entropies, kept in canonical form."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[frozenset, Fraction] | None = None):
        self.coeffs = {
            s: Fraction(c) for s, c in (coeffs or {}).items() if s and Fraction(c) != 0
        }

    @classmethod
    def joint(cls, names: Iterable[str]) -> "Expr":
        s = _subset(names)
        return cls({s: Fraction(1)} if s else {})

    @property
    def variables(self) -> frozenset:
        return frozenset().union(*self.coeffs) if self.coeffs else frozenset()

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "Expr") -> "Expr":
        out = dict(self.coeffs)
        for s, c in other.coeffs.items():
            out[s] = out.get(s, 0) + c
        return Expr(out)

    def __neg__(self) -> "Expr":
        return Expr({s: -c for s, c in self.coeffs.items()})

    def __sub__(self, other: "Expr") -> "Expr":
        return self + (-other)

    def __mul__(self, k) -> "Expr":
        k = Fraction(k)
        return Expr({s: k * c for s, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, Expr) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def vector(self, variables: Sequence[str]) -> list[Fraction]:
        """Coefficients on H(S) for every nonempty S, ordered by bitmask."""
        index = {v: i for i, v in enumerate(variables)}
        vec = [Fraction(0)] * (2 ** len(variables) - 1)
        for s, c in self.coeffs.items():
            mask = sum(1 << index[v] for v in s)
            vec[mask - 1] += c
        return vec

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for s, c in sorted(self.coeffs.items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))):
            parts.append(f"{c:+}*H({','.join(sorted(s))})")
        return " ".join(parts)


def H(s: Iterable[str], given: Iterable[str] = ()) -> Expr:
    """Conditional entropy H(S|T) = H(S u T) - H(T); also used for C(S|T)."""
    s, t = _subset(s), _subset(given)
    return Expr.joint(s | t) - Expr.joint(t)


C = H


def I(a: Iterable[str], b: Iterable[str], given: Iterable[str] = ()) -> Expr:
    a, b, t = _subset(a), _subset(b), _subset(given)
    return Expr.joint(a | t) + Expr.joint(b | t) - Expr.joint(a | b | t) - Expr.joint(t)


def J(a: Iterable[str], b: Iterable[str], given: Iterable[str] = ()) -> Expr:
    """J(a:b|t) = C(a|t) + C(b|t) - C(a,b|t)."""
    a, b, t = _subset(a), _subset(b), _subset(given)
    return H(a, t) + H(b, t) - H(a | b, t)


_ATOM = re.compile(r"\s*([HCIJ])\(([^()]*)\)")
_COEFF = re.compile(r"\s*(\d+(?:/\d+)?)\s*\*?")


@dataclass(frozen=True)
class Atom:
    """An elementary quantity: H(left|given) or I(left;right|given)."""

    kind: str  # "H" or "I"
    left: frozenset
    right: frozenset
    given: frozenset

    def expr(self) -> Expr:
        if self.kind == "H":
            return H(self.left, self.given)
        return I(self.left, self.right, self.given)

    @property
    def variables(self) -> frozenset:
        return self.left | self.right | self.given


Term = tuple[Fraction, Atom]


def _names(text: str) -> list[str]:
    names = [n.strip() for n in text.split(",")]
    if any(not re.fullmatch(r"[A-Za-z][A-Za-z0-9_']*", n) for n in names):
        raise ExpressionSyntaxError(f"bad variable list: {text!r}")
    return names


def parse_atom(kind: str, body: str) -> list[Term]:
    """Atoms for one ``K(...)`` occurrence; J expands to its three entropies."""
    main, _, given = body.partition("|")
    t = _subset(_names(given)) if given.strip() else frozenset()
    split = re.split(r"[:;]", main, maxsplit=1)
    if len(split) == 1:
        if kind in "IJ":
            raise ExpressionSyntaxError(f"{kind}(...) needs two sides separated by ':' or ';'")
        return [(Fraction(1), Atom("H", _subset(_names(main)), frozenset(), t))]
    a, b = (_subset(_names(side)) for side in split)
    if kind == "J":
        return [
            (Fraction(1), Atom("H", a, frozenset(), t)),
            (Fraction(1), Atom("H", b, frozenset(), t)),
            (Fraction(-1), Atom("H", a | b, frozenset(), t)),
        ]
    # C(a:b|t) is the mutual-information shorthand used in chain rules
    return [(Fraction(1), Atom("I", a, b, t))]


def parse_terms(text: str) -> list[Term]:
    """Parse e.g. ``"I(P:A,B) + C(B|P,A) - 2*C(B|A)"`` into signed atoms."""
    pos, sign = 0, 1
    terms: list[Term] = []
    text = text.strip()
    if text == "0":
        return terms
    expect_term = True
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        if not expect_term:
            if text[pos] not in "+-":
                raise ExpressionSyntaxError(f"expected '+' or '-' at {pos} in {text!r}")
            sign = 1 if text[pos] == "+" else -1
            pos += 1
            expect_term = True
            continue
        if text[pos] in "+-":
            sign *= 1 if text[pos] == "+" else -1
            pos += 1
            continue
        coeff = Fraction(1)
        m = _COEFF.match(text, pos)
        if m and m.group(1):
            coeff = Fraction(m.group(1))
            pos = m.end()
        m = _ATOM.match(text, pos)
        if not m:
            raise ExpressionSyntaxError(f"expected a term at {pos} in {text!r}")
        terms.extend((sign * coeff * c, atom) for c, atom in parse_atom(m.group(1), m.group(2)))
        pos, sign, expect_term = m.end(), 1, False
    if expect_term and text:
        raise ExpressionSyntaxError(f"dangling operator in {text!r}")
    return terms


def terms_expr(terms: Iterable[Term]) -> Expr:
    total = Expr()
    for c, atom in terms:
        total = total + atom.expr() * c
    return total


def parse_expr(text: str) -> Expr:
    return terms_expr(parse_terms(text))


def as_expr(e: Expr | str) -> Expr:
    return e if isinstance(e, Expr) else parse_expr(e)


def check_identity(lhs: Expr | str, rhs: Expr | str) -> bool:
    return (as_expr(lhs) - as_expr(rhs)).is_zero()


@dataclass(frozen=True)
class CertificateTerm:
    coeff: Fraction
    kind: str  # "C" or "I"
    text: str
    atom: Atom

    @property
    def expr(self) -> Expr:
        return self.atom.expr()


@dataclass
class Certificate:
    terms: list[CertificateTerm] = field(default_factory=list)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[object, str]]) -> "Certificate":
        terms = [_make_term(Fraction(c), t) for c, t in pairs]
        return cls(terms)

    @classmethod
    def parse(cls, text: str) -> "Certificate":
        pairs = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                coeff, term = line.split("\t")
            except ValueError:
                raise CertificateError(f"line {lineno}: expected 'coeff<TAB>term'") from None
            pairs.append((Fraction(coeff.strip()), term.strip()))
        return cls.from_pairs(pairs)

    @classmethod
    def load(cls, path) -> "Certificate":
        return cls.parse(Path(path).read_text(encoding="utf-8"))

    def dumps(self) -> str:
        return "".join(f"{t.coeff}\t{t.text}\n" for t in self.terms)

    def total(self) -> Expr:
        return terms_expr(self.as_terms())

    def as_terms(self) -> list[Term]:
        return [(t.coeff, t.atom) for t in self.terms]


def _make_term(coeff: Fraction, text: str) -> CertificateTerm:
    if coeff < 0:
        raise CertificateError(f"negative coefficient {coeff} on {text}")
    m = _ATOM.fullmatch(text.strip())
    if not m:
        raise CertificateError(f"not an elementary term: {text!r}")
    if m.group(1) == "J":
        raise CertificateError("J terms are not elementary; use I")
    ((_, atom),) = parse_atom(m.group(1), m.group(2))
    return CertificateTerm(coeff, "C" if atom.kind == "H" else "I", text.strip(), atom)


def check_certificate(target: Expr | str, cert: Certificate) -> bool:
    """True iff ``target`` equals the certificate's nonnegative combination."""
    if any(t.coeff < 0 for t in cert.terms):
        raise CertificateError("certificate has a negative coefficient")
    return (as_expr(target) - cert.total()).is_zero()


# ---------------------------------------------------------------- numerics
#
# The numeric path evaluates each parsed atom straight from the distribution
# (conditional entropy as -sum p log p(a|t), mutual information in KL form)
# and never touches the canonical vectors, so it cross-checks the algebra.

@dataclass
class NumericResult:
    max_abs: float
    min_value: float
    trials: int


def _random_distributions(rng: np.random.Generator, trials: int, k: int, alphabet: int) -> np.ndarray:
    cells = alphabet ** k
    alphas = rng.choice([0.05, 0.3, 1.0, 3.0], size=trials)
    raw = rng.gamma(alphas[:, None], size=(trials, cells))
    # a third of the draws get a random support mask to reach the boundary
    mask = rng.random((trials, cells)) < 0.5
    sparse = rng.random(trials) < 1 / 3
    raw = np.where(sparse[:, None] & mask, 0.0, raw)
    raw[raw.sum(axis=1) == 0, 0] = 1.0
    return (raw / raw.sum(axis=1, keepdims=True)).reshape((trials,) + (alphabet,) * k)


class _Joint:
    """Batched joint distributions with keepdims marginals."""

    def __init__(self, p: np.ndarray, variables: Sequence[str]):
        self.p = p
        self.axis = {v: 1 + i for i, v in enumerate(variables)}
        self._cache: dict[frozenset, np.ndarray] = {}

    def marginal(self, keep: frozenset) -> np.ndarray:
        if keep not in self._cache:
            drop = tuple(ax for v, ax in self.axis.items() if v not in keep)
            self._cache[keep] = self.p.sum(axis=drop, keepdims=True) if drop else self.p
        return self._cache[keep]

    def _sum(self, weights: np.ndarray, ratio: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(weights > 0, weights * np.log2(np.where(weights > 0, ratio, 1.0)), 0.0)
        return terms.reshape(terms.shape[0], -1).sum(axis=1)

    def conditional_entropy(self, a: frozenset, t: frozenset) -> np.ndarray:
        p_at = self.marginal(a | t)
        p_t = self.marginal(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p_at / p_t
        return -self._sum(np.broadcast_to(p_at, p_at.shape), ratio)

    def mutual_information(self, a: frozenset, b: frozenset, t: frozenset) -> np.ndarray:
        if a & b or a & t or b & t:
            # overlapping sides: fall back to the entropy form
            return (self.conditional_entropy(a, t) + self.conditional_entropy(b, t)
                    - self.conditional_entropy(a | b, t))
        p_abt = self.marginal(a | b | t)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p_abt * self.marginal(t) / (self.marginal(a | t) * self.marginal(b | t))
        return self._sum(p_abt, ratio)

    def atom(self, atom: Atom) -> np.ndarray:
        if atom.kind == "H":
            return self.conditional_entropy(atom.left, atom.given)
        return self.mutual_information(atom.left, atom.right, atom.given)


def _as_terms(expr) -> list[Term]:
    if isinstance(expr, str):
        return parse_terms(expr)
    if isinstance(expr, Expr):
        return [(c, Atom("H", s, frozenset(), frozenset())) for s, c in expr.coeffs.items()]
    return list(expr)


def numeric_check(expr, trials: int = 1000, alphabet_size: int = 2, seed: int = 0,
                  variables: Sequence[str] | None = None) -> NumericResult:
    """Evaluate an expression on random joint distributions.

    ``expr`` is expression text, a list of ``(coeff, Atom)`` terms, or an
    :class:`Expr`. For an identity pass ``lhs - rhs`` and read ``max_abs``;
    for a nonnegativity claim read ``min_value``.
    """
    terms = _as_terms(expr)
    found = frozenset().union(*(atom.variables for _, atom in terms)) if terms else frozenset()
    variables = sorted(set(variables or ()) | found)
    if len(variables) > MAX_VARIABLES or alphabet_size > 4:
        raise ValueError("numeric_check supports at most 5 variables over an alphabet of 4")
    if not terms:
        return NumericResult(0.0, 0.0, trials)
    rng = np.random.default_rng(seed)
    joint = _Joint(_random_distributions(rng, trials, len(variables), alphabet_size), variables)
    values = np.zeros(trials)
    for c, atom in terms:
        values = values + float(c) * joint.atom(atom)
    return NumericResult(float(np.abs(values).max()), float(values.min()), trials)


def product_distribution_info(trials: int = 200, alphabet_size: int = 3, seed: int = 0) -> float:
    """max |I(x:y)| over random product distributions."""
    rng = np.random.default_rng(seed)
    px = rng.dirichlet(np.ones(alphabet_size), size=trials)
    py = rng.dirichlet(np.ones(alphabet_size), size=trials)
    joint = _Joint(px[:, :, None] * py[:, None, :], ["x", "y"])
    return float(np.abs(joint.mutual_information(frozenset("x"), frozenset("y"), frozenset())).max())


# ----------------------------------------------------------------- bundle

@dataclass(frozen=True)
class BundleItem:
    name: str
    kind: str  # "identity" or "certificate"
    lhs: str
    rhs: str = ""
    certificate: str = ""  # resource file name under data/certificates


BUNDLE: tuple[BundleItem, ...] = (
    BundleItem("chain rule", "identity", "C(x,y)", "C(x) + C(y|x)"),
    BundleItem("relative chain rule", "identity", "C(x,y|z)", "C(x|z) + C(y|x,z)"),
    BundleItem("chain rule for information", "identity", "I(x,y:u|z)", "I(x:u|z) + I(y:u|x,z)"),
    BundleItem("commutativity I(x:y)=I(y:x)", "identity", "I(x:y)", "I(y:x)"),
    BundleItem("commutativity I(x:y)=J(x:y)", "identity", "I(x:y)", "J(x:y)"),
    BundleItem("cut lemma: left side", "identity", "C(B|A) - C(B|P,A)", "I(P:B|A)"),
    BundleItem("cut lemma: right side", "identity", "I(P:A,B)", "I(P:A) + I(P:B|A)"),
    BundleItem("cut lemma", "certificate", "I(P:A,B) + C(B|P,A) - C(B|A)", certificate="cut_lemma.cert"),
    BundleItem("private-disclosure lemma", "certificate", "I(q:x,y) + C(z|q,y) - I(z:x|y)",
               certificate="disclosure_lemma.cert"),
    BundleItem("private-disclosure lemma: exact difference", "identity",
               "I(q:x,y) + C(z|q,y) - I(z:x|y)", "I(q:y) + C(z|q,y,x) + I(q:x|y,z)"),
    BundleItem("private-disclosure lemma: proof step", "identity",
               "I(q:x|y) + I(z:x|q,y)", "I(z:x|y) + I(q:x|y,z)"),
    BundleItem("proof step: left side is I(q,z:x|y)", "identity", "I(q:x|y) + I(z:x|q,y)", "I(q,z:x|y)"),
    BundleItem("proof step: right side is I(q,z:x|y)", "identity", "I(z:x|y) + I(q:x|y,z)", "I(q,z:x|y)"),
    BundleItem("minimal program carries no condition information", "certificate",
               "C(q) - I(y:q) + C(z|q,y) - C(z|y)", certificate="program_information.cert"),
    BundleItem("network (f): chain split of I(q:x,y)", "identity", "I(q:x,y)", "I(q:x) + I(q:y|x)"),
    BundleItem("network (f): I(q:y|x) <= C(y|x)", "certificate", "C(y|x) - I(q:y|x)",
               certificate="conditional_information.cert"),
    BundleItem("network (f): private-disclosure rewriting", "identity",
               "C(z|y) - C(y,z|x)", "I(z:x|y) - C(y|x)"),
)


@dataclass
class ItemResult:
    name: str
    kind: str
    status: str  # "pass", "fail" or "skip"
    variables: tuple[str, ...]
    residual: float | None = None
    min_value: float | None = None
    note: str = ""


@dataclass
class BundleReport:
    items: list[ItemResult]

    @property
    def passed(self) -> bool:
        return all(i.status != "fail" for i in self.items)

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "items": [
                {
                    "name": i.name, "kind": i.kind, "status": i.status,
                    "variables": list(i.variables), "numeric_max_residual": i.residual,
                    "numeric_min_value": i.min_value, "note": i.note,
                }
                for i in self.items
            ],
        }


def load_bundled_certificate(name: str) -> Certificate:
    text = resources.files("kolmonet").joinpath("data").joinpath("certificates").joinpath(name).read_text(encoding="utf-8")
    return Certificate.parse(text)


def bundled_checks(max_variables: int = MAX_VARIABLES, trials: int = 1000, seed: int = 0,
                         alphabet_size: int = 2,
                         certificates: Mapping[str, Certificate] | None = None) -> BundleReport:
    """Run every bundled identity and certificate, symbolically and numerically.

    Items over more than ``max_variables`` variables are skipped. The first
    failing item raises :class:`IdentityCheckFailed` carrying the partial
    report. ``certificates`` overrides bundled certificate files by name.
    """
    overrides = dict(certificates or {})
    results: list[ItemResult] = []
    for item in BUNDLE:
        terms = parse_terms(item.lhs) + [(-c, a) for c, a in (parse_terms(item.rhs) if item.rhs else [])]
        target = terms_expr(terms)
        variables = tuple(sorted(frozenset().union(*(a.variables for _, a in terms))))
        if len(variables) > max_variables:
            results.append(ItemResult(item.name, item.kind, "skip", variables,
                                      note=f"needs {len(variables)} variables, limit {max_variables}"))
            continue
        if item.kind == "identity":
            ok = target.is_zero()
            num = numeric_check(terms, trials, alphabet_size, seed)
            result = ItemResult(item.name, item.kind, "pass" if ok else "fail", variables, num.max_abs, num.min_value)
        else:
            cert = overrides.get(item.certificate) or load_bundled_certificate(item.certificate)
            try:
                ok = check_certificate(target, cert)
            except CertificateError as exc:
                ok, note = False, str(exc)
            else:
                note = ""
            residual = numeric_check(terms + [(-c, a) for c, a in cert.as_terms()], trials, alphabet_size, seed)
            value = numeric_check(terms, trials, alphabet_size, seed)
            result = ItemResult(item.name, item.kind, "pass" if ok else "fail", variables,
                                residual.max_abs, value.min_value, note)
        results.append(result)
        if result.status == "fail":
            raise IdentityCheckFailed(item.name, BundleReport(results))
    return BundleReport(results)
