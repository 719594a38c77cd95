"""Sparse multivariate polynomial arithmetic over a named, role-tagged variable space.

Everything downstream (problem assembly, Macaulay matrices, elimination,
recovery) is built on the three types here: :class:`VariableSpace`,
monomials (plain exponent tuples), and :class:`Polynomial`.  Variable
spaces and polynomials are immutable after construction, so they can be
shared freely between concurrent tasks.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

#: A monomial is an exponent tuple, one nonnegative entry per variable of
#: the owning space.  The empty product (all zeros) is the constant 1.
Monomial = tuple[int, ...]

ROLE_DECISION = "decision"
ROLE_WEIGHT = "weight"
ROLE_MULTIPLIER = "multiplier"
ROLE_OBJECTIVE = "objective"

_ROLE_RANK = {
    ROLE_DECISION: 0,
    ROLE_WEIGHT: 1,
    ROLE_MULTIPLIER: 2,
    ROLE_OBJECTIVE: 3,
}

# Relative magnitude below which a coefficient is treated as arithmetic noise
# and dropped after add/multiply.  Keeps products of long-chain operations from
# accumulating dust terms.
PRUNE_REL = 1e-14


@dataclass(frozen=True)
class VariableSpace:
    """Ordered, role-tagged variable set.

    The order is fixed at creation and defines the monomial order used by
    every matrix downstream.  Variables must be grouped by role in the order
    decision, weight, multiplier, objective, which keeps the kept-monomial
    column selector contiguous per degree block.
    """

    names: tuple[str, ...]
    roles: tuple[str, ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        if len(self.names) != len(self.roles):
            raise ValueError("names and roles must have equal length")
        if len(set(self.names)) != len(self.names):
            raise ValueError("variable names must be unique")
        ranks = []
        for role in self.roles:
            if role not in _ROLE_RANK:
                raise ValueError(f"unknown variable role {role!r}")
            ranks.append(_ROLE_RANK[role])
        if any(a > b for a, b in zip(ranks, ranks[1:])):
            raise ValueError(
                "variables must be ordered decision, weight, multiplier, objective"
            )
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.names)})

    @classmethod
    def from_groups(
        cls,
        decision: Sequence[str] = (),
        weight: Sequence[str] = (),
        multiplier: Sequence[str] = (),
        objective: Sequence[str] = (),
    ) -> "VariableSpace":
        names = (*decision, *weight, *multiplier, *objective)
        roles = (
            (ROLE_DECISION,) * len(decision)
            + (ROLE_WEIGHT,) * len(weight)
            + (ROLE_MULTIPLIER,) * len(multiplier)
            + (ROLE_OBJECTIVE,) * len(objective)
        )
        return cls(names, roles)

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    def role_of(self, name: str) -> str:
        return self.roles[self.index(name)]

    def names_with_role(self, role: str) -> tuple[str, ...]:
        return tuple(n for n, r in zip(self.names, self.roles) if r == role)

    @property
    def decision_names(self) -> tuple[str, ...]:
        return self.names_with_role(ROLE_DECISION)

    @property
    def weight_names(self) -> tuple[str, ...]:
        return self.names_with_role(ROLE_WEIGHT)

    @property
    def multiplier_names(self) -> tuple[str, ...]:
        return self.names_with_role(ROLE_MULTIPLIER)

    @property
    def objective_names(self) -> tuple[str, ...]:
        return self.names_with_role(ROLE_OBJECTIVE)

    def unit_monomial(self, name: str) -> Monomial:
        exps = [0] * len(self.names)
        exps[self.index(name)] = 1
        return tuple(exps)

    def constant_monomial(self) -> Monomial:
        return (0,) * len(self.names)


def monomial_degree(mono: Monomial) -> int:
    return sum(mono)


def monomial_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def monomial_key(mono: Monomial) -> tuple[int, tuple[int, ...]]:
    """Sort key for the canonical order: graded, then by exponent tuple in
    decreasing lexicographic order (earlier variables come first within a
    degree block)."""
    return (sum(mono), tuple(-e for e in mono))


def monomials_of_degree(space: VariableSpace, k: int) -> Iterator[Monomial]:
    """All monomials of total degree exactly ``k``, in canonical order."""
    nvars = len(space)
    if nvars == 0:
        if k == 0:
            yield ()
        return
    for combo in itertools.combinations_with_replacement(range(nvars), k):
        exps = [0] * nvars
        for idx in combo:
            exps[idx] += 1
        yield tuple(exps)


def monomials_up_to(space: VariableSpace, d: int) -> list[Monomial]:
    """All monomials of total degree <= ``d`` in canonical order.

    The result has exactly C(V + d, d) entries for V variables.
    """
    if d < 0:
        raise ValueError("degree bound must be nonnegative")
    out: list[Monomial] = []
    for k in range(d + 1):
        out.extend(monomials_of_degree(space, k))
    return out


def count_monomials_up_to(nvars: int, d: int) -> int:
    return math.comb(nvars + d, d)


def _clean(terms: dict[Monomial, float]) -> dict[Monomial, float]:
    """Drop exact zeros and relative-noise coefficients."""
    if not terms:
        return {}
    peak = max(abs(c) for c in terms.values())
    if peak == 0.0:
        return {}
    cutoff = PRUNE_REL * peak
    return {m: c for m, c in terms.items() if abs(c) > cutoff}


class Polynomial:
    """Sparse real-coefficient polynomial over a :class:`VariableSpace`.

    Stored as a monomial -> coefficient map with no explicit zeros.  All
    operations return new objects; instances are never mutated.
    """

    __slots__ = ("space", "terms")

    def __init__(self, space: VariableSpace, terms: Mapping[Monomial, float] | None = None):
        self.space = space
        self.terms: dict[Monomial, float] = _clean(dict(terms or {}))

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, space: VariableSpace) -> "Polynomial":
        return cls(space)

    @classmethod
    def constant(cls, space: VariableSpace, value: float) -> "Polynomial":
        return cls(space, {space.constant_monomial(): float(value)})

    @classmethod
    def variable(cls, space: VariableSpace, name: str) -> "Polynomial":
        return cls(space, {space.unit_monomial(name): 1.0})

    # -- basic queries ------------------------------------------------

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def support(self) -> set[str]:
        """Names of variables that appear with a positive exponent."""
        used: set[str] = set()
        for mono in self.terms:
            for i, e in enumerate(mono):
                if e > 0:
                    used.add(self.space.names[i])
        return used

    def sorted_terms(self) -> list[tuple[Monomial, float]]:
        return sorted(self.terms.items(), key=lambda kv: monomial_key(kv[0]))

    # -- arithmetic ---------------------------------------------------

    def _check_space(self, other: "Polynomial") -> None:
        if self.space != other.space:
            raise ValueError("polynomials live in different variable spaces")

    def __add__(self, other: "Polynomial | float | int") -> "Polynomial":
        if isinstance(other, (int, float)):
            other = Polynomial.constant(self.space, float(other))
        self._check_space(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0.0) + c
        return Polynomial(self.space, terms)

    __radd__ = __add__

    def __sub__(self, other: "Polynomial | float | int") -> "Polynomial":
        if isinstance(other, (int, float)):
            other = Polynomial.constant(self.space, float(other))
        self._check_space(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0.0) - c
        return Polynomial(self.space, terms)

    def __rsub__(self, other: "float | int") -> "Polynomial":
        return (-self) + other

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.space, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other: "Polynomial | float | int") -> "Polynomial":
        if isinstance(other, (int, float)):
            return self.scale(float(other))
        self._check_space(other)
        # Per-monomial products are summed with fsum so the result does not
        # depend on term iteration order (multiplication commutes exactly).
        buckets: dict[Monomial, list[float]] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                buckets.setdefault(monomial_mul(m1, m2), []).append(c1 * c2)
        terms = {m: math.fsum(parts) for m, parts in buckets.items()}
        return Polynomial(self.space, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Polynomial.constant(self.space, 1.0)
        for _ in range(exponent):
            result = result * self
        return result

    def scale(self, factor: float) -> "Polynomial":
        return Polynomial(self.space, {m: c * factor for m, c in self.terms.items()})

    def shift(self, mono: Monomial) -> "Polynomial":
        """Multiply by a single monomial (exact, no pruning pass needed)."""
        poly = Polynomial.__new__(Polynomial)
        poly.space = self.space
        poly.terms = {monomial_mul(m, mono): c for m, c in self.terms.items()}
        return poly

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.space == other.space and self.terms == other.terms

    def __hash__(self):
        return hash((self.space, frozenset(self.terms.items())))

    # -- calculus and evaluation ---------------------------------------

    def differentiate(self, name: str) -> "Polynomial":
        """Formal partial derivative with respect to ``name``."""
        idx = self.space.index(name)
        terms: dict[Monomial, float] = {}
        for mono, coeff in self.terms.items():
            e = mono[idx]
            if e == 0:
                continue
            new = list(mono)
            new[idx] = e - 1
            key = tuple(new)
            terms[key] = terms.get(key, 0.0) + coeff * e
        return Polynomial(self.space, terms)

    def evaluate(self, point: Mapping[str, float]) -> float:
        """Evaluate at ``point``, which must assign every variable in use."""
        missing = self.support() - set(point)
        if missing:
            raise ValueError(f"missing assignment for {sorted(missing)}")
        values = [point.get(n, 0.0) for n in self.space.names]
        total = 0.0
        for mono, coeff in self.terms.items():
            term = coeff
            for i, e in enumerate(mono):
                if e:
                    term *= values[i] ** e
            total += term
        return total

    def substitute(self, assignment: Mapping[str, float]) -> "Polynomial":
        """Partially evaluate: fix the given variables, keep the rest symbolic."""
        indices = {self.space.index(n): float(v) for n, v in assignment.items()}
        terms: dict[Monomial, float] = {}
        for mono, coeff in self.terms.items():
            c = coeff
            new = list(mono)
            for i, v in indices.items():
                if mono[i]:
                    c *= v ** mono[i]
                    new[i] = 0
            key = tuple(new)
            terms[key] = terms.get(key, 0.0) + c
        return Polynomial(self.space, terms)

    # -- space plumbing -------------------------------------------------

    def embed(self, space: VariableSpace) -> "Polynomial":
        """Re-express over a larger space containing all of this one's names."""
        mapping = [space.index(n) for n in self.space.names]
        nvars = len(space)
        terms: dict[Monomial, float] = {}
        for mono, coeff in self.terms.items():
            exps = [0] * nvars
            for src, e in enumerate(mono):
                if e:
                    exps[mapping[src]] = e
            terms[tuple(exps)] = coeff
        return Polynomial(space, terms)

    def restrict(self, space: VariableSpace) -> "Polynomial":
        """Re-express over a smaller space; every used variable must survive."""
        keep = set(space.names)
        extra = self.support() - keep
        if extra:
            raise ValueError(f"polynomial uses variables outside target space: {sorted(extra)}")
        mapping = {i: space.index(n) for i, n in enumerate(self.space.names) if n in keep}
        nvars = len(space)
        terms: dict[Monomial, float] = {}
        for mono, coeff in self.terms.items():
            exps = [0] * nvars
            for src, e in enumerate(mono):
                if e:
                    exps[mapping[src]] = e
            terms[tuple(exps)] = coeff
        return Polynomial(space, terms)

    # -- serialization ----------------------------------------------------

    def to_term_list(self) -> list[dict]:
        """JSON-ready term list; variables with exponent zero are omitted."""
        out = []
        for mono, coeff in self.sorted_terms():
            entry = {n: e for n, e in zip(self.space.names, mono) if e}
            out.append({"coeff": coeff, "monomial": entry})
        return out

    @classmethod
    def from_term_list(cls, space: VariableSpace, data: Iterable[Mapping]) -> "Polynomial":
        terms: dict[Monomial, float] = {}
        for item in data:
            exps = [0] * len(space)
            for name, e in item["monomial"].items():
                exps[space.index(name)] = int(e)
            key = tuple(exps)
            terms[key] = terms.get(key, 0.0) + float(item["coeff"])
        return cls(space, terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for mono, coeff in self.sorted_terms():
            factors = [f"{coeff:g}"]
            for n, e in zip(self.space.names, mono):
                if e == 1:
                    factors.append(n)
                elif e > 1:
                    factors.append(f"{n}^{e}")
            bits.append("*".join(factors))
        return " + ".join(bits)
