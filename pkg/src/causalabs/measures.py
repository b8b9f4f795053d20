"""Distances between stochastic maps and the interventional error measures."""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .abstraction import Abstraction, AbstractionError, alpha_for_set, is_order_preserving, pseudo_inverse
from .engine import interventional_matrix
from .scm import Scm, StochasticMatrix

PROB_TOL = 1e-9
DEFAULT_MAX_PAIRS = 10_000


class MeasureKind(str, enum.Enum):
    IC = "ic"
    IIL = "iil"
    ISIL = "isil"
    ISC = "isc"


class Aggregator(str, enum.Enum):
    SUP = "sup"
    MEAN = "mean"

    def __call__(self, values: Sequence[float]) -> float:
        if self is Aggregator.SUP:
            return float(max(values))
        return float(math.fsum(values) / len(values))


class AssessmentKind(str, enum.Enum):
    COMPLETE = "complete"
    CAUSAL = "causal"
    PARENTAL = "parental"
    CUSTOM = "custom"


Pair = tuple[tuple[str, ...], tuple[str, ...]]


@dataclass(frozen=True)
class AssessmentSet:
    """Ordered, deduplicated ``(X', Y')`` pairs of disjoint non-empty sets."""

    kind: AssessmentKind
    pairs: tuple[Pair, ...]

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


# -- distances ---------------------------------------------------------------

def _check_distribution(name: str, v: np.ndarray) -> None:
    if (v < -PROB_TOL).any() or abs(v.sum() - 1.0) > PROB_TOL:
        raise ValueError(f"{name} is not a probability vector (sum={v.sum():.12g})")


def _jsd_columns(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Column-wise Jensen-Shannon distance with natural log and ``0 log 0 = 0``.

    With ``s = p + q`` and ``t = (p - q) / s`` the divergence is
    ``sum(s * h(t)) / 4`` where ``h(t) = (1+t) ln(1+t) + (1-t) ln(1-t)``.
    Every term is non-negative, so near-identical columns do not lose their
    small distance to cancellation, which the textbook form would.
    """
    s = p + q
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(s > 0, (p - q) / s, 0.0)
        a = np.abs(t)
        near = 2 * a * np.arctanh(a) + np.log1p(-a * a)
        far = (1 + a) * np.log1p(a) + np.where(a < 1, (1 - a) * np.log1p(-a), 0.0)
    h = np.where(a < 0.5, near, far)
    div = 0.25 * np.where(s > 0, s * h, 0.0).sum(axis=0)
    return np.sqrt(np.clip(div, 0.0, math.log(2)))


def jsd(p, q) -> float:
    """Jensen-Shannon distance between two probability vectors.

    Returns a value in ``[0, sqrt(ln 2)]``.

    Examples
    --------
    >>> round(jsd([0.9, 0.1], [0.4, 0.6]), 5)
    0.38524
    """
    p = np.asarray(p, dtype=float).ravel()
    q = np.asarray(q, dtype=float).ravel()
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.size} vs {q.size}")
    _check_distribution("p", p)
    _check_distribution("q", q)
    return float(_jsd_columns(p[:, None], q[:, None])[0])


def matrix_distance(a, b) -> float:
    """Largest column-wise Jensen-Shannon distance between two stochastic matrices."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(_jsd_columns(a, b).max())


def path_distance(kind: MeasureKind, mu, nu, ax, ay) -> float:
    """Distance between the two paths of the abstraction diagram selected by ``kind``.

    Parameters
    ----------
    mu, nu
        Base and high-level interventional matrices (outcomes by interventions).
    ax, ay
        Alpha matrices lifted to the intervened and the outcome sets.
    """
    kind = MeasureKind(kind)
    if kind is MeasureKind.IC:
        return matrix_distance(ay @ mu, nu @ ax)
    if kind is MeasureKind.IIL:
        return matrix_distance(mu, pseudo_inverse(ay) @ nu @ ax)
    if kind is MeasureKind.ISIL:
        return matrix_distance(nu, ay @ mu @ pseudo_inverse(ax))
    return matrix_distance(pseudo_inverse(ay) @ nu, mu @ pseudo_inverse(ax))


# -- per-pair errors ---------------------------------------------------------

def _lift(abs_: Abstraction, high: Scm, names: Sequence[str]) -> StochasticMatrix:
    names = high.ordered(names)
    for h in names:
        if h not in abs_.var_map.values():
            raise AbstractionError(f"pair touches unabstracted variables: {h}")
    return alpha_for_set(abs_, names)


def base_matrix(base: Scm, high: Scm, abs_: Abstraction, x: Sequence[str], y: Sequence[str]) -> np.ndarray:
    """Base interventional matrix on the preimages of ``x`` and ``y``."""
    ax, ay = _lift(abs_, high, x), _lift(abs_, high, y)
    return interventional_matrix(base, ax.col_vars, ay.col_vars).matrix


def error_wrt_intervention(
    kind: MeasureKind,
    base: Scm,
    high: Scm,
    abs_: Abstraction,
    x: Sequence[str],
    y: Sequence[str],
) -> float:
    x, y = high.ordered(x), high.ordered(y)
    if not x or not y or set(x) & set(y):
        raise ValueError(f"pair ({list(x)}, {list(y)}) must be disjoint and non-empty")
    ax, ay = _lift(abs_, high, x), _lift(abs_, high, y)
    mu = interventional_matrix(base, ax.col_vars, ay.col_vars).matrix
    nu = interventional_matrix(high, x, y).matrix
    return path_distance(kind, mu, nu, ax.matrix, ay.matrix)


# -- assessment sets ---------------------------------------------------------

def complete_pair_count(n: int) -> int:
    """Number of ordered disjoint pairs of non-empty subsets of an ``n``-set."""
    return 3**n - 2 ** (n + 1) + 1


def _sort_pairs(pairs: Iterable[Pair]) -> tuple[Pair, ...]:
    unique = {(tuple(x), tuple(y)) for x, y in pairs}
    return tuple(sorted(unique, key=lambda p: (sorted(p[0]), sorted(p[1]))))


def _reaches_all(high: Scm, x: Sequence[str], y: Sequence[str]) -> bool:
    cut = set(x)
    children: dict[str, list[str]] = {n: [] for n in high.names}
    for p, c in high.edges:
        if c not in cut:
            children[p].append(c)
    seen: set[str] = set()
    stack = [c for s in x for c in children[s]]
    while stack:
        v = stack.pop()
        if v not in seen:
            seen.add(v)
            stack.extend(children[v])
    return set(y) <= seen


def build_assessment_set(
    kind: AssessmentKind | str,
    high: Scm,
    custom_pairs: Sequence[tuple[Iterable[str], Iterable[str]]] | None = None,
    max_pairs: int | None = DEFAULT_MAX_PAIRS,
) -> AssessmentSet:
    """Construct an assessment set over the variables of ``high``.

    ``max_pairs`` bounds the enumeration of complete and causal sets, whose
    size grows like ``3**n``; pass ``None`` to lift the bound.
    """
    kind = AssessmentKind(kind)
    names = high.names
    if kind is AssessmentKind.CUSTOM:
        if not custom_pairs:
            raise ValueError("custom assessment set needs at least one pair")
        pairs = []
        for x, y in custom_pairs:
            x, y = tuple(x), tuple(y)
            unknown = [v for v in x + y if v not in high]
            if unknown:
                raise ValueError(f"unknown variables {unknown} in custom pair")
            if not x or not y:
                raise ValueError(f"custom pair ({list(x)}, {list(y)}) has an empty side")
            if set(x) & set(y):
                raise ValueError(f"custom pair ({list(x)}, {list(y)}) overlaps")
            pairs.append((high.ordered(x), high.ordered(y)))
        return AssessmentSet(kind, _sort_pairs(pairs))

    if kind is AssessmentKind.PARENTAL:
        pairs = [(high.ordered(high.parents(v)), (v,)) for v in names if high.parents(v)]
        return AssessmentSet(kind, _sort_pairs(pairs))

    total = complete_pair_count(len(names))
    if max_pairs is not None and total > max_pairs:
        raise ValueError(f"complete assessment set has {total} pairs, above the limit of {max_pairs}")
    pairs = []
    for roles in itertools.product((0, 1, 2), repeat=len(names)):
        x = tuple(n for n, r in zip(names, roles) if r == 1)
        y = tuple(n for n, r in zip(names, roles) if r == 2)
        if x and y and (kind is AssessmentKind.COMPLETE or _reaches_all(high, x, y)):
            pairs.append((x, y))
    return AssessmentSet(kind, _sort_pairs(pairs))


# -- aggregation -------------------------------------------------------------

@dataclass(frozen=True)
class ErrorReport:
    """Overall error with its per-pair breakdown.

    ``value`` is ``inf`` and ``breakdown`` empty when the abstraction does not
    preserve causal order.
    """

    kind: MeasureKind
    aggregator: Aggregator
    value: float
    breakdown: tuple[tuple[Pair, float], ...]

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)


def overall_error(
    kind: MeasureKind | str,
    base: Scm,
    high: Scm,
    abs_: Abstraction,
    j: AssessmentSet,
    agg: Aggregator | str = Aggregator.SUP,
) -> ErrorReport:
    kind, agg = MeasureKind(kind), Aggregator(agg)
    if not j.pairs:
        raise ValueError("empty assessment set: nothing to aggregate")
    if not is_order_preserving(abs_, base, high):
        return ErrorReport(kind, agg, math.inf, ())
    rows = tuple(((x, y), error_wrt_intervention(kind, base, high, abs_, x, y)) for x, y in j.pairs)
    return ErrorReport(kind, agg, agg([e for _, e in rows]), rows)


__all__ = [
    "Aggregator",
    "AssessmentKind",
    "AssessmentSet",
    "ErrorReport",
    "MeasureKind",
    "base_matrix",
    "build_assessment_set",
    "complete_pair_count",
    "error_wrt_intervention",
    "jsd",
    "matrix_distance",
    "overall_error",
    "path_distance",
]
