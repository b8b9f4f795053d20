"""Exhaustive search for the abstraction (and high-level mechanisms) of least error."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .abstraction import Abstraction, AbstractionError, alpha_matrix_problems, binary_alpha, is_order_preserving
from .engine import interventional_matrix
from .measures import Aggregator, AssessmentSet, MeasureKind, Pair, path_distance
from .scm import Scm, StochasticMatrix

DEFAULT_MAX_CANDIDATES = 1_000_000


def surjection_count(m: int, n: int) -> int:
    """Number of surjections from an ``m``-set onto an ``n``-set."""
    return sum((-1) ** k * math.comb(n, k) * (n - k) ** m for k in range(n + 1))


def enumerate_surjections(m: int, n: int) -> list[np.ndarray]:
    """All ``n x m`` binary surjection matrices.

    Ordered lexicographically by the word ``(f(0), ..., f(m-1))`` that assigns
    each column its row.

    Examples
    --------
    >>> [w.argmax(axis=0).tolist() for w in enumerate_surjections(2, 2)]
    [[0, 1], [1, 0]]
    """
    if n < 1 or m < n:
        raise ValueError(f"no surjections from {m} outcomes onto {n}")
    out = []
    cols = np.arange(m)
    for word in itertools.product(range(n), repeat=m):
        if len(set(word)) == n:
            mat = np.zeros((n, m))
            mat[list(word), cols] = 1.0
            out.append(mat)
    return out


@dataclass(frozen=True)
class CandidateSpace:
    """Per-slot lists of admissible alphas and high-level mechanisms.

    Candidates are the Cartesian product of the slots, mechanism slots first
    and alpha slots second, each group in the high model's variable order,
    with the last slot varying fastest.
    """

    alphas: Mapping[str, tuple[StochasticMatrix, ...]] = field(default_factory=dict)
    mechanisms: Mapping[str, tuple[StochasticMatrix, ...]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "alphas", {k: tuple(v) for k, v in self.alphas.items()})
        object.__setattr__(self, "mechanisms", {k: tuple(v) for k, v in self.mechanisms.items()})
        for h, options in self.alphas.items():
            for a in options:
                problems = alpha_matrix_problems(h, a.matrix)
                if problems:
                    raise AbstractionError("; ".join(problems))
            if len({a.col_vars for a in options}) > 1:
                raise AbstractionError(f"{h}: candidate alphas disagree on the low-level order")
        for h, options in self.mechanisms.items():
            for m in options:
                if m.bad_columns():
                    raise ValueError(f"{h}: candidate mechanism columns {m.bad_columns()} not stochastic")

    __hash__ = None

    def slots(self, high: Scm) -> list[tuple[str, str]]:
        """``(kind, variable)`` slots in enumeration order."""
        mech = [("mechanism", v) for v in high.ordered(self.mechanisms)]
        alpha = [("alpha", v) for v in high.ordered(self.alphas)]
        return mech + alpha

    @property
    def size(self) -> int:
        return math.prod(len(v) for v in self.mechanisms.values()) * math.prod(
            len(v) for v in self.alphas.values()
        )


def default_candidate_space(
    base: Scm,
    high: Scm,
    partial: Abstraction,
    mechanisms: Mapping[str, Sequence] | None = None,
) -> CandidateSpace:
    """Every surjection for each high-level variable whose alpha is missing.

    Low-level columns follow the base model's order of the preimage.
    ``mechanisms`` may give candidate matrices (arrays or stochastic
    matrices) for high-level variables whose mechanism is to be selected.
    """
    alphas = {}
    for h in high.names:
        if h in partial.alphas:
            continue
        low = base.ordered(r for r in partial.relevant if partial.var_map.get(r) == h)
        if not low:
            continue
        m = base.space(low).size
        alphas[h] = tuple(binary_alpha(a, h, low) for a in enumerate_surjections(m, high.var(h).size))
    mechs = {}
    for h, options in (mechanisms or {}).items():
        parents = high.parents(h)
        mechs[h] = tuple(
            o if isinstance(o, StochasticMatrix) else StochasticMatrix(np.asarray(o, float), (h,), parents)
            for o in options
        )
    return CandidateSpace(alphas, mechs)


@dataclass(frozen=True)
class Candidate:
    index: int
    choice: tuple[int, ...]
    error: float


@dataclass(frozen=True, eq=False)
class LearnResult:
    """Outcome of a search; ``abstraction`` is ``None`` if ``a`` breaks causal order."""

    abstraction: Abstraction | None
    high: Scm | None
    mechanisms: Mapping[str, StochasticMatrix]
    error: float
    ranking: tuple[Candidate, ...]
    slots: tuple[tuple[str, str], ...]
    pairs_evaluated: int

    @property
    def found(self) -> bool:
        return self.abstraction is not None


def with_mechanisms(high: Scm, mechanisms: Mapping[str, StochasticMatrix]) -> Scm:
    merged = dict(high.mechanisms)
    merged.update(mechanisms)
    return Scm(high.variables, high.edges, merged, name=high.name)


def learn(
    base: Scm,
    high: Scm,
    partial: Abstraction,
    kind: MeasureKind | str,
    j: AssessmentSet,
    agg: Aggregator | str = Aggregator.SUP,
    space: CandidateSpace | None = None,
    max_candidates: int | None = DEFAULT_MAX_CANDIDATES,
) -> LearnResult:
    """Evaluate every candidate in ``space`` and return the one of least error.

    Ties keep the earliest candidate in enumeration order. The per-pair error
    arithmetic is shared with :func:`causalabs.measures.overall_error`, so the
    reported error equals a fresh evaluation of the returned abstraction.
    """
    kind, agg = MeasureKind(kind), Aggregator(agg)
    unmapped = [r for r in partial.relevant if r not in partial.var_map]
    if unmapped:
        raise AbstractionError(f"variable map undefined for {unmapped}")
    if not j.pairs:
        raise ValueError("empty assessment set: nothing to aggregate")
    space = default_candidate_space(base, high, partial) if space is None else space
    slots = tuple(space.slots(high))
    if not is_order_preserving(partial, base, high):
        return LearnResult(None, None, {}, math.inf, (), slots, 0)
    options = [space.mechanisms[v] if k == "mechanism" else space.alphas[v] for k, v in slots]
    total = space.size
    if total == 0 or not slots:
        raise ValueError("empty candidate space")
    if max_candidates is not None and total > max_candidates:
        raise ValueError(f"candidate space has {total} candidates, above the limit of {max_candidates}")

    fixed_alphas = dict(partial.alphas)
    missing = [h for h in high.names if h not in fixed_alphas and h not in space.alphas]
    touched = {h for x, y in j.pairs for h in x + y}
    if touched & set(missing):
        raise AbstractionError(f"no alpha or candidates for {sorted(touched & set(missing))}")

    def preimage(h: str) -> tuple[str, ...]:
        if h in fixed_alphas:
            return fixed_alphas[h].col_vars
        return space.alphas[h][0].col_vars

    mu_cache: dict[Pair, np.ndarray] = {}
    for x, y in j.pairs:
        low_x = tuple(v for h in x for v in preimage(h))
        low_y = tuple(v for h in y for v in preimage(h))
        mu_cache[(x, y)] = interventional_matrix(base, low_x, low_y).matrix

    mech_slots = [v for k, v in slots if k == "mechanism"]
    alpha_slots = [v for k, v in slots if k == "alpha"]
    nu_cache: dict[tuple[int, ...], dict[Pair, np.ndarray]] = {}

    ranking = []
    best: Candidate | None = None
    for index, choice in enumerate(itertools.product(*(range(len(o)) for o in options))):
        mech_choice = choice[: len(mech_slots)]
        if mech_choice not in nu_cache:
            model = with_mechanisms(high, {v: space.mechanisms[v][c] for v, c in zip(mech_slots, mech_choice)})
            nu_cache[mech_choice] = {
                (x, y): interventional_matrix(model, x, y).matrix for x, y in j.pairs
            }
        alphas = dict(fixed_alphas)
        alphas.update({v: space.alphas[v][c] for v, c in zip(alpha_slots, choice[len(mech_slots):])})
        errors = []
        for x, y in j.pairs:
            ax = _kron([alphas[h].matrix for h in x])
            ay = _kron([alphas[h].matrix for h in y])
            errors.append(path_distance(kind, mu_cache[(x, y)], nu_cache[mech_choice][(x, y)], ax, ay))
        cand = Candidate(index, choice, agg(errors))
        ranking.append(cand)
        if best is None or cand.error < best.error:
            best = cand

    mech_choice = best.choice[: len(mech_slots)]
    chosen_mechs = {v: space.mechanisms[v][c] for v, c in zip(mech_slots, mech_choice)}
    alphas = dict(fixed_alphas)
    alphas.update({v: space.alphas[v][c] for v, c in zip(alpha_slots, best.choice[len(mech_slots):])})
    ranking.sort(key=lambda c: (c.error, c.index))
    return LearnResult(
        abstraction=partial.with_alphas(alphas),
        high=with_mechanisms(high, chosen_mechs),
        mechanisms=chosen_mechs,
        error=best.error,
        ranking=tuple(ranking),
        slots=slots,
        pairs_evaluated=total * len(j.pairs),
    )


def _kron(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


__all__ = [
    "Candidate",
    "CandidateSpace",
    "DEFAULT_MAX_CANDIDATES",
    "LearnResult",
    "default_candidate_space",
    "enumerate_surjections",
    "learn",
    "surjection_count",
    "with_mechanisms",
]
