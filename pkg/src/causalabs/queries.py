"""Monte Carlo estimates of event probabilities under the four sampling schemes."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .abstraction import Abstraction, alpha_for_set
from .engine import (
    Intervention,
    hybrid_assignments,
    make_rng,
    pullback_assignments,
    sample_assignments,
)
from .scm import Scm


class QueryKind(str, enum.Enum):
    BASE = "base"
    HIGH = "high"
    PULLBACK = "pullback"
    HYBRID = "hybrid"


@dataclass(frozen=True)
class Query:
    """Estimate ``P(event)`` under an intervention.

    ``intervention`` targets base variables for ``base`` and ``hybrid``
    queries and high-level variables for ``high`` and ``pullback`` ones.
    ``event`` may mix base variables with high-level variables; the latter
    are read off base samples through the abstraction. ``replaced`` and
    ``drivers`` are the high-level sets used by ``hybrid`` queries.
    """

    label: str
    kind: QueryKind
    event: Mapping[str, str]
    intervention: Mapping[str, str] = field(default_factory=dict)
    replaced: tuple[str, ...] = ()
    drivers: tuple[str, ...] = ()

    @classmethod
    def from_dict(cls, data: Mapping) -> "Query":
        try:
            return cls(
                label=str(data["label"]),
                kind=QueryKind(data["kind"]),
                event={k: str(v) for k, v in data["event"].items()},
                intervention={k: str(v) for k, v in (data.get("do") or {}).items()},
                replaced=tuple(data.get("replaced", ())),
                drivers=tuple(data.get("drivers", ())),
            )
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValueError(f"malformed query {data!r}: {exc}") from exc


def event_mask(
    assignment: np.ndarray,
    model: Scm,
    event: Mapping[str, str],
    high: Scm | None = None,
    abstraction: Abstraction | None = None,
) -> np.ndarray:
    """Boolean mask of the rows of ``assignment`` (samples of ``model``) where ``event`` holds."""
    mask = np.ones(assignment.shape[0], dtype=bool)
    lifted = []
    for var, label in event.items():
        if var in model:
            mask &= assignment[:, model.index(var)] == model.outcome_index(var, label)
        elif high is not None and abstraction is not None and var in high:
            lifted.append(var)
        else:
            raise ValueError(f"event variable {var!r} is not in the sampled model")
    for var in lifted:
        alpha = alpha_for_set(abstraction, (var,))
        low = model.space(alpha.col_vars).encode_many(
            [assignment[:, model.index(v)] for v in alpha.col_vars]
        )
        mask &= alpha.matrix[:, low].argmax(axis=0) == high.outcome_index(var, event[var])
    return mask


def sample_query(
    query: Query,
    base: Scm,
    high: Scm | None,
    abstraction: Abstraction | None,
    n: int,
    rng: np.random.Generator,
) -> float:
    """One estimate of ``query`` from ``n`` samples."""
    iv = Intervention.of(query.intervention) if query.intervention else None
    if query.kind is QueryKind.HIGH:
        a = sample_assignments(high, iv, n, rng)
        return float(event_mask(a, high, query.event).mean())
    if query.kind is QueryKind.BASE:
        a = sample_assignments(base, iv, n, rng)
    elif query.kind is QueryKind.PULLBACK:
        a = pullback_assignments(base, high, abstraction, iv, n, rng)
    else:
        a = hybrid_assignments(base, high, abstraction, query.replaced, query.drivers, iv, n, rng)
    return float(event_mask(a, base, query.event, high, abstraction).mean())


def repeat_query(
    query: Query,
    base: Scm,
    high: Scm | None,
    abstraction: Abstraction | None,
    n: int,
    reps: int,
    seed: int,
) -> tuple[float, float, np.ndarray]:
    """Mean, sample standard deviation and raw estimates over ``reps`` runs.

    Repetition ``r`` uses seed ``seed + r``.
    """
    if n < 1 or reps < 1:
        raise ValueError("n and reps must be positive")
    est = np.array(
        [sample_query(query, base, high, abstraction, n, make_rng(seed + r)) for r in range(reps)]
    )
    std = float(est.std(ddof=1)) if reps > 1 else 0.0
    return float(est.mean()), std, est


def load_queries(items: Sequence[Mapping]) -> list[Query]:
    return [Query.from_dict(q) for q in items]
