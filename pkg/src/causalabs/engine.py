"""Interventions, exact interventional matrices and seeded samplers."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .scm import (
    Scm,
    ScmError,
    StochasticMatrix,
    descendants,
    joint_distribution,
    marginal,
    topological_order,
)

RNG_ALGORITHM = "numpy.random.PCG64"


class SeverabilityError(ValueError):
    """The base model cannot be split around the replaced variables."""


@dataclass(frozen=True)
class Intervention:
    """``do(targets = values)`` with values given as outcome labels."""

    targets: tuple[str, ...]
    values: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "values", tuple(str(v) for v in self.values))
        if len(self.targets) != len(self.values):
            raise ValueError("one value per target is required")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"repeated intervention target in {self.targets}")

    @classmethod
    def of(cls, assignment: Mapping[str, object]) -> "Intervention":
        return cls(tuple(assignment), tuple(str(v) for v in assignment.values()))

    def as_dict(self) -> dict[str, str]:
        return dict(zip(self.targets, self.values))

    def indices(self, scm: Scm) -> dict[str, int]:
        return {t: scm.outcome_index(t, v) for t, v in zip(self.targets, self.values)}


NO_INTERVENTION = Intervention((), ())


def intervene(scm: Scm, iv: Intervention) -> Scm:
    """Replace each target's mechanism with a point mass and cut its incoming edges."""
    idx = iv.indices(scm)  # raises on unknown target or value
    if not idx:
        return scm
    mechanisms = dict(scm.mechanisms)
    for t, k in idx.items():
        col = np.zeros((scm.var(t).size, 1))
        col[k, 0] = 1.0
        mechanisms[t] = StochasticMatrix(col, row_vars=(t,), col_vars=())
    edges = tuple(e for e in scm.edges if e[1] not in idx)
    return Scm(scm.variables, edges, mechanisms, name=scm.name)


def interventional_matrix(
    scm: Scm, x_vars: Sequence[str], y_vars: Sequence[str]
) -> StochasticMatrix:
    """Column ``j`` is ``P(Y | do(X = decode(j)))``, computed exactly.

    Each column is obtained by intervening, enumerating the full joint and
    marginalising onto ``y_vars``.
    """
    x_vars, y_vars = tuple(x_vars), tuple(y_vars)
    if not x_vars or not y_vars:
        raise ValueError("both the intervened and the outcome sets must be non-empty")
    if set(x_vars) & set(y_vars):
        raise ValueError(f"sets overlap: {sorted(set(x_vars) & set(y_vars))}")
    x_space = scm.space(x_vars)
    y_space = scm.space(y_vars)
    sizes = scm.sizes
    out = np.empty((y_space.size, x_space.size))
    for j in range(x_space.size):
        values = x_space.decode(j)
        iv = Intervention(
            x_vars, tuple(scm.var(v).outcomes[k] for v, k in zip(x_vars, values))
        )
        joint = joint_distribution(intervene(scm, iv))
        out[:, j] = marginal(joint, scm.names, y_vars, sizes)
    return StochasticMatrix(out, row_vars=y_vars, col_vars=x_vars, source=scm.name)


# -- sampling ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EmpiricalCounts:
    """Sample counts over the full outcome space of ``variables``."""

    counts: np.ndarray
    variables: tuple[str, ...]
    sizes: tuple[int, ...]
    n: int
    seed: int
    rng: str = RNG_ALGORITHM

    def frequencies(self) -> np.ndarray:
        return self.counts / self.n

    def marginal(self, names: Sequence[str]) -> np.ndarray:
        return marginal(self.frequencies(), self.variables, names, dict(zip(self.variables, self.sizes)))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _draw(matrix: np.ndarray, cols: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Draw one row index per entry of ``cols`` from the addressed columns."""
    cum = np.cumsum(matrix[:, cols], axis=0)
    u = rng.random(len(cols))
    out = (u[None, :] >= cum).sum(axis=0)
    return np.minimum(out, matrix.shape[0] - 1)


def _sample_into(
    scm: Scm,
    assignment: np.ndarray,
    order: Sequence[str],
    rng: np.random.Generator,
) -> None:
    """Ancestral sampling of ``order`` (a topological sub-sequence) in place."""
    for name in order:
        mech = scm.mechanisms[name]
        parents = mech.col_vars
        if parents:
            cols = scm.space(parents).encode_many([assignment[:, scm.index(p)] for p in parents])
        else:
            cols = np.zeros(assignment.shape[0], dtype=np.int64)
        assignment[:, scm.index(name)] = _draw(mech.matrix, cols, rng)


def _counts(scm: Scm, assignment: np.ndarray, n: int, seed: int) -> EmpiricalCounts:
    space = scm.space()
    flat = space.encode_many([assignment[:, i] for i in range(assignment.shape[1])])
    counts = np.bincount(flat, minlength=space.size)
    return EmpiricalCounts(counts, space.variables, space.sizes, n, seed)


def sample_assignments(
    scm: Scm, iv: Intervention | None, n: int, rng: np.random.Generator
) -> np.ndarray:
    """``n`` joint samples as an ``(n, len(variables))`` array of outcome indices."""
    model = intervene(scm, iv) if iv is not None else scm
    a = np.full((n, len(scm.variables)), -1, dtype=np.int64)
    _sample_into(model, a, topological_order(model), rng)
    return a


def forward_sample(scm: Scm, iv: Intervention | None, n: int, seed: int) -> EmpiricalCounts:
    if n < 1:
        raise ValueError("n must be positive")
    a = sample_assignments(scm, iv, n, make_rng(seed))
    return _counts(scm, a, n, seed)


def _uniform_preimage(alpha: np.ndarray, high: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """For each high index draw a low index uniformly among its alpha preimage."""
    out = np.empty(len(high), dtype=np.int64)
    for h in np.unique(high):
        pre = np.flatnonzero(alpha[h])
        mask = high == h
        out[mask] = pre[rng.integers(len(pre), size=int(mask.sum()))]
    return out


def pullback_assignments(
    base: Scm, high: Scm, abstraction, high_iv: Intervention, n: int, rng
) -> np.ndarray:
    from .abstraction import alpha_for_set

    targets = high.ordered(high_iv.targets)
    values = high_iv.indices(high)
    alpha = alpha_for_set(abstraction, targets)
    h = high.space(targets).encode([values[t] for t in targets])
    low = _uniform_preimage(alpha.matrix, np.full(n, h), rng)
    low_vars = alpha.col_vars

    a = np.full((n, len(base.variables)), -1, dtype=np.int64)
    for v, col in zip(low_vars, base.space(low_vars).decode_many(low)):
        a[:, base.index(v)] = col
    fixed = set(low_vars)
    order = [v for v in topological_order(base) if v not in fixed]
    _sample_into(base, a, order, rng)
    return a


def pullback_intervention_sample(
    base: Scm, high: Scm, abstraction, high_iv: Intervention, n: int, seed: int
) -> EmpiricalCounts:
    """Sample the base model under interventions pulled back from ``high_iv``.

    Each sample draws a low-level intervention uniformly from the preimage of
    the high-level value, then samples the base model under it. ``high`` is
    only used to resolve outcome labels and canonical order.
    """
    if n < 1:
        raise ValueError("n must be positive")
    a = pullback_assignments(base, high, abstraction, high_iv, n, make_rng(seed))
    return _counts(base, a, n, seed)


def severability_plan(
    base: Scm,
    replaced: Sequence[str],
    drivers: Sequence[str],
    base_iv: Intervention | None = None,
) -> tuple[list[str], list[str]]:
    """Split the base variables into those sampled before and after the replacement.

    Raises :class:`SeverabilityError` when a driver is replaced, depends on a
    replaced variable, or when the base intervention targets a replaced one.
    """
    replaced = set(replaced)
    downstream: set[str] = set()
    for r in replaced:
        downstream |= descendants(base, r)
    for d in drivers:
        if d in replaced:
            raise SeverabilityError(f"{d}: driver variable is also replaced")
        if d in downstream:
            raise SeverabilityError(f"{d}: driver variable descends from a replaced variable")
    if base_iv is not None:
        for t in base_iv.targets:
            if t in replaced:
                raise SeverabilityError(f"{t}: intervention targets a replaced variable")
    order = topological_order(base)
    before = [v for v in order if v not in replaced and v not in downstream]
    after = [v for v in order if v not in replaced and v in downstream]
    return before, after


def hybrid_assignments(
    base: Scm,
    high: Scm,
    abstraction,
    replaced_y: Sequence[str],
    driver_x: Sequence[str],
    base_iv: Intervention | None,
    n: int,
    rng: np.random.Generator,
) -> np.ndarray:
    from .abstraction import alpha_for_set

    replaced_y = high.ordered(replaced_y)
    driver_x = high.ordered(driver_x)
    if set(replaced_y) & set(driver_x):
        raise ValueError("replaced and driver sets must be disjoint")
    alpha_x = alpha_for_set(abstraction, driver_x)
    alpha_y = alpha_for_set(abstraction, replaced_y)
    low_x, low_y = alpha_x.col_vars, alpha_y.col_vars
    model = intervene(base, base_iv) if base_iv is not None else base
    before, after = severability_plan(model, low_y, low_x, base_iv)
    nu = interventional_matrix(high, driver_x, replaced_y).matrix

    a = np.full((n, len(base.variables)), -1, dtype=np.int64)
    _sample_into(model, a, before, rng)
    x_low = base.space(low_x).encode_many([a[:, base.index(v)] for v in low_x])
    x_high = alpha_x.matrix[:, x_low].argmax(axis=0)
    y_high = _draw(nu, x_high, rng)
    y_low = _uniform_preimage(alpha_y.matrix, y_high, rng)
    for v, col in zip(low_y, base.space(low_y).decode_many(y_low)):
        a[:, base.index(v)] = col
    _sample_into(model, a, after, rng)
    return a


def hybrid_sample(
    base: Scm,
    high: Scm,
    abstraction,
    replaced_y: Sequence[str],
    driver_x: Sequence[str],
    base_iv: Intervention | None,
    n: int,
    seed: int,
) -> EmpiricalCounts:
    """Sample the base model with the mechanism for ``a^-1(replaced_y)`` taken from ``high``.

    Per sample: the base variables that do not depend on the replaced block
    are drawn first; the drivers ``a^-1(driver_x)`` are abstracted, the
    high-level interventional matrix is sampled, the result is pulled back
    uniformly onto ``a^-1(replaced_y)`` and base sampling resumes downstream.
    """
    if n < 1:
        raise ValueError("n must be positive")
    a = hybrid_assignments(base, high, abstraction, replaced_y, driver_x, base_iv, n, make_rng(seed))
    return _counts(base, a, n, seed)


__all__ = [
    "EmpiricalCounts",
    "Intervention",
    "NO_INTERVENTION",
    "RNG_ALGORITHM",
    "ScmError",
    "SeverabilityError",
    "forward_sample",
    "hybrid_sample",
    "intervene",
    "interventional_matrix",
    "pullback_intervention_sample",
    "severability_plan",
]
