"""Abstractions between models and their matrix algebra."""
from __future__ import annotations

import json
from fractions import Fraction
from dataclasses import dataclass
from functools import reduce
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .scm import Scm, StochasticMatrix, descendants


class AbstractionError(ValueError):
    pass


@dataclass(frozen=True)
class Abstraction:
    """Relevant set ``R``, variable map ``a`` and per-variable outcome maps.

    ``alphas[X']`` is a binary surjection matrix whose ``col_vars`` list the
    preimage ``a^-1(X')`` in the order its columns are indexed. Missing keys
    mark a partially specified abstraction.
    """

    relevant: tuple[str, ...]
    var_map: Mapping[str, str]
    alphas: Mapping[str, StochasticMatrix]

    def __post_init__(self):
        object.__setattr__(self, "relevant", tuple(self.relevant))
        object.__setattr__(self, "var_map", MappingProxyType(dict(self.var_map)))
        object.__setattr__(self, "alphas", MappingProxyType(dict(self.alphas)))

    __hash__ = None

    @property
    def high_vars(self) -> tuple[str, ...]:
        """Image of ``a`` in order of first appearance."""
        return tuple(dict.fromkeys(self.var_map[r] for r in self.relevant))

    def preimage(self, high_var: str) -> tuple[str, ...]:
        if high_var in self.alphas:
            return self.alphas[high_var].col_vars
        pre = tuple(r for r in self.relevant if self.var_map.get(r) == high_var)
        if not pre:
            raise AbstractionError(f"{high_var}: no base variable maps onto it")
        return pre

    def low_vars(self, high_vars: Iterable[str]) -> tuple[str, ...]:
        return tuple(v for h in high_vars for v in self.preimage(h))

    @property
    def complete(self) -> bool:
        return all(h in self.alphas for h in self.high_vars)

    def with_alphas(self, alphas: Mapping[str, StochasticMatrix]) -> "Abstraction":
        merged = dict(self.alphas)
        merged.update(alphas)
        return Abstraction(self.relevant, self.var_map, merged)


def binary_alpha(matrix, high_var: str, low_order: Sequence[str]) -> StochasticMatrix:
    return StochasticMatrix(np.asarray(matrix, dtype=float), row_vars=(high_var,), col_vars=tuple(low_order))


def identity_abstraction(scm: Scm, names: Sequence[str] | None = None, rename=lambda n: n) -> Abstraction:
    names = scm.names if names is None else scm.ordered(names)
    alphas = {rename(n): binary_alpha(np.eye(scm.var(n).size), rename(n), (n,)) for n in names}
    return Abstraction(names, {n: rename(n) for n in names}, alphas)


def alpha_matrix_problems(name: str, m: np.ndarray) -> list[str]:
    problems = []
    if not np.isin(m, (0.0, 1.0)).all():
        problems.append(f"{name}: alpha entries must be 0 or 1")
        return problems
    for j in np.flatnonzero(m.sum(axis=0) != 1):
        problems.append(f"{name}: column {j} not functional (needs exactly one 1)")
    for i in np.flatnonzero(m.sum(axis=1) == 0):
        problems.append(f"{name}: row {i} not surjective (no 1 in row)")
    return problems


def validate_abstraction(abs_: Abstraction, base: Scm, high: Scm, require_complete: bool = True) -> list[str]:
    """Every violation of the abstraction invariants, as messages."""
    problems: list[str] = []
    for r in abs_.relevant:
        if r not in base:
            problems.append(f"{r}: relevant variable not in base model")
        if r not in abs_.var_map:
            problems.append(f"{r}: relevant variable has no image under a")
    for r, h in abs_.var_map.items():
        if r not in abs_.relevant:
            problems.append(f"{r}: mapped but not in the relevant set")
        if h not in high:
            problems.append(f"{h}: image of {r} is not a high-level variable")
    image = set(abs_.var_map.values())
    for h in high.names:
        if h not in image:
            problems.append(f"{h}: a is not surjective (no base variable maps onto it)")

    for h in high.names:
        alpha = abs_.alphas.get(h)
        if alpha is None:
            if require_complete and h in image:
                problems.append(f"{h}: alpha not specified")
            continue
        pre = {r for r in abs_.relevant if abs_.var_map.get(r) == h}
        if set(alpha.col_vars) != pre or len(alpha.col_vars) != len(pre):
            problems.append(f"{h}: alpha low order {list(alpha.col_vars)} is not the preimage {sorted(pre)}")
            continue
        if any(v not in base for v in alpha.col_vars):
            continue
        expected = (high.var(h).size, base.space(alpha.col_vars).size)
        if alpha.shape != expected:
            problems.append(f"{h}: alpha shape {alpha.shape}, expected {expected}")
            continue
        problems.extend(alpha_matrix_problems(h, alpha.matrix))
    for h in abs_.alphas:
        if h not in high:
            problems.append(f"{h}: alpha for unknown high-level variable")
    return problems


def alpha_for_set(abs_: Abstraction, x_set: Sequence[str]) -> StochasticMatrix:
    """Kronecker product of the per-variable alphas, in the order of ``x_set``.

    Callers pass ``x_set`` in canonical high-level order; the low-level column
    order is the concatenation of each variable's preimage.
    """
    x_set = tuple(x_set)
    if not x_set:
        raise ValueError("alpha_for_set needs a non-empty set")
    missing = [h for h in x_set if h not in abs_.alphas]
    if missing:
        raise AbstractionError(f"alpha not specified for {missing}")
    mats = [abs_.alphas[h].matrix for h in x_set]
    return StochasticMatrix(
        reduce(np.kron, mats), row_vars=x_set, col_vars=abs_.low_vars(x_set)
    )


def pseudo_inverse(alpha, exact: bool = False):
    """Moore-Penrose inverse of a binary surjection: the uniform pullback.

    For such matrices ``alpha @ alpha.T`` is diagonal with the row counts, so
    the inverse reduces to the transpose with each column divided by the
    corresponding row sum of ``alpha``.

    With ``exact=True`` the result is an object array of
    :class:`fractions.Fraction`, for checks that must not round.
    """
    if isinstance(alpha, StochasticMatrix):
        inv = pseudo_inverse(alpha.matrix, exact)
        return StochasticMatrix(inv, row_vars=alpha.col_vars, col_vars=alpha.row_vars)
    a = np.asarray(alpha, dtype=float)
    counts = a.sum(axis=1)
    if (counts == 0).any():
        raise AbstractionError(f"rows {np.flatnonzero(counts == 0).tolist()} are empty: not surjective")
    if exact:
        out = np.empty(a.T.shape, dtype=object)
        for (i, j), v in np.ndenumerate(a.T):
            out[i, j] = Fraction(int(v), int(counts[j]))
        return out
    return a.T / counts[None, :]


def compose_abstractions(beta: Abstraction, alpha: Abstraction) -> Abstraction:
    """The abstraction ``beta . alpha`` from the base of ``alpha`` to the high model of ``beta``."""
    alpha_image = set(alpha.var_map.values())
    unknown = [v for v in beta.relevant if v not in alpha_image]
    if unknown:
        raise AbstractionError(f"beta's relevant variables {unknown} are not in alpha's high-level model")
    relevant = tuple(r for r in alpha.relevant if alpha.var_map[r] in beta.relevant)
    var_map = {r: beta.var_map[alpha.var_map[r]] for r in relevant}
    alphas = {}
    for h2, b in beta.alphas.items():
        inner = alpha_for_set(alpha, b.col_vars)
        if b.cols != inner.rows:
            raise AbstractionError(f"{h2}: beta alpha has {b.cols} columns, alpha lifts to {inner.rows}")
        alphas[h2] = StochasticMatrix(b.matrix @ inner.matrix, row_vars=(h2,), col_vars=inner.col_vars)
    return Abstraction(relevant, var_map, alphas)


def _reachability(scm: Scm) -> dict[str, set[str]]:
    return {n: descendants(scm, n) for n in scm.names}


def order_violations(abs_: Abstraction, base: Scm, high: Scm) -> list[tuple[str, str]]:
    """Pairs ``(X, Y)`` of relevant variables with ``X < Y`` but ``a(Y) < a(X)``.

    Uses full transitive reachability on both graphs, so the cost is
    ``O(|V| (|V| + |E|))`` rather than linear in the edges.
    """
    low = _reachability(base)
    hi = _reachability(high)
    bad = []
    for x in abs_.relevant:
        for y in low[x]:
            if y in abs_.var_map and abs_.var_map[x] in hi[abs_.var_map[y]]:
                bad.append((x, y))
    return bad


def is_order_preserving(abs_: Abstraction, base: Scm, high: Scm) -> bool:
    return not order_violations(abs_, base, high)


# -- JSON ------------------------------------------------------------------

def abstraction_from_dict(data: Mapping) -> Abstraction:
    try:
        relevant = tuple(data["relevant"])
        var_map = dict(data["map"])
        alphas = {
            h: binary_alpha(spec["matrix"], h, spec["low_order"])
            for h, spec in (data.get("alphas") or {}).items()
            if spec is not None
        }
    except (KeyError, TypeError) as exc:
        raise AbstractionError(f"malformed abstraction description: missing or bad field {exc}") from exc
    return Abstraction(relevant, var_map, alphas)


def abstraction_to_dict(abs_: Abstraction) -> dict:
    return {
        "relevant": list(abs_.relevant),
        "map": dict(abs_.var_map),
        "alphas": {
            h: {"low_order": list(a.col_vars), "matrix": a.matrix.astype(int).tolist()}
            for h, a in abs_.alphas.items()
        },
    }


def load_abstraction(path) -> Abstraction:
    with open(Path(path)) as fh:
        return abstraction_from_dict(json.load(fh))


def save_abstraction(abs_: Abstraction, path) -> None:
    with open(path, "w") as fh:
        json.dump(abstraction_to_dict(abs_), fh, indent=2)
        fh.write("\n")
