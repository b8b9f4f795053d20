"""Finite discrete structural causal models.

Mechanisms are stored as column-stochastic matrices: rows index the outcomes
of the child, columns index the joint outcomes of its parents in flat order
(first parent slowest, last parent fastest).
"""
from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from math import prod
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

STOCHASTIC_TOL = 1e-9


class ScmError(ValueError):
    """Raised when a model is structurally unusable."""


class CycleError(ScmError):
    pass


@dataclass(frozen=True)
class Variable:
    name: str
    outcomes: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "outcomes", tuple(str(o) for o in self.outcomes))

    @property
    def size(self) -> int:
        return len(self.outcomes)


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """A stochastic function between two finite outcome spaces.

    ``matrix[i, j]`` is the probability of output ``i`` given input ``j``;
    the flat indices are interpreted over ``row_vars`` and ``col_vars``.
    """

    matrix: np.ndarray
    row_vars: tuple[str, ...] = ()
    col_vars: tuple[str, ...] = ()
    source: str = ""

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim == 1:
            m = m[:, None]
        if m.ndim != 2:
            raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "row_vars", tuple(self.row_vars))
        object.__setattr__(self, "col_vars", tuple(self.col_vars))

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def bad_columns(self, tol: float = STOCHASTIC_TOL) -> list[int]:
        """Indices of columns that are not probability vectors."""
        m = self.matrix
        sums = m.sum(axis=0)
        bad = (np.abs(sums - 1.0) > tol) | (m < 0).any(axis=0)
        return [int(j) for j in np.flatnonzero(bad)]

    def __eq__(self, other):
        if not isinstance(other, StochasticMatrix):
            return NotImplemented
        return (
            self.row_vars == other.row_vars
            and self.col_vars == other.col_vars
            and self.matrix.shape == other.matrix.shape
            and np.array_equal(self.matrix, other.matrix)
        )

    __hash__ = None

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


class OutcomeIndex:
    """Flat indexing of the Cartesian product of variable outcome sets.

    The first variable varies slowest, the last fastest.

    >>> idx = OutcomeIndex(("A", "B"), (3, 2))
    >>> idx.encode((2, 1))
    5
    >>> idx.decode(5)
    (2, 1)
    """

    def __init__(self, variables: Sequence[str], sizes: Sequence[int]):
        if len(variables) != len(sizes):
            raise ValueError("variables and sizes differ in length")
        self.variables = tuple(variables)
        self.sizes = tuple(int(s) for s in sizes)

    @property
    def size(self) -> int:
        return prod(self.sizes)

    def encode(self, values: Sequence[int]) -> int:
        flat = 0
        for v, d in zip(values, self.sizes, strict=True):
            if not 0 <= v < d:
                raise IndexError(f"outcome {v} out of range for domain size {d}")
            flat = flat * d + int(v)
        return flat

    def decode(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.size:
            raise IndexError(f"flat index {index} out of range [0, {self.size})")
        out = []
        for d in reversed(self.sizes):
            index, r = divmod(index, d)
            out.append(r)
        return tuple(reversed(out))

    def encode_many(self, columns: Sequence[np.ndarray]) -> np.ndarray:
        if not self.sizes:
            n = len(columns[0]) if columns else 1
            return np.zeros(n, dtype=np.int64)
        return np.ravel_multi_index(tuple(columns), self.sizes)

    def decode_many(self, flat: np.ndarray) -> tuple[np.ndarray, ...]:
        return np.unravel_index(np.asarray(flat), self.sizes)


@dataclass(frozen=True)
class Scm:
    """A finite DAG model with one conditional stochastic matrix per variable.

    Declaration order of ``variables`` is the canonical order used by every
    flat index in the package.
    """

    variables: tuple[Variable, ...]
    edges: tuple[tuple[str, str], ...]
    mechanisms: Mapping[str, StochasticMatrix]
    name: str = ""
    _index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "edges", tuple((str(a), str(b)) for a, b in self.edges))
        object.__setattr__(self, "mechanisms", MappingProxyType(dict(self.mechanisms)))
        object.__setattr__(
            self, "_index", MappingProxyType({v.name: i for i, v in enumerate(self.variables)})
        )

    __hash__ = None

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def sizes(self) -> dict[str, int]:
        return {v.name: v.size for v in self.variables}

    def var(self, name: str) -> Variable:
        try:
            return self.variables[self._index[name]]
        except KeyError:
            raise KeyError(f"unknown variable {name!r} in model {self.name or '<unnamed>'}") from None

    def index(self, name: str) -> int:
        return self._index[name]

    def __contains__(self, name) -> bool:
        return name in self._index

    def parents(self, name: str) -> tuple[str, ...]:
        """Parents in mechanism column order (falls back to edge order)."""
        mech = self.mechanisms.get(name)
        if mech is not None:
            return mech.col_vars
        return tuple(a for a, b in self.edges if b == name)

    def children(self, name: str) -> tuple[str, ...]:
        return tuple(b for a, b in self.edges if a == name)

    def outcome_index(self, name: str, label) -> int:
        outcomes = self.var(name).outcomes
        try:
            return outcomes.index(str(label))
        except ValueError:
            raise ValueError(
                f"{label!r} is not an outcome of {name} (domain {list(outcomes)})"
            ) from None

    def space(self, names: Sequence[str] | None = None) -> OutcomeIndex:
        names = self.names if names is None else tuple(names)
        return OutcomeIndex(names, [self.var(n).size for n in names])

    def ordered(self, names: Iterable[str]) -> tuple[str, ...]:
        """``names`` sorted into canonical declaration order."""
        names = set(names)
        for n in names:
            self.var(n)
        return tuple(n for n in self.names if n in names)


def validate_scm(scm: Scm) -> list[str]:
    """Return every invariant violation of ``scm`` as a message naming the variable."""
    problems: list[str] = []
    seen: set[str] = set()
    for v in scm.variables:
        if v.name in seen:
            problems.append(f"{v.name}: duplicate variable name")
        seen.add(v.name)
        if not v.outcomes:
            problems.append(f"{v.name}: empty outcome list")
        if len(set(v.outcomes)) != len(v.outcomes):
            problems.append(f"{v.name}: outcome labels not unique")

    for a, b in scm.edges:
        for n in (a, b):
            if n not in seen:
                problems.append(f"{n}: edge ({a}, {b}) references unknown variable")
    if len(set(scm.edges)) != len(scm.edges):
        problems.append("duplicate edges")

    try:
        topological_order(scm)
    except CycleError as exc:
        problems.append(str(exc))

    for name in scm.mechanisms:
        if name not in seen:
            problems.append(f"{name}: mechanism for unknown variable")
    for v in scm.variables:
        mech = scm.mechanisms.get(v.name)
        if mech is None:
            problems.append(f"{v.name}: missing mechanism")
            continue
        edge_parents = {a for a, b in scm.edges if b == v.name}
        if set(mech.col_vars) != edge_parents or len(mech.col_vars) != len(edge_parents):
            problems.append(
                f"{v.name}: mechanism parents {list(mech.col_vars)} do not match "
                f"edge parents {sorted(edge_parents)}"
            )
            continue
        expected = (v.size, prod(scm.var(p).size for p in mech.col_vars))
        if mech.shape != expected:
            problems.append(f"{v.name}: mechanism shape {mech.shape}, expected {expected}")
            continue
        for j in mech.bad_columns():
            s = mech.matrix[:, j].sum()
            problems.append(f"{v.name}: column {j} not stochastic (sum={s:.12g})")
    return problems


def check_scm(scm: Scm) -> Scm:
    problems = validate_scm(scm)
    if problems:
        raise ScmError("invalid model: " + "; ".join(problems))
    return scm


def topological_order(scm: Scm) -> list[str]:
    """Kahn's algorithm; ready nodes are released in declaration order."""
    names = [v.name for v in scm.variables]
    pos = {n: i for i, n in enumerate(names)}
    indeg = {n: 0 for n in names}
    succ: dict[str, list[str]] = {n: [] for n in names}
    for a, b in scm.edges:
        if a in pos and b in pos:
            succ[a].append(b)
            indeg[b] += 1
    heap = [pos[n] for n in names if indeg[n] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        n = names[heapq.heappop(heap)]
        order.append(n)
        for c in succ[n]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(heap, pos[c])
    if len(order) < len(names):
        stuck = next(n for n in names if indeg[n] > 0)
        raise CycleError(f"{stuck}: cycle detected")
    return order


def descendants(scm: Scm, name: str) -> set[str]:
    """Nodes reachable from ``name`` by a directed path of length >= 1."""
    out: set[str] = set()
    stack = list(scm.children(name))
    while stack:
        n = stack.pop()
        if n not in out:
            out.add(n)
            stack.extend(scm.children(n))
    return out


def _mechanism_tensor(scm: Scm, name: str) -> np.ndarray:
    """The mechanism reshaped to broadcast against the full joint tensor."""
    mech = scm.mechanisms[name]
    axes = (name,) + mech.col_vars
    t = mech.matrix.reshape([scm.var(a).size for a in axes])
    order = sorted(range(len(axes)), key=lambda k: scm.index(axes[k]))
    t = np.transpose(t, order)
    present = {scm.index(a) for a in axes}
    shape = [v.size if i in present else 1 for i, v in enumerate(scm.variables)]
    return t.reshape(shape)


def joint_distribution(scm: Scm) -> np.ndarray:
    """Exact joint over all variables, flattened in canonical order."""
    shape = tuple(v.size for v in scm.variables)
    joint = np.ones(shape)
    for v in scm.variables:
        joint = joint * _mechanism_tensor(scm, v.name)
    return joint.ravel()


def marginal(
    joint: np.ndarray,
    from_vars: Sequence[str],
    to_vars: Sequence[str],
    sizes: Mapping[str, int],
) -> np.ndarray:
    """Marginalise a flat distribution over ``from_vars`` onto ``to_vars``.

    ``to_vars`` may list any subset of ``from_vars`` in any order; the result
    is flattened in the order given.
    """
    from_vars = tuple(from_vars)
    to_vars = tuple(to_vars)
    for n in to_vars:
        if n not in from_vars:
            raise KeyError(f"unknown variable {n!r}; available: {list(from_vars)}")
    if len(set(to_vars)) != len(to_vars):
        raise ValueError("repeated variable in to_vars")
    t = np.asarray(joint, dtype=float).reshape([sizes[n] for n in from_vars])
    drop = tuple(i for i, n in enumerate(from_vars) if n not in to_vars)
    if drop:
        t = t.sum(axis=drop)
    kept = [n for n in from_vars if n in to_vars]
    t = np.transpose(t, [kept.index(n) for n in to_vars])
    return t.ravel()


# -- JSON ------------------------------------------------------------------

def scm_from_dict(data: Mapping, name: str = "") -> Scm:
    try:
        variables = tuple(Variable(v["name"], tuple(v["outcomes"])) for v in data["variables"])
        edges = tuple(tuple(e) for e in data.get("edges", ()))
        mechanisms = {}
        for child, spec in data["mechanisms"].items():
            mechanisms[child] = StochasticMatrix(
                np.array(spec["matrix"], dtype=float),
                row_vars=(child,),
                col_vars=tuple(spec.get("parents", ())),
            )
    except (KeyError, TypeError) as exc:
        raise ScmError(f"malformed model description: missing or bad field {exc}") from exc
    return Scm(variables, edges, mechanisms, name=data.get("name", name))


def scm_to_dict(scm: Scm) -> dict:
    out = {}
    if scm.name:
        out["name"] = scm.name
    out["variables"] = [{"name": v.name, "outcomes": list(v.outcomes)} for v in scm.variables]
    out["edges"] = [list(e) for e in scm.edges]
    out["mechanisms"] = {
        n: {"parents": list(m.col_vars), "matrix": m.matrix.tolist()}
        for n, m in scm.mechanisms.items()
    }
    return out


def load_scm(path) -> Scm:
    path = Path(path)
    with open(path) as fh:
        data = json.load(fh)
    return scm_from_dict(data, name=path.stem)


def save_scm(scm: Scm, path) -> None:
    with open(path, "w") as fh:
        json.dump(scm_to_dict(scm), fh, indent=2)
        fh.write("\n")
