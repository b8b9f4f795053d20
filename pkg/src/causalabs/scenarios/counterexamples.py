"""Small models where errors on parts vanish but the composite error does not."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..abstraction import Abstraction, binary_alpha
from ..scm import Scm, StochasticMatrix, Variable

_BIN = ("0", "1")


class Counterexample(NamedTuple):
    base: Scm
    high: Scm
    abstraction: Abstraction
    parts: tuple
    whole: tuple


def _bern(p1) -> np.ndarray:
    p1 = np.asarray(p1, dtype=float)
    return np.vstack([1 - p1, p1])


def _mech(child, parents, matrix) -> StochasticMatrix:
    return StochasticMatrix(np.asarray(matrix, dtype=float), (child,), tuple(parents))


def _renamed_identity(pairs) -> Abstraction:
    return Abstraction(
        tuple(lo for lo, _ in pairs),
        dict(pairs),
        {hi: binary_alpha(np.eye(2), hi, (lo,)) for lo, hi in pairs},
    )


def vertical_fixture() -> Counterexample:
    """Chain ``X -> Y -> Z`` with a shortcut ``X -> Z`` abstracted onto a plain chain.

    The high model copies ``P(Y | X)`` and ``P(Z | do(Y))`` from the base, so
    both links have zero error, yet ``P(Z | do(X))`` differs because the
    shortcut is lost.
    """
    px = _bern([0.5])
    py_x = _bern([0.2, 0.7])
    pz_xy = _bern([0.1, 0.6, 0.5, 0.9])  # columns (x, y), x slowest
    base = Scm(
        tuple(Variable(n, _BIN) for n in ("X", "Y", "Z")),
        (("X", "Y"), ("X", "Z"), ("Y", "Z")),
        {"X": _mech("X", (), px), "Y": _mech("Y", ("X",), py_x), "Z": _mech("Z", ("X", "Y"), pz_xy)},
        name="vertical-base",
    )
    pz_do_y = pz_xy.reshape(2, 2, 2).transpose(0, 2, 1) @ px[:, 0]  # (z, y)
    high = Scm(
        tuple(Variable(n, _BIN) for n in ("X'", "Y'", "Z'")),
        (("X'", "Y'"), ("Y'", "Z'")),
        {"X'": _mech("X'", (), px), "Y'": _mech("Y'", ("X'",), py_x), "Z'": _mech("Z'", ("Y'",), pz_do_y)},
        name="vertical-high",
    )
    abs_ = _renamed_identity([("X", "X'"), ("Y", "Y'"), ("Z", "Z'")])
    parts = ((("X'",), ("Y'",)), (("Y'",), ("Z'",)))
    return Counterexample(base, high, abs_, parts, (("X'",), ("Z'",)))


def product_fixture() -> Counterexample:
    """Two effects ``W1, W2`` of ``X`` that share a hidden cause ``U``.

    The high model keeps each ``P(Wi | do(X))`` exactly but treats the
    effects as independent given ``X``, so the joint query on both fails.
    """
    pu = _bern([0.5])
    px = _bern([0.6])
    pw1 = _bern([0.1, 0.5, 0.8, 0.9])  # columns (u, x)
    pw2 = _bern([0.2, 0.6, 0.7, 0.95])
    base = Scm(
        tuple(Variable(n, _BIN) for n in ("U", "X", "W1", "W2")),
        (("U", "W1"), ("X", "W1"), ("U", "W2"), ("X", "W2")),
        {
            "U": _mech("U", (), pu),
            "X": _mech("X", (), px),
            "W1": _mech("W1", ("U", "X"), pw1),
            "W2": _mech("W2", ("U", "X"), pw2),
        },
        name="product-base",
    )

    def averaged(m):
        return m.reshape(2, 2, 2).transpose(0, 2, 1) @ pu[:, 0]  # (w, x)

    high = Scm(
        tuple(Variable(n, _BIN) for n in ("X'", "W1'", "W2'")),
        (("X'", "W1'"), ("X'", "W2'")),
        {
            "X'": _mech("X'", (), px),
            "W1'": _mech("W1'", ("X'",), averaged(pw1)),
            "W2'": _mech("W2'", ("X'",), averaged(pw2)),
        },
        name="product-high",
    )
    abs_ = _renamed_identity([("X", "X'"), ("W1", "W1'"), ("W2", "W2'")])
    parts = ((("X'",), ("W1'",)), (("X'",), ("W2'",)))
    return Counterexample(base, high, abs_, parts, (("X'",), ("W1'", "W2'")))
