"""Slow reference implementations that share no arithmetic with the package.

Joints are built by looping over every outcome tuple, lifted alphas are
assembled entry by entry, pseudo-inverses come from the SVD and distances
from scipy.
"""
from __future__ import annotations

import itertools

import numpy as np
from scipy.spatial.distance import jensenshannon


def brute_joint(scm, do=None):
    """Dict from outcome-index tuples (declaration order) to probability."""
    do = do or {}
    names = scm.names
    sizes = [scm.var(n).size for n in names]
    out = {}
    for t in itertools.product(*(range(s) for s in sizes)):
        x = dict(zip(names, t))
        if any(x[k] != v for k, v in do.items()):
            continue
        p = 1.0
        for n in names:
            if n in do:
                continue
            mech = scm.mechanisms[n]
            col = 0
            for par in mech.col_vars:
                col = col * scm.var(par).size + x[par]
            p *= float(mech.matrix[x[n], col])
        out[t] = p
    return out


def brute_interventional(scm, xs, ys):
    names = scm.names
    xsz = [scm.var(v).size for v in xs]
    ysz = [scm.var(v).size for v in ys]
    cols = []
    for xv in itertools.product(*(range(s) for s in xsz)):
        joint = brute_joint(scm, dict(zip(xs, xv)))
        col = np.zeros(int(np.prod(ysz)))
        for t, p in joint.items():
            x = dict(zip(names, t))
            idx = 0
            for v, s in zip(ys, ysz):
                idx = idx * s + x[v]
            col[idx] += p
        cols.append(col)
    return np.array(cols).T


def brute_lift(alpha_list):
    """Lift per-variable alphas to the product space without ``np.kron``."""
    rows = [a.shape[0] for a in alpha_list]
    cols = [a.shape[1] for a in alpha_list]
    out = np.zeros((int(np.prod(rows)), int(np.prod(cols))))
    for lo in itertools.product(*(range(c) for c in cols)):
        hi = [int(np.argmax(a[:, j])) for a, j in zip(alpha_list, lo)]
        r = int(np.ravel_multi_index(hi, rows))
        c = int(np.ravel_multi_index(lo, cols))
        out[r, c] = 1.0
    return out


def svd_pinv(a):
    return np.linalg.pinv(a)


def scipy_distance(a, b):
    a = np.asarray(a, float).reshape(len(a), -1)
    b = np.asarray(b, float).reshape(len(b), -1)
    return max(float(jensenshannon(a[:, j], b[:, j])) for j in range(a.shape[1]))


def brute_pair_error(kind, base, high, abs_, x, y):
    """Per-pair error recomputed from scratch."""
    x, y = high.ordered(x), high.ordered(y)
    lx = [v for h in x for v in abs_.alphas[h].col_vars]
    ly = [v for h in y for v in abs_.alphas[h].col_vars]
    mu = brute_interventional(base, lx, ly)
    nu = brute_interventional(high, x, y)
    ax = brute_lift([abs_.alphas[h].matrix for h in x])
    ay = brute_lift([abs_.alphas[h].matrix for h in y])
    if kind == "ic":
        return scipy_distance(ay @ mu, nu @ ax)
    if kind == "iil":
        return scipy_distance(mu, svd_pinv(ay) @ nu @ ax)
    if kind == "isil":
        return scipy_distance(nu, ay @ mu @ svd_pinv(ax))
    return scipy_distance(svd_pinv(ay) @ nu, mu @ svd_pinv(ax))


def all_surjections(m, n):
    """Surjections as assignment words, by filtering every function."""
    return [w for w in itertools.product(range(n), repeat=m) if set(w) == set(range(n))]
