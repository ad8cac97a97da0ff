"""Gauss-Legendre rules on (-a, a), plain and endpoint-graded."""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def _leggauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n, lo, hi):
    """n-point Gauss-Legendre nodes and weights on [lo, hi]."""
    x, w = _leggauss(n)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def graded_rule(a, levels=48, order=20, interior_panels=8):
    """Composite rule on (-a, a) with geometric panels toward both endpoints.

    Panels adjacent to -a are ``[-a + a 2^-(k+1), -a + a 2^-k]`` for
    ``k = 1..levels`` (mirrored at +a); the middle ``[-a/2, a/2]`` is split into
    ``interior_panels`` equal pieces and coarser geometric panels are subdivided
    to the same width. Integrands behaving like ``ln(a -+ t)``
    near the endpoints are integrated to near machine precision; the mass
    lost below ``a 2^-(levels+1)`` is of order ``2^-levels |ln 2^-levels|``.
    """
    geometric = [a * 2.0 ** (-k) for k in range(levels + 1, 0, -1)]
    width = a / interior_panels
    edges = [geometric[0]]
    for lo, hi in zip(geometric[:-1], geometric[1:]):
        pieces = max(1, int(np.ceil((hi - lo) / width - 1e-9)))
        edges.extend(np.linspace(lo, hi, pieces + 1)[1:])
    nodes, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre(order, lo, hi)
        nodes.append(-a + x)
        weights.append(w)
    mids = np.linspace(-a / 2, a / 2, interior_panels + 1)
    for lo, hi in zip(mids[:-1], mids[1:]):
        x, w = gauss_legendre(order, lo, hi)
        nodes.append(x)
        weights.append(w)
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre(order, lo, hi)
        nodes.append(a - x)
        weights.append(w)
    nodes = np.concatenate(nodes)
    weights = np.concatenate(weights)
    order_ = np.argsort(nodes)
    return nodes[order_], weights[order_]
