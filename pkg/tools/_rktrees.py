"""Rooted trees and Runge-Kutta order-condition residuals (exact or mpmath)."""

from __future__ import annotations

import functools


@functools.lru_cache(maxsize=None)
def trees(order: int) -> tuple:
    """All rooted trees with ``order`` nodes, each a sorted tuple of child trees."""
    if order == 1:
        return ((),)
    found = set()

    def rec(rem, acc):
        if rem == 0:
            found.add(tuple(sorted(acc)))
            return
        for s in range(1, rem + 1):
            for t in trees(s):
                rec(rem - s, acc + [t])

    rec(order - 1, [])
    return tuple(sorted(found))


def density(t) -> int:
    g = 1 + sum(_size(c) for c in t)
    for c in t:
        g *= density(c)
    return g


def _size(t) -> int:
    return 1 + sum(_size(c) for c in t)


def residuals(a, b, max_order: int, one=1):
    """Residuals ``b . Phi(t) - 1/gamma(t)`` for every tree up to ``max_order``.

    ``a`` is a square nested list, ``b`` a list; entries may be Fractions or
    mpmath numbers. ``one`` fixes the number type used for ``1/gamma``.
    """
    s = len(b)
    memo = {}

    def phi(t):
        if t in memo:
            return memo[t]
        v = [one] * s
        for ch in t:
            w = phi(ch)
            aw = [sum(a[i][j] * w[j] for j in range(i)) for i in range(s)]
            v = [v[i] * aw[i] for i in range(s)]
        memo[t] = v
        return v

    out = []
    for n in range(1, max_order + 1):
        for t in trees(n):
            v = phi(t)
            out.append((n, sum(b[i] * v[i] for i in range(s)) - one / density(t)))
    return out
