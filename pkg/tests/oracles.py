"""Independent reference computations used by the tests.

Nothing here calls the package's equilibrium or stability code.
"""

from fractions import Fraction
from itertools import product

F = Fraction


def _indifference(a0, a1, b0, b1):
    """Weight w on the first strategy making w*a0+(1-w)*a1 == w*b0+(1-w)*b1, if unique and interior."""
    den = (a0 - a1) - (b0 - b1)
    if den == 0:
        return None
    w = F(b1 - a1, 1) / den
    return w if 0 < w < 1 else None


def ne_2x2(row, col):
    """Extreme equilibria of a 2x2 game by closed form.

    ``row[i][j]`` is the row player's utility, ``col[j][i]`` the column
    player's (same convention as the package).  Each player's candidate
    strategies are the two pure strategies plus the mix that makes the
    opponent indifferent; the equilibria among candidate pairs are exactly
    the completely labelled vertex pairs.
    Returns {((x0, x1), (y0, y1)): (row value, col value)}.
    """
    p = _indifference(col[0][0], col[0][1], col[1][0], col[1][1])
    q = _indifference(row[0][0], row[0][1], row[1][0], row[1][1])
    xs = [F(1), F(0)] + ([p] if p is not None else [])
    ys = [F(1), F(0)] + ([q] if q is not None else [])
    out = {}
    for x, y in product(xs, ys):
        xv, yv = (x, 1 - x), (y, 1 - y)
        r = [sum(row[i][j] * yv[j] for j in range(2)) for i in range(2)]
        c = [sum(col[j][i] * xv[i] for i in range(2)) for j in range(2)]
        rv = sum(xv[i] * r[i] for i in range(2))
        cv = sum(yv[j] * c[j] for j in range(2))
        if rv == max(r) and cv == max(c):
            out[(xv, yv)] = (rv, cv)
    return out


def best_ne_values(row, col):
    """All extreme equilibrium value pairs (enough for blocking checks)."""
    return list(ne_2x2(row, col).values())


def stable_2x2(tables, mu, entries):
    """Brute-force Nash stability for two types over a 2x2 strategy set.

    ``tables[(a, b)]`` is type a's utility table against type b;
    ``mu[(a, b)]`` the matching shares; ``entries[(a, b)]`` a pair of weight
    tuples with a's strategy first.
    """
    types = ("theta", "tau")
    status = {}
    for (a, b), (x, y) in entries.items():
        for me, opp, mine, theirs in ((a, b, x, y), (b, a, y, x)):
            t = tables[(me, opp)]
            vals = [sum(t[i][j] * theirs[j] for j in range(2)) for i in range(2)]
            mine_val = sum(mine[i] * vals[i] for i in range(2))
            if mine_val != max(vals):
                return False
            status.setdefault(me, []).append(mine_val)
    for a in types:
        for b in types:
            if a not in status or b not in status:
                continue
            for va, vb in best_ne_values(tables[(a, b)], tables[(b, a)]):
                if any(va > s for s in status[a]) and any(vb > s for s in status[b]):
                    return False
    return True
