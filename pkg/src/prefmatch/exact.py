"""Exact rational helpers: parsing, formatting, linear solves and a small simplex."""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence

Q = Fraction

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"a/b"`` or an integer literal. Decimals are rejected on purpose."""
    token = text.strip()
    if not _RATIONAL.match(token):
        raise ValueError(f"not a rational literal: {text!r}")
    value = Fraction(token)
    return value


def as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def fmt(value: Fraction) -> str:
    """Render as ``numerator/denominator`` (always both parts)."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def fmt_short(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b) if x and y), Fraction(0))


def bilinear(x: Sequence[Fraction], table: Sequence[Sequence[Fraction]], y: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for i, xi in enumerate(x):
        if not xi:
            continue
        row = table[i]
        acc = Fraction(0)
        for j, yj in enumerate(y):
            if yj and row[j]:
                acc += row[j] * yj
        total += xi * acc
    return total


def solve_square(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Solve a square system exactly; ``None`` when singular.

    Rows are scaled to integers and reduced with fraction-free (Bareiss)
    elimination, which keeps all intermediate values as Python ints.
    """
    n = len(matrix)
    if n == 0:
        return []
    rows: list[list[int]] = []
    for coeffs, b in zip(matrix, rhs):
        entries = list(coeffs) + [b]
        lcm = 1
        for e in entries:
            d = Fraction(e).denominator
            if d != 1:
                lcm = lcm * d // _gcd(lcm, d)
        rows.append([int(Fraction(e) * lcm) for e in entries])
    prev = 1
    for k in range(n):
        pivot = None
        for r in range(k, n):
            if rows[r][k] != 0:
                pivot = r
                break
        if pivot is None:
            return None
        if pivot != k:
            rows[k], rows[pivot] = rows[pivot], rows[k]
        pk = rows[k]
        akk = pk[k]
        for r in range(k + 1, n):
            rr = rows[r]
            ark = rr[k]
            for c in range(k + 1, n + 1):
                rr[c] = (rr[c] * akk - pk[c] * ark) // prev
            rr[k] = 0
        prev = akk
    sol: list[Fraction] = [Fraction(0)] * n
    for k in range(n - 1, -1, -1):
        acc = Fraction(rows[k][n])
        for c in range(k + 1, n):
            if rows[k][c]:
                acc -= rows[k][c] * sol[c]
        sol[k] = acc / rows[k][k]
    return sol


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


# --------------------------------------------------------------------------
# exact simplex

class LPResult:
    __slots__ = ("status", "x", "value")

    def __init__(self, status: str, x: list[Fraction] | None = None, value: Fraction | None = None):
        self.status = status
        self.x = x
        self.value = value

    def __repr__(self) -> str:
        return f"LPResult({self.status!r}, value={self.value})"


def lp_maximize(
    objective: Sequence[Fraction],
    a_ub: Iterable[Sequence[Fraction]] = (),
    b_ub: Iterable[Fraction] = (),
    a_eq: Iterable[Sequence[Fraction]] = (),
    b_eq: Iterable[Fraction] = (),
) -> LPResult:
    """Maximize ``c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``.

    Two-phase tableau simplex with Bland's rule, entirely in ``Fraction``.
    Status is one of ``optimal``, ``infeasible`` or ``unbounded``.
    """
    c = [Fraction(v) for v in objective]
    n = len(c)
    ub = [([Fraction(v) for v in row], Fraction(b)) for row, b in zip(a_ub, b_ub)]
    eq = [([Fraction(v) for v in row], Fraction(b)) for row, b in zip(a_eq, b_eq)]
    n_slack = len(ub)
    # Build equality rows over x, slacks, artificials.
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    basis: list[int] = []
    artificial: list[int] = []
    total = n + n_slack
    pending: list[tuple[list[Fraction], Fraction]] = []
    for k, (coeffs, b) in enumerate(ub):
        row = coeffs + [Fraction(0)] * n_slack
        row[n + k] = Fraction(1)
        pending.append((row, b))
    for coeffs, b in eq:
        pending.append((coeffs + [Fraction(0)] * n_slack, b))
    n_art = 0
    for idx, (row, b) in enumerate(pending):
        if b < 0:
            row = [-v for v in row]
            b = -b
        is_slack_row = idx < n_slack and row[n + idx] == 1
        rows.append(row)
        rhs.append(b)
        if is_slack_row:
            basis.append(n + idx)
        else:
            basis.append(-1)
            n_art += 1
    width = total + n_art
    art_col = total
    for r in range(len(rows)):
        rows[r] = rows[r] + [Fraction(0)] * n_art
        if basis[r] == -1:
            rows[r][art_col] = Fraction(1)
            basis[r] = art_col
            artificial.append(art_col)
            art_col += 1

    def pivot(pr: int, pc: int) -> None:
        prow = rows[pr]
        pv = prow[pc]
        if pv != 1:
            rows[pr] = prow = [v / pv for v in prow]
            rhs[pr] = rhs[pr] / pv
        for r in range(len(rows)):
            if r == pr:
                continue
            f = rows[r][pc]
            if f:
                rr = rows[r]
                rows[r] = [a - f * b if b else a for a, b in zip(rr, prow)]
                rhs[r] = rhs[r] - f * rhs[pr]
        basis[pr] = pc

    def run(cost: list[Fraction], allowed: int) -> str:
        while True:
            # reduced costs for maximization: cost_j - cost_B . column_j
            entering = -1
            for j in range(allowed):
                if j in basis:
                    continue
                rc = cost[j]
                for r, bj in enumerate(basis):
                    cb = cost[bj] if bj < len(cost) else Fraction(0)
                    if cb and rows[r][j]:
                        rc -= cb * rows[r][j]
                if rc > 0:
                    entering = j
                    break
            if entering < 0:
                return "optimal"
            best_r = -1
            best_ratio: Fraction | None = None
            for r in range(len(rows)):
                a = rows[r][entering]
                if a > 0:
                    ratio = rhs[r] / a
                    if best_ratio is None or ratio < best_ratio or (ratio == best_ratio and basis[r] < basis[best_r]):
                        best_ratio = ratio
                        best_r = r
            if best_r < 0:
                return "unbounded"
            pivot(best_r, entering)

    if artificial:
        phase1 = [Fraction(0)] * width
        for a in artificial:
            phase1[a] = Fraction(-1)
        run(phase1, width)
        infeas = sum((rhs[r] for r, b in enumerate(basis) if b >= total), Fraction(0))
        if infeas > 0:
            return LPResult("infeasible")
        # drive remaining (zero-level) artificials out of the basis
        for r, b in enumerate(list(basis)):
            if b >= total:
                for j in range(total):
                    if rows[r][j] != 0 and j not in basis:
                        pivot(r, j)
                        break
        keep = [r for r, b in enumerate(basis) if b < total]
        rows[:] = [rows[r][:total] for r in keep]
        rhs[:] = [rhs[r] for r in keep]
        basis[:] = [basis[r] for r in keep]
    else:
        for r in range(len(rows)):
            rows[r] = rows[r][:total]
    cost = c + [Fraction(0)] * n_slack
    status = run(cost, total)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [Fraction(0)] * total
    for r, b in enumerate(basis):
        x[b] = rhs[r]
    value = sum((c[j] * x[j] for j in range(n)), Fraction(0))
    return LPResult("optimal", x[:n], value)


def interior_point(
    n: int,
    strict: Sequence[tuple[Sequence[Fraction], Fraction]],
    weak: Sequence[tuple[Sequence[Fraction], Fraction]] = (),
    simplex: bool = True,
) -> list[Fraction] | None:
    """Find ``w >= 0`` (summing to 1 when ``simplex``) with ``a.w > b`` for
    every strict pair and ``a.w <= b`` for every weak pair.

    Returns a point maximizing the smallest strict slack (capped at 1), or
    ``None`` when no such point exists.
    """
    # variables: w_0..w_{n-1}, s  (s = common strict slack, 0 <= s <= 1)
    obj = [Fraction(0)] * n + [Fraction(1)]
    a_ub: list[list[Fraction]] = []
    b_ub: list[Fraction] = []
    for coeffs, bound in strict:
        a_ub.append([-Fraction(v) for v in coeffs] + [Fraction(1)])
        b_ub.append(-Fraction(bound))
    for coeffs, bound in weak:
        a_ub.append([Fraction(v) for v in coeffs] + [Fraction(0)])
        b_ub.append(Fraction(bound))
    a_ub.append([Fraction(0)] * n + [Fraction(1)])
    b_ub.append(Fraction(1))
    a_eq: list[list[Fraction]] = []
    b_eq: list[Fraction] = []
    if simplex:
        a_eq.append([Fraction(1)] * n + [Fraction(0)])
        b_eq.append(Fraction(1))
    res = lp_maximize(obj, a_ub, b_ub, a_eq, b_eq)
    if res.status != "optimal" or res.value is None or res.value <= 0:
        return None
    return res.x[:n]
