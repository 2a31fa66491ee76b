"""Formal q-expansions with exact rational coefficients.

A series is a dict {exponent: coefficient} with Fraction exponents and
int/Fraction coefficients, truncated at a stated depth.  Only the small
amount of arithmetic needed for eta quotients and theta/eta divisions is
provided (multiply, invert, integer powers, eta and E8-theta expansions).
"""

from __future__ import annotations

from fractions import Fraction


class QSeries:
    """Truncated formal series  sum_k c_k q^k,  k rational, k <= depth."""

    def __init__(self, coeffs: dict, depth):
        self.depth = Fraction(depth)
        self.coeffs = {Fraction(k): v for k, v in coeffs.items()
                       if v != 0 and Fraction(k) <= self.depth}

    def __getitem__(self, k):
        return self.coeffs.get(Fraction(k), Fraction(0))

    def order(self) -> Fraction:
        if not self.coeffs:
            raise ValueError("zero series has no order")
        return min(self.coeffs)

    def __mul__(self, other: "QSeries") -> "QSeries":
        depth = min(self.depth + min(other.order(), 0),
                    other.depth + min(self.order(), 0))
        out: dict = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                k = k1 + k2
                if k <= depth:
                    out[k] = out.get(k, 0) + c1 * c2
        return QSeries(out, depth)

    def __add__(self, other: "QSeries") -> "QSeries":
        depth = min(self.depth, other.depth)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return QSeries(out, depth)

    def scale(self, c) -> "QSeries":
        return QSeries({k: c * v for k, v in self.coeffs.items()}, self.depth)

    def shift(self, dk) -> "QSeries":
        dk = Fraction(dk)
        return QSeries({k + dk: v for k, v in self.coeffs.items()}, self.depth + dk)

    def inverse(self) -> "QSeries":
        """1/self, valid when the lowest coefficient is invertible."""
        k0 = self.order()
        c0 = self.coeffs[k0]
        # normalize to 1 + positive-order tail
        tail = {k - k0: Fraction(v, 1) / c0 for k, v in self.coeffs.items() if k != k0}
        depth = self.depth - k0
        inv = {Fraction(0): Fraction(1)}
        # Newton-free direct recursion on sorted exponents
        exps = sorted(tail)
        grid = sorted({Fraction(0)} | _exponent_grid(exps, depth))
        for k in grid:
            if k == 0:
                continue
            acc = Fraction(0)
            for e in exps:
                if e > k:
                    break
                prev = inv.get(k - e)
                if prev is not None:
                    acc += tail[e] * prev
            if acc != 0:
                inv[k] = -acc
        inv = {k - k0: v / c0 for k, v in inv.items()}
        return QSeries(inv, depth - k0)

    def pow(self, n: int) -> "QSeries":
        if n < 0:
            return self.inverse().pow(-n)
        result = QSeries({0: Fraction(1)}, self.depth)
        for _ in range(n):
            result = result * self
        return result

    def items(self):
        return sorted(self.coeffs.items())


def _exponent_grid(exps, depth):
    """All sums of the generating exponents up to depth (bounded closure)."""
    grid = {Fraction(0)}
    frontier = {Fraction(0)}
    while frontier:
        new = set()
        for g in frontier:
            for e in exps:
                s = g + e
                if s <= depth and s not in grid:
                    grid.add(s)
                    new.add(s)
        frontier = new
    return grid


def eta_series(depth, scale=1) -> QSeries:
    """q^{scale/24} * prod (1 - q^{scale*n}) via the pentagonal number theorem."""
    scale = Fraction(scale)
    coeffs = {Fraction(0): 1}
    k = 1
    while True:
        e1 = Fraction(k * (3 * k - 1), 2) * scale
        e2 = Fraction(k * (3 * k + 1), 2) * scale
        if e1 > depth and e2 > depth:
            break
        sgn = -1 if k % 2 else 1
        if e1 <= depth:
            coeffs[e1] = coeffs.get(e1, 0) + sgn
        if e2 <= depth:
            coeffs[e2] = coeffs.get(e2, 0) + sgn
        k += 1
    return QSeries(coeffs, depth).shift(scale / 24)


def theta_a1_series(depth, k: int = 0) -> QSeries:
    """sum_n q^{(n + k/2)^2} as a formal series (exponents (n+k/2)^2)."""
    coeffs: dict = {}
    n = 0
    while True:
        e = Fraction((2 * n + k) ** 2, 4)
        if e > depth:
            break
        coeffs[e] = coeffs.get(e, 0) + (1 if (n == 0 and k == 0) else 2)
        n += 1
    return QSeries(coeffs, depth)


def e8_theta_series(depth) -> QSeries:
    """Theta series of positive definite E8: 1 + 240 q + 2160 q^2 + ...

    Coefficients are counted by brute-force enumeration of E8 vectors.
    """
    from .lattices import standard, rescale
    from .products import short_vectors
    e8_pos = rescale(standard("E_8"), -1)
    counts: dict = {}
    bound = 2 * int(depth)
    for v in short_vectors(e8_pos, bound=bound, include_zero=False):
        n = e8_pos.inner(v, v)
        counts[n] = counts.get(n, 0) + 1
    coeffs = {Fraction(0): 1}
    for n, c in counts.items():
        e = Fraction(n, 2)
        if e <= depth:
            coeffs[e] = c
    return QSeries(coeffs, depth)
