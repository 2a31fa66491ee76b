"""Integral lattices, standard constructors, and discriminant forms.

A lattice is a free Z-module with a non-degenerate integral symmetric
bilinear form, stored here as its Gram matrix (tuples of ints).  All
invariants are computed exactly:

* signature by rational symmetric diagonalization (Sylvester's law),
* the discriminant group A_L = L^v / L by Smith normal form with
  transform tracking, with the quadratic form q: A_L -> Q/2Z evaluated
  on explicit dual-lattice lifts,
* the 2-elementary invariants (r, l, delta) and the derived genus/curve
  counts g = 11 - (r+l)/2, k = (r-l)/2 for Lorentzian lattices.

Root lattices A_n, D_n, E_6, E_7, E_8 are negative definite throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import NotTwoElementaryError, OddLatticeError

Gram = tuple[tuple[int, ...], ...]


def _as_gram(rows: Sequence[Sequence[int]]) -> Gram:
    out = []
    for row in rows:
        r = []
        for x in row:
            if isinstance(x, bool) or not isinstance(x, (int,)):
                if isinstance(x, Fraction) and x.denominator == 1:
                    x = int(x)
                elif isinstance(x, float) and x.is_integer():
                    x = int(x)
                else:
                    raise ValueError(f"non-integer Gram entry {x!r}")
            r.append(int(x))
        out.append(tuple(r))
    return tuple(out)


def _det_int(rows: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix by fraction-free Bareiss elimination."""
    n = len(rows)
    if n == 0:
        return 1
    m = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class Lattice:
    """An integral lattice given by its Gram matrix."""

    gram: Gram
    label: Optional[str] = None

    @property
    def rank(self) -> int:
        return len(self.gram)

    def det(self) -> int:
        return _det_int(self.gram)

    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def inner(self, x: Sequence, y: Sequence):
        """Bilinear form <x, y> in lattice coordinates (exact for Fractions)."""
        n = self.rank
        return sum(x[i] * self.gram[i][j] * y[j] for i in range(n) for j in range(n))

    def gram_inverse(self) -> list[list[Fraction]]:
        """Exact inverse of the Gram matrix."""
        n = self.rank
        a = [[Fraction(self.gram[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
             for i in range(n)]
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col] != 0), None)
            if piv is None:
                raise ValueError("degenerate Gram matrix")
            a[col], a[piv] = a[piv], a[col]
            pv = a[col][col]
            a[col] = [x / pv for x in a[col]]
            for r in range(n):
                if r != col and a[r][col] != 0:
                    f = a[r][col]
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
        return [row[n:] for row in a]

    def __repr__(self) -> str:
        name = self.label or "Lattice"
        return f"{name}(rank={self.rank}, det={self.det()})"


def make_lattice(gram: Sequence[Sequence[int]], label: Optional[str] = None) -> Lattice:
    """Validate and build a lattice from a square integer Gram matrix."""
    n = len(gram)
    if any(len(row) != n for row in gram):
        raise ValueError("Gram matrix must be square")
    g = _as_gram(gram)
    for i in range(n):
        for j in range(i + 1, n):
            if g[i][j] != g[j][i]:
                raise ValueError(f"Gram matrix not symmetric at ({i},{j})")
    if _det_int(g) == 0:
        raise ValueError("degenerate lattice: det(gram) = 0")
    return Lattice(g, label)


# ---------------------------------------------------------------------------
# standard lattices
# ---------------------------------------------------------------------------

def _cartan_chain(n: int) -> list[list[int]]:
    c = [[0] * n for _ in range(n)]
    for i in range(n):
        c[i][i] = 2
        if i + 1 < n:
            c[i][i + 1] = c[i + 1][i] = -1
    return c


def _cartan_d(n: int) -> list[list[int]]:
    if n < 3:
        raise ValueError("D_n needs n >= 3")
    c = _cartan_chain(n)
    # fork: last node attaches to n-3 instead of n-2
    c[n - 1][n - 2] = c[n - 2][n - 1] = 0
    c[n - 1][n - 3] = c[n - 3][n - 1] = -1
    return c


def _cartan_e(n: int) -> list[list[int]]:
    if n not in (6, 7, 8):
        raise ValueError("E_n defined for n in {6,7,8}")
    # Bourbaki numbering: chain 1-3-4-5-...-n, node 2 attached to node 4.
    c = [[0] * n for _ in range(n)]
    for i in range(n):
        c[i][i] = 2
    chain = [1] + list(range(3, n + 1))
    for a, b in zip(chain, chain[1:]):
        c[a - 1][b - 1] = c[b - 1][a - 1] = -1
    c[2 - 1][4 - 1] = c[4 - 1][2 - 1] = -1
    return c


def standard(name: str, n: Optional[int] = None) -> Lattice:
    """Standard lattices: U, U(N), A_n, D_n, E_6/7/8 (negative definite), K3."""
    name = name.strip()
    if name == "U":
        return make_lattice([[0, 1], [1, 0]], "U")
    if name.startswith("U(") and name.endswith(")"):
        n = int(name[2:-1])
    if name.startswith("U"):
        if n is None or n == 0:
            raise ValueError("U(N) needs a nonzero integer N")
        return make_lattice([[0, n], [n, 0]], f"U({n})")
    if name in ("A", "A_n") or name.startswith("A_"):
        if name.startswith("A_") and len(name) > 2:
            n = int(name[2:])
        if n is None or n < 1:
            raise ValueError("A_n needs n >= 1")
        return make_lattice([[-x for x in row] for row in _cartan_chain(n)], f"A_{n}")
    if name in ("D", "D_n") or name.startswith("D_"):
        if name.startswith("D_") and len(name) > 2:
            n = int(name[2:])
        if n is None:
            raise ValueError("D_n needs n")
        return make_lattice([[-x for x in row] for row in _cartan_d(n)], f"D_{n}")
    if name.startswith("E_") or name.startswith("E"):
        if name.startswith("E_") and len(name) > 2:
            n = int(name[2:])
        elif len(name) == 2 and name[1].isdigit():
            n = int(name[1])
        if n is None:
            raise ValueError("E_n needs n in {6,7,8}")
        return make_lattice([[-x for x in row] for row in _cartan_e(n)], f"E_{n}")
    if name == "K3":
        u = standard("U")
        e8 = standard("E_8")
        return direct_sum(u, u, u, e8, e8, label="K3")
    raise ValueError(f"unknown lattice name {name!r}")


def rescale(lat: Lattice, k: int) -> Lattice:
    """L(k): the same module with the bilinear form scaled by k."""
    if k == 0:
        raise ValueError("rescale factor must be nonzero")
    gram = tuple(tuple(k * x for x in row) for row in lat.gram)
    label = f"{lat.label}({k})" if lat.label else None
    return Lattice(gram, label)


def direct_sum(*lats: Lattice, label: Optional[str] = None) -> Lattice:
    """Orthogonal direct sum (block-diagonal Gram)."""
    n = sum(l.rank for l in lats)
    gram = [[0] * n for _ in range(n)]
    off = 0
    for l in lats:
        for i in range(l.rank):
            for j in range(l.rank):
                gram[off + i][off + j] = l.gram[i][j]
        off += l.rank
    if label is None:
        parts = [l.label or "?" for l in lats]
        label = "+".join(parts)
    return Lattice(_as_gram(gram), label)


# ---------------------------------------------------------------------------
# signature (exact, Sylvester)
# ---------------------------------------------------------------------------

def signature(lat: Lattice) -> tuple[int, int]:
    """(b+, b-) by rational symmetric Gaussian elimination, no floats."""
    n = lat.rank
    a = [[Fraction(lat.gram[i][j]) for j in range(n)] for i in range(n)]
    pos = neg = 0
    idx = list(range(n))  # active block starts at each step

    def swap(i, j):
        a[i], a[j] = a[j], a[i]
        for row in a:
            row[i], row[j] = row[j], row[i]

    k = 0
    while k < n:
        if a[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if a[i][i] != 0), None)
            if piv is not None:
                swap(k, piv)
            else:
                # all diagonal zero: find off-diagonal entry and symmetrize
                found = None
                for i in range(k, n):
                    for j in range(i + 1, n):
                        if a[i][j] != 0:
                            found = (i, j)
                            break
                    if found:
                        break
                if found is None:
                    break  # zero block (cannot happen: non-degenerate)
                i, j = found
                # row/col operation x_i -> x_i + x_j makes a[i][i] = 2 a[i][j]
                for t in range(n):
                    a[i][t] += a[j][t]
                for t in range(n):
                    a[t][i] += a[t][j]
                if i != k:
                    swap(k, i)
        p = a[k][k]
        if p > 0:
            pos += 1
        else:
            neg += 1
        for i in range(k + 1, n):
            if a[i][k] != 0:
                f = a[i][k] / p
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
                for j in range(k, n):
                    a[j][i] = a[i][j]
        k += 1
    assert pos + neg == n, "signature lost rank (degenerate input?)"
    return pos, neg


# ---------------------------------------------------------------------------
# Smith normal form with transforms
# ---------------------------------------------------------------------------

def smith_normal_form(mat: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Return (U, D, V) with U*mat*V = D diagonal, d_i | d_{i+1}, U, V in GL_n(Z)."""
    n = len(mat)
    m = len(mat[0]) if n else 0
    a = [list(map(int, row)) for row in mat]
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    v = [[int(i == j) for j in range(m)] for i in range(m)]

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def col_swap(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def row_add(dst, src, c):
        a[dst] = [x + c * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def col_add(dst, src, c):
        for row in a:
            row[dst] += c * row[src]
        for row in v:
            row[dst] += c * row[src]

    def row_neg(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < min(n, m):
        # locate smallest nonzero entry in trailing block
        best = None
        for i in range(t, n):
            for j in range(t, m):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        row_swap(t, best[0])
        col_swap(t, best[1])
        if a[t][t] < 0:
            row_neg(t)
        # clear row/column t, restarting whenever a remainder shrinks the pivot
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, n):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    row_add(i, t, -q)
                    if a[i][t] != 0:
                        row_swap(t, i)
                        if a[t][t] < 0:
                            row_neg(t)
                        dirty = True
            for j in range(t + 1, m):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    col_add(j, t, -q)
                    if a[t][j] != 0:
                        col_swap(t, j)
                        dirty = True
        t += 1
    # enforce divisibility d_i | d_{i+1}
    changed = True
    while changed:
        changed = False
        for i in range(min(n, m) - 1):
            di, dj = a[i][i], a[i + 1][i + 1]
            if di != 0 and dj % di != 0:
                col_add(i, i + 1, 1)
                # redo the two-by-two corner
                dirty = True
                while dirty:
                    dirty = False
                    if a[i + 1][i] != 0:
                        q = a[i + 1][i] // a[i][i] if a[i][i] != 0 else 0
                        row_add(i + 1, i, -q)
                        if a[i + 1][i] != 0:
                            row_swap(i, i + 1)
                            if a[i][i] < 0:
                                row_neg(i)
                            dirty = True
                    if a[i][i + 1] != 0:
                        q = a[i][i + 1] // a[i][i]
                        col_add(i + 1, i, -q)
                        if a[i][i + 1] != 0:
                            col_swap(i, i + 1)
                            dirty = True
                if a[i + 1][i + 1] < 0:
                    row_neg(i + 1)
                changed = True
    return u, a, v


# ---------------------------------------------------------------------------
# discriminant forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscriminantForm:
    """The finite quadratic module A_L = L^v/L of an even lattice.

    Elements are coefficient tuples with respect to the Smith basis
    (one coordinate mod each elementary divisor > 1); q-values are exact
    ``Fraction`` residues mod 2, the bilinear form is mod 1.
    """

    elementary_divisors: tuple[int, ...]
    lifts: tuple[tuple[Fraction, ...], ...]  # dual-lattice lift of each generator
    lattice: Lattice
    _smith_u: tuple[tuple[int, ...], ...] = field(repr=False, default=())
    _all_divisors: tuple[int, ...] = field(repr=False, default=())

    @property
    def order(self) -> int:
        out = 1
        for d in self.elementary_divisors:
            out *= d
        return out

    def elements(self):
        """Iterate all group elements as coefficient tuples."""
        def rec(i):
            if i == len(self.elementary_divisors):
                yield ()
                return
            for rest in rec(i + 1):
                for a in range(self.elementary_divisors[i]):
                    yield (a,) + rest
        return rec(0)

    def lift(self, gamma: Sequence[int]) -> tuple[Fraction, ...]:
        """A dual-lattice representative of gamma, in lattice coordinates."""
        n = self.lattice.rank
        x = [Fraction(0)] * n
        for a, gen in zip(gamma, self.lifts):
            for i in range(n):
                x[i] += a * gen[i]
        return tuple(x)

    def q(self, gamma: Sequence[int]) -> Fraction:
        """Quadratic form q(gamma) = <x,x> mod 2 for any lift x."""
        x = self.lift(gamma)
        return self.lattice.inner(x, x) % 2

    def b(self, gamma: Sequence[int], delta: Sequence[int]) -> Fraction:
        """Bilinear form b(gamma, delta) = <x,y> mod 1."""
        return self.lattice.inner(self.lift(gamma), self.lift(delta)) % 1

    def neg(self, gamma: Sequence[int]) -> tuple[int, ...]:
        return tuple((-a) % d for a, d in zip(gamma, self.elementary_divisors))

    def element_of(self, x: Sequence[Fraction]) -> tuple[int, ...]:
        """Class of a dual vector x (lattice coordinates) in Smith coordinates."""
        n = self.lattice.rank
        v = []
        for i in range(n):
            c = sum(Fraction(self.lattice.gram[i][j]) * x[j] for j in range(n))
            if c.denominator != 1:
                raise ValueError("vector is not in the dual lattice")
            v.append(int(c))
        full = [sum(self._smith_u[i][j] * v[j] for j in range(n)) for i in range(n)]
        # keep only coordinates of nontrivial divisors
        out = []
        for i, d in enumerate(self._all_divisors):
            if d > 1:
                out.append(full[i] % d)
        return tuple(out)

    def is_two_elementary(self) -> bool:
        return all(d == 2 for d in self.elementary_divisors)

    def parity(self) -> int:
        """delta: 0 if q takes only integer values mod 2, else 1."""
        for gamma in self.elements():
            if self.q(gamma).denominator != 1:
                return 1
        return 0


def discriminant_form(lat: Lattice) -> DiscriminantForm:
    """Compute A_L with its quadratic form. Requires an even lattice."""
    if not lat.is_even():
        raise OddLatticeError("discriminant form defined here for even lattices only")
    n = lat.rank
    u, d, v = smith_normal_form(lat.gram)
    # sanity: U G V = D
    divisors_all = [d[i][i] for i in range(n)]
    assert all(x > 0 for x in divisors_all), "SNF produced nonpositive divisor"
    # order so that nontrivial divisors come last (SNF gives ascending already)
    nontrivial = [(i, di) for i, di in enumerate(divisors_all) if di > 1]
    lifts = []
    for i, di in nontrivial:
        col = [Fraction(v[rr][i], di) for rr in range(n)]
        lifts.append(tuple(col))
    return DiscriminantForm(
        elementary_divisors=tuple(di for _, di in nontrivial),
        lifts=tuple(lifts),
        lattice=lat,
        _smith_u=tuple(tuple(row) for row in u),
        _all_divisors=tuple(divisors_all),
    )


# ---------------------------------------------------------------------------
# 2-elementary invariants
# ---------------------------------------------------------------------------

EXCEPTIONAL_ENRIQUES = (10, 10, 0)   # U(2) + E8(2): empty fixed locus
EXCEPTIONAL_TWO_ELLIPTIC = (10, 8, 0)  # U + E8(2): two elliptic curves, g = 2


@dataclass(frozen=True)
class TwoElemInvariants:
    r: int
    l: int
    delta: int
    signature: tuple[int, int]
    g: Optional[int] = None
    k: Optional[int] = None
    exceptional: bool = False  # U(2)+E8(2): fixed locus empty

    @property
    def triple(self) -> tuple[int, int, int]:
        return (self.r, self.l, self.delta)


def two_elementary_invariants(lat: Lattice, lorentzian_role: bool = False) -> TwoElemInvariants:
    """(r, l, delta) of an even 2-elementary lattice; g, k when asked for
    the Lorentzian/M role (genus formula g = 11 - (r+l)/2, k = (r-l)/2)."""
    df = discriminant_form(lat)
    if not df.is_two_elementary():
        raise NotTwoElementaryError(
            f"discriminant group has divisors {df.elementary_divisors}")
    r = lat.rank
    l = len(df.elementary_divisors)
    delta = df.parity()
    sig = signature(lat)
    g = k = None
    exceptional = (r, l, delta) == EXCEPTIONAL_ENRIQUES
    if lorentzian_role and not exceptional:
        if (r + l) % 2 != 0:
            raise ValueError(f"(r,l) = ({r},{l}) cannot come from a K3 involution")
        g = 11 - (r + l) // 2
        k = (r - l) // 2
    return TwoElemInvariants(r, l, delta, sig, g, k, exceptional)


# ---------------------------------------------------------------------------
# JSON descriptors
# ---------------------------------------------------------------------------

def lattice_from_descriptor(desc) -> Lattice:
    """Build a lattice from the JSON descriptor format.

    Accepted forms:
      {"gram": [[...], ...], "name": optional}
      {"builtin": "E8", "rescale": 2}
      {"sum": [descriptor, ...]}
    """
    if isinstance(desc, Lattice):
        return desc
    if "sum" in desc:
        parts = [lattice_from_descriptor(d) for d in desc["sum"]]
        lat = direct_sum(*parts)
    elif "gram" in desc:
        lat = make_lattice(desc["gram"], desc.get("name"))
    elif "builtin" in desc:
        name = desc["builtin"]
        lat = standard(name, desc.get("n"))
    else:
        raise ValueError("descriptor needs one of 'gram', 'builtin', 'sum'")
    if "rescale" in desc:
        lat = rescale(lat, int(desc["rescale"]))
    if "name" in desc and desc.get("gram") is None:
        lat = Lattice(lat.gram, desc["name"])
    return lat


def roots(lat: Lattice, limit: Optional[int] = None):
    """Vectors d with <d,d> = -2 (the roots predicate), via exhaustive
    enumeration for definite lattices; see products.short_vectors."""
    from .products import short_vectors
    return [v for v in short_vectors(lat, bound=2) if lat.inner(v, v) == -2]
