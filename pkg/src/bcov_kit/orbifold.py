"""Finite abelian diagonal subgroups of SL(3,C) and orbifold Euler numbers.

A group element is the triple of rotation numbers (a1, a2, a3), each a
Fraction mod 1, standing for diag(e(a1), e(a2), e(a3)) with
a1 + a2 + a3 = 0 mod 1 (determinant one).  Group-theoretic quantities
(kernels, images, the subset Gamma^0 of elements fixing only the origin)
are read off the exact rotation data, so kernel orders never depend on
floating-point character values.

The two Euler-number routes implemented here are

    |G| chi^orb = chi(X) + sum_lam (n_lam^2 - 1) chi(C_lam)
                + sum_p [ (|G_p|^2 - 1) - sum_k (n_{p,k}^2 - 1) ]

and Roan's fixed-point-pair count  |G| chi = sum_{g,h} chi(X^g n X^h),
which agree on any validated fixed-point record.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import GroupTooLargeError

Triple = tuple[Fraction, Fraction, Fraction]


def _norm_triple(t) -> Triple:
    a = tuple(Fraction(x) % 1 for x in t)
    if len(a) != 3:
        raise ValueError("rotation data must be a triple")
    if (a[0] + a[1] + a[2]) % 1 != 0:
        raise ValueError(f"det != 1: rotation numbers {a} do not sum to 0 mod 1")
    return a  # type: ignore[return-value]


def _add(t1: Triple, t2: Triple) -> Triple:
    return tuple((x + y) % 1 for x, y in zip(t1, t2))  # type: ignore[return-value]


@dataclass(frozen=True)
class AbelianSL3Group:
    """A finite abelian diagonal subgroup of SL(3, C), closed and faithful."""

    elements: tuple[Triple, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> Triple:
        return (Fraction(0), Fraction(0), Fraction(0))

    def nontrivial(self):
        return [g for g in self.elements if g != self.identity]

    def ker_chi(self, k: int) -> list[Triple]:
        return [g for g in self.elements if g[k] == 0]

    def im_chi_order(self, k: int) -> int:
        return self.order // len(self.ker_chi(k))

    def common_fixed_dim(self) -> int:
        """dim (C^3)^{Gamma*}: axes fixed by every nontrivial element."""
        nt = self.nontrivial()
        if not nt:
            return 3
        return sum(1 for k in range(3) if all(g[k] == 0 for g in nt))


def make_group(generators: Sequence, size_cap: int = 10_000) -> AbelianSL3Group:
    """Closure of the given rotation triples under componentwise addition."""
    gens = [_norm_triple(g) for g in generators]
    identity = (Fraction(0), Fraction(0), Fraction(0))
    elems = {identity}
    frontier = [identity]
    while frontier:
        new = []
        for e in frontier:
            for g in gens:
                s = _add(e, g)
                if s not in elems:
                    if len(elems) >= size_cap:
                        raise GroupTooLargeError(
                            f"group closure exceeded cap {size_cap}")
                    elems.add(s)
                    new.append(s)
        frontier = new
    return AbelianSL3Group(tuple(sorted(elems)))


def gamma0(group: AbelianSL3Group) -> list[Triple]:
    """Gamma^0: nontrivial elements g with det(g - 1) != 0, i.e. no
    rotation number equal to 0."""
    return [g for g in group.nontrivial() if all(x != 0 for x in g)]


def delta_k(group: AbelianSL3Group, k: int):
    """delta_k = sum over Gamma^0 of chi_k(g) / (1 - chi_k(g))^2, an exact
    rational (the summand is -1/(4 sin^2(pi a_k)), real), recovered from a
    float sum by rounding to denominator <= 12 |Gamma|^2."""
    g0 = gamma0(group)
    if not g0:
        return Fraction(0)
    total = 0.0
    for g in g0:
        chi = cmath.exp(2j * math.pi * float(g[k]))
        total += (chi / (1 - chi) ** 2).real
    return Fraction(total).limit_denominator(12 * group.order ** 2)


def epsilon_k(group: AbelianSL3Group, k: int) -> Fraction:
    """epsilon_k = delta_k/|G| - (n_k - 1)(nu_k^2 - 1) / (12 nu_k)."""
    n_k = len(group.ker_chi(k))
    nu_k = group.im_chi_order(k)
    return (Fraction(delta_k(group, k), group.order)
            - Fraction((n_k - 1) * (nu_k ** 2 - 1), 12 * nu_k))


def epsilon_closed(group: AbelianSL3Group) -> Fraction:
    """Closed form -(|G|^2 + 2 - sum_k n_k^2) / (12 |G|); requires that the
    nontrivial elements have no common fixed axis."""
    if group.common_fixed_dim() != 0:
        raise ValueError("common fixed axis: epsilon invariant undefined")
    n = group.order
    ker_sq = sum(len(group.ker_chi(k)) ** 2 for k in range(3))
    return Fraction(-(n * n + 2 - ker_sq), 12 * n)


GROUP_G = make_group([(Fraction(1, 2), Fraction(1, 2), Fraction(0)),
                      (Fraction(1, 2), Fraction(0), Fraction(1, 2))])


def check_lemma_4_6(group: AbelianSL3Group) -> bool:
    """(no common fixed axis and Gamma^0 empty)  implies  the group is the
    (Z/2)^2 of diagonal half-turns; vacuously true otherwise."""
    if group.common_fixed_dim() != 0 or gamma0(group):
        return True
    return set(group.elements) == set(GROUP_G.elements)


def dedekind_sum_check(n: int, m: int):
    """Residual |sum_{k=1}^{n-1} z^k/(1-z^k)^2 + (n^2-1)/12|, z = e(m/n)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if math.gcd(m, n) != 1:
        raise ValueError(f"m = {m} must be coprime to n = {n}")
    import mpmath as mp
    total = mp.mpf(0)
    for k in range(1, n):
        z = mp.e ** (2j * mp.pi * m * k / n)
        total += (z / (1 - z) ** 2).real
    return abs(total + mp.mpf(n * n - 1) / 12)


def enumerate_small_groups(max_den: int = 8, max_generators: int = 2,
                           size_cap: int = 2000) -> list[AbelianSL3Group]:
    """All distinct groups generated by <= max_generators det-1 triples
    whose rotation numbers have denominator <= max_den.

    A two-generator group is the elementwise sum of two cyclic groups
    (subgroups of an abelian group), so the pair scan needs no closure.
    """
    fracs = sorted({Fraction(a, b) for b in range(1, max_den + 1)
                    for a in range(b)})
    triples = []
    for x in fracs:
        for y in fracs:
            z = (-x - y) % 1
            if z.denominator <= max_den:
                t = (x, y, z)
                if t != (0, 0, 0):
                    triples.append(t)
    cyclic = {}
    for t in triples:
        g = make_group([t], size_cap)
        cyclic.setdefault(g.elements, g)
    seen = dict(cyclic)
    if max_generators >= 2:
        groups = list(cyclic.values())
        for i, g1 in enumerate(groups):
            for g2 in groups[i + 1:]:
                elems = sorted({_add(a, b) for a in g1.elements
                                for b in g2.elements})
                key = tuple(elems)
                if key not in seen:
                    seen[key] = AbelianSL3Group(key)
    return list(seen.values())


# ---------------------------------------------------------------------------
# fixed-point records and the two Euler-number routes
# ---------------------------------------------------------------------------

@dataclass
class CurveRecord:
    """A fixed curve: its Euler number and the set of ambient-group labels
    fixing it pointwise (excluding the identity)."""
    chi: int
    fixers: frozenset


@dataclass
class PointRecord:
    """An isolated point of the extended twisted sector: its stabilizer as
    a label -> rotation-triple map (a faithful character description), and
    the curve ids passing through it (one per axis with n_{p,k} > 1)."""
    members: dict  # ambient label -> Triple; identity label maps to (0,0,0)
    through_curves: tuple


@dataclass
class FixedPointData:
    """Combinatorial record of a finite abelian action on a threefold.

    Ambient group elements are tuples under componentwise addition with
    the given moduli (G = Z/m1 x ... x Z/mr).
    """
    moduli: tuple[int, ...]
    chi_ambient: int
    curves: list[CurveRecord]
    points: list[PointRecord]

    @property
    def order(self) -> int:
        out = 1
        for m in self.moduli:
            out *= m
        return out

    def group_elements(self) -> list[tuple]:
        ranges = [range(m) for m in self.moduli]
        return [tuple(t) for t in itertools.product(*ranges)]

    @property
    def identity(self) -> tuple:
        return tuple(0 for _ in self.moduli)

    def validate(self) -> None:
        ident = self.identity
        elems = set(self.group_elements())
        for c in self.curves:
            if ident in c.fixers or not c.fixers:
                raise ValueError("curve fixers must be a nonempty subset of G \\ {1}")
            if not c.fixers <= elems:
                raise ValueError("curve fixers outside the ambient group")
            sub = set(c.fixers) | {ident}
            if not _is_subgroup(sub, self.moduli):
                raise ValueError("curve fixers u {1} is not a subgroup")
            if not _is_cyclic(sub, self.moduli):
                raise ValueError("curve stabilizer is not cyclic")
        for p in self.points:
            if ident not in p.members or p.members[ident] != (0, 0, 0):
                raise ValueError("point stabilizer must contain the identity")
            labels = set(p.members)
            if not labels <= elems or not _is_subgroup(labels, self.moduli):
                raise ValueError("point stabilizer is not a subgroup of G")
            # faithful character description, additive in the labels
            for g in labels:
                for h in labels:
                    gh = tuple((a + b) % m for a, b, m in zip(g, h, self.moduli))
                    if gh in labels:
                        want = _add(_norm_triple(p.members[g]),
                                    _norm_triple(p.members[h]))
                        if _norm_triple(p.members[gh]) != want:
                            raise ValueError("stabilizer characters not additive")
            trips = [_norm_triple(t) for t in p.members.values()]
            if len(set(trips)) != len(trips):
                raise ValueError("stabilizer action is not faithful")
            # axis consistency: n_{p,k} > 1 iff a through-curve matches axis k
            stab = AbelianSL3Group(tuple(sorted(trips)))
            axes_with_curve = 0
            for k in range(3):
                ker = {lbl for lbl, t in p.members.items()
                       if _norm_triple(t)[k] == 0}
                n_pk = len(ker)
                if n_pk > 1:
                    axes_with_curve += 1
                    matches = [ci for ci in p.through_curves
                               if set(self.curves[ci].fixers) | {ident} == ker]
                    if not matches:
                        raise ValueError(
                            f"axis {k} has kernel order {n_pk} but no matching "
                            "curve through the point")
            if axes_with_curve != len(set(p.through_curves)):
                raise ValueError("through-curve count != #axes with n_{p,k} > 1")

    # -- route one: the direct chi^orb formula ------------------------------

    def chi_orb(self) -> Fraction:
        self.validate()
        total = Fraction(self.chi_ambient)
        for c in self.curves:
            n_lam = len(c.fixers) + 1
            total += (n_lam ** 2 - 1) * Fraction(c.chi)
        for p in self.points:
            gp = len(p.members)
            term = Fraction(gp ** 2 - 1)
            for k in range(3):
                n_pk = sum(1 for t in p.members.values()
                           if _norm_triple(t)[k] == 0)
                term -= (n_pk ** 2 - 1)
            total += term
        return total / self.order

    # -- route two: Roan's pair enumeration ---------------------------------

    def roan_chi(self) -> Fraction:
        self.validate()
        ident = self.identity
        total = Fraction(0)
        for g in self.group_elements():
            for h in self.group_elements():
                if g == ident and h == ident:
                    total += self.chi_ambient
                    continue
                # curves inside X^g n X^h
                chi_gh = 0
                for c in self.curves:
                    stab = set(c.fixers) | {ident}
                    if g in stab and h in stab:
                        chi_gh += c.chi
                # isolated points of X^g n X^h
                for p in self.points:
                    if g not in p.members or h not in p.members:
                        continue
                    on_curve = False
                    for ci in p.through_curves:
                        stab = set(self.curves[ci].fixers) | {ident}
                        if g in stab and h in stab:
                            on_curve = True
                            break
                    if not on_curve:
                        chi_gh += 1
                total += chi_gh
        return total / self.order


def _is_subgroup(subset: set, moduli: tuple[int, ...]) -> bool:
    for g in subset:
        for h in subset:
            if tuple((a + b) % m for a, b, m in zip(g, h, moduli)) not in subset:
                return False
    return True


def _element_order(g: tuple, moduli: tuple[int, ...]) -> int:
    out = 1
    for a, m in zip(g, moduli):
        if a:
            out = out * (m // math.gcd(a, m)) // math.gcd(out, m // math.gcd(a, m))
    return out


def _is_cyclic(subset: set, moduli: tuple[int, ...]) -> bool:
    n = len(subset)
    return any(_element_order(g, moduli) == n for g in subset)


def chi_orb(data: FixedPointData) -> Fraction:
    return data.chi_orb()


def roan_chi(data: FixedPointData) -> Fraction:
    return data.roan_chi()


# ---------------------------------------------------------------------------
# Borcea-Voisin fixtures
# ---------------------------------------------------------------------------

def borcea_voisin_fixture(r: int, l: int, delta: int) -> FixedPointData:
    """The Z/2 fixed-point record of (S x T)/(theta x -1) for a K3
    involution of invariants (r, l, delta).

    The fixed locus S^theta x T[2] is four copies of S^theta: a genus-g
    curve plus k rational curves with g = 11 - (r+l)/2, k = (r-l)/2, or
    the exceptional layouts (10,10,0) -> empty, (10,8,0) -> two elliptic
    curves.  chi(X) = chi(S x T) = 0; there are no isolated points.
    """
    if delta not in (0, 1):
        raise ValueError("delta must be 0 or 1")
    if not (1 <= r <= 20) or l < 0 or l > min(r, 22 - r) or (r + l) % 2:
        raise ValueError(f"(r, l, delta) = ({r},{l},{delta}) is not a valid "
                         "2-elementary triple")
    inv = frozenset({(1,)})
    curves: list[CurveRecord] = []
    if (r, l, delta) == (10, 10, 0):
        pass  # Enriques quotient: empty fixed locus
    elif (r, l, delta) == (10, 8, 0):
        for _copy in range(4):
            curves.extend(CurveRecord(0, inv) for _ in range(2))
    else:
        g = 11 - (r + l) // 2
        k = (r - l) // 2
        if g < 0 or k < 0:
            raise ValueError(f"(r, l) = ({r},{l}) gives negative genus or "
                             "curve count")
        for _copy in range(4):
            curves.append(CurveRecord(2 - 2 * g, inv))
            curves.extend(CurveRecord(2, inv) for _ in range(k))
    return FixedPointData(moduli=(2,), chi_ambient=0, curves=curves, points=[])
