"""Flat-torus spectra, the Epstein zeta continuation, elliptic torsion,
and the multiset algebra of product-orbifold Laplacian spectra.

The torus C/(Z + tau Z) with the unit-volume flat metric has Laplacian
eigenvalues nu_{m,n} = (2 pi^2 / Im tau) |m tau + n|^2.  The associated
zeta function

    zeta_{0,0}(s) = sum_{(m,n) != 0} nu_{m,n}^{-s}

is continued by the two-dimensional theta split at t = 1 (incomplete
gamma / Riemann method); the quadratic form |m tau + n|^2 / Im tau has
determinant one and is self-dual up to GL2(Z), so the split is exact:

    pi^{-s} Gamma(s) Z(s) = -1/s - 1/(1-s)
        + sum_{v != 0} [E(s, pi Q(v)) + E(1-s, pi Q(v))],

with E(a, x) = x^{-a} Gamma(a, x) and zeta(s) = (2 pi^2)^{-s} Z(s).
Differentiating analytically at s = 0,

    zeta'(0) = log(2 pi) - 1 - euler_gamma
               + sum_{v != 0} [Gamma(0, pi Q(v)) + e^{-pi Q(v)} / (pi Q(v))],

which the Kronecker limit formula identifies with -log(2 Im(tau) |eta|^4).

Synthetic K3/torus sector spectra implement the exact multiset equalities
of the product-orbifold Laplacians; the combination

    9 zeta_{0,0} - 6 zeta_{1,0} + zeta_{1,1}
        = 24 zeta^{T,+} + 8 (zeta^{S,+} - zeta^{S,-})

holds as a signed multiset identity on the positive spectra (all mixed
lambda + nu terms cancel with integer multiplicities).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath as mp

from .qseries import petersson_norm_eta_power


# ---------------------------------------------------------------------------
# spectrum multisets
# ---------------------------------------------------------------------------

@dataclass
class SpectrumMultiset:
    """Positive eigenvalues with integer multiplicities, plus a zero-mode
    count.  Values may be exact (Fraction) or floats; signed arithmetic
    cancels exactly on equal keys."""

    entries: Counter = field(default_factory=Counter)
    zero_modes: int = 0

    @classmethod
    def from_values(cls, values, multiplicity: int = 1, zero_modes: int = 0):
        c: Counter = Counter()
        for v in values:
            if v == 0:
                raise ValueError("zero eigenvalues belong in zero_modes")
            if v < 0:
                raise ValueError("eigenvalues must be >= 0")
            c[v] += multiplicity
        return cls(c, zero_modes)

    def total_count(self) -> int:
        return sum(self.entries.values())

    def scaled(self, m: int) -> "SpectrumMultiset":
        return SpectrumMultiset(
            Counter({k: m * v for k, v in self.entries.items()}),
            m * self.zero_modes)

    def __add__(self, other: "SpectrumMultiset") -> "SpectrumMultiset":
        c = Counter(self.entries)
        for k, v in other.entries.items():
            c[k] += v
        return SpectrumMultiset(c, self.zero_modes + other.zero_modes)

    def signed_diff(self, other: "SpectrumMultiset") -> dict:
        """self - other as a signed multiset over positive eigenvalues."""
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, 0) - v
        return {k: v for k, v in out.items() if v != 0}

    def tensor_sum(self, other: "SpectrumMultiset") -> "SpectrumMultiset":
        """Spectrum of a (+) 1 + 1 (+) b on a tensor product: all pairwise
        sums with product multiplicities (zero modes are eigenvalue 0)."""
        c: Counter = Counter()
        zeros = self.zero_modes * other.zero_modes
        for k1, m1 in list(self.entries.items()) + [(0, self.zero_modes)]:
            if m1 == 0:
                continue
            for k2, m2 in list(other.entries.items()) + [(0, other.zero_modes)]:
                if m2 == 0:
                    continue
                s = k1 + k2
                if s == 0:
                    continue
                c[s] += m1 * m2
        return SpectrumMultiset(c, zeros)

    def zeta(self, s):
        """sum lambda^{-s} over positive entries (finite synthetic sum)."""
        return mp.fsum(m * mp.mpf(float(k)) ** (-mp.mpc(s))
                       if not isinstance(k, Fraction)
                       else m * (mp.mpf(k.numerator) / k.denominator) ** (-mp.mpc(s))
                       for k, m in self.entries.items())


# ---------------------------------------------------------------------------
# flat torus eigenvalues
# ---------------------------------------------------------------------------

def torus_eigenvalues(tau, cutoff: float, mod_pm1: bool = False) -> SpectrumMultiset:
    """All nu_{m,n} = (2 pi^2/Im tau)|m tau + n|^2 <= cutoff, (m,n) != 0.

    mod_pm1 lists each (m,n)/+-1 class once (half multiplicities).
    """
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    tau = complex(tau)
    x, y = tau.real, tau.imag
    if y <= 0:
        raise ValueError("tau must be in the upper half-plane")
    scale = 2 * math.pi ** 2 / y
    r2 = cutoff / scale  # |m tau + n|^2 <= r2
    c: Counter = Counter()
    m_max = int(math.floor(math.sqrt(r2) / y)) + 1
    for m in range(-m_max, m_max + 1):
        # (m x + n)^2 <= r2 - m^2 y^2
        rem = r2 - m * m * y * y
        if rem < 0:
            continue
        half = math.sqrt(rem)
        n_lo = int(math.ceil(-m * x - half - 1e-12))
        n_hi = int(math.floor(-m * x + half + 1e-12))
        for n in range(n_lo, n_hi + 1):
            if m == 0 and n == 0:
                continue
            if mod_pm1 and (m < 0 or (m == 0 and n < 0)):
                continue
            val = scale * ((m * x + n) ** 2 + (m * y) ** 2)
            if val <= cutoff:
                c[val] += 1
    return SpectrumMultiset(c, 0)


# ---------------------------------------------------------------------------
# Epstein zeta continuation and the Kronecker limit formula
# ---------------------------------------------------------------------------

def _lattice_q_values(tau, q_bound: float):
    """Q(m,n) = |m tau + n|^2 / Im tau <= q_bound (determinant-1 form)."""
    tau = complex(tau)
    x, y = tau.real, tau.imag
    out = []
    m_max = int(math.floor(math.sqrt(q_bound * y) / y)) + 1
    for m in range(-m_max, m_max + 1):
        rem = q_bound * y - (m * y) ** 2
        if rem < 0:
            continue
        half = math.sqrt(rem)
        for n in range(int(math.ceil(-m * x - half - 1e-12)),
                       int(math.floor(-m * x + half + 1e-12)) + 1):
            if (m, n) == (0, 0):
                continue
            out.append(((m * x + n) ** 2 + (m * y) ** 2) / y)
    return out


def epstein_zeta(tau, s, q_bound: Optional[float] = None):
    """zeta_{0,0}(s) = (2 pi^2)^{-s} Z(s) by the theta-split continuation;
    entire except the pole at s = 1."""
    s = mp.mpc(s)
    if q_bound is None:
        q_bound = (mp.mp.dps * math.log(10) + 15) / math.pi
    qs = _lattice_q_values(tau, q_bound)
    total = mp.mpc(0)
    for q in qs:
        xq = mp.pi * q
        total += _e_integral(s, xq) + _e_integral(1 - s, xq)
    lam = total - 1 / s - 1 / (1 - s)
    z = mp.pi ** s / mp.gamma(s) * lam
    return (2 * mp.pi ** 2) ** (-s) * z


def _e_integral(a, x):
    """E(a, x) = integral_1^inf t^{a-1} e^{-x t} dt = x^{-a} Gamma(a, x)."""
    return mp.gammainc(a, x) * x ** (-a)


def epstein_zeta_deriv0(tau, q_bound: Optional[float] = None):
    """zeta'_{0,0}(0), analytically differentiated (no finite differences).

    Returns (value, tail_bound); the Kronecker limit formula gives the
    independent closed form -log(2 Im(tau) |eta(tau)|^4).
    """
    if q_bound is None:
        q_bound = (mp.mp.dps * math.log(10) + 15) / math.pi
    qs = _lattice_q_values(tau, q_bound)
    r0 = mp.mpf(0)
    for q in qs:
        xq = mp.pi * q
        # E(0, x) = Gamma(0, x) = E_1(x);  E(1, x) = e^{-x}/x
        r0 += mp.e1(xq) + mp.e ** (-xq) / xq
    value = mp.log(2 * mp.pi) - 1 - mp.euler + r0
    # tail: terms at Q > q_bound, ~ 3 e^{-pi Q} per point, lattice count model
    tail = 12 * (q_bound + 2) * mp.e ** (-mp.pi * q_bound)
    return value, tail


def kronecker_residual(tau):
    """|zeta'(0) + log(2 Im tau |eta(tau)|^4)|, the limit-formula check."""
    val, _tail = epstein_zeta_deriv0(tau)
    closed = -mp.log(2 * petersson_norm_eta_power(tau, 4))
    return mp.fabs(val - closed)


def tau_ell(tau):
    """Elliptic torsion by two independent routes.

    Returns (eta_route, zeta_route):
      eta_route  = (4 pi ||eta(tau)^4||)^{-1}
      zeta_route = (2 pi)^{-1} exp(zeta'_{0,0}(0))
    """
    eta_route = 1 / (4 * mp.pi * petersson_norm_eta_power(tau, 4))
    val, _ = epstein_zeta_deriv0(tau)
    zeta_route = mp.e ** val / (2 * mp.pi)
    return eta_route, zeta_route


# ---------------------------------------------------------------------------
# sector spectra of the involution quotients
# ---------------------------------------------------------------------------

def k3_sector_spectra(plus: Sequence, minus: Sequence,
                      h11_plus: int, h11_minus: int) -> dict:
    """Synthetic sigma(box^{S,+-}_{p,q}) from the positive spectra
    {lambda_i^+}, {lambda_j^-} of the invariant/anti-invariant functions.

    (0,0,+): {0} u {l+}          (0,0,-): {l-}
    (1,0,+-) = (0,1,+-):          {l+} u {l-}
    (1,1,+-): h^{1,1,+-} x {0} u 2{l+} u 2{l-}
    """
    if h11_plus + h11_minus != 20:
        raise ValueError("h^{1,1}(S)^+ + h^{1,1}(S)^- must equal 20")
    if h11_plus < 0 or h11_minus < 0:
        raise ValueError("Hodge numbers must be nonnegative")
    sp = SpectrumMultiset.from_values(plus)
    sm = SpectrumMultiset.from_values(minus)
    both = sp + sm
    out = {}
    out[(0, 0, "+")] = SpectrumMultiset(Counter(sp.entries), 1)
    out[(0, 0, "-")] = SpectrumMultiset(Counter(sm.entries), 0)
    for pq in ((1, 0), (0, 1)):
        out[(pq[0], pq[1], "+")] = SpectrumMultiset(Counter(both.entries), 0)
        out[(pq[0], pq[1], "-")] = SpectrumMultiset(Counter(both.entries), 0)
    two = both.scaled(2)
    out[(1, 1, "+")] = SpectrumMultiset(Counter(two.entries), h11_plus)
    out[(1, 1, "-")] = SpectrumMultiset(Counter(two.entries), h11_minus)
    return out


def torus_sector_spectra(nu: Sequence) -> dict:
    """sigma(box^{T,+-}_{p,q}) from the /+-1 eigenvalue list {nu_{m,n}}:
    every sector shares the same positive multiset, with one zero mode in
    exactly the four sectors (0,0,+), (1,0,-), (0,1,-), (1,1,+)."""
    base = SpectrumMultiset.from_values(nu)
    out = {}
    plus_zero = {(0, 0, "+"), (1, 0, "-"), (0, 1, "-"), (1, 1, "+")}
    for p in (0, 1):
        for q in (0, 1):
            for sign in "+-":
                z = 1 if (p, q, sign) in plus_zero else 0
                out[(p, q, sign)] = SpectrumMultiset(Counter(base.entries), z)
    return out


def product_orbifold_spectra(k3: dict, torus: dict) -> dict:
    """sigma(box_{p,q}) of (S x T)/involution for (p,q) in {(0,0),(1,0),(1,1)}:
    sum over factor bidegrees and matching signs of tensor-sum spectra."""
    out = {}
    for p, q in ((0, 0), (1, 0), (1, 1)):
        total = SpectrumMultiset()
        for pt in range(0, min(p, 1) + 1):
            for qt in range(0, min(q, 1) + 1):
                ps, qs = p - pt, q - qt
                if ps > 1 or qs > 1:
                    continue
                for sign in "+-":
                    total = total + torus[(pt, qt, sign)].tensor_sum(k3[(ps, qs, sign)])
        out[(p, q)] = total
    return out


def bv_zeta_combination(plus: Sequence, minus: Sequence, nu: Sequence,
                        h11_plus: int, s_values: Sequence = ()) -> dict:
    """Check the spectral combination on synthetic inputs.

    Builds sigma(box_{0,0}), sigma(box_{1,0}), sigma(box_{1,1}) of the
    product orbifold from tensor sums, verifies the three sector lemmas
    and the final combination

        9 zeta_{0,0} - 6 zeta_{1,0} + zeta_{1,1}
            = 24 zeta^{T,+} + 8 (zeta^{S,+} - zeta^{S,-})

    both as a signed multiset (exact) and numerically at each s.
    Returns {"multiset_residual", "lemma_residuals", "numeric_residuals",
    "zero_mode_counts"}.
    """
    k3 = k3_sector_spectra(plus, minus, h11_plus, 20 - h11_plus)
    torus = torus_sector_spectra(nu)
    prod = product_orbifold_spectra(k3, torus)

    zt = SpectrumMultiset.from_values(nu)            # zeta^{T,+}
    zsp = SpectrumMultiset.from_values(plus)         # zeta^{S,+}
    zsm = SpectrumMultiset.from_values(minus)        # zeta^{S,-}
    mu_p = zt.tensor_sum(zsp)                        # {l+ + nu}
    mu_m = zt.tensor_sum(zsm)                        # {l- + nu}

    # sector lemmas: zeta_{0,0} = zt + zsp + mu+ + mu-
    #                zeta_{1,0} = zt + zsp + 2 zsm + 3 mu+ + 3 mu-
    #                zeta_{1,1} = 21 zt + 5 zsp + 4 zsm + 9 mu+ + 9 mu-
    lemma_sides = {
        (0, 0): zt + zsp + mu_p + mu_m,
        (1, 0): zt + zsp + zsm.scaled(2) + mu_p.scaled(3) + mu_m.scaled(3),
        (1, 1): (zt.scaled(21) + zsp.scaled(5) + zsm.scaled(4)
                 + mu_p.scaled(9) + mu_m.scaled(9)),
    }
    lemma_residuals = {}
    for pq, rhs in lemma_sides.items():
        diff = prod[pq].signed_diff(rhs)
        lemma_residuals[pq] = sum(abs(v) for v in diff.values())

    # final combination as signed multiset on positive spectra
    lhs: dict = {}
    for pq, coeff in (((0, 0), 9), ((1, 0), -6), ((1, 1), 1)):
        for k, v in prod[pq].entries.items():
            lhs[k] = lhs.get(k, 0) + coeff * v
    rhs: dict = {}
    for ms, coeff in ((zt, 24), (zsp, 8), (zsm, -8)):
        for k, v in ms.entries.items():
            rhs[k] = rhs.get(k, 0) + coeff * v
    keys = set(lhs) | set(rhs)
    multiset_residual = sum(abs(lhs.get(k, 0) - rhs.get(k, 0)) for k in keys)

    numeric = []
    for s in s_values:
        left = mp.fsum([9 * prod[(0, 0)].zeta(s),
                        -6 * prod[(1, 0)].zeta(s),
                        prod[(1, 1)].zeta(s)])
        right = 24 * zt.zeta(s) + 8 * (zsp.zeta(s) - zsm.zeta(s))
        numeric.append(mp.fabs(left - right))

    return {
        "multiset_residual": multiset_residual,
        "lemma_residuals": lemma_residuals,
        "numeric_residuals": numeric,
        "zero_mode_counts": {pq: prod[pq].zero_modes for pq in prod},
    }
