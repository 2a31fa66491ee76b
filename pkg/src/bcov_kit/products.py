"""Tube-domain points, short-vector enumeration, and Borcherds products.

The infinite product

    Psi(z) = e^{2 pi i <alpha*rho, z>} prod_{lam in L^v, lam.W > 0}
             (1 - e^{2 pi i <lam, z>})^{alpha c_{lam}(lam^2/2)}

is evaluated in the log domain on the tube model L (x) R + i C_L^+ of a
type IV domain for Lambda = U(N) (+) L.  Weyl chambers and Weyl vectors
are caller-supplied data; exponents come from a FourierTable.  Factors
are truncated by the pairing <lam, Im z>, which directly controls the
factor size e^{-2 pi <lam, Im z>}; a geometric-majorant tail bound is
reported with every value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath as mp
import numpy as np

from .errors import TailTooLargeError
from .lattices import Lattice, signature


# ---------------------------------------------------------------------------
# short vectors (Fincke-Pohst)
# ---------------------------------------------------------------------------

def _cholesky(q: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(q).T  # upper triangular R with R^T R = q
    except np.linalg.LinAlgError as exc:
        raise ValueError("form is not positive definite") from exc


def _enumerate_ellipsoid(q: np.ndarray, bound: float):
    """Integer vectors v != 0 with v^T q v <= bound (q positive definite).

    Classic Fincke-Pohst recursion on the Cholesky factor; both signs of
    every vector are returned.
    """
    n = q.shape[0]
    r = _cholesky(q)
    # v^T q v = sum_i (r_ii v_i + sum_{j>i} r_ij v_j)^2
    out = []
    v = [0] * n
    eps = 1e-9 * max(bound, 1.0)

    def rec(i: int, remaining: float, center_terms: np.ndarray):
        if i < 0:
            if any(v):
                out.append(tuple(v))
            return
        rii = r[i, i]
        c = center_terms[i] / rii
        half_width = math.sqrt(max(remaining, 0.0)) / rii
        lo = math.ceil(-c - half_width - 1e-12)
        hi = math.floor(-c + half_width + 1e-12)
        for vi in range(lo, hi + 1):
            v[i] = vi
            t = rii * (vi + c)
            rem2 = remaining - t * t
            if rem2 >= -eps:
                new_center = center_terms.copy()
                for j in range(i):
                    new_center[j] += r[j, i] * vi
                rec(i - 1, max(rem2, 0.0), new_center)
        v[i] = 0

    rec(n - 1, bound + eps, np.zeros(n))
    return out


def short_vectors(lat: Lattice, bound, dual: bool = False,
                  include_zero: bool = False, cone_data=None):
    """Vectors of L (or L^v with dual=True) with |<v,v>| <= bound.

    Definite lattices are enumerated directly (on ±Gram).  An indefinite
    Lorentzian lattice needs ``cone_data = (y, pairing_bound)`` with y in
    the positive cone: the positive definite majorant
    2<v,y>^2/<y,y> - <v,v> then bounds the search region (vectors with
    0 < <v,y> <= pairing_bound and <v,v> >= -bound are all found).

    Returns integer coordinate tuples, or Fraction tuples for dual=True.
    """
    n = lat.rank
    g = np.array(lat.gram, dtype=float)
    if dual:
        gq = np.array([[float(x) for x in row] for row in lat.gram_inverse()])
    else:
        gq = g
    pos, neg = signature(lat)
    if pos == n or neg == n:
        q = gq if pos == n else -gq
        vecs = _enumerate_ellipsoid(q, float(bound))
    elif pos == 1 and cone_data is not None:
        y, pairing_bound = cone_data
        yf = [float(t) for t in y]
        yy = float(lat.inner(yf, yf))
        if yy <= 0:
            raise ValueError("cone vector must have positive norm")
        # pairing of an integer/dual vector v with y in the ambient form:
        # dual=True coordinates are w.r.t. the dual basis, i.e. v |-> G^{-1} v,
        # so <G^{-1}v, y> = v . y  (plain dot).  dual=False: <v, y> = v^T G y.
        w = np.array(yf) if dual else g @ np.array(yf)
        # majorant M(v) = 2 (v.w)^2 / yy - v^T gq v  is positive definite
        m = 2.0 * np.outer(w, w) / yy - gq
        r2 = float(pairing_bound) ** 2 / yy + float(bound) \
            + 2.0 * float(pairing_bound) ** 2 / yy
        vecs = _enumerate_ellipsoid(m, r2)
    else:
        raise ValueError(
            "indefinite lattice: supply cone_data=(y, pairing_bound) "
            "for a Lorentzian enumeration")
    out = []
    ginv = lat.gram_inverse() if dual else None
    for v in vecs:
        if dual:
            x = tuple(sum(ginv[i][j] * v[j] for j in range(n)) for i in range(n))
        else:
            x = v
        nrm = lat.inner(x, x)
        if abs(nrm) <= bound or (pos == 1 and cone_data is not None):
            out.append(x)
    if include_zero:
        zero = tuple(Fraction(0) for _ in range(n)) if dual else tuple(0 for _ in range(n))
        out.append(zero)
    return out


# ---------------------------------------------------------------------------
# tube-domain points and product specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TubePoint:
    """z = x + i y with y in the positive cone of the Lorentzian factor L."""

    lattice_l: Lattice
    x: tuple
    y: tuple
    n_scale: int = 1  # N in Lambda = U(N) (+) L

    def __post_init__(self):
        if len(self.x) != self.lattice_l.rank or len(self.y) != self.lattice_l.rank:
            raise ValueError("x, y must have length rank(L)")
        yy = self.lattice_l.inner([float(t) for t in self.y],
                                  [float(t) for t in self.y])
        if not yy > 0:
            raise ValueError("Im z must lie in the positive cone (<y,y> > 0)")

    @property
    def yy(self) -> float:
        return float(self.lattice_l.inner([float(t) for t in self.y],
                                          [float(t) for t in self.y]))


@dataclass
class ProductSpec:
    """Data of a Borcherds product: coefficient table, Weyl vector/chamber,
    truncation threshold, and the integrality scale alpha."""

    table: "FourierTable"  # from .weilrep
    weyl_vector: tuple     # alpha*rho in L (x) Q (rational entries)
    chamber_ref: tuple     # reference vector in the positive cone (chamber side)
    truncation: float      # include factors with <lam, y> <= truncation
    alpha: int = 1

    def component_of(self, lam: Sequence[Fraction], lattice_l: Lattice,
                     n_scale: int) -> tuple:
        """Class of lam in A_Lambda for Lambda = U(N) (+) L (lam padded by 0)."""
        amb = self.table.disc_form
        full = (Fraction(0), Fraction(0), *[Fraction(t) for t in lam])
        if amb.lattice.rank != lattice_l.rank + 2:
            raise ValueError("table discriminant form does not match U(N) (+) L")
        return amb.element_of(full)


def _factor_count_model(counts_per_shell: list, rank: int):
    """Fit count(t, t+1] ~ c0 * (t+1)^{rank-1} with a safety factor of 4."""
    c0 = 0.0
    for t, cnt in counts_per_shell:
        c0 = max(c0, cnt / max((t + 1.0) ** (rank - 1), 1.0))
    return 4.0 * max(c0, 1.0)


def borcherds_log_product(spec: ProductSpec, z: TubePoint, tol: float = 1e-12):
    """(log|Psi|, arg Psi mod 2pi, tail bound) for the truncated product.

    Exponents are alpha * c_{lam-bar}(lam^2/2) from the table; the Weyl
    prefactor contributes -2 pi <alpha rho, y> to log|Psi|.  Requires the
    tail bound (geometric majorant beyond the truncation threshold) to
    stay below ``tol`` or raises TailTooLargeError.
    """
    lat = z.lattice_l
    n = lat.rank
    yy = z.yy
    b = float(spec.truncation)
    kmax = spec.table.k_max
    norm_floor = 2.0 * float(kmax)  # |lam^2| <= 2 kmax for supported factors

    if b <= 0:
        raise ValueError("truncation threshold must be positive")
    chamber = [float(t) for t in spec.chamber_ref]
    if lat.inner(chamber, chamber) <= 0:
        raise ValueError("chamber reference must lie in the positive cone")

    vecs = short_vectors(lat, bound=norm_floor, dual=True,
                         cone_data=(z.y, b))
    x = [mp.mpf(t) for t in z.x]
    y = [mp.mpf(t) for t in z.y]

    log_abs = mp.mpf(0)
    arg = mp.mpf(0)
    shell_counts: dict = {}
    c_abs_max = 0.0
    used = 0
    for lam in sorted(vecs):
        side = lat.inner([float(t) for t in lam], chamber)
        if side <= 0:
            continue
        ly = float(lat.inner([float(t) for t in lam], [float(t) for t in z.y]))
        if ly <= 0:
            raise ValueError(
                "Im z and the chamber reference lie on different sides "
                f"of the wall of {lam}")
        if ly > b:
            continue
        norm2 = lat.inner(lam, lam)
        k = Fraction(norm2) / 2
        gamma = spec.component_of(lam, lat, z.n_scale)
        c = spec.table.coefficient(gamma, k)
        if c == 0:
            continue
        exponent = spec.alpha * c
        c_abs_max = max(c_abs_max, abs(float(exponent)))
        lam_mp = [mp.mpf(t.numerator) / t.denominator if isinstance(t, Fraction)
                  else mp.mpf(t) for t in lam]
        lx = lat.inner(lam_mp, x)
        ly_mp = lat.inner(lam_mp, y)
        u = mp.e ** (2j * mp.pi * lx - 2 * mp.pi * ly_mp)
        log_fac = mp.log(1 - u)
        log_abs += exponent * mp.re(log_fac)
        arg += exponent * mp.im(log_fac)
        shell = int(ly)
        shell_counts[shell] = shell_counts.get(shell, 0) + 1
        used += 1

    # Weyl vector prefactor e^{2 pi i <alpha rho, z>}
    rho = [mp.mpf(float(t)) for t in spec.weyl_vector]
    log_abs += -2 * mp.pi * lat.inner(rho, y)
    arg += 2 * mp.pi * lat.inner(rho, x)
    arg = mp.fmod(arg, 2 * mp.pi)

    tail = _tail_bound(spec, n, yy, b, shell_counts)
    if tail > tol:
        raise TailTooLargeError(
            f"truncation tail bound {mp.nstr(tail, 5)} exceeds tolerance {tol}; "
            "raise the truncation threshold or move Im z deeper into the cone")
    return log_abs, arg, tail


def _tail_bound(spec: ProductSpec, rank: int, yy: float, b: float,
                shell_counts: dict):
    """Geometric majorant for the factors beyond <lam, y> > b.

    A factor at pairing t contributes |exponent| * |log(1 - u)| with
    |u| = e^{-2 pi t}; its norm obeys lam^2 <= (t)^2/<y,y> (Cauchy-Schwarz
    against y in the Lorentzian cone), so its exponent is bounded by the
    largest table coefficient at k <= t^2/(2<y,y>), extrapolated past the
    table depth by the circle-method growth e^{4 pi sqrt(2k)}.  Shell
    counts follow the fitted c0 (t+1)^{rank-1} model (safety factor 4).
    """
    c0 = _factor_count_model(sorted(shell_counts.items()), rank)
    ks = sorted({float(k) for (_g, k) in spec.table.coeffs})
    k_top = float(spec.table.k_max)

    def cmax_up_to(k_need: float) -> float:
        vals = [abs(float(mp.re(c))) + abs(float(mp.im(c)))
                for (g, k), c in spec.table.coeffs.items() if float(k) <= min(k_need, k_top)]
        base = max(vals, default=0.0) * abs(spec.alpha)
        base = max(base, 1.0)
        if k_need > k_top:
            base *= math.exp(4 * math.pi * (math.sqrt(2 * k_need)
                                            - math.sqrt(2 * max(k_top, 0.0))))
        return base

    tail = mp.mpf(0)
    for j in range(400):
        t = b + j
        k_need = (t + 1) ** 2 / (2 * yy)
        term = (c0 * cmax_up_to(k_need) * (t + 2) ** (rank - 1)
                * mp.mpf("1.3") * mp.e ** (-2 * mp.pi * t))
        tail += term
        if term < mp.mpf(10) ** (-mp.mp.dps - 5) * max(tail, mp.mpf(1)):
            break
    return tail


def petersson_norm_psi(spec: ProductSpec, z: TubePoint, tol: float = 1e-12):
    """||Psi(z, alpha F)||^2 = <y,y>^{alpha w} |Psi|^2 with w = c_0(0)/2.

    Returns (norm_sq, log_abs, tail_bound, weight alpha*w).  The 1/alpha
    root  ||Psi(., F)||^2 = norm_sq^{1/alpha}  is exposed by the caller
    taking the root, alpha being part of the spec.
    """
    log_abs, _arg, tail = borcherds_log_product(spec, z, tol)
    zero = tuple(0 for _ in range(len(spec.table.disc_form.elementary_divisors)))
    c00 = spec.table.coefficient(zero, Fraction(0))
    weight = spec.alpha * c00 / 2  # alpha * w(Lambda)
    yy = mp.mpf(z.yy)
    norm_sq = yy ** (mp.mpf(float(weight))) * mp.e ** (2 * log_abs)
    return norm_sq, log_abs, tail, weight
