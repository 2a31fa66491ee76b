"""Dedekind eta, Jacobi/Siegel theta constants, and Petersson norms.

All values are mpmath complex numbers; precision is controlled by the
global mpmath context (or per call via the ``dps`` argument).  Truncation
errors are bounded by geometric majorants: eta's pentagonal series and
the theta sums decay like exp(-c n^2 Im tau), so the cutoff for a target
of t digits is O(sqrt(t / Im tau)).

Petersson norm convention (weight one-half per eta factor):

    ||eta(tau)^p||^2 = (Im tau)^{p/2} |eta(tau)|^{2p}

so that ||eta^4|| = (Im tau) |eta|^4, the normalization fixed by the
Kronecker limit formula zeta'(0) = -log(2 ||eta||^4).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import mpmath as mp

from .errors import ThetaNearZeroError


def _ensure_upper_half(tau) -> mp.mpc:
    tau = mp.mpc(tau)
    if not (mp.im(tau) > 0):
        raise ValueError(f"tau = {tau} is not in the upper half-plane")
    return tau


def _eta_cutoff(im_tau) -> int:
    """Pentagonal index k with q^{k(3k-1)/2} below working precision."""
    target = mp.mp.prec * mp.log(2) + 10
    # k(3k-1)/2 * 2 pi Im(tau) >= target
    kk = mp.sqrt(target / (3 * mp.pi * im_tau)) + 2
    return int(mp.ceil(kk))


def eta(tau, nterms: Optional[int] = None):
    """Dedekind eta via the pentagonal number series
    eta(tau) = q^{1/24} sum_k (-1)^k (q^{k(3k-1)/2} + q^{k(3k+1)/2})."""
    tau = _ensure_upper_half(tau)
    q = mp.e ** (2j * mp.pi * tau)
    kmax = nterms if nterms is not None else _eta_cutoff(mp.im(tau))
    if kmax < 1:
        raise ValueError("nterms must be >= 1")
    s = mp.mpc(1)
    for k in range(1, kmax + 1):
        sgn = -1 if k % 2 else 1
        s += sgn * (q ** (k * (3 * k - 1) // 2) + q ** (k * (3 * k + 1) // 2))
    return mp.e ** (2j * mp.pi * tau / 24) * s


def log_eta(tau):
    """log eta(tau) with the branch  (2 pi i tau / 24) + Log(sum);
    continuous along horocycles (the sum stays near 1 for large Im tau)."""
    tau = _ensure_upper_half(tau)
    q = mp.e ** (2j * mp.pi * tau)
    kmax = _eta_cutoff(mp.im(tau))
    s = mp.mpc(1)
    for k in range(1, kmax + 1):
        sgn = -1 if k % 2 else 1
        s += sgn * (q ** (k * (3 * k - 1) // 2) + q ** (k * (3 * k + 1) // 2))
    return 2j * mp.pi * tau / 24 + mp.log(s)


def petersson_norm_eta_power(tau, p: int):
    """||eta^p|| = (Im tau)^{p/4} |eta(tau)|^p  (real, SL2(Z)-invariant).

    eta^p has weight p/2, so the squared norm is (Im tau)^{p/2}|eta|^{2p};
    this returns the unsquared norm, e.g. ||eta^4|| = (Im tau)|eta|^4,
    the quantity appearing in the Kronecker limit formula.
    """
    tau = _ensure_upper_half(tau)
    y = mp.im(tau)
    return y ** (mp.mpf(p) / 4) * mp.fabs(eta(tau)) ** p


def theta_a1(tau, k: int = 0, cutoff: Optional[int] = None):
    """theta_{A1 + k/2}(tau) = sum_n exp(2 pi i (n + k/2)^2 tau), k in {0,1}."""
    if k not in (0, 1):
        raise ValueError("k must be 0 or 1")
    tau = _ensure_upper_half(tau)
    if cutoff is None:
        target = mp.mp.prec * mp.log(2) + 10
        cutoff = int(mp.ceil(mp.sqrt(target / (2 * mp.pi * mp.im(tau))))) + 2
    s = mp.mpc(0)
    for n in range(-cutoff, cutoff + 1):
        a = n + mp.mpf(k) / 2
        s += mp.e ** (2j * mp.pi * a * a * tau)
    return s


def log_theta_a1(tau, k: int = 0):
    """Log of theta_{A1 + k/2}; theta_3-type constants never vanish on H."""
    val = theta_a1(tau, k)
    return mp.log(val)


def phi_lambda(tau, r: int):
    """eta(tau)^-8 eta(2 tau)^8 eta(4 tau)^-8 theta_{A1}(tau)^{12-r}.

    Weakly holomorphic of weight (4-r)/2 on Gamma_0(4); its q-expansion
    begins q^{-1}(1 + ...) since the eta quotient has order -1.
    """
    return mp.e ** (log_phi_lambda(tau, r))


def log_phi_lambda(tau, r: int):
    tau = _ensure_upper_half(tau)
    out = -8 * log_eta(tau) + 8 * log_eta(2 * tau) - 8 * log_eta(4 * tau)
    if r != 12:
        out += (12 - r) * log_theta_a1(tau, 0)
    return out


def lattice_theta_e8(tau, norm_bound: Optional[int] = None):
    """theta_{E8+}(tau) = sum over E8 vectors of exp(pi i <v,v> tau),
    summed through shells of norm <= norm_bound (defaults from precision)."""
    tau = _ensure_upper_half(tau)
    if norm_bound is None:
        target = mp.mp.prec * mp.log(2) + 10
        norm_bound = int(mp.ceil(target / (mp.pi * mp.im(tau)))) + 2
    counts = e8_shell_counts(norm_bound)
    s = mp.mpc(1)
    for n, c in sorted(counts.items()):
        s += c * mp.e ** (1j * mp.pi * n * tau)
    return s


def e8_shell_counts(norm_bound: int) -> dict:
    """{norm: vector count} for positive definite E8, norms <= norm_bound."""
    from .lattices import rescale, standard
    from .products import short_vectors
    e8_pos = rescale(standard("E_8"), -1)
    counts: dict = {}
    for v in short_vectors(e8_pos, bound=norm_bound, include_zero=False):
        n = e8_pos.inner(v, v)
        counts[n] = counts.get(n, 0) + 1
    return counts


# ---------------------------------------------------------------------------
# Siegel theta constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaCharacteristic:
    """Half-integral characteristic (a, b) with a, b in {0, 1/2}^g."""

    a: tuple[Fraction, ...]
    b: tuple[Fraction, ...]

    def __post_init__(self):
        for v in (*self.a, *self.b):
            if v not in (Fraction(0), Fraction(1, 2)):
                raise ValueError("characteristic entries must be 0 or 1/2")

    @property
    def genus(self) -> int:
        return len(self.a)

    def is_even(self) -> bool:
        return (4 * sum(x * y for x, y in zip(self.a, self.b))) % 2 == 0


def even_characteristics(g: int) -> list[ThetaCharacteristic]:
    """All even characteristics; there are 2^{g-1}(2^g + 1) of them."""
    half = (Fraction(0), Fraction(1, 2))
    out = []
    for a in itertools.product(half, repeat=g):
        for b in itertools.product(half, repeat=g):
            ch = ThetaCharacteristic(a, b)
            if ch.is_even():
                out.append(ch)
    return out


def _check_siegel(omega, g: int):
    om = mp.matrix(omega) if not isinstance(omega, mp.matrix) else omega
    if om.rows != g or om.cols != g:
        raise ValueError("omega has wrong size")
    for i in range(g):
        for j in range(i + 1, g):
            if mp.fabs(om[i, j] - om[j, i]) > mp.mpf(10) ** (-mp.mp.dps + 3):
                raise ValueError("omega must be symmetric")
    y = mp.matrix(g, g)
    for i in range(g):
        for j in range(g):
            y[i, j] = mp.im(om[i, j])
    eigvals = mp.eigsy(y, eigvals_only=True)
    if min(eigvals) <= 0:
        raise ValueError("Im(omega) must be positive definite")
    return om, y, min(eigvals)


def riemann_theta_constant(ch: ThetaCharacteristic, omega, cutoff: Optional[int] = None):
    """theta_{a,b}(Omega) = sum_{n in Z^g} exp(pi i (n+a)^T Omega (n+a)
    + 2 pi i (n+a)^T b), for even (a, b).

    The sum is truncated to the ellipsoid ||n+a||_{Im Omega} <= R chosen
    from the smallest eigenvalue of Im Omega and the working precision.
    """
    if not ch.is_even():
        raise ValueError("odd characteristic: theta constant vanishes identically")
    g = ch.genus
    if g == 0:
        return mp.mpc(1)
    om, yim, lam_min = _check_siegel(omega, g)
    if cutoff is None:
        target = mp.mp.prec * mp.log(2) + 10
        r = mp.sqrt(target / (mp.pi * lam_min)) + 1
        cutoff = int(mp.ceil(r + 1))
    a = [mp.mpf(x.numerator) / x.denominator for x in ch.a]
    b = [mp.mpf(x.numerator) / x.denominator for x in ch.b]
    s = mp.mpc(0)
    for n in itertools.product(range(-cutoff, cutoff + 1), repeat=g):
        v = [n[i] + a[i] for i in range(g)]
        quad = mp.mpc(0)
        for i in range(g):
            for j in range(g):
                quad += v[i] * om[i, j] * v[j]
        lin = sum(v[i] * b[i] for i in range(g))
        s += mp.e ** (1j * mp.pi * quad + 2j * mp.pi * lin)
    return s


def chi_g(omega, g: int):
    """Product of all even theta constants (a Siegel form of weight
    2^{g-1}(2^g+1)/2 per its eighth power's weight bookkeeping)."""
    out = mp.mpc(1)
    for ch in even_characteristics(g):
        out *= riemann_theta_constant(ch, omega)
    return out


def chi_g_norm(omega, g: int):
    """||chi_g^8||^2 = (det Im Omega)^{2^{g+1}(2^g+1)} |chi_g^8|^2."""
    if g == 0:
        return mp.mpf(1)
    om, yim, _ = _check_siegel(omega, g)
    w = 2 ** (g + 1) * (2 ** g + 1)
    chi8 = chi_g(om, g) ** 8
    return mp.det(yim) ** w * mp.fabs(chi8) ** 2


def upsilon_g(omega, g: int, zero_threshold=None):
    """Upsilon_g = chi_g^8 * sum over even (a,b) of theta_{a,b}^{-8}.

    Refuses (ThetaNearZeroError) when some |theta_{a,b}| falls under the
    threshold: Omega is then essentially on the vanishing divisor.
    """
    if zero_threshold is None:
        zero_threshold = mp.mpf(10) ** (-30)
    thetas = [riemann_theta_constant(ch, omega) for ch in even_characteristics(g)]
    if any(mp.fabs(t) < zero_threshold for t in thetas):
        raise ThetaNearZeroError("a theta constant vanishes at this period point")
    chi8 = mp.fprod(thetas) ** 8
    return chi8 * mp.fsum(t ** (-8) for t in thetas)


def upsilon_g_norm(omega, g: int):
    """||Upsilon_g||^2 = (det Im Omega)^{2(2^g-1)(2^g+2)} |Upsilon_g|^2."""
    if g == 0:
        return mp.mpf(1)
    om, yim, _ = _check_siegel(omega, g)
    w = 2 * (2 ** g - 1) * (2 ** g + 2)
    return mp.det(yim) ** w * mp.fabs(upsilon_g(om, g)) ** 2
