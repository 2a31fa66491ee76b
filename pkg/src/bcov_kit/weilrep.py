"""Weil representation, metaplectic words, and Fourier tables of F_Lambda.

For an even lattice Lambda with discriminant form (A, q) and signature
(b+, b-), the Weil representation on C[A] is fixed on the metaplectic
generators by

    rho(T~) e_g = e^{pi i q(g)} e_g
    rho(S~) e_g = e((b- - b+)/8) / sqrt(|A|) * sum_d e(-b(g, d)) e_d

(the standard formulas; the eighth-root prefactor order is pinned by the
numerical modularity of the assembled F_Lambda of weight (4 - r)/2).

F_Lambda is the coset sum  sum_{gamma in G0(4)~ \\ Mp2(Z)}
phi_Lambda|_gamma rho(gamma^{-1}) e_0  where phi_Lambda is the eta/theta
quotient of weight (4-r)/2 on Gamma_0(4).  Its Fourier coefficients
c_gamma(k), k in Z + q(gamma)/2, are extracted by sampling F on a
horocycle Im tau = sampleY and taking a discrete Fourier transform in
Re tau, then de-weighting by e^{2 pi k sampleY}.  The de-weighting is
exponentially ill-conditioned in k * sampleY, so extraction runs at a
working precision chosen from (kMax, sampleY) and the worst horocycle
blow-up of phi_Lambda near the cusps; aliasing is certified by a sup
bound on a lower horocycle.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import mpmath as mp

from .errors import MissingCoefficientError, PrecisionLossError
from .lattices import DiscriminantForm, Lattice, discriminant_form, signature
from .qseries import log_eta, log_phi_lambda, log_theta_a1


# ---------------------------------------------------------------------------
# metaplectic words
# ---------------------------------------------------------------------------

_GEN_MATRICES = {
    "S": ((0, -1), (1, 0)),
    "T": ((1, 1), (0, 1)),
    "t": ((1, -1), (0, 1)),  # T^{-1}
}


def _mat_mul(a, b):
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


@dataclass(frozen=True)
class MetaplecticWord:
    """A word over {S, T, T^-1} with its SL2(Z) matrix.

    The square-root branch implied by composing the standard lifts
    S~ = (S, sqrt(tau)) and T~ = (T, 1) is evaluated pointwise by
    ``branch``; it is never reduced to a sign flag.
    """

    word: str  # letters 'S', 'T', 't'

    @property
    def matrix(self):
        m = ((1, 0), (0, 1))
        for ch in self.word:
            m = _mat_mul(m, _GEN_MATRICES[ch])
        return m

    def act(self, tau):
        a, b = self.matrix[0]
        c, d = self.matrix[1]
        return (a * tau + b) / (c * tau + d)

    def branch(self, tau):
        """phi(tau) with phi(tau)^2 = c tau + d, composed from the lifts."""
        phi = mp.mpc(1)
        # evaluate right-to-left: (w1 w2)~ branch = phi1(w2 tau) phi2(tau)
        current = mp.mpc(tau)
        for ch in reversed(self.word):
            if ch == "S":
                phi = phi * mp.sqrt(current)
            current = MetaplecticWord(ch).act(current)
        return phi

    def __mul__(self, other: "MetaplecticWord") -> "MetaplecticWord":
        return MetaplecticWord(self.word + other.word)


IDENTITY_WORD = MetaplecticWord("")
S_WORD = MetaplecticWord("S")
T_WORD = MetaplecticWord("T")


def coset_reps_gamma0_4() -> list[MetaplecticWord]:
    """Words representing the 6 cosets of Gamma_0(4)~ in Mp2(Z),
    found by breadth-first search over generator words."""
    def in_gamma0_4(m):
        return m[1][0] % 4 == 0

    def same_coset(m1, m2):
        # Gamma_0(4) g1 = Gamma_0(4) g2  iff  g1 g2^{-1} in Gamma_0(4)
        a, b = m2[0]
        c, d = m2[1]
        inv = ((d, -b), (-c, a))
        return in_gamma0_4(_mat_mul(m1, inv))

    reps: list[MetaplecticWord] = [IDENTITY_WORD]
    frontier = [IDENTITY_WORD]
    while frontier and len(reps) < 6:
        new_frontier = []
        for w in frontier:
            for ch in "STt":
                cand = MetaplecticWord(w.word + ch)
                if any(same_coset(cand.matrix, r.matrix) for r in reps):
                    continue
                reps.append(cand)
                new_frontier.append(cand)
        frontier = new_frontier
    assert len(reps) == 6, f"coset BFS found {len(reps)} cosets"
    return reps


# ---------------------------------------------------------------------------
# Weil representation
# ---------------------------------------------------------------------------

def _root_of_unity(x: Fraction):
    """e(x) = exp(2 pi i x) at working precision."""
    return mp.e ** (2j * mp.pi * mp.mpf(x.numerator) / x.denominator)


def weil_generators(df: DiscriminantForm, sig: tuple[int, int]):
    """(rho(T~), rho(S~)) as dense matrices over the element list of A.

    Element order is ``list(df.elements())``; both matrices are unitary.
    """
    b_plus, b_minus = sig
    if b_plus + b_minus != df.lattice.rank:
        raise ValueError("signature does not match the lattice rank")
    elems = list(df.elements())
    n = len(elems)
    index = {g: i for i, g in enumerate(elems)}
    rho_t = mp.zeros(n, n)
    for i, g in enumerate(elems):
        rho_t[i, i] = _root_of_unity(Fraction(df.q(g), 2) % 1)
    pref = _root_of_unity(Fraction(b_minus - b_plus, 8) % 1) / mp.sqrt(n)
    rho_s = mp.zeros(n, n)
    for i, g in enumerate(elems):
        for j, d in enumerate(elems):
            rho_s[i, j] = pref * _root_of_unity((-df.b(g, d)) % 1)
    return rho_t, rho_s


class WeilRepresentation:
    """Action of metaplectic words on C[A_Lambda].

    Small discriminant groups use dense mpmath matrices.  For 2-elementary
    groups with integral q and (b- - b+) = 0 mod 8, the representation is
    real with dyadic entries (a signed Hadamard-type S-matrix), and word
    actions run exactly in float64 (numerators stay far below 2^53 for
    the short coset words used here).
    """

    def __init__(self, lam: Lattice, df: Optional[DiscriminantForm] = None):
        self.lattice = lam
        self.disc_form = df if df is not None else discriminant_form(lam)
        self.sig = signature(lam)
        self.elements = list(self.disc_form.elements())
        self.index = {g: i for i, g in enumerate(self.elements)}
        self._dense: Optional[tuple] = None
        self._fast: Optional[tuple] = None
        self._init_fast_path()

    @property
    def dim(self) -> int:
        return len(self.elements)

    def _init_fast_path(self):
        import numpy as np
        df = self.disc_form
        b_plus, b_minus = self.sig
        if not df.is_two_elementary() or df.parity() != 0 \
                or (b_minus - b_plus) % 8 != 0:
            return
        l = len(df.elementary_divisors)
        n = self.dim
        bits = np.array(self.elements, dtype=np.int64).reshape(n, l)
        # 2*b(gen_i, gen_j) mod 2 from the generator lifts (exact integers)
        b2 = np.zeros((l, l), dtype=np.int64)
        for i in range(l):
            for j in range(l):
                val = 2 * df.b(tuple(int(i == t) for t in range(l)),
                               tuple(int(j == t) for t in range(l)))
                assert val.denominator == 1
                b2[i, j] = int(val) % 2
        signs_s = 1.0 - 2.0 * ((bits @ b2 @ bits.T) % 2)
        s_mat = signs_s / math.sqrt(n)
        t_diag = np.array([1.0 - 2.0 * (int(df.q(g)) % 2) for g in self.elements])
        self._fast = (s_mat, t_diag)

    def _dense_generators(self):
        if self._dense is None:
            rho_t, rho_s = weil_generators(self.disc_form, self.sig)
            n = self.dim
            rho_s_inv = mp.zeros(n, n)
            for i in range(n):
                for j in range(n):
                    rho_s_inv[i, j] = mp.conj(rho_s[j, i])
            self._dense = (rho_t, rho_s, rho_s_inv)
        return self._dense

    def matrix(self, w: MetaplecticWord):
        rho_t, rho_s, rho_s_inv = self._dense_generators()
        m = mp.eye(self.dim)
        for ch in w.word:
            if ch == "S":
                m = m * rho_s
            elif ch == "T":
                m = m * rho_t
            else:
                m = m * _diag_conj(rho_t)
        return m

    def apply_inverse_to_e0(self, w: MetaplecticWord):
        """rho(w^{-1}) e_0, built up one letter at a time (left products)."""
        zero = tuple(0 for _ in self.disc_form.elementary_divisors)
        if self._fast is not None:
            import numpy as np
            s_mat, t_diag = self._fast
            v = np.zeros(self.dim)
            v[self.index[zero]] = 1.0
            for ch in w.word:
                if ch == "S":
                    v = s_mat @ v  # real symmetric orthogonal: inverse = itself
                elif ch == "T":
                    v = t_diag * v  # +-1 diagonal: self-inverse
                else:
                    v = t_diag * v
            return [mp.mpf(t) for t in v]
        rho_t, rho_s, rho_s_inv = self._dense_generators()
        v = [mp.mpc(0)] * self.dim
        v[self.index[zero]] = mp.mpc(1)
        for ch in w.word:
            if ch == "S":
                v = self._matvec(rho_s_inv, v)
            elif ch == "T":
                v = [mp.conj(rho_t[i, i]) * v[i] for i in range(self.dim)]
            else:
                v = [rho_t[i, i] * v[i] for i in range(self.dim)]
        return v

    def _matvec(self, m, v):
        n = self.dim
        return [mp.fsum(m[i, j] * v[j] for j in range(n)) for i in range(n)]


def _diag_conj(m):
    out = mp.zeros(m.rows, m.cols)
    for i in range(m.rows):
        out[i, i] = mp.conj(m[i, i])
    return out


# ---------------------------------------------------------------------------
# Fourier tables
# ---------------------------------------------------------------------------

@dataclass
class FourierTable:
    """Fourier coefficients c_gamma(k) of a C[A]-valued form.

    ``coeffs`` maps (gamma, k) -> complex value, gamma a Smith-coordinate
    tuple, k a Fraction in Z + q(gamma)/2.  ``alpha`` is the integrality
    scale (alpha * c integral), ``k_max`` the largest extracted exponent.
    """

    disc_form: DiscriminantForm
    coeffs: dict
    alpha: int
    k_max: Fraction
    alias_bounds: dict = field(default_factory=dict)

    def coefficient(self, gamma: tuple, k: Fraction):
        k = Fraction(k)
        if (gamma, k) in self.coeffs:
            return self.coeffs[(gamma, k)]
        if k > self.k_max:
            raise MissingCoefficientError(
                f"coefficient c_{gamma}({k}) beyond table depth {self.k_max}")
        return 0

    def weight_w(self):
        """w(Lambda) = c_0(0)/2 (the Borcherds lift weight per unit alpha)."""
        zero = tuple(0 for _ in self.disc_form.elementary_divisors)
        return self.coefficient(zero, Fraction(0)) / 2

    def components(self):
        return sorted({g for (g, _k) in self.coeffs})

    def to_json(self) -> dict:
        comp: dict = {}
        for (g, k), c in sorted(self.coeffs.items()):
            comp.setdefault(g, []).append(
                [k.numerator, k.denominator, float(mp.re(c)), float(mp.im(c))])
        return {
            "alpha": self.alpha,
            "components": [
                {"gamma": list(g), "terms": terms} for g, terms in comp.items()
            ],
        }

    @classmethod
    def from_json(cls, data: dict, disc_form: DiscriminantForm) -> "FourierTable":
        coeffs = {}
        k_max = Fraction(0)
        for comp in data["components"]:
            g = tuple(comp["gamma"])
            for num, den, re, im in comp["terms"]:
                k = Fraction(num, den)
                coeffs[(g, k)] = mp.mpc(re, im)
                k_max = max(k_max, k)
        return cls(disc_form, coeffs, int(data["alpha"]), k_max)


def make_table(disc_form: DiscriminantForm, entries: dict, alpha: int = 1,
               k_max=None) -> FourierTable:
    """Assemble a FourierTable from {(gamma, k): value} with validation.

    ``k_max`` may state a depth beyond the last nonzero entry (all
    exponents up to it are then implicitly zero)."""
    coeffs = {}
    top = Fraction(-10)
    for (g, k), v in entries.items():
        k = Fraction(k)
        offset = (Fraction(disc_form.q(g), 2)) % 1
        if (k - offset).denominator != 1:
            raise ValueError(f"exponent {k} not in Z + q({g})/2")
        coeffs[(tuple(g), k)] = v
        top = max(top, k)
    if k_max is not None:
        top = max(top, Fraction(k_max))
    return FourierTable(disc_form, coeffs, alpha, top)


# ---------------------------------------------------------------------------
# the coset sum F_Lambda and coefficient extraction
# ---------------------------------------------------------------------------

def _slash_phi(word: MetaplecticWord, tau, r: int):
    """(phi_Lambda |_w)(tau) = branch(tau)^{-2w} phi_Lambda(w tau),
    weight w = (4-r)/2, evaluated in the log domain."""
    wt2 = 4 - r  # -2w = r - 4, i.e. multiply by branch^{r-4}
    tau_w = word.act(mp.mpc(tau))
    log_val = log_phi_lambda(tau_w, r)
    br = word.branch(tau)
    return mp.e ** (log_val + (r - 4) * mp.log(br))


class FLambdaEvaluator:
    """Pointwise evaluator of F_Lambda(tau) over the 6 cosets."""

    def __init__(self, lam: Lattice, reps: Optional[list[MetaplecticWord]] = None):
        sig = signature(lam)
        if sig[0] != 2:
            raise ValueError(f"need signature (2, r-2), got {sig}")
        self.lattice = lam
        self.rank = lam.rank
        self.rep = WeilRepresentation(lam)
        self.reps = reps if reps is not None else coset_reps_gamma0_4()
        self.vectors = [self.rep.apply_inverse_to_e0(w) for w in self.reps]

    def value(self, tau):
        """F_Lambda(tau) as a list over the discriminant element order."""
        n = self.rep.dim
        out = [mp.mpc(0)] * n
        for w, vec in zip(self.reps, self.vectors):
            s = _slash_phi(w, tau, self.rank)
            for i in range(n):
                if vec[i] != 0:
                    out[i] += s * vec[i]
        return out

    def component(self, tau, idx: int):
        out = mp.mpc(0)
        for w, vec in zip(self.reps, self.vectors):
            if vec[idx] != 0:
                out += _slash_phi(w, tau, self.rank) * vec[idx]
        return out


def _extraction_dps(lam: Lattice, k_max, sample_y: float, n_samples: int) -> int:
    """Working digits for the horocycle DFT: de-weighting e^{2 pi k y},
    plus the worst phi_Lambda blow-up ~ e^{ pi / (2 Im(w tau)) } |c tau + d|^{r-4}
    over the sample points, plus target digits."""
    reps = coset_reps_gamma0_4()
    r = lam.rank
    worst = 0.0
    for w in reps:
        (a, b), (c, d) = w.matrix
        for j in range(0, n_samples, max(1, n_samples // 16)):
            x = j / n_samples
            tau = complex(x, sample_y)
            den = c * tau + d
            im_w = sample_y / abs(den) ** 2
            blow = math.pi / (2 * im_w) / math.log(10)
            blow += abs(r - 4) * math.log(max(abs(den), 1.0)) / math.log(10)
            worst = max(worst, blow)
    deweight = 2 * math.pi * float(k_max) * sample_y / math.log(10)
    return int(worst + deweight) + 30


def f_lambda_table(lam: Lattice, sample_y: float = 2.0, n_samples: int = 256,
                   k_max=6, components: Optional[Sequence[int]] = None,
                   tol: float = 1e-6, evaluator_factory=None) -> FourierTable:
    """Extract c_gamma(k) of F_Lambda for k <= k_max by horocycle DFT.

    Components may restrict extraction to a subset of discriminant
    elements (by index into the element order).  Coefficients are known
    to be real for these forms; imaginary parts below ``tol`` are zeroed
    and anything larger raises PrecisionLossError.
    """
    k_max = Fraction(k_max)
    if sample_y < 1:
        raise ValueError("sampleY must be >= 1")
    depth = 1  # principal part reaches k = -1
    if n_samples & (n_samples - 1) or n_samples < 4 * (int(k_max) + depth):
        raise ValueError("nSamples must be a power of two >= 4 (kMax + depth)")

    dps = _extraction_dps(lam, k_max, sample_y, n_samples)
    with mp.workdps(dps):
        evaluator = (evaluator_factory or FLambdaEvaluator)(lam)
        rep = evaluator.rep
        df = rep.disc_form
        idxs = list(components) if components is not None else list(range(rep.dim))

        samples = []
        for j in range(n_samples):
            tau = mp.mpc(mp.mpf(j) / n_samples, sample_y)
            if components is not None and len(idxs) < rep.dim // 4:
                vals = {i: evaluator.component(tau, i) for i in idxs}
            else:
                full = evaluator.value(tau)
                vals = {i: full[i] for i in idxs}
            samples.append(vals)

        # sup |F| on a lower horocycle for the aliasing certificate
        y_low = max(1.0, sample_y / 2)
        sup_low = mp.mpf(0)
        for j in range(0, n_samples, max(1, n_samples // 32)):
            tau = mp.mpc(mp.mpf(j) / n_samples, y_low)
            if components is not None and len(idxs) < rep.dim // 4:
                m = max(mp.fabs(evaluator.component(tau, i)) for i in idxs)
            else:
                m = max(mp.fabs(v) for v in evaluator.value(tau))
            sup_low = max(sup_low, m)
        sup_low *= 2  # coarse-grid safety factor

        coeffs = {}
        alias_bounds = {}
        decay = mp.e ** (-2 * mp.pi * n_samples * (sample_y - y_low))
        for i in idxs:
            gamma = rep.elements[i]
            offset = (Fraction(df.q(gamma), 2)) % 1
            # target exponents k = m + offset in [-1, k_max]
            m_lo = int(math.ceil(-1 - 1e-9 - float(offset)))
            m_hi = int(math.floor(float(k_max - offset) + 1e-9))
            for m_int in range(m_lo, m_hi + 1):
                k = m_int + offset
                acc = mp.mpc(0)
                for j in range(n_samples):
                    x = mp.mpf(j) / n_samples
                    acc += samples[j][i] * mp.e ** (-2j * mp.pi * (m_int + offset) * x)
                ghat = acc / n_samples
                c = ghat * mp.e ** (2 * mp.pi * k * sample_y)
                alias = sup_low * mp.e ** (2 * mp.pi * k * y_low) * decay / (1 - decay)
                if alias > tol:
                    raise PrecisionLossError(
                        f"aliasing bound {mp.nstr(alias, 3)} at k={k} exceeds {tol}")
                if mp.fabs(mp.im(c)) > tol:
                    raise PrecisionLossError(
                        f"imaginary part {mp.nstr(mp.im(c), 3)} of c_{gamma}({k}) "
                        f"exceeds {tol}")
                c = mp.mpf(mp.re(c))
                if mp.fabs(c) > mp.mpf(10) ** (-max(8, dps // 4)):
                    coeffs[(gamma, Fraction(k))] = c
                alias_bounds[(gamma, Fraction(k))] = alias

        from .lattices import two_elementary_invariants
        try:
            inv = two_elementary_invariants(lam)
            g_lam = (inv.r - inv.l) // 2
        except Exception:
            g_lam = 1
        alpha = 2 ** max(g_lam - 1, 0)
        table = FourierTable(df, coeffs, alpha, Fraction(k_max), alias_bounds)
    return table


def special_f_lambda(case: str, depth: int = 6) -> FourierTable:
    """The explicit correction form f_Lambda of the (r, delta) = (2, 0) cases.

    case "U":    f = theta_{E8+}(tau) / eta(tau)^24  on the trivial
                 discriminant group of U^perp = U + U + E8 + E8; exact
                 integer coefficients by formal division.
    case "U(2)": the eta-quotient combination on A_{U(2)^perp} = (Z/2)^2,
                 8 sum_gamma [eta(tau/2)^-8 eta(tau)^-8
                   + (-1)^{q(gamma)} eta((tau+1)/2)^-8 eta(tau+1)^-8] e_gamma
                   + e_0 eta(tau)^-8 eta(2tau)^-8,
                 extracted numerically from the closed form.
    """
    from .lattices import direct_sum, rescale, standard
    from .series import QSeries, e8_theta_series, eta_series

    u = standard("U")
    e8 = standard("E_8")
    if case == "U":
        lam = direct_sum(u, u, e8, e8, label="U+U+E8+E8")
        df = discriminant_form(lam)
        margin = Fraction(2)
        theta = e8_theta_series(depth + margin)
        eta24 = eta_series(depth + margin).pow(24)
        series = theta * eta24.inverse()
        entries = {}
        for k, c in series.items():
            if -1 <= k <= depth:
                entries[((), Fraction(k))] = int(c)
        return make_table(df, entries, alpha=1)
    if case == "U(2)":
        lam = direct_sum(rescale(u, 2), u, e8, e8, label="U(2)+U+E8+E8")
        df = discriminant_form(lam)
        elems = list(df.elements())

        def f_component(gamma, tau):
            q_g = df.q(gamma)
            sign = mp.e ** (1j * mp.pi * mp.mpf(q_g.numerator) / q_g.denominator)
            t1 = mp.e ** (-8 * log_eta(tau / 2) - 8 * log_eta(tau))
            t2 = mp.e ** (-8 * log_eta((tau + 1) / 2) - 8 * log_eta(tau + 1))
            out = 8 * (t1 + sign * t2)
            if all(a == 0 for a in gamma):
                out += mp.e ** (-8 * log_eta(tau) - 8 * log_eta(2 * tau))
            return out

        entries = {}
        sample_y = 2.0
        n = 128
        with mp.workdps(40 + int(2 * math.pi * depth * sample_y / math.log(10))):
            for gamma in elems:
                offset = (Fraction(df.q(gamma), 2)) % 1
                samples = [f_component(gamma, mp.mpc(mp.mpf(j) / n, sample_y))
                           for j in range(n)]
                m_lo = int(math.ceil(-1 - float(offset)))
                m_hi = int(math.floor(depth - float(offset)))
                for m_int in range(m_lo, m_hi + 1):
                    k = m_int + offset
                    acc = mp.fsum(
                        samples[j] * mp.e ** (-2j * mp.pi * float(k) * mp.mpf(j) / n)
                        for j in range(n))
                    c = acc / n * mp.e ** (2 * mp.pi * float(k) * sample_y)
                    if mp.fabs(c) > 1e-8:
                        c_round = mp.nint(mp.re(c))
                        entries[(gamma, Fraction(k))] = c_round \
                            if mp.fabs(c - c_round) < 1e-5 else mp.re(c)
        return make_table(df, entries, alpha=1)
    raise ValueError(f"unknown case {case!r}; expected 'U' or 'U(2)'")


def verify_vvmf(evaluator, word: MetaplecticWord, tau, weight, rep=None):
    """Residual || F(w tau) - branch(tau)^{2 weight} rho(w) F(tau) ||.

    ``evaluator`` is an FLambdaEvaluator or any callable tau -> vector.
    """
    if isinstance(evaluator, FLambdaEvaluator):
        value = evaluator.value
        rep = evaluator.rep
    else:
        value = evaluator
        if rep is None:
            raise ValueError("rep required for a bare evaluator")
    tau = mp.mpc(tau)
    lhs = value(word.act(tau))
    rhs_vec = value(tau)
    rho_w = rep.matrix(word)
    br = word.branch(tau) ** int(2 * weight) if float(2 * weight).is_integer() \
        else mp.e ** (2 * weight * mp.log(word.branch(tau)))
    n = rep.dim
    rhs = [br * mp.fsum(rho_w[i, j] * rhs_vec[j] for j in range(n)) for i in range(n)]
    return max(mp.fabs(lhs[i] - rhs[i]) for i in range(n))
