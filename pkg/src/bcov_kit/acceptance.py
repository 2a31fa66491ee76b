"""The acceptance suite: one callable per criterion, shared by the CLI
``accept`` subcommand and tests/test_acceptance.py.

Each criterion function returns (passed: bool, detail: str).  Tolerances
are pinned here, straight from the contract; nothing is deferred to
runtime calibration.
"""

from __future__ import annotations

import math
import random
import time
from fractions import Fraction

import mpmath as mp

from .assembly import (BVEvaluation, covolume_check, select_case,
                       tau_bcov_power_rhs, tau_m_power_rhs, theorem82_constant)
from .lattices import (Lattice, direct_sum, discriminant_form, make_lattice,
                       rescale, standard, two_elementary_invariants)
from .orbifold import (GROUP_G, CurveRecord, FixedPointData, PointRecord,
                       borcea_voisin_fixture, check_lemma_4_6,
                       dedekind_sum_check, enumerate_small_groups,
                       epsilon_closed, epsilon_k, gamma0, make_group)
from .products import ProductSpec, TubePoint, borcherds_log_product, petersson_norm_psi
from .qseries import (ThetaCharacteristic, chi_g_norm, eta,
                      even_characteristics, petersson_norm_eta_power,
                      riemann_theta_constant)
from .spectral import bv_zeta_combination, kronecker_residual, tau_ell
from .weilrep import (FLambdaEvaluator, S_WORD, T_WORD, MetaplecticWord,
                      WeilRepresentation, f_lambda_table, make_table,
                      verify_vvmf)

SAMPLE_TAUS = ("0,1", "0.5,1", "0.3333333333333333,2", "0.1,0.9", "rho")


def _five_points():
    rho = mp.e ** (1j * mp.pi / 3)
    return [mp.mpc(0, 1), mp.mpc("0.5", 1), mp.mpc(1, 0) / 3 + 2j,
            mp.mpc("0.1", "0.9"), rho]


def criterion_1_kronecker():
    """Kronecker limit formula residual < 1e-8 at 5 points, < 5 s."""
    t0 = time.time()
    with mp.workdps(25):
        worst = max(kronecker_residual(tau) for tau in _five_points())
    dt = time.time() - t0
    ok = worst < 1e-8 and dt < 5.0
    return ok, f"max residual {mp.nstr(worst, 3)}, {dt:.2f} s"


def criterion_2_tau_ell():
    """tau_ell eta-route vs zeta-route relative difference < 1e-8."""
    with mp.workdps(25):
        worst = mp.mpf(0)
        for tau in _five_points():
            a, b = tau_ell(tau)
            worst = max(worst, mp.fabs(a - b) / a)
    return worst < 1e-8, f"max relative difference {mp.nstr(worst, 3)}"


def criterion_3_dedekind():
    """Dedekind sum identity residual < 1e-12 for all n <= 50, < 1 s."""
    t0 = time.time()
    with mp.workdps(25):
        worst = mp.mpf(0)
        for n in range(2, 51):
            for m in range(1, n):
                if math.gcd(m, n) == 1:
                    worst = max(worst, dedekind_sum_check(n, m))
    dt = time.time() - t0
    ok = worst < 1e-12 and dt < 1.0
    return ok, f"max residual {mp.nstr(worst, 3)}, {dt:.2f} s"


_GROUP_SCAN_CACHE: list = []


def _scanned_groups():
    if not _GROUP_SCAN_CACHE:
        _GROUP_SCAN_CACHE.extend(enumerate_small_groups(max_den=8))
    return _GROUP_SCAN_CACHE


def criterion_4_epsilon():
    """epsilon_1 = epsilon_2 = epsilon_3 = closed form (exact rationals) on
    the exhaustive <= 2-generator, denominator <= 8 scan; G gives -1/8."""
    groups = _scanned_groups()
    checked = 0
    for g in groups:
        if g.common_fixed_dim() != 0:
            continue
        closed = epsilon_closed(g)
        for k in range(3):
            if epsilon_k(g, k) != closed:
                return False, f"mismatch at group of order {g.order}"
        checked += 1
    ok = epsilon_closed(GROUP_G) == Fraction(-1, 8)
    return ok and checked > 0, f"{checked} groups checked, eps(G) = {epsilon_closed(GROUP_G)}"


def criterion_5_lemma_classification():
    """The scan finds the (Z/2)^2 half-turn group as the unique group with
    no common fixed axis and empty Gamma^0."""
    groups = _scanned_groups()
    hits = [g for g in groups
            if g.common_fixed_dim() == 0 and not gamma0(g)]
    ok = (len(hits) == 1
          and set(hits[0].elements) == set(GROUP_G.elements)
          and all(check_lemma_4_6(g) for g in groups))
    return ok, f"{len(hits)} group(s) meet both preconditions out of {len(groups)}"


def _valid_triples():
    out = []
    for r in range(1, 21):
        for l in range(0, min(r, 22 - r) + 1):
            if (r + l) % 2:
                continue
            for delta in (0, 1):
                out.append((r, l, delta))
    return out


def _random_fixed_point_data(rng: random.Random) -> FixedPointData:
    """A validator-consistent synthetic record built from a small SL(3,C)
    group acting with an isolated fixed point at the origin."""
    pool = [g for g in _scanned_groups()
            if g.common_fixed_dim() == 0 and 2 <= g.order <= 36]
    grp = rng.choice(pool)
    # ambient G = the group itself, labelled by positions in a product of
    # cyclic factors: use the element tuples directly as labels by taking
    # moduli = lcm denominators per coordinate
    moduli = tuple(max((t[k].denominator for t in grp.elements), default=1)
                   for k in range(3))
    lcm = 1
    for t in grp.elements:
        for x in t:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    labels = {t: tuple(int(x * lcm) % lcm for x in t) for t in grp.elements}
    moduli = (lcm, lcm, lcm)
    ident = (0, 0, 0)

    curves = []
    through = []
    for k in range(3):
        ker = [t for t in grp.elements if t[k] == 0]
        if len(ker) > 1:
            fixers = frozenset(labels[t] for t in ker if t != grp.identity)
            curves.append(CurveRecord(chi=rng.choice([-4, -2, 0, 2, 2, 4]),
                                      fixers=fixers))
            through.append(len(curves) - 1)
    members = {labels[t]: t for t in grp.elements}
    points = [PointRecord(members=members, through_curves=tuple(through))]
    # optionally a free-floating curve fixed by a random cyclic subgroup
    if rng.random() < 0.5:
        t = rng.choice(grp.nontrivial())
        sub = {grp.identity}
        cur = t
        while cur != grp.identity:
            sub.add(cur)
            cur = tuple((a + b) % 1 for a, b in zip(cur, t))
        fixers = frozenset(labels[s] for s in sub if s != grp.identity)
        curves.append(CurveRecord(chi=rng.choice([-2, 0, 2]), fixers=fixers))
    return FixedPointData(moduli=moduli,
                          chi_ambient=rng.choice([-24, 0, 24, 48]),
                          curves=curves, points=points)


def criterion_6_euler():
    """chi_orb = roan_chi exactly on 50 random records and all fixtures;
    fixtures give chi_orb = 12 (r - 10)."""
    rng = random.Random(20240611)
    for i in range(50):
        data = _random_fixed_point_data(rng)
        a, b = data.chi_orb(), data.roan_chi()
        if a != b:
            return False, f"random instance {i}: chi_orb {a} != roan {b}"
    for (r, l, delta) in _valid_triples():
        fx = borcea_voisin_fixture(r, l, delta)
        a, b = fx.chi_orb(), fx.roan_chi()
        if a != b or a != 12 * (r - 10):
            return False, f"fixture ({r},{l},{delta}): {a} vs {b} vs {12*(r-10)}"
    return True, f"50 random + {len(_valid_triples())} fixtures, all exact"


def criterion_7_spectral():
    """Signed-multiset identity exact on 100 random instances; numeric
    residual < 1e-10 at s in {2, 3, 1+i}; < 10 s."""
    t0 = time.time()
    rng = random.Random(987)
    with mp.workdps(25):
        worst_num = mp.mpf(0)
        for i in range(100):
            plus = [Fraction(rng.randint(1, 60), rng.randint(1, 9)) for _ in range(rng.randint(0, 6))]
            minus = [Fraction(rng.randint(1, 60), rng.randint(1, 9)) for _ in range(rng.randint(0, 7))]
            nu = [Fraction(rng.randint(1, 60), rng.randint(1, 9)) for _ in range(rng.randint(1, 11))]
            h11p = rng.randint(0, 20)
            svals = [2, 3, mp.mpc(1, 1)] if i < 10 else []
            out = bv_zeta_combination(plus, minus, nu, h11p, s_values=svals)
            if out["multiset_residual"] != 0:
                return False, f"instance {i}: multiset residual {out['multiset_residual']}"
            if any(v != 0 for v in out["lemma_residuals"].values()):
                return False, f"instance {i}: sector lemma failed"
            for v in out["numeric_residuals"]:
                worst_num = max(worst_num, v)
    dt = time.time() - t0
    ok = worst_num < 1e-10 and dt < 10.0
    return ok, f"100 instances exact, max numeric residual {mp.nstr(worst_num, 3)}, {dt:.1f} s"


_TABLE_CACHE: dict = {}


def table_u_u(k_max=6, sample_y=2.0):
    key = ("UU", k_max, sample_y)
    if key not in _TABLE_CACHE:
        lam = direct_sum(standard("U"), standard("U"), label="U+U")
        _TABLE_CACHE[key] = f_lambda_table(lam, sample_y=sample_y,
                                           n_samples=128, k_max=k_max)
    return _TABLE_CACHE[key]


def table_rank12(k_max=6, sample_y=2.0):
    key = ("UUE8", k_max, sample_y)
    if key not in _TABLE_CACHE:
        lam = direct_sum(standard("U"), standard("U"), standard("E_8"),
                         label="U+U+E8")
        _TABLE_CACHE[key] = f_lambda_table(lam, sample_y=sample_y,
                                           n_samples=128, k_max=k_max)
    return _TABLE_CACHE[key]


def criterion_8_integrality():
    """2^{g-1} c_gamma(k) rounds to integers (residual < 1e-6) for U+U and
    the rank-12 lattice U+U+E8, k <= 6; horocycle robustness y = 2 vs 3;
    runtime < 60 s."""
    t0 = time.time()
    worst_round = mp.mpf(0)
    worst_agree = mp.mpf(0)
    for maker in (table_u_u, table_rank12):
        tab2 = maker(6, 2.0)
        tab3 = maker(6, 3.0)
        for (g, k), c in tab2.coeffs.items():
            scaled = tab2.alpha * c
            worst_round = max(worst_round, mp.fabs(scaled - mp.nint(scaled)))
        keys = set(tab2.coeffs) | set(tab3.coeffs)
        for key in keys:
            c2 = tab2.coeffs.get(key, mp.mpf(0))
            c3 = tab3.coeffs.get(key, mp.mpf(0))
            bound = (tab2.alias_bounds.get(key, mp.mpf(0))
                     + tab3.alias_bounds.get(key, mp.mpf(0)) + 1e-6)
            worst_agree = max(worst_agree, mp.fabs(c2 - c3) - bound)
    dt = time.time() - t0
    ok = worst_round < 1e-6 and worst_agree <= 0 and dt < 60.0
    return ok, (f"max rounding residual {mp.nstr(worst_round, 3)}, "
                f"height agreement slack {mp.nstr(worst_agree, 3)}, {dt:.1f} s")


def criterion_9_modularity():
    """F transformation residuals under S~ and T~ < 1e-6 at 3 sample tau;
    metaplectic relation rho((S~T~)^3) = rho(S~^2) < 1e-12."""
    with mp.workdps(30):
        lam = direct_sum(standard("U"), standard("U"), label="U+U")
        ev = FLambdaEvaluator(lam)
        worst = mp.mpf(0)
        for tau in (mp.mpc("0.3", "1.5"), mp.mpc(0, 1), mp.mpc("-0.7", "2.1")):
            for w in (S_WORD, T_WORD):
                worst = max(worst, verify_vvmf(ev, w, tau, 0))
        rep = WeilRepresentation(rescale(standard("U"), 2))
        m1 = rep.matrix(MetaplecticWord("STSTST"))
        m2 = rep.matrix(MetaplecticWord("SS"))
        rel = max(mp.fabs(m1[i, j] - m2[i, j])
                  for i in range(rep.dim) for j in range(rep.dim))
    ok = worst < 1e-6 and rel < 1e-12
    return ok, f"max vvmf residual {mp.nstr(worst, 3)}, relation {mp.nstr(rel, 3)}"


def criterion_10_borcherds():
    """Product structure: lattice periodicity < 1e-9, truncation
    self-consistency within the tail bound, Enriques weight c_0(0) = 8."""
    with mp.workdps(25):
        tab = table_u_u(6, 2.0)
        u = standard("U")
        spec = ProductSpec(table=tab, weyl_vector=(0, 0), chamber_ref=(1.0, 1.0),
                           truncation=5.0, alpha=tab.alpha)
        z = TubePoint(u, x=(0.17, -0.33), y=(3.0, 3.1))
        la, _, tail = borcherds_log_product(spec, z)
        z_shift = TubePoint(u, x=(1.17, 0.67), y=(3.0, 3.1))
        la_shift, _, _ = borcherds_log_product(spec, z_shift)
        period = mp.fabs(la - la_shift)
        spec2 = ProductSpec(table=tab, weyl_vector=(0, 0), chamber_ref=(1.0, 1.0),
                            truncation=10.0, alpha=tab.alpha)
        la2, _, _ = borcherds_log_product(spec2, z)
        self_consistent = mp.fabs(la - la2) <= tail

        # Enriques lattice: alpha w = alpha c_0(0)/2 = 4 alpha
        enr = direct_sum(rescale(standard("U"), 2), standard("U"),
                         rescale(standard("E_8"), 2), label="U(2)+U+E8(2)")
        key = ("ENR", 1, 2.0)
        if key not in _TABLE_CACHE:
            _TABLE_CACHE[key] = f_lambda_table(enr, sample_y=2.0, n_samples=64,
                                               k_max=1, components=[0])
        etab = _TABLE_CACHE[key]
        c00 = etab.coefficient(tuple(0 for _ in etab.disc_form.elementary_divisors),
                               Fraction(0))
        weight_ok = mp.fabs(c00 - 8) < 1e-6
    ok = period < 1e-9 and self_consistent and weight_ok
    return ok, (f"periodicity {mp.nstr(period, 3)}, trunc drift "
                f"{mp.nstr(mp.fabs(la - la2), 3)} <= tail {mp.nstr(tail, 3)}, "
                f"Enriques c_0(0) = {mp.nstr(c00, 8)}")


def _random_lorentzian(rng: random.Random) -> Lattice:
    parts = [standard("U") if rng.random() < 0.5 else rescale(standard("U"), 2)]
    n_extra = rng.randint(0, 4)
    for _ in range(n_extra):
        parts.append(make_lattice([[-2]]))
    if rng.random() < 0.3 and len(parts) < 2:
        parts.append(rescale(standard("E_8"), 2))
    return direct_sum(*parts)


def criterion_11_covolume():
    """Generic determinant vs closed form < 1e-10 on 20 random instances;
    Theorem constant 2^14 (2 pi)^{2 rho} / |A_M| matches independent
    arithmetic for U, U(2)+E8(2), U+E8(2)."""
    rng = random.Random(4242)
    with mp.workdps(30):
        worst = mp.mpf(0)
        for _ in range(20):
            m = _random_lorentzian(rng)
            r = m.rank
            while True:
                x = [rng.randint(-3, 3) for _ in range(r)]
                if m.inner(x, x) > 0:
                    break
            v = [sum(m.gram[a][b] * x[b] for b in range(r)) for a in range(r)]
            c = m.inner(x, x)
            vol_s = mp.mpf(c) / (2 * (2 * mp.pi) ** 2)
            gen, clo = covolume_check(m, v, c, vol_s)
            worst = max(worst, mp.fabs(gen - clo) / mp.fabs(clo))
        u = standard("U")
        e8 = standard("E_8")
        cases = [
            (u, 2 ** 14 * (2 * mp.pi) ** 6),
            (direct_sum(rescale(u, 2), rescale(e8, 2)),
             mp.mpf(2) ** 14 * (2 * mp.pi) ** 22 / 2 ** 10),
            (direct_sum(u, rescale(e8, 2)),
             mp.mpf(2) ** 14 * (2 * mp.pi) ** 22 / 2 ** 8),
        ]
        const_ok = all(mp.fabs(theorem82_constant(m) - want) / want < 1e-20
                       for m, want in cases)
    ok = worst < 1e-10 and const_ok
    return ok, f"max covolume rel diff {mp.nstr(worst, 3)}, constants ok: {const_ok}"


def criterion_12_theta():
    """chi_1 = 2 eta^3 (< 1e-10); even counts (3, 10, 36); diagonal
    factorization (< 1e-12); ||chi_g^8|| modular invariance (< 1e-8)."""
    with mp.workdps(25):
        worst_jacobi = mp.mpf(0)
        for tau in (mp.mpc(0, 1), mp.mpc(1, 2)):
            om = mp.matrix([[tau]])
            chi1 = mp.mpc(1)
            for ch in even_characteristics(1):
                chi1 *= riemann_theta_constant(ch, om)
            worst_jacobi = max(worst_jacobi, mp.fabs(chi1 - 2 * eta(tau) ** 3))
        counts_ok = [len(even_characteristics(g)) for g in (1, 2, 3)] == [3, 10, 36]

        # diagonal factorization for g = 2, 3
        worst_diag = mp.mpf(0)
        diag_taus = [mp.mpc("0.2", "1.1"), mp.mpc("-0.4", "0.9"), mp.mpc("0.1", "1.3")]
        for g in (2, 3):
            om = mp.zeros(g, g)
            for i in range(g):
                om[i, i] = diag_taus[i]
            for ch in even_characteristics(g):
                whole = riemann_theta_constant(ch, om)
                parts = mp.mpc(1)
                for i in range(g):
                    ch1 = ThetaCharacteristic((ch.a[i],), (ch.b[i],))
                    if not ch1.is_even():
                        parts = 0
                        break
                    parts *= riemann_theta_constant(ch1, mp.matrix([[diag_taus[i]]]))
                worst_diag = max(worst_diag, mp.fabs(whole - parts))

        # ||chi_1^8|| invariance under tau -> tau+1 and tau -> -1/tau
        tau = mp.mpc(1, 0) / 5 + 1j
        base = chi_g_norm(mp.matrix([[tau]]), 1)
        inv1 = mp.fabs(chi_g_norm(mp.matrix([[tau + 1]]), 1) - base) / base
        inv2 = mp.fabs(chi_g_norm(mp.matrix([[-1 / tau]]), 1) - base) / base

        # g = 2: translation Omega -> Omega + B and inversion Omega -> -Omega^{-1}
        om2 = mp.matrix([[mp.mpc("0.1", "1.1"), mp.mpc("0.3", "0.2")],
                         [mp.mpc("0.3", "0.2"), mp.mpc("-0.2", "1.4")]])
        base2 = chi_g_norm(om2, 2)
        shift = om2.copy()
        shift[0, 0] += 1
        inv3 = mp.fabs(chi_g_norm(shift, 2) - base2) / base2
        om_inv = (-om2) ** -1
        # symmetrize rounding
        om_inv[1, 0] = om_inv[0, 1]
        inv4 = mp.fabs(chi_g_norm(om_inv, 2) - base2) / base2
        worst_inv = max(inv1, inv2, inv3, inv4)
    ok = (worst_jacobi < 1e-10 and counts_ok and worst_diag < 1e-12
          and worst_inv < 1e-8)
    return ok, (f"jacobi {mp.nstr(worst_jacobi, 3)}, counts {counts_ok}, "
                f"diag {mp.nstr(worst_diag, 3)}, invariance {mp.nstr(worst_inv, 3)}")


def _synthetic_spec(amb: Lattice, entries_extra=None, k_max=40):
    df = discriminant_form(amb)
    zero = tuple(0 for _ in df.elementary_divisors)
    entries = {(zero, Fraction(-1)): 1, (zero, Fraction(0)): 8,
               (zero, Fraction(1)): 3}
    if entries_extra:
        entries.update(entries_extra)
    return make_table(df, entries, alpha=2, k_max=k_max)


def criterion_13_exponents():
    """tau_bcov_power_rhs / (tau_m_power_rhs^2 ||eta^24||^e) constant to
    1e-10 across 5 random samples for each case (case 3 exercised at
    g = 2 via the --case override; see the decisions ledger)."""
    rng = random.Random(11)
    u = standard("U")
    e8 = standard("E_8")
    results = []
    with mp.workdps(30):
        for case, m_lat in ((1, direct_sum(u, e8, e8)),
                            (2, direct_sum(u, rescale(e8, 2))),
                            (3, direct_sum(u, e8, e8))):
            inv = two_elementary_invariants(m_lat, lorentzian_role=True)
            g = 2
            if case == 1:
                assert select_case(inv.r, inv.delta) == 1 and inv.g == 2
            if case == 2:
                assert select_case(inv.r, inv.delta) == 2 and inv.g == 2
            amb = direct_sum(u, u)
            tab = _synthetic_spec(amb)
            spec = ProductSpec(table=tab, weyl_vector=(0, 0),
                               chamber_ref=(1.0, 1.0), truncation=6.0,
                               alpha=tab.alpha)
            ratios = []
            for _ in range(5):
                z = TubePoint(u, x=(rng.uniform(-1, 1), rng.uniform(-1, 1)),
                              y=(rng.uniform(2.5, 4.0), rng.uniform(2.5, 4.0)))
                om = mp.matrix([[mp.mpc(rng.uniform(-0.3, 0.3), rng.uniform(1.0, 1.5)),
                                 mp.mpc(rng.uniform(-0.2, 0.2), rng.uniform(0.1, 0.3))],
                                [0, mp.mpc(rng.uniform(-0.3, 0.3), rng.uniform(1.2, 1.6))]])
                om[1, 0] = om[0, 1]
                tau = mp.mpc(rng.uniform(-0.5, 0.5), rng.uniform(0.8, 2.0))
                ev = BVEvaluation(m_lattice=m_lat, invariants=inv, z=z,
                                  omega=om, genus=g, tau_elliptic=tau,
                                  product_spec=spec, case=case)
                num = tau_bcov_power_rhs(ev, tol=1e-6)
                den = tau_m_power_rhs(ev, tol=1e-6)
                eta_exp = num.exponents["eta24_norm_power"]
                eta_norm = petersson_norm_eta_power(tau, 24)
                ratios.append(num.value / (den.value ** 2 * eta_norm ** eta_exp))
            spread = max(mp.fabs(r / ratios[0] - 1) for r in ratios)
            results.append((case, spread))
    worst = max(s for _, s in results)
    detail = ", ".join(f"case {c}: spread {mp.nstr(s, 3)}" for c, s in results)
    return worst < 1e-10, detail


CRITERIA = [
    ("1 Kronecker limit formula", criterion_1_kronecker),
    ("2 tau_ell two-route agreement", criterion_2_tau_ell),
    ("3 Dedekind sum identity", criterion_3_dedekind),
    ("4 epsilon-invariant equality", criterion_4_epsilon),
    ("5 half-turn group classification", criterion_5_lemma_classification),
    ("6 orbifold Euler equivalence", criterion_6_euler),
    ("7 spectral multiset identity", criterion_7_spectral),
    ("8 F_Lambda integrality", criterion_8_integrality),
    ("9 vector-valued modularity", criterion_9_modularity),
    ("10 Borcherds product structure", criterion_10_borcherds),
    ("11 covolume closed form", criterion_11_covolume),
    ("12 theta identities", criterion_12_theta),
    ("13 exponent bookkeeping", criterion_13_exponents),
]


def run_all(verbose: bool = True):
    results = []
    for name, fn in CRITERIA:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failure, not an abort
            ok, detail = False, f"exception: {exc!r}"
        results.append((name, ok, detail))
        if verbose:
            print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return results
