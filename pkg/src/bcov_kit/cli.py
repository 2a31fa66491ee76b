"""Command-line front end.

Every subcommand prints a machine-readable JSON object on stdout
(deterministic for fixed inputs and precision: keys sorted, no
timestamps); --pretty adds a human-readable table after the JSON.
Complex numbers serialize as [re, im], rationals as [num, den].
Exit codes: 0 success, 1 computation/assertion failure, 2 usage errors.

Precision is one knob: --prec DIGITS sets the mpmath working precision
for the whole run.  BCOV_KIT_THREADS caps internal parallelism (all
current evaluators are deterministic single-threaded loops, so the cap
is recorded but never exceeded by construction).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import mpmath as mp

from . import __version__
from .assembly import (BVEvaluation, covolume_check, select_case,
                       tau_bcov_power_rhs, tau_m_power_rhs, theorem82_constant,
                       vol_x)
from .lattices import (Lattice, direct_sum, discriminant_form,
                       lattice_from_descriptor, signature, standard,
                       two_elementary_invariants)
from .orbifold import (FixedPointData, CurveRecord, PointRecord,
                       delta_k, epsilon_closed, epsilon_k, gamma0, make_group)
from .products import ProductSpec, TubePoint, borcherds_log_product, petersson_norm_psi
from .qseries import ThetaCharacteristic, eta, riemann_theta_constant
from .spectral import bv_zeta_combination, epstein_zeta_deriv0, kronecker_residual, tau_ell
from .weilrep import FourierTable, f_lambda_table, special_f_lambda


def _cnum(z) -> list:
    return [float(mp.re(z)), float(mp.im(z))]


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _emit(payload: dict, pretty: bool) -> None:
    print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    if pretty:
        for key in sorted(payload):
            print(f"  {key:>24}: {payload[key]}", file=sys.stderr)


def _parse_tau(text: str):
    re_s, im_s = text.split(",")
    tau = mp.mpc(mp.mpf(re_s), mp.mpf(im_s))
    if not mp.im(tau) > 0:
        raise ValueError("tau must have positive imaginary part")
    return tau


def _tube_point(data: dict) -> TubePoint:
    lat = lattice_from_descriptor(data["lattice"])
    return TubePoint(lat, x=tuple(data["x"]), y=tuple(data["y"]),
                     n_scale=int(data.get("N", 1)))


def _table_from_file(path: str) -> FourierTable:
    data = _load_json(path)
    lam = lattice_from_descriptor(data["lattice"])
    return FourierTable.from_json(data, discriminant_form(lam))


def _product_spec(table: FourierTable, weyl_data: dict, trunc: float) -> ProductSpec:
    rho = tuple(Fraction(n, d) for n, d in weyl_data["weyl_vector"])
    chamber = tuple(weyl_data["chamber_ref"])
    return ProductSpec(table=table, weyl_vector=rho, chamber_ref=chamber,
                       truncation=trunc, alpha=table.alpha)


def _group_from_file(path: str):
    data = _load_json(path)
    gens = [(Fraction(a, n), Fraction(b, n), Fraction(c, n))
            for a, b, c, n in data["generators"]]
    return make_group(gens)


def _fpdata_from_file(path: str) -> FixedPointData:
    data = _load_json(path)
    curves = [CurveRecord(chi=int(c["chi"]),
                          fixers=frozenset(tuple(f) for f in c["fixers"]))
              for c in data["curves"]]
    points = []
    for p in data.get("points", []):
        members = {}
        for label, (a, b, c, n) in p["members"]:
            members[tuple(label)] = (Fraction(a, n), Fraction(b, n), Fraction(c, n))
        points.append(PointRecord(members=members,
                                  through_curves=tuple(p["through_curves"])))
    return FixedPointData(moduli=tuple(data["moduli"]),
                          chi_ambient=int(data["chi_ambient"]),
                          curves=curves, points=points)


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def cmd_lattice(args) -> dict:
    lat = lattice_from_descriptor(_load_json(args.descriptor))
    sig = signature(lat)
    out = {"rank": lat.rank, "det": lat.det(), "signature": list(sig),
           "even": lat.is_even()}
    if lat.is_even():
        df = discriminant_form(lat)
        out["elementary_divisors"] = list(df.elementary_divisors)
        out["disc_order"] = df.order
        if df.is_two_elementary():
            inv = two_elementary_invariants(lat, lorentzian_role=(sig[0] == 1))
            out["two_elementary"] = {"r": inv.r, "l": inv.l, "delta": inv.delta,
                                     "g": inv.g, "k": inv.k,
                                     "exceptional": inv.exceptional}
    return out


def cmd_eta(args) -> dict:
    tau = _parse_tau(args.tau)
    val = eta(tau)
    return {"tau": _cnum(tau), "eta": _cnum(val), "abs": float(mp.fabs(val))}


def cmd_theta_const(args) -> dict:
    om_rows = _load_json(args.omega)
    g = int(args.genus)
    om = mp.matrix(g, g)
    for i in range(g):
        for j in range(g):
            re, im = om_rows[i][j]
            om[i, j] = mp.mpc(re, im)
    a_s, b_s = args.char.split(";")
    a = tuple(Fraction(t) for t in a_s.split(","))
    b = tuple(Fraction(t) for t in b_s.split(","))
    ch = ThetaCharacteristic(a, b)
    val = riemann_theta_constant(ch, om)
    return {"genus": g, "char_even": ch.is_even(), "theta": _cnum(val)}


def cmd_flambda(args) -> dict:
    desc = _load_json(args.lattice)
    lam = lattice_from_descriptor(desc)
    table = f_lambda_table(lam, sample_y=args.sample_y, n_samples=args.samples,
                           k_max=args.kmax)
    payload = table.to_json()
    payload["lattice"] = desc
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, sort_keys=True)
    return {"alpha": table.alpha, "components": len(table.components()),
            "coefficients": len(table.coeffs),
            "w_lambda": float(table.weight_w()),
            "out": args.out or ""}


def cmd_borcherds(args) -> dict:
    table = _table_from_file(args.table)
    spec = _product_spec(table, _load_json(args.weyl), args.trunc)
    z = _tube_point(_load_json(args.z))
    log_abs, arg, tail = borcherds_log_product(spec, z, tol=args.tol)
    norm_sq, _, _, weight = petersson_norm_psi(spec, z, tol=args.tol)
    return {"log_abs": float(log_abs), "arg_mod_2pi": float(arg),
            "tail_bound": float(tail), "petersson_norm_sq": float(norm_sq),
            "alpha_weight": float(weight)}


def cmd_kronecker(args) -> dict:
    tau = _parse_tau(args.tau)
    res = kronecker_residual(tau)
    val, tail = epstein_zeta_deriv0(tau)
    ok = res < args.tol
    return {"tau": _cnum(tau), "zeta_prime_0": float(val),
            "tail_bound": float(tail), "residual": float(res),
            "tolerance": args.tol, "pass": bool(ok)}


def cmd_tau_ell(args) -> dict:
    tau = _parse_tau(args.tau)
    a, b = tau_ell(tau)
    return {"tau": _cnum(tau), "eta_route": float(a), "zeta_route": float(b),
            "rel_diff": float(mp.fabs(a - b) / a)}


def cmd_spectra_identity(args) -> dict:
    import random
    rng = random.Random(args.seed)
    worst_exact = 0
    worst_num = mp.mpf(0)
    for _ in range(args.trials):
        plus = [Fraction(rng.randint(1, 60), rng.randint(1, 9))
                for _ in range(rng.randint(0, 6))]
        minus = [Fraction(rng.randint(1, 60), rng.randint(1, 9))
                 for _ in range(rng.randint(0, 7))]
        nu = [Fraction(rng.randint(1, 60), rng.randint(1, 9))
              for _ in range(rng.randint(1, 11))]
        out = bv_zeta_combination(plus, minus, nu, rng.randint(0, 20),
                                  s_values=[2, mp.mpc(1, 1)])
        worst_exact = max(worst_exact, out["multiset_residual"])
        for v in out["numeric_residuals"]:
            worst_num = max(worst_num, v)
    return {"seed": args.seed, "trials": args.trials,
            "max_multiset_residual": worst_exact,
            "max_numeric_residual": float(worst_num)}


def cmd_epsilon(args) -> dict:
    grp = _group_from_file(args.group)
    out = {"order": grp.order, "gamma0_size": len(gamma0(grp)),
           "delta": [[delta_k(grp, k).numerator, delta_k(grp, k).denominator]
                     for k in range(3)],
           "epsilon": [[epsilon_k(grp, k).numerator, epsilon_k(grp, k).denominator]
                       for k in range(3)]}
    if grp.common_fixed_dim() == 0:
        closed = epsilon_closed(grp)
        out["epsilon_closed"] = [closed.numerator, closed.denominator]
    return out


def cmd_euler_orb(args) -> dict:
    data = _fpdata_from_file(args.data)
    a = data.chi_orb()
    b = data.roan_chi()
    return {"chi_orb": [a.numerator, a.denominator],
            "roan_chi": [b.numerator, b.denominator],
            "equal": a == b}


def cmd_covolume(args) -> dict:
    m = lattice_from_descriptor(_load_json(args.m))
    pairings = [mp.mpf(t) for t in args.pairings.split(",")]
    gen, clo = covolume_check(m, pairings, mp.mpf(args.norm_sq), mp.mpf(args.vol_s))
    return {"generic": float(gen), "closed": float(clo),
            "rel_diff": float(mp.fabs(gen - clo) / mp.fabs(clo)),
            "theorem_constant": float(theorem82_constant(m)),
            "vol_x": float(vol_x(mp.mpf(args.vol_s)))}


def cmd_bcov_rhs(args) -> dict:
    m = lattice_from_descriptor(_load_json(args.m))
    inv = two_elementary_invariants(m, lorentzian_role=True)
    table = _table_from_file(args.table)
    spec = _product_spec(table, _load_json(args.weyl), args.trunc)
    z = _tube_point(_load_json(args.z))
    tau = _parse_tau(args.tau)
    case = None if args.case == "auto" else int(args.case)
    genus = args.genus if args.genus is not None else (inv.g or 0)
    om = None
    if genus > 0:
        om_rows = _load_json(args.omega)
        om = mp.matrix(genus, genus)
        for i in range(genus):
            for j in range(genus):
                om[i, j] = mp.mpc(om_rows[i][j][0], om_rows[i][j][1])
    ev = BVEvaluation(m_lattice=m, invariants=inv, z=z, omega=om, genus=genus,
                      tau_elliptic=tau, product_spec=spec, case=case)
    bcov = tau_bcov_power_rhs(ev, tol=args.tol)
    taum = tau_m_power_rhs(ev, tol=args.tol)
    return {
        "case": bcov.case,
        "up_to_constant": True,
        "tau_bcov_rhs": float(bcov.value),
        "tau_m_rhs": float(taum.value),
        "exponents": {k: (float(v) if not isinstance(v, int) else v)
                      for k, v in {**bcov.exponents, **taum.exponents}.items()},
        "components": {k: float(v) for k, v in bcov.components.items()},
    }


def cmd_accept(args) -> dict:
    from .acceptance import run_all
    results = run_all(verbose=True)
    payload = {"criteria": [{"name": n, "pass": bool(ok), "detail": d}
                            for n, ok, d in results],
               "all_pass": all(ok for _n, ok, _d in results)}
    return payload


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bcov-kit",
        description="lattice, modular-form and spectral computations for "
                    "Borcea-Voisin torsion invariants")
    p.add_argument("--prec", type=int, default=25,
                   help="working precision in decimal digits (default 25)")
    p.add_argument("--pretty", action="store_true",
                   help="echo a human-readable table on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("lattice", help="invariants of a lattice descriptor")
    sp.add_argument("descriptor", help="JSON lattice descriptor file")
    sp.set_defaults(fn=cmd_lattice)

    sp = sub.add_parser("eta", help="Dedekind eta value")
    sp.add_argument("--tau", required=True, help="RE,IM")
    sp.set_defaults(fn=cmd_eta)

    sp = sub.add_parser("theta-const", help="Riemann theta constant")
    sp.add_argument("--genus", type=int, required=True)
    sp.add_argument("--omega", required=True, help="JSON row-major complex matrix")
    sp.add_argument("--char", required=True,
                    help="a1,..,ag;b1,..,bg with entries 0 or 1/2")
    sp.set_defaults(fn=cmd_theta_const)

    sp = sub.add_parser("flambda", help="extract a Fourier table of F_Lambda")
    sp.add_argument("--lattice", required=True, help="JSON lattice descriptor")
    sp.add_argument("--kmax", type=int, default=6)
    sp.add_argument("--sample-y", type=float, default=2.0)
    sp.add_argument("--samples", type=int, default=256)
    sp.add_argument("--out", default=None, help="write table JSON here")
    sp.set_defaults(fn=cmd_flambda)

    sp = sub.add_parser("borcherds", help="evaluate a Borcherds product")
    sp.add_argument("--table", required=True)
    sp.add_argument("--weyl", required=True)
    sp.add_argument("--z", required=True)
    sp.add_argument("--trunc", type=float, default=12.0)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.set_defaults(fn=cmd_borcherds)

    sp = sub.add_parser("kronecker", help="Kronecker limit formula residual")
    sp.add_argument("--tau", required=True)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.set_defaults(fn=cmd_kronecker)

    sp = sub.add_parser("tau-ell", help="elliptic torsion, two routes")
    sp.add_argument("--tau", required=True)
    sp.set_defaults(fn=cmd_tau_ell)

    sp = sub.add_parser("spectra-identity", help="random spectral identity run")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=25)
    sp.set_defaults(fn=cmd_spectra_identity)

    sp = sub.add_parser("epsilon", help="epsilon invariants of an SL(3,C) group")
    sp.add_argument("--group", required=True, help="JSON group file")
    sp.set_defaults(fn=cmd_epsilon)

    sp = sub.add_parser("euler-orb", help="orbifold Euler characteristic")
    sp.add_argument("--data", required=True, help="JSON fixed-point data")
    sp.set_defaults(fn=cmd_euler_orb)

    sp = sub.add_parser("covolume", help="L2 covolume, generic vs closed form")
    sp.add_argument("--m", required=True, help="JSON lattice descriptor of M")
    sp.add_argument("--pairings", required=True, help="comma list <e_a, k>")
    sp.add_argument("--norm-sq", required=True, help="<k, k>")
    sp.add_argument("--vol-s", required=True, help="Vol(S, gamma_S)")
    sp.set_defaults(fn=cmd_covolume)

    sp = sub.add_parser("bcov-rhs", help="assembled right-hand sides")
    sp.add_argument("--m", required=True)
    sp.add_argument("--case", default="auto", choices=["auto", "1", "2", "3"])
    sp.add_argument("--z", required=True)
    sp.add_argument("--omega", default=None)
    sp.add_argument("--genus", type=int, default=None)
    sp.add_argument("--tau", required=True)
    sp.add_argument("--table", required=True)
    sp.add_argument("--weyl", required=True)
    sp.add_argument("--trunc", type=float, default=8.0)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.set_defaults(fn=cmd_bcov_rhs)

    sp = sub.add_parser("accept", help="run the acceptance suite")
    sp.set_defaults(fn=cmd_accept)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    threads = os.environ.get("BCOV_KIT_THREADS")
    if threads is not None and int(threads) < 1:
        print("BCOV_KIT_THREADS must be >= 1", file=sys.stderr)
        return 2
    mp.mp.dps = args.prec
    try:
        payload = args.fn(args)
    except (ValueError, KeyError, ArithmeticError, OSError) as exc:
        print(json.dumps({"error": {"type": type(exc).__name__,
                                    "message": str(exc)}},
                         sort_keys=True))
        return 1
    _emit(payload, args.pretty)
    if args.command == "accept" and not payload["all_pass"]:
        return 1
    if payload.get("pass") is False:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
