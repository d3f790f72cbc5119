"""Command-line front end.

    brieskorn basis -f "x1^3+x2^2"
    brieskorn pfaffian -f "x1^3+x2^2" --json
    brieskorn verify -f "x1^3+x2^2" --lambda 1=1/10,2=-1

A human summary goes to stdout; ``--json`` prints the JSON report instead and
``--out`` writes it to a file.  Exit status: 0 success, 1 domain error (a JSON
error object is printed), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from . import __version__
from .decompose import audit_bounds, audit_json, brieskorn_decompose, euler_divide, petrov_decompose
from .division import divide_by_df, divide_by_dF, division_modulus
from .family import make_family
from .forms import format_form, from_json as form_from_json, parse_form
from .local_algebra import analyze, classify_simple, milnor_product
from .numeric import make_cycle, pfaffian_residual
from .picard_fuchs import (RestrictionRefused, derive_pfaffian, logpole_check, read_system_json,
                           restrict_hypergeometric, spectrum_check)
from .poly import QQ, PolyRing, WeightSystem, infer_weights, x_names

COMMANDS = ("basis", "modulus", "divide", "decompose", "pfaffian", "restrict",
            "spectrum-check", "logpoles", "verify")


class UsageError(Exception):
    pass


def _rational_list(text):
    try:
        return tuple(QQ(t.strip()) for t in text.split(","))
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"bad rational list {text!r}: {exc}")


def _lambda_items(text):
    out = {}
    for item in text.split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise argparse.ArgumentTypeError(f"expected s=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            s = int(k.strip().removeprefix("lam"))
            out[s] = QQ(v.strip())
        except (ValueError, TypeError) as exc:
            raise argparse.ArgumentTypeError(f"bad lambda item {item!r}: {exc}")
        if s < 1:
            raise argparse.ArgumentTypeError("lambda indices start at 1")
    return out


def build_parser():
    p = argparse.ArgumentParser(prog="brieskorn", description="Brieskorn/Petrov decompositions and "
                                "Picard-Fuchs systems of semiquasihomogeneous families.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        c = sub.add_parser(name)
        c.add_argument("-f", "--poly", required=True, help="quasihomogeneous principal part in x1..xn")
        c.add_argument("--weights", type=_rational_list, help="w1,w2,... (default: inferred)")
        c.add_argument("--lambda", dest="lam", type=_lambda_items, action="append", default=[],
                       help="parameter values s=value,... (1-based, unspecified = 0)")
        c.add_argument("--out", help="write the JSON report here")
        c.add_argument("--json", action="store_true", help="print JSON instead of a summary")
        c.add_argument("--tol", type=float, default=1e-9, help="quadrature tolerance")
        c.add_argument("--fd-step", type=float, default=1e-4, help="finite-difference step")
        if name in ("divide", "decompose"):
            c.add_argument("--form", required=True, help='form text, e.g. "dx1^dx2: x1^2*x2"')
        if name == "divide":
            c.add_argument("--by", choices=("df", "dF"), default="df")
        if name == "decompose":
            c.add_argument("--kind", choices=("auto", "petrov", "brieskorn", "euler"), default="auto")
            c.add_argument("--variant", type=int, choices=(1, 2), default=2)
            c.add_argument("--audit", action="store_true", help="attach the bound audit (Petrov)")
        if name == "verify":
            c.add_argument("--oval", type=int, default=0, help="index of the real oval, left to right")
    return p


def _ring_for(text, weights):
    idx = [int(k) for k in re.findall(r"x(\d+)", text)]
    if not idx:
        raise UsageError("polynomial uses no variables x1..xn")
    n = max(idx)
    if weights is not None and len(weights) != n:
        raise UsageError(f"{len(weights)} weights given for {n} variables")
    ring = PolyRing(x_names(n), weights or (1,) * n)
    f = ring.parse(text)
    w = WeightSystem(weights) if weights is not None else infer_weights(f, n)
    return f, w


def _lam_vector(items, m):
    vals = [QQ(0)] * m
    for d in items:
        for s, v in d.items():
            if s > m:
                raise UsageError(f"lambda index {s} exceeds m = {m}")
            vals[s - 1] = v
    return vals


def _header(args, w):
    return {"command": args.command, "f": args.poly, "weights": [str(x) for x in w.weights]}


# -- commands ---------------------------------------------------------------


def cmd_basis(args, f, w):
    la = analyze(f, w)
    res = la.to_json()
    res["milnor_product"] = str(milnor_product(la.weights))
    res["classification"] = classify_simple(la).to_json()
    summary = f"l = {la.l}, r = {la.r}, rho = {la.rho}, basis: {', '.join(la.basis_text())}"
    return res, summary


def cmd_modulus(args, f, w):
    la = analyze(f, w)
    est = division_modulus(la)
    return est.to_json(la), f"M_hat = {est.M_hat} (witness {est.to_json(la)['witness']})"


def cmd_divide(args, f, w):
    if args.by == "df":
        fam = make_family(f, w, with_parameters=False)
        mu = parse_form(args.form, fam.ctx, fam.n)
        out = divide_by_df(mu, fam.la)
    else:
        fam = make_family(f, w)
        mu = parse_form(args.form, fam.ctx, fam.n)
        out = divide_by_dF(mu, fam)
    res = out.to_json(fam.ctx)
    res["by"] = args.by
    res["basis"] = fam.la.basis_text()
    res["ratio"] = str(out.ratio(mu)) if mu else None
    summary = "c = [" + ", ".join(fam.ctx.format(c) for c in out.c) + "], eta = " + format_form(out.eta)
    return res, summary


def cmd_decompose(args, f, w):
    fam = make_family(f, w)
    ctx = fam.ctx
    kind = args.kind
    if kind == "euler":
        eta = parse_form(args.form, ctx, fam.n - 1)
        ed = euler_divide(eta, fam.f_lifted, args.variant, r=fam.r)
        if args.variant == 1:
            res = {"kind": "euler", "variant": 1, "mu": ed.mu.to_json(), "xi": ed.xi.to_json()}
            summary = f"mu = {format_form(ed.mu)}; xi = {format_form(ed.xi)}"
        else:
            res = {"kind": "euler", "variant": 2, "omega": ed.omega.to_json(), "xi_prime": ed.xi_prime.to_json()}
            summary = f"omega = {format_form(ed.omega)}; xi' = {format_form(ed.xi_prime)}"
        res["norm_bound"] = str(ed.norm_bound())
        return res, summary
    form = parse_form(args.form, ctx)
    if kind == "auto":
        kind = "petrov" if form.k == fam.n - 1 else "brieskorn"
    if kind == "petrov":
        d = petrov_decompose(form, fam)
        if args.audit:
            d.audit = audit_json(audit_bounds(d, fam, division_modulus(fam.la).M_hat))
        res = d.to_json(fam)
        res["kind"] = "petrov"
        summary = "p = [" + ", ".join(res["p"]) + "]"
    else:
        d = brieskorn_decompose(form, fam)
        res = d.to_json(fam)
        res["kind"] = "brieskorn"
        summary = "q = [" + ", ".join(res["q"]) + "]"
    res["basis"] = fam.la.basis_text()
    res["monomials"] = fam.monomial_texts()
    return res, summary


def cmd_pfaffian(args, f, w):
    sys_ = derive_pfaffian(f, w)
    return sys_.to_json(), f"l = {sys_.l}, m = {sys_.m}, det C_0 = {sys_.to_json()['detC0']}"


def _matrix_text(M):
    return [[str(v) for v in row] for row in M]


def cmd_restrict(args, f, w):
    sys_ = derive_pfaffian(f, w, with_modulus=False, check_det=False)
    vals = _lam_vector(args.lam, sys_.m)
    if vals[0] != 0:
        raise UsageError("lam1 is the free variable t of the restriction; do not fix it")
    A, B = restrict_hypergeometric(sys_, vals[1:])
    res = {"fixed": [str(v) for v in vals[1:]], "A": _matrix_text(A), "B": _matrix_text(B)}
    return res, f"(t + A) I' = B I with A = {res['A']}, B = {res['B']}"


def cmd_spectrum(args, f, w):
    sys_ = derive_pfaffian(f, w, with_modulus=False, check_det=False)
    rep = spectrum_check(sys_, _lam_vector(args.lam, sys_.m))
    res = rep.to_json()
    if rep.degenerate:
        return res, rep.message
    return res, (f"matched distance {rep.max_distance:.3e} (relative {rep.relative_distance:.3e}), "
                 f"max eigenvector residual {max(rep.eigvec_residuals):.3e}")


def cmd_logpoles(args, f, w):
    sys_ = derive_pfaffian(f, w, with_modulus=False, check_det=False)
    rep = logpole_check(sys_)
    return rep.to_json(), f"logarithmic: {str(rep.logarithmic).lower()}"


def cmd_verify(args, f, w):
    sys_ = derive_pfaffian(f, w, with_modulus=False, check_det=False)
    cyc = make_cycle(sys_, _lam_vector(args.lam, sys_.m), index=args.oval)
    rep = pfaffian_residual(sys_, cyc, step=args.fd_step, tol=args.tol)
    return rep.to_json(), f"max relative residual {rep.max_residual:.3e} over directions {sorted(rep.residuals)}"


HANDLERS = {"basis": cmd_basis, "modulus": cmd_modulus, "divide": cmd_divide,
            "decompose": cmd_decompose, "pfaffian": cmd_pfaffian, "restrict": cmd_restrict,
            "spectrum-check": cmd_spectrum, "logpoles": cmd_logpoles, "verify": cmd_verify}


def dump(report) -> str:
    return json.dumps(report, sort_keys=True, indent=2)


def dispatch(args) -> tuple[int, dict, str]:
    """Run a parsed command; returns (status, report, summary)."""
    try:
        f, w = _ring_for(args.poly, args.weights)
        res, summary = HANDLERS[args.command](args, f, w)
        report = _header(args, w)
        report["result"] = res
        return 0, report, summary
    except UsageError:
        raise
    except RestrictionRefused as exc:
        err = {"command": args.command, "error": "RestrictionRefused", "message": str(exc),
               "entries": [{"i": i + 1, "j": j + 1, "entry": t} for i, j, t in exc.entries]}
        return 1, err, str(exc)
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        err = {"command": args.command, "error": type(exc).__name__, "message": str(exc)}
        return 1, err, f"error: {exc}"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        status, report, summary = dispatch(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"brieskorn: error: {exc}", file=sys.stderr)
        return 2
    text = dump(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    if args.json or status:
        print(text)
    else:
        print(summary)
    return status


# -- readers ----------------------------------------------------------------


def read_report(data):
    """Parse a JSON report back into artifact objects.

    Returns a dict of reconstructed values (polynomials, forms, systems)."""
    if "error" in data:
        return {"error": data["error"], "message": data["message"]}
    cmd = data["command"]
    w = WeightSystem(tuple(QQ(v) for v in data["weights"]))
    n = w.n
    ring = PolyRing(x_names(n), w.weights)
    f = ring.parse(data["f"])
    res = data["result"]
    out = {"f": f, "weights": w}
    if cmd == "basis":
        la = analyze(f, w)
        if la.basis_text() != res["basis"]:
            raise ValueError("basis in report does not match a fresh computation")
        out["basis"] = [ring.parse(t) for t in res["basis"]]
    elif cmd == "modulus":
        out["M_hat"] = QQ(res["M_hat"])
    elif cmd == "divide":
        fam = make_family(f, w, with_parameters=res["by"] == "dF")
        out["c"] = [fam.ctx.parse(t) for t in res["c"]]
        out["eta"] = form_from_json(res["eta"], fam.ctx)
    elif cmd == "decompose":
        fam = make_family(f, w)
        coef = fam.ctx.coef_ring
        if res["kind"] == "petrov":
            out["p"] = [coef.parse(t) for t in res["p"]]
            out["xi"] = form_from_json(res["xi"], fam.ctx)
            out["xi_prime"] = form_from_json(res["xi_prime"], fam.ctx)
        elif res["kind"] == "brieskorn":
            out["q"] = [coef.parse(t) for t in res["q"]]
            out["zeta"] = form_from_json(res["zeta"], fam.ctx)
        else:
            out.update({k: form_from_json(v, fam.ctx) for k, v in res.items()
                        if isinstance(v, dict) and "terms" in v})
    elif cmd == "pfaffian":
        out["system"] = read_system_json(res)
    elif cmd == "restrict":
        out["A"] = [[QQ(v) for v in row] for row in res["A"]]
        out["B"] = [[QQ(v) for v in row] for row in res["B"]]
    elif cmd == "spectrum-check":
        out["eigenvalues"] = [complex(*z) for z in res["eigenvalues"]]
        out["critical_values"] = [complex(*z) for z in res["critical_values"]]
    elif cmd == "logpoles":
        fam = make_family(f, w)
        out["g"] = fam.ctx.parse(res["g"])
        out["logarithmic"] = bool(res["logarithmic"])
    elif cmd == "verify":
        out["I"] = [float(v) for v in res["I"]]
        out["residuals"] = {int(k): float(v) for k, v in res["residuals"].items()}
    else:
        raise ValueError(f"unknown command {cmd!r}")
    return out


if __name__ == "__main__":
    sys.exit(main())
