"""Command-line front end.

Every command writes a report with a ``meta`` block (version and config echo),
``results`` and a list of ``checks``.  Exit status: 0 when all checks pass,
1 on usage or configuration errors, 2 on numerical warnings or failed checks.
"""

import argparse
import csv
import io
import json
import logging
import os
import re
import sys
import warnings

import numpy as np

from . import __version__, boundary, extensions, fourier, spectral
from .errors import ConvergenceWarning, DegenerateUnitary, ProlateError

log = logging.getLogger("prolate")

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2
UNITARY_TOL = 1e-10


class UsageError(Exception):
    pass


def _configure_logging():
    level = os.environ.get("PROLATE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _jsonable(v):
    if isinstance(v, (complex, np.complexfloating)):
        return [float(np.real(v)), float(np.imag(v))]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    return v


def check(name, ref, measured, tolerance, passed=None):
    if passed is None:
        passed = bool(measured <= tolerance)
    return {"name": name, "ref": ref, "pass": bool(passed), "measured": float(measured), "tolerance": float(tolerance)}


class Report:
    def __init__(self, command, args, columns=None):
        self.meta = {
            "version": __version__,
            "command": command,
            "config": {
                "a": args.a,
                "basis": args.basis,
                "grid": args.grid,
                "count": args.count,
                "tol": args.tol,
                "seed": args.seed,
                "format": args.format,
            },
        }
        self.columns = columns or []
        self.rows = []
        self.results = {}
        self.checks = []
        self.warned = False

    @property
    def ok(self):
        return all(c["pass"] for c in self.checks) and not self.warned

    def to_json(self):
        body = {"meta": self.meta, "results": self.results, "checks": self.checks}
        if self.columns:
            body["results"] = dict(self.results, columns=self.columns, rows=self.rows)
        return json.dumps(_jsonable(body), indent=2) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        for k, v in self.meta.items():
            if k == "config":
                for ck, cv in v.items():
                    buf.write(f"# {ck}: {json.dumps(_jsonable(cv))}\r\n")
            else:
                buf.write(f"# {k}: {v}\r\n")
        for k, v in self.results.items():
            if not isinstance(v, (list, dict)):
                buf.write(f"# {k}: {json.dumps(_jsonable(v))}\r\n")
        for c in self.checks:
            buf.write(f"# check: {c['name']}, pass={c['pass']}, measured={c['measured']!r}, tolerance={c['tolerance']!r}\r\n")
        writer = csv.writer(buf, lineterminator="\r\n")
        if self.columns:
            writer.writerow(self.columns)
            for row in self.rows:
                writer.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
        return buf.getvalue()


def parse_unitary(text, tol=UNITARY_TOL):
    """``identity``, four complex entries (``1+2j``) or eight ``re,im`` numbers, row-major."""
    text = text.strip()
    if text.lower() in ("identity", "i", "eye"):
        return extensions.Unitary2.identity()
    tokens = [t for t in re.split(r"[,;\s]+", text) if t]
    try:
        if len(tokens) == 4:
            entries = [complex(t.replace("i", "j")) for t in tokens]
        elif len(tokens) == 8:
            nums = [float(t) for t in tokens]
            entries = [complex(nums[2 * k], nums[2 * k + 1]) for k in range(4)]
        else:
            raise UsageError(f"expected 4 complex or 8 real entries for U, got {len(tokens)}")
    except ValueError as exc:
        raise UsageError(f"cannot parse U: {exc}") from exc
    try:
        return extensions.Unitary2(np.array(entries).reshape(2, 2), atol=tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _shooting_window(a, count):
    return 0.0, spectral.eigenvalue_bounds(a, count - 1)[1] + 1.0


def cmd_spectrum(args):
    variant = spectral.Variant(args.variant)
    rep = Report("spectrum", args, ["n", "eigenvalue", "parity", "tail_norm"])
    rep.meta["config"]["variant"] = variant.value
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ConvergenceWarning)
        dec = spectral.spectrum(args.a, args.count, args.basis, variant)
    rep.warned = any(issubclass(w.category, ConvergenceWarning) for w in caught)
    shoot = None
    if variant is spectral.Variant.L_I and args.count > 0 and not args.no_shoot:
        rep.columns.append("shooting")
        shoot = spectral.eigenvalues_by_shooting(args.a, _shooting_window(args.a, args.count))[: args.count]
    for n in range(len(dec)):
        row = [n, float(dec.eigenvalues[n]), dec.parity[n].value, float(dec.tail_norms[n])]
        if shoot is not None:
            row.append(float(shoot[n]) if n < shoot.size else float("nan"))
        rep.rows.append(row)
    rep.results["warnings"] = list(dec.warnings)
    if len(dec):
        vals = dec.eigenvalues
        rep.checks.append(check("strictly increasing", "simple spectrum", -float(np.min(np.diff(vals), initial=1.0)), 0.0, bool(np.all(np.diff(vals) > 0))))
        rep.checks.append(check("positive", "non-negative operator", -float(vals[0]), 0.0, bool(vals[0] > 0)))
        alt = all(p is (spectral.Parity.EVEN if n % 2 == 0 else spectral.Parity.ODD) for n, p in enumerate(dec.parity))
        rep.checks.append(check("parity alternates", "parity of eigenfunctions", 0.0 if alt else 1.0, 0.0, alt))
        if variant is spectral.Variant.LAMBDA:
            n = np.arange(len(dec))
            err = float(np.max(np.abs(vals - (n * (n + 1) / args.a**2 + 1))))
            rep.checks.append(check("legendre closed form", "n(n+1)/a^2 + 1", err, 1e-12))
        if shoot is not None:
            err = float(np.max(np.abs(shoot - vals[: shoot.size]))) if shoot.size == len(dec) else float("inf")
            rep.checks.append(check("shooting agreement", "galerkin vs shooting", err, args.tol))
    return rep


def cmd_pswf(args):
    if args.index < 0 or args.index >= args.basis // 2:
        raise UsageError(f"index {args.index} out of range for basis size {args.basis}")
    dec = spectral.spectrum(args.a, args.index + 1, args.basis)
    fn = dec.eigenfunction(args.index)
    t = np.linspace(-args.a, args.a, args.points)
    rep = Report("pswf", args, ["t", "value", "derivative"])
    rep.meta["config"].update(index=args.index, points=args.points)
    rep.results["eigenvalue"] = float(dec.eigenvalues[args.index])
    rep.results["parity"] = dec.parity[args.index].value
    for ti, v, d in zip(t, fn.value(t), fn.derivative(t)):
        rep.rows.append([float(ti), float(v), float(d)])
    ok, bv = boundary.domain_predicate(fn, boundary.Domain.LI)
    rep.checks.append(check("bounded at both ends", "b-values vanish", max(abs(bv.b_minus), abs(bv.b_plus)), boundary.VANISH_TOL, ok))
    return rep


def _j_reference(corrupt):
    j = np.array(extensions.J)
    if corrupt:
        j[0, 1] += 0.5
    return j


def cmd_extensions_check(args):
    rep = Report("extensions-check", args, ["check", "pass", "measured", "tolerance"])
    rep.meta["config"]["samples"] = args.samples
    jref = _j_reference(args.corrupt_j)
    pp, pm = extensions.projectors()
    eye = np.eye(4)
    proj_err = max(
        np.max(np.abs(pp @ pp - pp)),
        np.max(np.abs(pm @ pm - pm)),
        np.max(np.abs(pp @ pm)),
        np.max(np.abs(pp + pm - eye)),
        np.max(np.abs(pp - (eye + jref) / 2)),
    )
    rep.checks.append(check("projector identities", "P+ and P- are complementary projectors", proj_err, 1e-14))
    gram_err = 0.0
    for a in (0.5, 1.0, 2.0):
        for moll in (1, 2):
            g = boundary.gram_matrix(boundary.CutoffQuartet.build(a, moll))
            gram_err = max(gram_err, float(np.max(np.abs(a / 2 * g - jref))))
    rep.checks.append(check("gram equals (2/a) J", "boundary form on the cutoff quartet", gram_err, 1e-7))
    rng = np.random.default_rng(args.seed)
    sc_fail = rt_err = 0.0
    rank_fail = 0
    for _ in range(args.samples):
        u = extensions.Unitary2.random(rng)
        s = extensions.subspace_from_unitary(u)
        sc_fail += not extensions.is_self_complementary(s)
        rt_err = max(rt_err, float(np.max(np.abs(extensions.unitary_from_subspace(s).matrix - u.matrix))))
        rank_fail += extensions.rank(extensions.boundary_condition_matrix(u)) != 2
    rep.checks.append(check("self-complementary", "S_U equals its J-complement", sc_fail, 0))
    rep.checks.append(check("round trip", "U recovered from S_U", rt_err, 1e-10))
    rep.checks.append(check("bc rank", "rank B(U) = 2", rank_fail, 0))
    neg = [np.array([[1, 1j, 0, 0], [0, 0, 1, 1j]]), np.array([[1, 0, 0, 0], [0, 1, 0, 0]])]
    rejected = sum(not extensions.is_self_complementary(extensions.BoundarySubspace(r)) for r in neg)
    rep.checks.append(check("negative controls rejected", "J-positive and degenerate spans", len(neg) - rejected, 0))
    for c in rep.checks:
        rep.rows.append([c["name"], c["pass"], c["measured"], c["tolerance"]])
    return rep


def cmd_gram_check(args):
    rep = Report("gram-check", args, ["mollifier", "row", "col", "re", "im"])
    worst = 0.0
    for moll in (1, 2):
        g = boundary.gram_matrix(boundary.CutoffQuartet.build(args.a, moll))
        worst = max(worst, float(np.max(np.abs(args.a / 2 * g - extensions.J))))
        for i in range(4):
            for j in range(4):
                rep.rows.append([moll, i, j, float(g[i, j].real), float(g[i, j].imag)])
    rep.checks.append(check("gram equals (2/a) J", "boundary form on the cutoff quartet", worst, args.tol))
    hermitian = max(float(np.max(np.abs(g - g.conj().T))), 0.0)
    rep.checks.append(check("hermitian", "boundary form is hermitian", hermitian, args.tol))
    return rep


def _witness_into(rep, u, a, tol):
    w = fourier.witness_noncommuting(u, a)
    rep.columns = ["case", "bc_residual", "commutator_norm", "predicted_norm"]
    for label, case in (("a", w.case_a), ("b", w.case_b)):
        rep.rows.append([label, case.bc_residual, case.commutator_norm, case.predicted_norm])
        rep.results[f"case_{label}"] = {
            "x_boundary_values": case.x_boundary_values.as_array(),
            "image_endpoints": case.image_endpoints,
            "image_boundary_values": case.image_boundary_values.as_array(),
            "bc_residual": case.bc_residual,
            "commutator_norm": case.commutator_norm,
            "predicted_norm": case.predicted_norm,
        }
    a_case, b_case = w.case_a, w.case_b
    rep.checks.append(check("case a: F x in D(L_U)", "boundary conditions of L_U", a_case.bc_residual, 1e-8))
    rep.checks.append(check("case a: defect matches prediction", "commutator defect", abs(a_case.commutator_norm - a_case.predicted_norm), tol * max(1.0, a_case.predicted_norm)))
    rep.checks.append(check("case a: nonzero defect", "non-commutation", -a_case.commutator_norm, 0.0, a_case.commutator_norm > 0.1 * fourier.SCALE / a))
    rep.checks.append(check("case b: F x violates bc", "non-commutation", -b_case.bc_residual, -0.1, b_case.bc_residual >= 0.1))
    return w


def cmd_commutator(args):
    u = parse_unitary(args.u)
    rep = Report("commutator", args)
    rep.meta["config"]["u"] = u.matrix
    if u.is_identity():
        dec = spectral.spectrum(args.a, args.count, args.basis)
        f = fourier.TruncatedFourier(fourier.QuadratureGrid.gauss(args.a, args.grid))
        norms = [fourier.commutator_defect(dec.eigenfunction(n), f).residual_norm for n in range(len(dec))]
        rep.results["commutator_norms"] = norms
        rep.checks.append(check("F commutes with L_I", "commutation on eigenfunctions", max(norms, default=0.0), args.tol))
        return rep
    _witness_into(rep, u, args.a, args.tol)
    return rep


def cmd_witness(args):
    u = parse_unitary(args.u)
    if u.is_identity():
        raise UsageError("U = I, no witness exists")
    rep = Report("witness", args)
    rep.meta["config"]["u"] = u.matrix
    _witness_into(rep, u, args.a, args.tol)
    return rep


COMMANDS = {
    "spectrum": cmd_spectrum,
    "pswf": cmd_pswf,
    "extensions-check": cmd_extensions_check,
    "commutator": cmd_commutator,
    "gram-check": cmd_gram_check,
    "witness": cmd_witness,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", type=float, default=1.0, help="half-length of the interval")
    common.add_argument("--basis", type=int, default=spectral.DEFAULT_BASIS, help="Legendre basis size N")
    common.add_argument("--grid", type=int, default=fourier.DEFAULT_GRID, help="quadrature size M")
    common.add_argument("--count", type=int, default=8, help="number of eigenpairs")
    common.add_argument("--tol", type=float, default=1e-7, help="check tolerance")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output file (default: stdout)")

    parser = argparse.ArgumentParser(prog="prolate", description="Prolate operator experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("spectrum", parents=[common], help="eigenvalues of L_I or Lambda")
    p.add_argument("--variant", choices=("li", "lambda"), default="li")
    p.add_argument("--no-shoot", action="store_true", help="skip the shooting cross-check")
    p = sub.add_parser("pswf", parents=[common], help="samples of one eigenfunction")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--points", type=int, default=101)
    p = sub.add_parser("extensions-check", parents=[common], help="extension algebra self-test")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--corrupt-j", action="store_true", help="negative control: perturb the reference J")
    p = sub.add_parser("commutator", parents=[common], help="commutator of F with L_U")
    p.add_argument("--u", default="identity", help='"identity", four complex entries or eight re,im numbers')
    sub.add_parser("gram-check", parents=[common], help="Gram matrix of the cutoff quartet")
    p = sub.add_parser("witness", parents=[common], help="non-commutation witness for U != I")
    p.add_argument("--u", required=True)
    return parser


def _validate(args):
    if not (args.a > 0 and np.isfinite(args.a)):
        raise UsageError("--a must be positive and finite")
    if args.basis < 4:
        raise UsageError("--basis must be at least 4")
    if args.grid < 16:
        raise UsageError("--grid must be at least 16")
    if args.count < 0 or args.count > args.basis // 2:
        raise UsageError(f"--count must lie in [0, {args.basis // 2}]")
    if not args.tol > 0:
        raise UsageError("--tol must be positive")


def main(argv=None):
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        _validate(args)
        rep = COMMANDS[args.command](args)
    except (UsageError, DegenerateUnitary) as exc:
        print(f"prolate: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ProlateError as exc:
        print(f"prolate: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    text = rep.to_json() if args.format == "json" else rep.to_csv()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for c in rep.checks:
        log.info("%s: %s (%.3g <= %.3g)", c["name"], "pass" if c["pass"] else "FAIL", c["measured"], c["tolerance"])
    return EXIT_OK if rep.ok else EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
