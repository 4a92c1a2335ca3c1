"""Command-line interface: ``condsvd <subcommand> ...``.

Exit codes
----------
0  success
1  usage error
2  I/O, parse, or malformed-input error
3  infeasible (shape conditions, singular B, special-case hypotheses)
4  verification or exactness failure
5  numerical failure (e.g. SVD non-convergence)
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__
from .conditional import (
    EXACT_TOL,
    HERMITIAN_TOL,
    ZERO_TOL,
    check_conditions,
    conditional_svd,
    special_case,
    verify_factors,
)
from .errors import (
    ConvergenceError,
    InfeasibleError,
    InputError,
    NotExactError,
    NotHermitianError,
    NotPSDError,
)
from .instances import GenSpec, random_decomposable, random_psd_pair
from .matrix import embed, frobenius_norm
from .mmio import MatrixFileError, read_matrix, write_matrix
from .svd import full_svd, reconstruct

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_INFEASIBLE = 3
EXIT_FAILED = 4
EXIT_NUMERICAL = 5

REPORT_SCHEMA = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


class _Run:
    """Collects the report for one invocation."""

    def __init__(self, argv, command):
        self.t0 = time.perf_counter()
        self.report = {
            "schema": REPORT_SCHEMA,
            "tool": "condsvd",
            "version": __version__,
            "command": command,
            "argv": list(argv),
            "inputs": [],
            "outputs": [],
        }

    def load(self, path, role):
        a = read_matrix(path)
        self.report["inputs"].append({"role": role, "path": str(path), "dims": list(a.shape)})
        return a

    def save(self, path, a, role):
        write_matrix(path, a)
        self.report["outputs"].append({"role": role, "path": str(path), "dims": list(a.shape)})

    def finish(self, code, status):
        self.report["exit_code"] = code
        self.report["status"] = status
        self.report["timing_s"] = time.perf_counter() - self.t0
        return self.report


def _floats(text):
    return tuple(float(t) for t in text.split(",") if t.strip())


def _dims(text):
    try:
        dims = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"bad --dims {text!r}; expected m,n,k,l") from None
    return dims


def _read_config(path):
    """Parse a key=value file; '#' starts a comment."""
    cfg = {}
    with open(path, encoding="utf-8") as fh:
        for no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{no}: expected key=value, got {line!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            cfg[key.replace("-", "_")] = value
    return cfg


def _cmd_svd(args, run):
    a = run.load(args.A, "A")
    f = full_svd(a)
    p = args.out_prefix
    run.save(f"{p}.U.mtx", f.U, "U")
    run.save(f"{p}.S.mtx", embed(f.sigma), "S")
    run.save(f"{p}.V.mtx", f.V, "V")
    res = frobenius_norm(a - reconstruct(f))
    run.report.update(
        sigma=f.sigma.diag.tolist(),
        residual_abs=res,
        residual_rel=res / max(1.0, frobenius_norm(a)),
        unitarity_U=frobenius_norm(f.U @ f.U.conj().T - np.eye(f.U.shape[0])),
        unitarity_V=frobenius_norm(f.V @ f.V.conj().T - np.eye(f.V.shape[0])),
        sweeps=f.sweeps,
    )
    return EXIT_OK, "ok"


def _cmd_check(args, run):
    a = run.load(args.A, "A")
    b = run.load(args.B, "B")
    (m, n), (k, l) = a.shape, b.shape
    sig_b = full_svd(b).sigma.diag
    rep = check_conditions(m, n, k, l, sig_b, args.zero_tol)
    run.report.update(rep.to_dict())
    run.report["sigma_b"] = sig_b.tolist()
    if rep.feasible:
        return EXIT_OK, "feasible"
    return EXIT_INFEASIBLE, "infeasible"


def _cmd_decompose(args, run):
    a = run.load(args.A, "A")
    b = run.load(args.B, "B")
    try:
        f = conditional_svd(a, b, zero_tol=args.zero_tol, exact_tol=args.exact_tol, strict=args.strict)
    except InfeasibleError as exc:
        if exc.report is not None:
            run.report.update(exc.report.to_dict())
        raise
    p = args.out_prefix
    run.save(f"{p}.H.mtx", f.H, "H")
    run.save(f"{p}.M.mtx", f.M, "M")
    ver = verify_factors(a, b, f.H, f.M, tol=args.exact_tol)
    run.report.update(f.report.to_dict())
    run.report.update(
        d=f.scaling.d.tolist(),
        sigma_a=f.sigma_a.tolist(),
        sigma_b=f.sigma_b.tolist(),
        residual_abs=f.residual_abs,
        residual_rel=f.residual_rel,
        residual_tail=f.residual_tail,
        exact=f.exact,
        exact_tol=args.exact_tol,
        hh_hermitian=ver.hh_hermitian,
        mm_hermitian=ver.mm_hermitian,
    )
    if f.exact:
        return EXIT_OK, "exact"
    return EXIT_FAILED, "inexact"


def _cmd_special(args, run):
    a = run.load(args.A, "A")
    b = run.load(args.B, "B")
    f = special_case(a, b, zero_tol=args.zero_tol, exact_tol=args.exact_tol, strict=args.strict)
    run.save(f"{args.out_prefix}.H.mtx", f.H, "H")
    hh = f.H @ f.H.conj().T
    run.report.update(
        d=f.d.tolist(),
        lambda_a=f.lam_a.tolist(),
        lambda_b=f.lam_b.tolist(),
        residual_abs=f.residual_abs,
        residual_rel=f.residual_rel,
        exact=f.exact,
        exact_tol=args.exact_tol,
        hh_asymmetry=frobenius_norm(hh - hh.conj().T),
    )
    if f.exact:
        return EXIT_OK, "exact"
    return EXIT_FAILED, "inexact"


def _cmd_verify(args, run):
    a = run.load(args.A, "A")
    b = run.load(args.B, "B")
    h = run.load(args.H, "H")
    m = run.load(args.M, "M")
    rep = verify_factors(a, b, h, m, tol=args.tol, herm_tol=args.herm_tol)
    run.report.update(rep.to_dict())
    if rep.passed:
        return EXIT_OK, "pass"
    return EXIT_FAILED, "fail"


def _cmd_generate(args, run):
    cfg = _read_config(args.config) if args.config else {}

    def pick(name, flag, conv):
        if flag is not None:
            return flag
        if name in cfg:
            return conv(cfg[name])
        return None

    seed = pick("seed", args.seed, lambda s: int(s, 0))
    seed = 0 if seed is None else seed
    if not 0 <= seed < 2**64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    run.report["seed"] = seed
    psd = pick("psd", args.psd, int)
    p = args.out_prefix

    if psd is not None:
        cap = pick("cond_cap", args.cond_cap, float)
        cap = 1e4 if cap is None else cap
        a, b = random_psd_pair(psd, seed, cap)
        run.report["certificate"] = {"kind": "psd_pair", "n": psd, "seed": seed, "cond_cap": cap}
    else:
        dims = pick("dims", args.dims, _dims)
        if dims is None:
            raise UsageError("generate needs --dims m,n,k,l (or --psd n)")
        if len(dims) != 4:
            raise UsageError(f"--dims needs four values, got {len(dims)}")
        spec = GenSpec(
            dims=dims,
            seed=seed,
            spectrum_b=pick("spectrum_b", args.spectrum_b, _floats),
            d_spec=pick("d", args.d, _floats),
            tail=pick("tail", args.tail, _floats) or (),
        )
        a, b, cert = random_decomposable(spec)
        run.report["certificate"] = {"kind": "decomposable", **cert.to_dict()}
    run.save(f"{p}.A.mtx", a, "A")
    run.save(f"{p}.B.mtx", b, "B")
    return EXIT_OK, "ok"


def build_parser():
    parser = _Parser(prog="condsvd", description="Conditional SVD: factor A = H B M* for given A and B.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--report", metavar="PATH", help="write the run report as JSON")
        sp.add_argument("-q", "--quiet", action="store_true", help="suppress the text summary")

    sp = sub.add_parser("svd", help="full SVD of one matrix")
    sp.add_argument("A")
    sp.add_argument("--out-prefix", required=True)
    common(sp)
    sp.set_defaults(func=_cmd_svd)

    sp = sub.add_parser("check", help="classify the feasibility of (A, B)")
    sp.add_argument("A")
    sp.add_argument("B")
    sp.add_argument("--zero-tol", type=float, default=ZERO_TOL)
    common(sp)
    sp.set_defaults(func=_cmd_check)

    sp = sub.add_parser("decompose", help="compute H and M with A = H B M*")
    sp.add_argument("A")
    sp.add_argument("B")
    sp.add_argument("--out-prefix", required=True)
    sp.add_argument("--strict", action="store_true", help="fail without writing factors when inexact")
    sp.add_argument("--zero-tol", type=float, default=ZERO_TOL)
    sp.add_argument("--exact-tol", type=float, default=EXACT_TOL)
    common(sp)
    sp.set_defaults(func=_cmd_decompose)

    sp = sub.add_parser("special", help="compute H with A = H B H* (Hermitian PSD inputs)")
    sp.add_argument("A")
    sp.add_argument("B")
    sp.add_argument("--out-prefix", required=True)
    sp.add_argument("--strict", action="store_true")
    sp.add_argument("--zero-tol", type=float, default=ZERO_TOL)
    sp.add_argument("--exact-tol", type=float, default=EXACT_TOL)
    common(sp)
    sp.set_defaults(func=_cmd_special)

    sp = sub.add_parser("verify", help="check A = H B M* for given factors (M is n x l)")
    sp.add_argument("A")
    sp.add_argument("B")
    sp.add_argument("H")
    sp.add_argument("M")
    sp.add_argument("--tol", type=float, default=EXACT_TOL)
    sp.add_argument("--herm-tol", type=float, default=HERMITIAN_TOL)
    common(sp)
    sp.set_defaults(func=_cmd_verify)

    sp = sub.add_parser("generate", help="write a seeded test pair A, B")
    sp.add_argument("--dims", type=_dims, help="m,n,k,l")
    sp.add_argument("--seed", type=lambda s: int(s, 0))
    sp.add_argument("--tail", type=_floats, help="extra singular values of A, e.g. 1,0.5")
    sp.add_argument("--spectrum-b", type=_floats, help="singular values of B (default: random)")
    sp.add_argument("--d", type=_floats, help="scaling diagonal (default: random)")
    sp.add_argument("--psd", type=int, metavar="N", help="generate an N x N Hermitian PSD pair instead")
    sp.add_argument("--cond-cap", type=float, help="condition number cap for B with --psd")
    sp.add_argument("--config", help="key=value file; flags override its entries")
    sp.add_argument("--out-prefix", required=True)
    common(sp)
    sp.set_defaults(func=_cmd_generate)
    return parser


def _summary(report):
    skip = {"schema", "tool", "argv", "inputs", "outputs"}
    lines = [f"condsvd {report['command']}: {report.get('status')} (exit {report.get('exit_code')})"]
    for item in report["inputs"]:
        lines.append(f"  input  {item['role']}: {item['path']} {item['dims'][0]}x{item['dims'][1]}")
    for item in report["outputs"]:
        lines.append(f"  output {item['role']}: {item['path']} {item['dims'][0]}x{item['dims'][1]}")
    for key, value in report.items():
        if key in skip or key in ("command", "status", "exit_code"):
            continue
        if isinstance(value, float):
            value = f"{value:.6g}"
        elif isinstance(value, list) and value and isinstance(value[0], float):
            value = "[" + ", ".join(f"{v:.6g}" for v in value) + "]"
        lines.append(f"  {key}: {value}")
    return "\n".join(lines)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE

    run = _Run(argv, args.command)
    error = None
    try:
        code, status = args.func(args, run)
    except UsageError as exc:
        code, status, error = EXIT_USAGE, "usage error", exc
    except (OSError, MatrixFileError) as exc:
        code, status, error = EXIT_IO, "io error", exc
    except (InfeasibleError, NotHermitianError, NotPSDError) as exc:
        code, status, error = EXIT_INFEASIBLE, "infeasible", exc
    except NotExactError as exc:
        code, status, error = EXIT_FAILED, "inexact", exc
    except ConvergenceError as exc:
        code, status, error = EXIT_NUMERICAL, "numerical failure", exc
    except InputError as exc:
        code, status, error = EXIT_IO, "input error", exc
    if error is not None:
        run.report["error"] = str(error)
        print(f"condsvd {args.command}: {error}", file=sys.stderr)

    report = run.finish(code, status)
    if args.report:
        try:
            with open(args.report, "w", encoding="utf-8") as fh:
                json.dump(report, fh, indent=2)
                fh.write("\n")
        except OSError as exc:
            print(f"condsvd: cannot write report: {exc}", file=sys.stderr)
            return EXIT_IO
    if not args.quiet:
        print(_summary(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
