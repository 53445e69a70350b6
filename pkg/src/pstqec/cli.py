"""Command-line entry point.

Exit codes: 0 all contracts met, 1 usage error, 2 verification failure,
3 numerical tolerance breach.  Data files are deterministic; the
timestamp lives only in the accompanying manifest.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import os
import sys
from pathlib import Path

from . import __version__

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_NUMERIC = 0, 1, 2, 3
THREADS_ENV = "PSTQEC_THREADS"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _limit_threads(n: int | None) -> None:
    n = n or os.environ.get(THREADS_ENV)
    if n:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(n)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_jsonable) + "\n"


def _jsonable(x):
    import numpy as np

    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(f"cannot serialise {type(x)}")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_outputs(args, payload: str | None, path: Path | None, tolerances: dict, extra: dict | None = None) -> None:
    """Write a data file plus its manifest, or print the payload."""
    if path is None:
        if payload is not None:
            sys.stdout.write(payload)
        return
    if payload is not None:
        path.write_text(payload)
    manifest = {
        "command": ["pstqec"] + list(args.argv),
        "seed": args.seed,
        "tolerances": tolerances,
        "checksums": {path.name: _sha256(path)},
        "version": __version__,
        "threads": os.environ.get("OMP_NUM_THREADS"),
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    if extra:
        manifest.update(extra)
    Path(str(path) + ".manifest.json").write_text(_dump(manifest))


def _catalog_checksums() -> dict:
    from .codes import catalog_checksums

    return catalog_checksums()


# ---------------------------------------------------------------------------
# code


def cmd_code(args) -> int:
    from .codes import bounded_search, catalog, get, verify_catalog_entry, verify_code
    from .codes.catalog import IntegrityError
    from .gf2 import MatrixFormatError

    if args.action == "search":
        code = bounded_search(args.m, args.d1, args.d2, args.case, args.budget, args.seed)
        if code is None:
            out = {"found": False, "M": args.m, "d1": args.d1, "d2": args.d2, "case": args.case, "budget": args.budget}
            write_outputs(args, _dump(out), args.out, {})
            return EXIT_VERIFY
        rep = verify_code(code, code.name)
        out = {"found": True, "H1": code.H1.to_text(), "G2": code.G2.to_text(), "report": rep.to_dict()}
        write_outputs(args, _dump(out), args.out, {})
        return EXIT_OK

    try:
        entries = catalog() if args.action == "catalog" else [get(args.name)]
    except (FileNotFoundError, MatrixFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IntegrityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    reports = []
    status = EXIT_OK
    for e in entries:
        try:
            rep = verify_catalog_entry(e)
        except ValueError as exc:
            print(f"error: {e.name}: {exc}", file=sys.stderr)
            return EXIT_USAGE
        diff = {k: {"claimed": a, "computed": b} for k, (a, b) in rep.mismatches(e.claims).items()}
        if diff or not rep.symplectic_valid or not rep.nested:
            status = EXIT_VERIFY
        reports.append({"report": rep.to_dict(), "claims": e.claims, "mismatches": diff})
    body = reports[0] if args.action == "verify" else reports
    write_outputs(args, _dump(body), args.out, {}, {"catalog_checksums": _catalog_checksums()})
    return status


# ---------------------------------------------------------------------------
# chain


def _load_chain(args):
    from .chain import parse_chain, standard_chain

    if getattr(args, "chain", None):
        return parse_chain(Path(args.chain).read_text())
    return standard_chain(args.n, args.lam)


def cmd_chain(args) -> int:
    from .chain import chain_report, check_spectral_symmetry

    spec = _load_chain(args)
    rep = chain_report(spec, args.times, args.seed)
    rep["spectral_symmetric"] = check_spectral_symmetry(spec)
    write_outputs(args, _dump(rep), args.out, {"pst": args.tol})
    return EXIT_OK if rep["pst_max_deviation"] <= args.tol else EXIT_NUMERIC


# ---------------------------------------------------------------------------
# simulate


def _parse_time(text: str, t0: float) -> float:
    text = text.strip()
    if text.endswith("t0"):
        coef = text[:-2].rstrip("*") or "1"
        return float(coef) * t0
    return float(text)


def cmd_simulate(args) -> int:
    import numpy as np

    from .codes import get
    from .dynamics import LogicalCode, Protocol, average_fidelity, run_sweep, unencoded_protocol, write_sweep_csv

    spec = _load_chain(args)
    try:
        entry = get(args.code)
        code = LogicalCode.from_stabilizer_code(entry.code.stabilizer())
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if code.M > spec.N:
        print(f"error: code needs {code.M} sites, chain has {spec.N}", file=sys.stderr)
        return EXIT_USAGE
    tol = {"steps": args.steps}

    if args.single_error:
        try:
            site_s, t_s = args.single_error.split(",")
            site, t_err = int(site_s), _parse_time(t_s, spec.t0)
        except ValueError:
            print("error: --single-error expects SITE,TIME (TIME may be like 0.3t0)", file=sys.stderr)
            return EXIT_USAGE
        enc = Protocol(spec, code, args.correctable)
        bare = unencoded_protocol(spec)
        try:
            ch = enc.single_error_channel(args.pauli, site, t_err)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        fe = average_fidelity(ch)
        fu = average_fidelity(bare.single_error_channel(args.pauli, site, t_err))
        lines = ["site,t,pauli,f_encoded,f_unencoded,decode_failure_rate"]
        lines.append(f"{site},{t_err:.12g},{args.pauli},{fe:.15f},{fu:.15f},{ch.failed_weight:.15f}")
        write_outputs(args, "\n".join(lines) + "\n", args.out, tol)
        return EXIT_OK

    if args.gamma is not None:
        gammas = [args.gamma]
    else:
        gammas = np.geomspace(args.gamma_min, args.gamma_max, args.points).tolist()
    rows = run_sweep(spec, code, gammas, args.steps, args.correctable)
    if args.out is None:
        sys.stdout.write("gamma,f_encoded,f_unencoded,decode_failure_rate\n")
        for r in rows:
            sys.stdout.write(f"{r.gamma:.12g},{r.f_encoded:.15f},{r.f_unencoded:.15f},{r.decode_failure_rate:.15f}\n")
    else:
        write_sweep_csv(rows, args.out)
        write_outputs(args, None, args.out, tol, {"code": entry.name, "chain_N": spec.N, "integrator": "strang"})
    return EXIT_OK


# ---------------------------------------------------------------------------
# impossibility


def cmd_impossibility(args) -> int:
    from .chain import standard_chain
    from .impossibility import compute_R, compute_W, disc_bound_report, repetition_experiment

    if args.action == "wmatrix":
        if args.n % 2:
            print("error: wmatrix needs an even chain length", file=sys.stderr)
            return EXIT_USAGE
        if not 1 <= args.m <= args.n:
            print("error: --m must lie in 1..N", file=sys.stderr)
            return EXIT_USAGE
        ref = compute_R(standard_chain(args.n))
        modes = compute_W(ref, args.m)
        rep = {
            "N": args.n,
            "M": args.m,
            "singular_values": modes.singular_values,
            "eigenvalues": modes.eigenvalues,
            "sigma_max": float(modes.singular_values.max()),
            "gap": modes.gap,
            "unit_singular_values": modes.unit_count(args.tol),
            "involution_error": ref.involution_error(),
            "hermiticity_error": ref.hermiticity_error(),
        }
        if args.m <= args.n // 2:
            rep["disc_bound"] = disc_bound_report(ref, args.m)
        write_outputs(args, _dump(rep), args.out, {"unit": args.tol})
        if args.dump_csv:
            import numpy as np

            np.savetxt(args.dump_csv, modes.W.real, delimiter=",", fmt="%.15e")
            write_outputs(args, None, Path(args.dump_csv), {"unit": args.tol})
        if ref.involution_error() > 1e-10:
            return EXIT_NUMERIC
        return EXIT_OK

    t_err = None if args.t_frac is None else args.t_frac * standard_chain(args.n).t0
    res = repetition_experiment(args.n, args.rep, args.site, t_err)
    rep = {
        "N": res.N,
        "rep": res.rep,
        "err_site": res.err_site,
        "t_err": res.t_err,
        "error_probability": res.error_probability,
        "bit_error_input_0": res.bit_error_0,
        "bit_error_input_1": res.bit_error_1,
        "avg_infidelity": res.avg_infidelity,
        "metric": "worst case over logical basis inputs of a wrong majority vote",
    }
    write_outputs(args, _dump(rep), args.out, {})
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pstqec", description="Error correction for state transfer on XX spin chains")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None, help=f"BLAS thread cap (default ${THREADS_ENV})")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--out", type=Path, default=None)

    code = sub.add_parser("code", help="verify, list or search codes")
    csub = code.add_subparsers(dest="action", required=True, parser_class=_Parser)
    v = csub.add_parser("verify")
    v.add_argument("name", help="catalog name or code file")
    common(v)
    c = csub.add_parser("catalog")
    common(c)
    s = csub.add_parser("search")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--d1", type=int, required=True)
    s.add_argument("--d2", type=int, required=True)
    s.add_argument("--case", choices=["i", "ii", "iii"], default="i")
    s.add_argument("--budget", type=int, default=20000)
    common(s)

    ch = sub.add_parser("chain", help="check perfect state transfer properties")
    chsub = ch.add_subparsers(dest="action", required=True, parser_class=_Parser)
    chk = chsub.add_parser("check")
    chk.add_argument("--n", type=int, default=12)
    chk.add_argument("--lambda", dest="lam", type=float, default=1.0)
    chk.add_argument("--chain", help="chain description file")
    chk.add_argument("--times", type=int, default=10)
    chk.add_argument("--tol", type=float, default=1e-10)
    common(chk)

    sim = sub.add_parser("simulate", help="dephasing simulations")
    simsub = sim.add_subparsers(dest="action", required=True, parser_class=_Parser)
    d = simsub.add_parser("dephasing")
    d.add_argument("--n", type=int, default=12)
    d.add_argument("--lambda", dest="lam", type=float, default=1.0)
    d.add_argument("--chain")
    d.add_argument("--code", default="steane-7")
    d.add_argument("--gamma", type=float, default=None)
    d.add_argument("--gamma-min", type=float, default=1e-3)
    d.add_argument("--gamma-max", type=float, default=1.0)
    d.add_argument("--points", type=int, default=12)
    d.add_argument("--steps", type=int, default=40)
    d.add_argument("--correctable", choices=["restricted", "pairs"], default="restricted")
    d.add_argument("--single-error", default=None, metavar="SITE,TIME")
    d.add_argument("--pauli", choices=["X", "Y", "Z"], default="Z")
    common(d)

    imp = sub.add_parser("impossibility", help="bit-flip impossibility numerics")
    isub = imp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    w = isub.add_parser("wmatrix")
    w.add_argument("--n", type=int, required=True)
    w.add_argument("--m", type=int, required=True)
    w.add_argument("--report", choices=["json"], default="json")
    w.add_argument("--tol", type=float, default=1e-8)
    w.add_argument("--dump-csv", default=None)
    common(w)
    r = isub.add_parser("repetition")
    r.add_argument("--n", type=int, default=21)
    r.add_argument("--rep", type=int, choices=[1, 3, 5], required=True)
    r.add_argument("--site", type=int, default=None)
    r.add_argument("--t-frac", type=float, default=None, help="error time as a fraction of t0")
    common(r)
    return p


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    args.argv = argv
    _limit_threads(args.threads)
    handlers = {"code": cmd_code, "chain": cmd_chain, "simulate": cmd_simulate, "impossibility": cmd_impossibility}
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
