"""Command-line front end: ``partition``, ``trace`` and ``verify``.

Reports go to stdout as JSON (default) or CSV; diagnostics go to stderr.
Exit codes: 0 pass, 1 verification failure, 2 capacity guard, 64 usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
import warnings

import numpy as np
import scipy

from . import __version__
from .errors import CapacityError, CliffpartError, DomainWarning, InvalidInputError
from .gca import (
    DEFAULT_DENSE_GUARD,
    DEFAULT_THEOREM_GUARD,
    AlgebraSignature,
    matrix_trace,
    parse_label,
    trace_normal_form,
    trace_theorem,
)
from .kernels import BACKEND
from .potts import (
    BRUTE_GUARD,
    MULTISUM_GUARD,
    LatticeModel,
    PartitionResult,
    brute_force_partition,
    closed_form_partition,
    decomposed_partition,
    multisum_power,
    transfer_partition,
)
from .verify import DEFAULT_SEED, SUITES, run_suites

log = logging.getLogger("cliffpart")

EXIT_OK, EXIT_FAIL, EXIT_CAPACITY, EXIT_USAGE = 0, 1, 2, 64
METHODS = ("brute", "transfer", "decomposed", "multisum", "closed-form")
GUARD_KEYS = {"brute": "brute_guard", "dense": "dense_guard", "multisum": "multisum_guard",
              "theorem": "theorem_guard"}
DEFAULTS = {
    "n": 2, "p": 2, "q": 2, "a": 0.3, "b": 0.2, "method": "all", "format": "json",
    "seed": DEFAULT_SEED, "rtol": 1e-9, "closed_rtol": 1e-6,
    "brute_guard": BRUTE_GUARD, "dense_guard": DEFAULT_DENSE_GUARD,
    "multisum_guard": MULTISUM_GUARD, "theorem_guard": DEFAULT_THEOREM_GUARD,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def env_guards(value: str | None) -> dict:
    """Parse ``CLIFFPART_GUARD_BITS``: ``key=bits,...`` or a bare bit count.

    Keys are brute, dense, multisum and theorem; a bare integer sets the
    brute-force and multisum enumeration guards.
    """
    if not value:
        return {}
    value = value.strip()
    out = {}
    try:
        if "=" not in value:
            bits = int(value)
            return {"brute_guard": 1 << bits, "multisum_guard": 1 << bits}
        for item in value.split(","):
            key, bits = item.split("=")
            key = key.strip()
            if key not in GUARD_KEYS:
                raise UsageError(f"unknown guard {key!r} in CLIFFPART_GUARD_BITS")
            out[GUARD_KEYS[key]] = 1 << int(bits)
    except ValueError as exc:
        raise UsageError(f"malformed CLIFFPART_GUARD_BITS={value!r}") from exc
    return out


def _add_common(sp):
    sp.add_argument("--format", choices=("json", "csv"), help="output format (default json)")
    sp.add_argument("--config", metavar="PATH", help="JSON file with the same keys as the flags")
    sp.add_argument("--timings", action="store_true", default=None,
                    help="include wall times (makes output run-dependent)")
    sp.add_argument("--brute-guard", type=int, dest="brute_guard")
    sp.add_argument("--dense-guard", type=int, dest="dense_guard")
    sp.add_argument("--multisum-guard", type=int, dest="multisum_guard")
    sp.add_argument("--theorem-guard", type=int, dest="theorem_guard")
    sp.add_argument("-v", "--verbose", action="store_true", default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="cliffpart", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"cliffpart {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("partition", help="partition function by one or more methods")
    for name, typ in (("n", int), ("p", int), ("q", int), ("a", float), ("b", float)):
        sp.add_argument(f"--{name}", type=typ)
    sp.add_argument("--method", choices=METHODS + ("all",))
    sp.add_argument("--rtol", type=float, help="pairwise relative tolerance (default 1e-9)")
    sp.add_argument("--closed-rtol", type=float, dest="closed_rtol",
                    help="tolerance for pairs involving the closed form (default 1e-6)")
    _add_common(sp)

    sp = sub.add_parser("trace", help="normalized trace of a gamma word, three ways")
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=int)
    sp.add_argument("word", nargs="*", help="generator labels g1..g2p or gb1..gbp")
    _add_common(sp)

    sp = sub.add_parser("verify", help="run the verification suites")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--suite", action="append", choices=tuple(SUITES), dest="suites",
                    help="run only this suite (repeatable)")
    sp.add_argument("--tol", action="append", default=None, metavar="SUITE=VALUE",
                    help="override a suite tolerance")
    sp.add_argument("--inject-fault", dest="inject_fault", help=argparse.SUPPRESS)
    _add_common(sp)
    return ap


def resolve_config(args: argparse.Namespace) -> dict:
    """Defaults < environment guards < config file < explicit flags."""
    cfg = dict(DEFAULTS)
    cfg["timings"] = False
    cfg["verbose"] = False
    cfg.update(env_guards(os.environ.get("CLIFFPART_GUARD_BITS")))
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        for k, v in data.items():
            k = k.replace("-", "_")
            if k not in cfg and k not in ("word", "suites", "tol", "inject_fault"):
                raise UsageError(f"unknown config key {k!r}")
            cfg[k] = v
    for k, v in vars(args).items():
        if v is not None and k != "config":
            cfg[k] = v
    return cfg


def _num(x: float) -> float:
    return float(x)


def _fmt(x: float) -> str:
    return "%.17g" % x


def _versions() -> dict:
    return {"cliffpart": __version__, "numpy": np.__version__, "scipy": scipy.__version__}


def _emit(report: dict, fmt: str, rows=None, header=None) -> None:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow(r)
        sys.stdout.write(buf.getvalue())
    else:
        sys.stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")


def _error_record(kind: str, exc: Exception, fmt: str) -> dict:
    rec = {"error": kind, "message": str(exc)}
    if isinstance(exc, CapacityError):
        rec.update({"what": exc.what, "needed": exc.needed, "limit": exc.limit})
    print(f"cliffpart: {kind}: {exc}", file=sys.stderr)
    if fmt == "json":
        sys.stdout.write(json.dumps(rec, indent=2, sort_keys=True) + "\n")
    return rec


def _run_method(method: str, model: LatticeModel, cfg: dict) -> PartitionResult:
    if method == "brute":
        return brute_force_partition(model, cfg["brute_guard"])
    if method == "transfer":
        return transfer_partition(model, cfg["dense_guard"])
    if method == "decomposed":
        return decomposed_partition(model, cfg["dense_guard"])
    if method == "multisum":
        t0 = time.perf_counter()
        res = multisum_power(model, guard=cfg["multisum_guard"], dense_guard=0)
        return PartitionResult(res.Z, "multisum", res.terms, time.perf_counter() - t0,
                               {"nonzero_traces": res.nonzero_traces,
                                "impure_traces": res.impure_traces})
    if method == "closed-form":
        return closed_form_partition(model)
    raise InvalidInputError(f"unknown method {method!r}")


def cmd_partition(cfg: dict) -> int:
    fmt = cfg["format"]
    model = LatticeModel(int(cfg["n"]), int(cfg["p"]), int(cfg["q"]), float(cfg["a"]), float(cfg["b"]))
    methods = METHODS if cfg["method"] == "all" else (cfg["method"],)
    results, skipped = [], []
    for m in methods:
        if m == "closed-form" and model.n != 2:
            if cfg["method"] == "all":
                skipped.append({"method": m, "reason": "closed form requires n = 2"})
                continue
        try:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", DomainWarning)
                res = _run_method(m, model, cfg)
            for wmsg in caught:
                print(f"cliffpart: warning: {wmsg.message}", file=sys.stderr)
            results.append(res)
            log.info("%s: Z = %r", m, res.Z)
        except CapacityError as exc:
            if cfg["method"] != "all":
                _error_record("capacity", exc, fmt)
                return EXIT_CAPACITY
            skipped.append({"method": m, "reason": str(exc)})
    if not results:
        _error_record("capacity", CapacityError("every method", 1, 0), fmt)
        return EXIT_CAPACITY

    passed = True
    recs = []
    for r in results:
        real_ok = r.imag_ratio < 1e-9 and r.Z.real > 0
        passed &= real_ok
        rec = {"method": r.method, "Z_re": _num(r.Z.real), "Z_im": _num(r.Z.imag),
               "terms": r.terms, "real_positive": bool(real_ok)}
        if cfg["timings"]:
            rec["wall_ms"] = r.wall_time * 1e3
        recs.append(rec)
    devs = []
    for i in range(len(results)):
        for j in range(i + 1, len(results)):
            x, y = results[i], results[j]
            rel = abs(x.Z - y.Z) / max(abs(y.Z), 1e-300)
            tol = cfg["closed_rtol"] if "closed-form" in (x.method, y.method) else cfg["rtol"]
            ok = rel <= tol
            passed &= ok
            devs.append({"pair": [x.method, y.method], "rel": _num(rel), "tol": tol, "pass": bool(ok)})
    report = {
        "command": "partition",
        "model": {"n": model.n, "p": model.p, "q": model.q, "a": model.a, "b": model.b},
        "results": recs,
        "skipped": skipped,
        "deviations": devs,
        "passed": bool(passed),
        "environment": {
            "guards": {k: cfg[k] for k in ("brute_guard", "dense_guard", "multisum_guard")},
            "backend": BACKEND,
            "versions": _versions(),
        },
    }
    header = ["method", "n", "p", "q", "a", "b", "Z_re", "Z_im", "wall_ms", "terms"]
    rows = [[r.method, model.n, model.p, model.q, _fmt(model.a), _fmt(model.b), _fmt(r.Z.real),
             _fmt(r.Z.imag), _fmt(r.wall_time * 1e3) if cfg["timings"] else "", r.terms]
            for r in results]
    _emit(report, fmt, rows, header)
    return EXIT_OK if passed else EXIT_FAIL


def _phase_record(ph) -> dict:
    z = ph.to_complex()
    return {"value": str(ph), "re": _num(z.real), "im": _num(z.imag)}


def cmd_trace(cfg: dict) -> int:
    fmt = cfg["format"]
    sig = AlgebraSignature(int(cfg["n"]), int(cfg["p"]))
    labels = list(cfg.get("word") or [])
    idx = [parse_label(sig, s) for s in labels]
    nf = trace_normal_form(sig, sig.word(idx))
    th = trace_theorem(sig, idx, guard=cfg["theorem_guard"])
    mt = matrix_trace(sig, idx, guard=cfg["dense_guard"])
    agree = abs(nf.to_complex() - mt) < 1e-12 and abs(th.to_complex() - mt) < 1e-12
    report = {
        "command": "trace",
        "n": sig.n,
        "p": sig.p,
        "word": labels,
        "indices": idx,
        "normal_form": _phase_record(nf),
        "theorem": _phase_record(th),
        "matrix": {"re": _num(mt.real), "im": _num(mt.imag)},
        "agree": bool(agree),
    }
    rows = [["normal_form", str(nf), _fmt(nf.to_complex().real), _fmt(nf.to_complex().imag)],
            ["theorem", str(th), _fmt(th.to_complex().real), _fmt(th.to_complex().imag)],
            ["matrix", "", _fmt(mt.real), _fmt(mt.imag)]]
    _emit(report, fmt, rows, ["evaluator", "phase", "re", "im"])
    return EXIT_OK if agree else EXIT_FAIL


def _parse_fault(s):
    if s is None:
        return None
    try:
        i, j = (int(x) for x in str(s).split(","))
    except ValueError as exc:
        raise UsageError(f"--inject-fault expects 'i,j', got {s!r}") from exc
    if i == j or min(i, j) < 0:
        raise UsageError("--inject-fault needs two distinct generator indices")
    return (i, j)


def cmd_verify(cfg: dict) -> int:
    fmt = cfg["format"]
    tols = {}
    for item in cfg.get("tol") or []:
        try:
            k, v = item.split("=")
            tols[k.strip()] = float(v)
        except ValueError as exc:
            raise UsageError(f"--tol expects SUITE=VALUE, got {item!r}") from exc
        if k.strip() not in SUITES:
            raise UsageError(f"unknown suite {k!r} in --tol")
    fault = _parse_fault(cfg.get("inject_fault"))
    names = cfg.get("suites") or list(SUITES)
    seed = int(cfg["seed"])
    out = []
    passed = True
    for name in names:
        t0 = time.perf_counter()
        (res,) = run_suites(seed, [name], fault, tols)
        rec = res.to_dict()
        if cfg["timings"]:
            rec["wall_s"] = time.perf_counter() - t0
        passed &= res.passed
        out.append(rec)
        print(f"cliffpart: suite {name}: {'PASS' if res.passed else 'FAIL'} "
              f"(max deviation {res.max_deviation:.3e}, tol {res.tolerance:.1e})", file=sys.stderr)
        for f in res.failures[:5]:
            print(f"cliffpart:   {f}", file=sys.stderr)
    report = {
        "command": "verify",
        "seed": seed,
        "fault": list(fault) if fault else None,
        "suites": out,
        "passed": bool(passed),
        "environment": {"backend": BACKEND, "versions": _versions()},
    }
    rows = [[r["name"], "PASS" if r["passed"] else "FAIL", _fmt(r["max_deviation"]),
             _fmt(r["tolerance"]), r["cases"]] for r in out]
    _emit(report, fmt, rows, ["suite", "result", "max_deviation", "tolerance", "cases"])
    return EXIT_OK if passed else EXIT_FAIL


COMMANDS = {"partition": cmd_partition, "trace": cmd_trace, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
    except UsageError as exc:
        print(f"cliffpart: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if cfg["verbose"] else logging.WARNING,
                        format="cliffpart: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        _error_record("usage", exc, cfg["format"])
        return EXIT_USAGE
    except CapacityError as exc:
        _error_record("capacity", exc, cfg["format"])
        return EXIT_CAPACITY
    except (InvalidInputError, ValueError, TypeError) as exc:
        _error_record("usage", exc, cfg["format"])
        return EXIT_USAGE
    except CliffpartError as exc:
        _error_record("error", exc, cfg["format"])
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
