"""Command-line driver: ``rootdistiller {distill,sample,verify} ...``.

Exit codes: 0 success (including zero roots), 2 invalid configuration,
3 numeric failure during the run.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass
from typing import Optional

from .distiller import FilterParams, RootReport, distill
from .educated_map import MapConfig
from .grid_sampler import Mesh, sample_map, samples_to_csv, uniform_mesh, write_samples_svg
from .mpcontext import MPReal, abbreviate, make_context, parse_decimal, to_decimal
from .oracle import chebyshev_roots
from .polynomial import EVALUATORS, Polynomial, chebyshev_T, load_polynomial, round_coeffs

log = logging.getLogger("rootdistiller")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
LONG_DISPLAY_PREC = 200


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    chebyshev: Optional[int]
    poly: Optional[str]
    a: str
    b: str
    prec: Optional[int]
    h: str
    k: int
    scheme: str = "compensated"
    bisector_c: Optional[str] = None
    residual_threshold: Optional[str] = None
    error_tol: Optional[str] = None
    dedup_tol: Optional[str] = None
    out: Optional[str] = None
    format: str = "json"
    svg: Optional[str] = None
    threads: Optional[int] = None

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        return cls(
            chebyshev=ns.chebyshev, poly=ns.poly, a=ns.interval[0], b=ns.interval[1],
            prec=ns.prec, h=ns.h, k=ns.k, scheme=ns.scheme, bisector_c=ns.bisector_c,
            residual_threshold=ns.residual_threshold, error_tol=ns.error_tol,
            dedup_tol=ns.dedup_tol, out=ns.out, format=ns.format, svg=ns.svg, threads=ns.threads,
        )


@dataclass
class Resolved:
    f: Polynomial
    cfg: MapConfig
    mesh: Mesh
    params: FilterParams
    echo: dict


def resolve(rc: RunConfig) -> Resolved:
    """Build the polynomial, map, mesh and filter parameters; ConfigError on bad input."""
    if (rc.chebyshev is None) == (rc.poly is None):
        raise ConfigError("exactly one of --chebyshev or --poly is required")
    if rc.k < 0:
        raise ConfigError("--k must be non-negative")
    try:
        if rc.chebyshev is not None:
            if rc.chebyshev < 0:
                raise ConfigError("--chebyshev degree must be non-negative")
            if rc.prec is None:
                raise ConfigError("--prec is required with --chebyshev")
            ctx = make_context(rc.prec)
            f = round_coeffs(chebyshev_T(rc.chebyshev), ctx)
            source = {"chebyshev": rc.chebyshev}
        else:
            f = load_polynomial(rc.poly)
            if rc.prec is not None and rc.prec != f.ctx.prec_digits:
                f = f.with_context(make_context(rc.prec))
            ctx = f.ctx
            source = {"poly": rc.poly}
        a, b, h = (parse_decimal(s, ctx) for s in (rc.a, rc.b, rc.h))
        cfg = MapConfig(f, a, b, rc.k, scheme=rc.scheme)
        mesh = uniform_mesh(a, b, h)
        params = FilterParams.defaults(
            ctx, bisector_c=rc.bisector_c, residual_threshold=rc.residual_threshold,
            error_tol=rc.error_tol, dedup_tol=rc.dedup_tol,
        )
    except ConfigError:
        raise
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        raise ConfigError(str(exc)) from exc
    echo = {
        "polynomial": source,
        "degree": f.degree,
        "interval": [rc.a, rc.b],
        "prec": ctx.prec_digits,
        "h": rc.h,
        "k": rc.k,
        "scheme": rc.scheme,
        "filter": params.to_dict(),
    }
    return Resolved(f, cfg, mesh, params, echo)


def _show(v, prec: int) -> str:
    s = to_decimal(v)
    return abbreviate(s) if prec > LONG_DISPLAY_PREC else s


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _summary(line: str, rc: RunConfig) -> None:
    # keep stdout clean for the artifact when it is streamed there
    print(line, file=sys.stdout if rc.out else sys.stderr)


def report_json(report: RootReport, echo: dict) -> str:
    return json.dumps(report.to_dict(echo), indent=2) + "\n"


def report_csv(report: RootReport, echo: dict) -> str:
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(echo, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "root", "error_estimate", "residual", "x1", "x2"])
    for i, r in enumerate(report.roots):
        d = r.to_dict()
        x1, x2 = d["bracket"] or ("", "")
        w.writerow([i, d["root"], d["error_estimate"], d["residual"], x1, x2])
    return buf.getvalue()


def cmd_distill(rc: RunConfig) -> int:
    res = resolve(rc)
    report = distill(res.cfg, res.mesh, res.params, threads=rc.threads)
    text = report_json(report, res.echo) if rc.format == "json" else report_csv(report, res.echo)
    _emit(text, rc.out)
    prec = res.cfg.ctx.prec_digits
    _summary(f"roots: {len(report.roots)}", rc)
    _summary("stages: " + " ".join(f"{k}={v}" for k, v in report.stage_counts.items()), rc)
    if report.roots:
        top = report.roots[-1]
        _summary(f"largest root: {_show(top.root, prec)}", rc)
        _summary(f"error estimate: {to_decimal(top.error_estimate, 8)}", rc)
    if rc.svg:
        write_samples_svg(report.samples, rc.svg, title=_title(res), bounds=(res.cfg.a, res.cfg.b))
    return EXIT_OK


def _title(res: Resolved) -> str:
    return f"degree {res.f.degree}, prec {res.cfg.ctx.prec_digits}, k={res.cfg.k}"


def cmd_sample(rc: RunConfig) -> int:
    res = resolve(rc)
    L = sample_map(res.cfg, res.mesh, threads=rc.threads)
    if rc.format == "csv":
        text = samples_to_csv(L, res.echo)
    else:
        rows = [{"index": i, "x": to_decimal(x), "y": None if y is None else to_decimal(y)}
                for i, (x, y) in enumerate(L)]
        text = json.dumps({"config": res.echo, "samples": rows}, indent=2) + "\n"
    _emit(text, rc.out)
    _summary(f"nodes: {len(L)} numeric: {len(L.numeric())}", rc)
    if rc.svg:
        write_samples_svg(L, rc.svg, title=_title(res), bounds=(res.cfg.a, res.cfg.b))
    return EXIT_OK


def verify_rows(report: RootReport, d: int) -> tuple[list[dict], list]:
    """Pair each distilled root with the nearest closed-form Chebyshev root."""
    ctx = report.cfg.ctx
    oracle_ctx = make_context(ctx.prec_digits + 8)
    oracle = chebyshev_roots(d, report.cfg.a, report.cfg.b, oracle_ctx)
    rows = []
    for r in report.roots:
        root = oracle_ctx.real(r.root)
        best = min(oracle, key=lambda o: abs(o.value - root).value) if oracle else None
        rows.append({
            "root": r.root,
            "oracle": None if best is None else best.value,
            "j": None if best is None else best.index_j,
            "abs_diff": None if best is None else abs(best.value - root),
        })
    return rows, oracle


def cmd_verify(rc: RunConfig) -> int:
    if rc.chebyshev is None:
        raise ConfigError("verify needs --chebyshev (closed-form roots are required)")
    if rc.chebyshev < 1:
        raise ConfigError("verify needs a Chebyshev degree of at least 1")
    res = resolve(rc)
    report = distill(res.cfg, res.mesh, res.params, threads=rc.threads)
    rows, oracle = verify_rows(report, rc.chebyshev)
    diffs = [r["abs_diff"] for r in rows if r["abs_diff"] is not None]
    max_diff = max(diffs, key=lambda v: v.value) if diffs else None
    table = [{k: (to_decimal(v) if isinstance(v, MPReal) else v) for k, v in r.items()} for r in rows]
    if rc.format == "json":
        text = json.dumps({
            "config": res.echo,
            "distilled": len(report.roots),
            "oracle": len(oracle),
            "max_abs_diff": None if max_diff is None else to_decimal(max_diff, 8),
            "rows": table,
        }, indent=2) + "\n"
    else:
        buf = io.StringIO()
        buf.write("# config: " + json.dumps(res.echo, sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["root", "oracle", "j", "abs_diff"])
        for r in table:
            w.writerow([r["root"], r["oracle"], r["j"], r["abs_diff"]])
        text = buf.getvalue()
    _emit(text, rc.out)
    _summary(f"distilled={len(report.roots)} oracle={len(oracle)}", rc)
    _summary("max |distilled - oracle|: " + ("n/a" if max_diff is None else to_decimal(max_diff, 8)), rc)
    return EXIT_OK


COMMANDS = {"distill": cmd_distill, "sample": cmd_sample, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rootdistiller", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("--chebyshev", type=int, metavar="D", help="Chebyshev T_D with exact coefficients rounded to --prec")
    src.add_argument("--poly", metavar="FILE", help='JSON {"degree", "coeffs", "prec"}')
    common.add_argument("--interval", nargs=2, required=True, metavar=("A", "B"))
    common.add_argument("--prec", type=int, help="decimal working precision")
    common.add_argument("--h", required=True, help="mesh width")
    common.add_argument("--k", type=int, required=True, help="fold parameter (order 2**(k+1))")
    common.add_argument("--scheme", choices=sorted(EVALUATORS), default="compensated",
                        help="polynomial evaluation scheme (default: compensated)")
    common.add_argument("--bisector-c")
    common.add_argument("--residual-threshold")
    common.add_argument("--error-tol")
    common.add_argument("--dedup-tol")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--svg", help="write a scatter plot of the sampled map")
    common.add_argument("--threads", type=int, default=os.cpu_count(), help="worker threads for grid evaluation")
    common.add_argument("-v", "--verbose", action="store_true")
    for name, help_ in (("distill", "distill roots into a JSON/CSV report"),
                        ("sample", "write the sampled table L as CSV/JSON"),
                        ("verify", "compare distilled roots with closed-form Chebyshev roots")):
        sub.add_parser(name, parents=[common], help=help_)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if ns.format is None:
        ns.format = "csv" if ns.command == "sample" else "json"
    if ns.threads is not None and ns.threads < 1:
        parser.error("--threads must be positive")
    rc = RunConfig.from_args(ns)
    try:
        return COMMANDS[ns.command](rc)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, OverflowError) as exc:
        log.exception("numeric failure")
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
