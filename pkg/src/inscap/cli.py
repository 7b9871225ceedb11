"""Command-line interface: constants, curve, exact, estimate, verify.

Every command writes its result to stdout and a RunManifest (JSON) to stderr,
so stdout is byte-for-byte reproducible from the manifest.  Exit codes:
0 success, 1 check failure, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, asdict

from . import __version__, acceptance, estimators, oracle, series
from .core import LOG2E, ChannelSpec, Model, UsageError


@dataclass
class RunManifest:
    command: str
    params: dict
    seed: int | None
    workers: int | None
    version: str
    duration_s: float


def _emit_manifest(command: str, params: dict, seed, workers, started: float) -> None:
    manifest = RunManifest(
        command=command,
        params=params,
        seed=seed,
        workers=workers,
        version=__version__,
        duration_s=round(time.perf_counter() - started, 6),
    )
    print(json.dumps({"manifest": asdict(manifest)}), file=sys.stderr)


def _models(arg: str) -> list[Model]:
    if arg == "both":
        return [Model.SIMPLE, Model.GALLAGER]
    return [Model.parse(arg)]


def _fmt(value: float, digits: int = 9) -> str:
    return f"{value:.{digits}g}"


def _default_workers(args) -> int:
    if getattr(args, "workers", None):
        return args.workers
    env = os.environ.get("INSCAP_WORKERS", "")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def cmd_constants(args) -> int:
    started = time.perf_counter()
    if args.eps <= 0:
        raise UsageError("--eps must be > 0")
    records = []
    for model in _models(args.model):
        g = series.constant_G(model, args.eps)
        s1 = series.sum_S1(args.eps)
        rec = {
            "model": model.value,
            "G": g.value,
            "tail_bound": g.tail_bound,
            "terms_used": g.terms_used,
            "S1": s1.value,
            "minus_log2_e": -LOG2E,
        }
        if model is Model.SIMPLE:
            rec["S2"] = series.sum_S2(args.eps).value
        else:
            rec["S3"] = series.sum_S3(args.eps).value
            rec["minus_seven_eighths"] = -0.875
        records.append(rec)
    if args.format == "json":
        print(json.dumps(records, indent=2))
    else:
        for rec in records:
            parts = [f"{k}={_fmt(v) if isinstance(v, float) else v}" for k, v in rec.items()]
            print("  ".join(parts))
    _emit_manifest("constants", {"model": args.model, "eps": args.eps,
                                 "format": args.format}, None, None, started)
    return 0


def cmd_curve(args) -> int:
    started = time.perf_counter()
    if not (0 < args.alpha_max <= 1):
        raise UsageError("--alpha-max must lie in (0, 1]")
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    grid = [args.alpha_max * (i + 1) / args.steps for i in range(args.steps)]
    rows = series.curve(_models(args.models), grid)
    csv_text = series.curve_to_csv(rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(_curve_svg(rows))
    _emit_manifest(
        "curve",
        {"models": args.models, "alpha_max": args.alpha_max, "steps": args.steps,
         "out": args.out, "svg": args.svg},
        None, None, started,
    )
    return 0


def _curve_svg(rows) -> str:
    """A minimal single-file SVG line chart of the capacity curves."""
    width, height, pad = 640, 420, 50
    by_model: dict = {}
    for alpha, model, value in rows:
        by_model.setdefault(model, []).append((alpha, value))
    xs = [a for a, _, _ in rows]
    ys = [v for _, _, v in rows]
    x_lo, x_hi = 0.0, max(xs)
    y_lo, y_hi = min(ys) - 0.02, max(max(ys), 1.0) + 0.02

    def px(a):
        return pad + (a - x_lo) / (x_hi - x_lo) * (width - 2 * pad)

    def py(v):
        return height - pad - (v - y_lo) / (y_hi - y_lo) * (height - 2 * pad)

    colors = {"simple": "#1f77b4", "gallager": "#d62728"}
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{width / 2}" y="{height - 12}" text-anchor="middle" font-size="13">alpha</text>',
        f'<text x="14" y="{height / 2}" font-size="13" transform="rotate(-90 14 {height / 2})" text-anchor="middle">capacity approximation (bits)</text>',
    ]
    for idx, (model, pts) in enumerate(sorted(by_model.items())):
        pts = sorted(pts)
        path = " ".join(f"{px(a):.2f},{py(v):.2f}" for a, v in pts)
        color = colors.get(model, "black")
        parts.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="2"/>')
        parts.append(
            f'<text x="{width - pad - 4}" y="{pad + 16 + 18 * idx}" text-anchor="end" '
            f'font-size="13" fill="{color}">{model}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_exact(args) -> int:
    started = time.perf_counter()
    spec = ChannelSpec(model=Model.parse(args.model), alpha=args.alpha)
    report = oracle.exact_rate(args.n, spec, max_events=args.max_events)
    print(json.dumps(report.to_dict(), indent=2))
    _emit_manifest(
        "exact",
        {"model": args.model, "n": args.n, "alpha": args.alpha,
         "max_events": args.max_events},
        None, None, started,
    )
    return 0


def cmd_estimate(args) -> int:
    started = time.perf_counter()
    workers = _default_workers(args)
    n = int(float(args.n))
    spec = ChannelSpec(model=Model.parse(args.model), alpha=args.alpha)
    if args.which == "runstats":
        report = estimators.estimate_run_stats(
            args.law, samples=n, seed=args.seed, workers=workers
        ).to_dict()
    elif args.which == "zv":
        report = estimators.estimate_zv_pmf(
            spec, n=n, trials=args.trials, seed=args.seed, workers=workers
        ).to_dict()
    elif args.which == "hk":
        report = estimators.estimate_hk_contribution(
            spec, n=n, trials=args.trials, seed=args.seed, workers=workers
        ).to_dict()
    elif args.which == "ab":
        report = estimators.estimate_ab_ambiguity(
            spec, n=n, trials=args.trials, seed=args.seed, workers=workers
        ).to_dict()
    else:  # capped
        report = estimators.estimate_capped_flip_density(
            l_star=args.l_star, n=n, trials=args.trials, seed=args.seed,
            workers=workers,
        ).to_dict()
    print(json.dumps(report, indent=2))
    _emit_manifest(
        "estimate",
        {"which": args.which, "model": args.model, "alpha": args.alpha,
         "n": n, "trials": args.trials, "l_star": args.l_star, "law": args.law},
        args.seed, workers, started,
    )
    return 0


def cmd_verify(args) -> int:
    started = time.perf_counter()
    workers = _default_workers(args)
    results = acceptance.run_suite(full=args.full, workers=workers)
    all_passed = True
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{res.name} {status} [{res.seconds:.1f}s] {res.detail}")
        all_passed &= res.passed
    _emit_manifest("verify", {"full": args.full}, None, workers, started)
    return 0 if all_passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="inscap",
        description="Insertion-channel capacity expansion, exact oracle, and estimators",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="capacity-expansion constants")
    p.add_argument("--model", choices=["simple", "gallager", "both"], default="both")
    p.add_argument("--eps", type=float, default=1e-8)
    p.add_argument("--format", choices=["json", "text"], default="text")
    p.set_defaults(fn=cmd_constants)

    p = sub.add_parser("curve", help="capacity-approximation curve (CSV / SVG)")
    p.add_argument("--models", choices=["simple", "gallager", "both"], default="both")
    p.add_argument("--alpha-max", type=float, default=0.25)
    p.add_argument("--steps", type=int, default=25)
    p.add_argument("--out", type=str, default=None, help="CSV output path (default stdout)")
    p.add_argument("--svg", type=str, default=None, help="optional SVG chart path")
    p.set_defaults(fn=cmd_curve)

    p = sub.add_parser("exact", help="exact enumeration decomposition report")
    p.add_argument("--model", choices=["simple", "gallager"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--max-events", type=int, default=None)
    p.set_defaults(fn=cmd_exact)

    p = sub.add_parser("estimate", help="Monte Carlo estimators")
    p.add_argument("--which", choices=["runstats", "zv", "hk", "ab", "capped"],
                   required=True)
    p.add_argument("--model", choices=["simple", "gallager"], default="simple")
    p.add_argument("--alpha", type=float, default=1e-3)
    p.add_argument("--n", type=str, default="1e6",
                   help="bits per trial (samples for runstats); accepts 1e7 notation")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--l-star", type=int, default=10, help="run cap for --which capped")
    p.add_argument("--law", choices=["per_run", "length_biased"],
                   default="length_biased", help="run-length law for --which runstats")
    p.set_defaults(fn=cmd_estimate)

    p = sub.add_parser("verify", help="run the acceptance criteria")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--quick", action="store_true", default=True)
    group.add_argument("--full", action="store_true", default=False)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(fn=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
