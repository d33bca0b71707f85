"""Command-line pipeline: fit, transform, inverse, report, hist, synth, metrics.

Exit codes: 0 success, 1 usage error, 2 data or parse error, 3 numeric
error. Diagnostics go to stderr; data goes only to the declared outputs.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from . import io as uio
from .cluster import DEFAULT_MIN_PROMINENCE
from .errors import InvalidInputError, NumericError, ParseError
from .kde import DEFAULT_GRID_SIZE
from .metrics import DEFAULT_BATCH, DEFAULT_MIG_BINS, DEFAULT_VOTES, compute_report
from .synth import generate
from .transformer import DEFAULT_RANGE, apply_model, fit_model, invert_model

_SVG_PALETTE = (
    "#4c72b0", "#dd8452", "#55a868", "#c44e52",
    "#8172b3", "#937860", "#da8bc3", "#8c8c8c",
)


def _emit_json(doc, path) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _n_jobs(args) -> int:
    return -1 if args.threads == 0 else args.threads


def _add_threads(parser) -> None:
    parser.add_argument(
        "--threads", type=int, default=0, metavar="N",
        help="columns processed in parallel; 0 means all cores (default)",
    )


def _add_smoothing(parser) -> None:
    parser.add_argument(
        "--edge-smoothing", type=float, default=None, metavar="TEMP",
        help="opt-in logistic smoothing temperature for child CDFs (off by default)",
    )


def cmd_fit(args) -> int:
    X = uio.read_matrix(args.input)
    model = fit_model(
        X,
        grid_size=args.grid_size,
        min_prominence=args.min_prominence,
        output_range=tuple(args.range),
        n_jobs=_n_jobs(args),
    )
    uio.write_model(model, args.output)
    return 0


def cmd_transform(args) -> int:
    model = uio.read_model(args.model)
    X = uio.read_matrix(args.input)
    Z = apply_model(model, X, smoothing=args.edge_smoothing, n_jobs=_n_jobs(args))
    uio.write_matrix(Z, args.output)
    return 0


def cmd_inverse(args) -> int:
    model = uio.read_model(args.model)
    Z = uio.read_matrix(args.input)
    X = invert_model(model, Z, smoothing=args.edge_smoothing, n_jobs=_n_jobs(args))
    uio.write_matrix(X, args.output)
    return 0


def cmd_report(args) -> int:
    model = uio.read_model(args.model)
    doc = {
        "fit_config": uio.model_to_dict(model)["fit_config"],
        "rows": model.n_rows,
        "dimensions": [
            {
                "clusters": len(m.components),
                "collapsed": m.collapsed,
                "bandwidth": m.bandwidth,
                "sample_count": m.sample_count,
                "components": [
                    {"weight": c.weight, "mean": c.mean, "variance": c.variance}
                    for c in m.components
                ],
                "thresholds": list(m.thresholds),
            }
            for m in model.dimensions
        ],
    }
    _emit_json(doc, args.output)
    return 0


def _histogram_svg(dim, index: int) -> str:
    width, height, margin = 640, 360, 44
    plot_w, plot_h = width - 2 * margin, height - 2 * margin
    totals = dim.counts.sum(axis=0)
    top = max(int(totals.max()), 1)
    bins = dim.counts.shape[1]
    bar_w = plot_w / bins

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{margin}" y="{margin - 16}" font-family="sans-serif" font-size="14">'
        f"dimension {index} &#183; {dim.n_clusters} cluster(s)"
        + (" &#183; collapsed" if dim.collapsed else "")
        + "</text>",
    ]
    for b in range(bins):
        x = margin + b * bar_w
        y = height - margin
        for k in range(dim.n_clusters):
            count = int(dim.counts[k, b])
            if count == 0:
                continue
            h = plot_h * count / top
            y -= h
            color = _SVG_PALETTE[k % len(_SVG_PALETTE)]
            parts.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{max(bar_w - 0.5, 0.5):.2f}" '
                f'height="{h:.2f}" fill="{color}"/>'
            )
    parts.append(
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>'
    )
    lo, hi = dim.edges[0], dim.edges[-1]
    parts.append(
        f'<text x="{margin}" y="{height - margin + 18}" font-family="sans-serif" '
        f'font-size="11">{lo:.3g}</text>'
    )
    parts.append(
        f'<text x="{width - margin}" y="{height - margin + 18}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">{hi:.3g}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts)


def cmd_hist(args) -> int:
    model = uio.read_model(args.model)
    X = uio.read_matrix(args.input)
    hist = uio.export_histogram(X, model, bins=args.bins)
    _emit_json(uio.histogram_to_dict(hist), args.output)
    if args.svg:
        os.makedirs(args.svg, exist_ok=True)
        for j, dim in enumerate(hist.dimensions):
            target = os.path.join(args.svg, f"dimension_{j:03d}.svg")
            with open(target, "w", encoding="utf-8") as fh:
                fh.write(_histogram_svg(dim, j))
    return 0


def cmd_synth(args) -> int:
    spec = uio.read_synth_spec(args.spec)
    if args.n is not None:
        spec = dataclasses.replace(spec, n=args.n)
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    result = generate(spec)
    uio.write_matrix(result.latents, args.output)
    if args.factors_output:
        if result.factors.shape[1] == 0:
            raise InvalidInputError("spec declares no factors; nothing to write")
        uio.write_factors(result.factors, args.factors_output)
    if args.truth_output:
        uio.write_truth_models(
            result.truth, result.latents.shape[1], spec.n, args.truth_output
        )
    return 0


def cmd_metrics(args) -> int:
    X = uio.read_matrix(args.input)
    factors = uio.read_factors(args.factors) if args.factors else None
    select = tuple(s.strip() for s in args.metrics.split(",") if s.strip())
    report = compute_report(
        X,
        factors,
        select=select,
        bins=args.bins,
        votes=args.votes,
        batch=args.batch,
        seed=args.seed,
    )
    _emit_json(uio.report_to_dict(report), args.output)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uniformize",
        description="Uniformize mixture-shaped latent samples via density clustering "
        "and the probability integral transform.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a transform model from a sample matrix")
    p.add_argument("--input", required=True, help="CSV or NPY sample matrix")
    p.add_argument("--output", required=True, help="model JSON path")
    p.add_argument("--grid-size", type=int, default=DEFAULT_GRID_SIZE)
    p.add_argument("--min-prominence", type=float, default=DEFAULT_MIN_PROMINENCE)
    p.add_argument(
        "--range", type=float, nargs=2, default=list(DEFAULT_RANGE), metavar=("LO", "HI")
    )
    _add_threads(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("transform", help="map samples onto the uniform range")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    _add_smoothing(p)
    _add_threads(p)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("inverse", help="map transformed samples back to latent scale")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    _add_smoothing(p)
    _add_threads(p)
    p.set_defaults(func=cmd_inverse)

    p = sub.add_parser("report", help="summarize a model: clusters, components, collapse")
    p.add_argument("--model", required=True)
    p.add_argument("--output", default=None, help="JSON path (default: stdout)")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("hist", help="export clustered histograms (JSON, optional SVG)")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", default=None, help="JSON path (default: stdout)")
    p.add_argument("--bins", type=int, default=100)
    p.add_argument("--svg", default=None, metavar="DIR", help="also write SVG charts here")
    p.set_defaults(func=cmd_hist)

    p = sub.add_parser("synth", help="generate a synthetic dataset from a spec")
    p.add_argument("--spec", required=True, help="generator spec JSON")
    p.add_argument("--n", type=int, default=None, help="override sample count")
    p.add_argument("--seed", type=int, default=None, help="override seed")
    p.add_argument("--output", required=True, help="latent matrix CSV")
    p.add_argument("--factors-output", default=None, help="factor labels CSV")
    p.add_argument("--truth-output", default=None, help="ground-truth mixtures JSON")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("metrics", help="score disentanglement of latents against factors")
    p.add_argument("--input", required=True, help="latent matrix CSV or NPY")
    p.add_argument("--factors", default=None, help="factor labels CSV")
    p.add_argument(
        "--metrics", default="mig,tc,factor_vae,correlation",
        help="comma list from: mig, tc, factor_vae, correlation",
    )
    p.add_argument("--bins", type=int, default=DEFAULT_MIG_BINS)
    p.add_argument("--votes", type=int, default=DEFAULT_VOTES)
    p.add_argument("--batch", type=int, default=DEFAULT_BATCH)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default=None, help="JSON path (default: stdout)")
    p.set_defaults(func=cmd_metrics)

    return parser


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return int(args.func(args) or 0)
    except (ParseError, InvalidInputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
