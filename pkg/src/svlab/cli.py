"""Command line interface.

Exit codes: 0 success; 1 usage or validation error; 2 numerical failure,
which includes an unsound or vacuous certificate and any sweep trial that
failed; 3 I/O error (missing, unreadable, or malformed files).

Every command emits its fully resolved configuration, either inside its
JSON output, as a sidecar meta file, or on stderr when stdout carries the
payload. Command line flags win over config file values.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .certificates import default_tau_for_rows, upper_certificate
from .ensemble import EnsembleConfig, LawKind, TailLaw, sample_matrix
from .experiments import (
    SweepConfig,
    baiyin_check,
    bracket_check,
    fit_scaling,
    kth_vector_scan,
    read_records,
    run_sweep,
    transition_scan,
    write_fits,
    write_manifest,
    write_records,
    write_summary,
)
from .localization import localization_report
from .matrixio import MatrixFormatError, load_matrix, save_matrix, save_matrix_csv
from .spectra import SpectralError, full_svd
from .svgplot import line_chart, vector_profile

_LAW_NAMES = {
    "pareto": LawKind.SYMMETRIC_PARETO,
    "symmetric_pareto": LawKind.SYMMETRIC_PARETO,
    "student_t": LawKind.STUDENT_T,
    "gaussian": LawKind.GAUSSIAN,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with code 2
        raise UsageError(message)


def _float_list(text: str) -> list[float]:
    try:
        vals = [float(p) for p in text.split(",") if p.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"expected a comma-separated float list, got {text!r}") from exc
    if not vals:
        raise UsageError(f"empty list: {text!r}")
    return vals


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(p) for p in text.split(",") if p.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"expected a comma-separated int list, got {text!r}") from exc
    if not vals:
        raise UsageError(f"empty list: {text!r}")
    return vals


def _emit(obj: dict, path: str | None, stream=None) -> None:
    text = json.dumps(obj, indent=2)
    if path:
        Path(path).write_text(text + "\n", encoding="ascii")
    else:
        print(text, file=stream or sys.stdout)


def _law_from_args(args) -> TailLaw:
    kind = _LAW_NAMES[args.law]
    if kind is not LawKind.GAUSSIAN and not (args.alpha and args.alpha > 0):
        raise UsageError(f"law {args.law} needs --alpha > 0 (tail index)")
    return TailLaw(
        kind,
        alpha=args.alpha if kind is not LawKind.GAUSSIAN else math.inf,
        scale=args.scale,
        normalize_variance=args.normalize_variance,
    )


def cmd_generate(args) -> int:
    law = _law_from_args(args)
    cfg = EnsembleConfig(n=args.n, aspect=args.aspect, law=law, seed=args.seed)
    x = sample_matrix(cfg)
    save_matrix(x, args.out)
    if args.csv:
        save_matrix_csv(x, args.csv)
    bounds = law.tail_bounds
    meta = {
        "command": "generate",
        "n": cfg.n,
        "aspect": cfg.aspect,
        "rows": cfg.rows,
        "seed": cfg.seed,
        "law": {
            "kind": law.kind.value,
            "alpha": law.alpha,
            "scale": law.scale,
            "normalize_variance": law.normalize_variance,
        },
        "tail_bounds": None if bounds is None else dataclasses.asdict(bounds),
        "out": str(args.out),
        "csv": str(args.csv) if args.csv else None,
        "package_version": __version__,
    }
    _emit(meta, str(args.out) + ".meta.json")
    print(json.dumps(meta))
    return 0


def cmd_spectra(args) -> int:
    x = load_matrix(args.input)
    res = full_svd(x, k_bottom=args.k)
    out = {
        "command": "spectra",
        "config": {"in": str(args.input), "k": args.k},
        "shape": list(x.shape),
        "singular_values": [float(v) for v in res.singular_values],
        "bottom_right_vectors": [[float(v) for v in row] for row in res.bottom_right_vectors],
        "top_right_vector": [float(v) for v in res.top_right_vector],
        "residuals": [float(v) for v in res.residuals],
        "tolerance_used": res.tolerance_used,
        "degenerate_flags": res.degenerate_flags,
        "s_min": res.s_min,
        "s_top": res.s_top,
    }
    _emit(out, args.out)
    if args.out:
        print(json.dumps(out["config"]))
    return 0


def cmd_localize(args) -> int:
    x = load_matrix(args.input)
    c_grid = _float_list(args.c_grid)
    epsilons = _float_list(args.epsilons)
    res = full_svd(x, k_bottom=args.k)
    config = {
        "command": "localize",
        "in": str(args.input),
        "k": args.k,
        "c_grid": c_grid,
        "epsilons": epsilons,
        "out": str(args.out) if args.out else None,
        "plot": str(args.plot) if args.plot else None,
    }
    lines = []
    for k in range(1, args.k + 1):
        u = res.bottom_right_vectors[k - 1]
        for c in c_grid:
            rep = localization_report(u, c, epsilons, degenerate=res.degenerate_flags[k - 1])
            lines.append(json.dumps({"k": k, "c": c, **dataclasses.asdict(rep)}, separators=(",", ":")))
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n", encoding="ascii")
        print(json.dumps(config))
    else:
        print(json.dumps(config), file=sys.stderr)
        for line in lines:
            print(line)
    if args.plot:
        Path(args.plot).write_text(
            vector_profile(res.bottom_right_vectors[0], title="bottom singular vector profile"),
            encoding="ascii",
        )
    return 0


def cmd_certify(args) -> int:
    x = load_matrix(args.input)
    if args.tau is not None:
        tau = args.tau
        tau_source = "explicit"
    else:
        if args.alpha is None:
            raise UsageError("certify needs either --tau or --alpha (for the auto cutoff)")
        tau = default_tau_for_rows(
            x.shape[0], args.alpha, b_frak=args.b_frak, a_frak=args.a_frak, c_upper=args.c_upper
        )
        tau_source = "auto"
    report = upper_certificate(x, tau)
    out = {
        "command": "certify",
        "config": {
            "in": str(args.input),
            "tau": tau,
            "tau_source": tau_source,
            "alpha": args.alpha,
            "b_frak": args.b_frak,
            "a_frak": args.a_frak,
            "c_upper": args.c_upper,
        },
        **dataclasses.asdict(report),
    }
    _emit(out, args.out)
    if args.out:
        print(json.dumps(out["config"]))
    return 0 if report.valid else 2


def _config_from_file(path: str, args) -> SweepConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise UsageError(f"{path}: sweep config must be a JSON object")
    known = {f.name for f in dataclasses.fields(SweepConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise UsageError(f"unknown sweep config keys: {', '.join(unknown)}")
    # Flags win over file values.
    overrides = {
        "alphas": tuple(args.alphas) if args.alphas else None,
        "ns": tuple(args.ns) if args.ns else None,
        "aspect": args.aspect,
        "trials_per_cell": args.trials_per_cell,
        "base_seed": args.base_seed,
        "k_vectors": args.k_vectors,
        "law_kind": _LAW_NAMES[args.law].value if args.law else None,
    }
    merged = dict(raw)
    for key, val in overrides.items():
        if val is not None:
            merged[key] = val
    for key in ("alphas", "ns", "c_grid", "epsilons", "tau_params"):
        if key in merged and isinstance(merged[key], list):
            merged[key] = tuple(merged[key])
    try:
        return SweepConfig(**merged)
    except TypeError as exc:
        raise UsageError(f"bad sweep config: {exc}") from exc


def cmd_sweep(args) -> int:
    config = _config_from_file(args.config, args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    print(json.dumps({"command": "sweep", "resolved_config": config.as_dict(), "workers": args.workers}))
    records, failures, elapsed = run_sweep(config, workers=args.workers)
    write_records(records, out_dir / "records.jsonl")
    write_summary(records, out_dir / "summary.csv")
    fits = []
    for alpha in config.alphas:
        try:
            fits.append(fit_scaling(records, alpha))
        except ValueError:
            continue  # not enough grid for this alpha; fits.csv just omits it
    write_fits(fits, out_dir / "fits.csv")
    write_manifest(config, records, failures, elapsed, out_dir / "manifest.json")
    print(
        json.dumps(
            {
                "records": len(records),
                "failures": len(failures),
                "elapsed_seconds": round(elapsed, 3),
                "out_dir": str(out_dir),
            }
        )
    )
    return 2 if failures else 0


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    import csv

    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def cmd_report(args) -> int:
    records = read_records(args.records)
    if not records:
        raise ValueError(f"no records in {args.records}")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    config = {
        "command": "report",
        "kind": args.kind,
        "records": str(args.records),
        "c": args.c,
        "epsilon": args.epsilon,
        "delta": args.delta,
        "alpha": args.alpha,
        "regime_b": args.regime_b,
        "out_dir": str(out_dir),
    }
    print(json.dumps(config))

    if args.kind == "transition":
        table = transition_scan(records, args.c, args.epsilon, args.delta)
        _write_csv(
            out_dir / "transition.csv",
            ["alpha", "n", "trials", "used", "median_threshold_mass", "median_min_mass",
             "theorem_mass_fraction", "median_ipr"],
            [[repr(r.alpha), r.n, r.trials, r.used, repr(r.median_threshold_mass),
              repr(r.median_min_mass), repr(r.theorem_mass_fraction), repr(r.median_ipr)]
             for r in table.rows],
        )
        n_star = max(r.n for r in table.rows)
        rows = sorted([r for r in table.rows if r.n == n_star and math.isfinite(r.alpha)],
                      key=lambda r: r.alpha)
        if len(rows) >= 2:
            svg = line_chart(
                [
                    ("median min-mass", [r.alpha for r in rows], [r.median_min_mass for r in rows]),
                    ("median threshold mass", [r.alpha for r in rows],
                     [r.median_threshold_mass for r in rows]),
                ],
                title=f"localization transition (n={n_star}, c={args.c:g}, eps={args.epsilon:g})",
                x_label="tail index alpha",
                y_label="mass",
            )
            (out_dir / "transition.svg").write_text(svg, encoding="ascii")
        summary = {
            "rows": len(table.rows),
            "midpoint": table.midpoint,
            "crossing_alpha": table.crossing_alpha,
        }
    elif args.kind == "scaling":
        if args.alpha is None:
            raise UsageError("report --kind scaling needs --alpha")
        fit = fit_scaling(records, args.alpha)
        summary = {
            "alpha": fit.alpha,
            "slope": fit.slope,
            "intercept": fit.intercept,
            "slope_corrected": fit.slope_corrected,
            "residual_sse": fit.residual_sse,
        }
        rows = [[n, repr(m)] for n, m in zip(fit.ns, fit.medians)]
        if 0 < fit.alpha < 2:
            bracket = bracket_check(fit, floor_coeff=args.floor, slack=args.slack)
            summary["bracket"] = dataclasses.asdict(bracket)
            ratio_by_n = dict(bracket.envelope_ratios)
            for row in rows:
                row.append(repr(ratio_by_n[row[0]]))
            header = ["n", "median_s_min", "envelope_ratio"]
        else:
            header = ["n", "median_s_min"]
        _write_csv(out_dir / "scaling.csv", header, rows)
        fit_ys = [math.exp(fit.intercept) * n**fit.slope for n in fit.ns]
        svg = line_chart(
            [
                ("median s_min", list(map(float, fit.ns)), fit.medians),
                (f"fit slope {fit.slope:.3f}", list(map(float, fit.ns)), fit_ys),
            ],
            title=f"smallest singular value scaling, alpha={fit.alpha:g}",
            x_label="n",
            y_label="median s_min",
            log_x=True,
            log_y=True,
        )
        (out_dir / "scaling.svg").write_text(svg, encoding="ascii")
    elif args.kind == "baiyin":
        rep = baiyin_check(records)
        summary = dataclasses.asdict(rep)
        _write_csv(
            out_dir / "baiyin.csv",
            ["n", "mean_ratio", "limit"],
            [[n, repr(v), repr(rep.limit)] for n, v in rep.per_n],
        )
        if len(rep.per_n) >= 2:
            svg = line_chart(
                [
                    ("mean s_min/sqrt(N)", [float(n) for n, _ in rep.per_n],
                     [v for _, v in rep.per_n]),
                    ("limit", [float(n) for n, _ in rep.per_n], [rep.limit] * len(rep.per_n)),
                ],
                title=f"finite-variance limit check, aspect={rep.aspect:g}",
                x_label="n",
                y_label="s_min / sqrt(N)",
            )
            (out_dir / "baiyin.svg").write_text(svg, encoding="ascii")
    elif args.kind == "kth":
        rows = kth_vector_scan(records, args.c, args.epsilon, regime_b=args.regime_b)
        _write_csv(
            out_dir / "kth.csv",
            ["alpha", "n", "k", "in_regime", "used", "degenerate", "median_value",
             "median_threshold_mass", "median_min_mass", "median_ipr"],
            [[repr(r.alpha), r.n, r.k, r.in_regime, r.used, r.degenerate, repr(r.median_value),
              repr(r.median_threshold_mass), repr(r.median_min_mass), repr(r.median_ipr)]
             for r in rows],
        )
        summary = {"rows": len(rows)}
    else:  # pragma: no cover - argparse choices guard this
        raise UsageError(f"unknown report kind {args.kind}")
    print(json.dumps({"kind": args.kind, "summary": summary}))
    return 0


def cmd_plot(args) -> int:
    x = load_matrix(args.input)
    res = full_svd(x, k_bottom=args.k)
    svg = vector_profile(
        res.bottom_right_vectors[args.k - 1],
        title=f"bottom vector k={args.k} (s={res.singular_values[x.shape[1] - args.k]:.6g})",
    )
    Path(args.out).write_text(svg, encoding="ascii")
    print(json.dumps({"command": "plot", "in": str(args.input), "k": args.k, "out": str(args.out)}))
    return 0


def build_parser() -> _Parser:
    p = _Parser(prog="svlab", description=__doc__)
    p.add_argument("--version", action="version", version=f"svlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="sample a heavy-tailed matrix to a file")
    g.add_argument("--n", type=int, required=True, help="number of columns (>= 2)")
    g.add_argument("--aspect", type=float, default=2.0, help="rows = ceil(aspect * n), aspect > 1")
    g.add_argument("--alpha", type=float, default=None, help="tail index, > 0")
    g.add_argument("--law", choices=sorted(_LAW_NAMES), default="pareto")
    g.add_argument("--scale", type=float, default=1.0)
    g.add_argument("--normalize-variance", action="store_true")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True, help="binary output path")
    g.add_argument("--csv", default=None, help="optional CSV export path")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("spectra", help="verified SVD of a stored matrix")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--k", type=int, default=1, help="bottom vectors to keep")
    s.add_argument("--out", default=None, help="JSON output path (stdout if omitted)")
    s.set_defaults(func=cmd_spectra)

    l = sub.add_parser("localize", help="localization statistics of bottom vectors")
    l.add_argument("--in", dest="input", required=True)
    l.add_argument("--k", type=int, default=1)
    l.add_argument("--c-grid", default="0.25,0.5,1,2,4")
    l.add_argument("--epsilons", default="0.05,0.1,0.2,0.3")
    l.add_argument("--out", default=None, help="JSONL output path (stdout if omitted)")
    l.add_argument("--plot", default=None, help="optional SVG profile of the bottom vector")
    l.set_defaults(func=cmd_localize)

    c = sub.add_parser("certify", help="small-column upper certificate for s_min")
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--tau", type=float, default=None, help="explicit cutoff (wins over --alpha)")
    c.add_argument("--alpha", type=float, default=None, help="tail index for the auto cutoff")
    c.add_argument("--b-frak", type=float, default=0.5)
    c.add_argument("--a-frak", type=float, default=1.0001)
    c.add_argument("--c-upper", type=float, default=1.0)
    c.add_argument("--out", default=None, help="JSON output path (stdout if omitted)")
    c.set_defaults(func=cmd_certify)

    w = sub.add_parser("sweep", help="run a Monte Carlo grid from a JSON config")
    w.add_argument("--config", required=True, help="JSON file with SweepConfig fields")
    w.add_argument("--out-dir", required=True)
    w.add_argument("--workers", type=int, default=1)
    w.add_argument("--alphas", type=_float_list, default=None, help="override, comma separated")
    w.add_argument("--ns", type=_int_list, default=None, help="override, comma separated")
    w.add_argument("--aspect", type=float, default=None)
    w.add_argument("--trials-per-cell", type=int, default=None)
    w.add_argument("--base-seed", type=int, default=None)
    w.add_argument("--k-vectors", type=int, default=None)
    w.add_argument("--law", choices=sorted(_LAW_NAMES), default=None)
    w.set_defaults(func=cmd_sweep)

    r = sub.add_parser("report", help="analysis tables and charts from sweep records")
    r.add_argument("--records", required=True, help="records.jsonl from a sweep")
    r.add_argument("--kind", choices=["transition", "scaling", "baiyin", "kth"], required=True)
    r.add_argument("--c", type=float, default=1.0, help="threshold constant for mass statistics")
    r.add_argument("--epsilon", type=float, default=0.1, help="min-mass profile point")
    r.add_argument("--delta", type=float, default=0.25, help="theorem mass level 1 - delta")
    r.add_argument("--alpha", type=float, default=None, help="tail index (scaling report)")
    r.add_argument("--floor", type=float, default=0.3, help="root-n floor coefficient")
    r.add_argument("--slack", type=float, default=0.05, help="exponent bracket slack")
    r.add_argument("--regime-b", type=float, default=0.2, help="k-range exponent for kth report")
    r.add_argument("--out-dir", required=True)
    r.set_defaults(func=cmd_report)

    pl = sub.add_parser("plot", help="SVG coordinate profile of a bottom singular vector")
    pl.add_argument("--in", dest="input", required=True)
    pl.add_argument("--k", type=int, default=1)
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except MatrixFormatError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except SpectralError as exc:
        print(f"numerical failure: {exc} (worst residual {exc.worst_residual:.3e})", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
