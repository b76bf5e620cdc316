"""Monte Carlo sweep harness and analysis scans.

Determinism contract: every trial's stream is keyed by a hash of
(base_seed, law, cell, trial index), so any single trial can be
regenerated in isolation, runs can be parallelized trial-wise, and
records.jsonl is byte-identical across reruns and worker counts. Wall
times and other nondeterministic metadata live in the run manifest, never
in the records.

Gaussian cells use alpha = inf as their grid label (the law ignores it);
JSON output then carries the Infinity literal, which Python's json module
round-trips.
"""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .certificates import default_tau, heavy_census, upper_certificate
from .ensemble import EnsembleConfig, LawKind, TailLaw, sample_matrix
from .localization import localization_report
from .spectra import SpectralError, full_svd

__all__ = [
    "SweepConfig",
    "TrialRecord",
    "ScalingFit",
    "BracketReport",
    "TransitionRow",
    "TransitionTable",
    "BaiYinReport",
    "KthVectorRow",
    "derive_trial_seed",
    "run_trial",
    "run_sweep",
    "write_records",
    "read_records",
    "write_summary",
    "write_fits",
    "write_manifest",
    "fit_scaling",
    "bracket_check",
    "transition_scan",
    "baiyin_check",
    "kth_vector_scan",
    "default_sweep_config",
]


@dataclass(frozen=True)
class SweepConfig:
    """Grid description for one sweep.

    alphas may contain math.inf only with law_kind gaussian (label only).
    tau_params = (b_frak, a_frak) feed the auto cutoff for alpha < 2 cells;
    cells with alpha >= 2 fall back to the census cutoff N**(1/2 - census_c).
    normalize_variance applies wherever the law has a finite second moment
    and is ignored elsewhere.
    """

    alphas: tuple[float, ...]
    ns: tuple[int, ...]
    aspect: float
    trials_per_cell: int
    base_seed: int
    k_vectors: int = 1
    c_grid: tuple[float, ...] = (0.25, 0.5, 1.0, 2.0, 4.0)
    epsilons: tuple[float, ...] = (0.05, 0.1, 0.2, 0.3)
    tau_params: tuple[float, float] = (0.5, 1.0001)
    law_kind: LawKind = LawKind.SYMMETRIC_PARETO
    census_c: float = 0.1
    normalize_variance: bool = True
    max_trials: int = 10000

    def __post_init__(self) -> None:
        object.__setattr__(self, "law_kind", LawKind(self.law_kind))
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "ns", tuple(int(n) for n in self.ns))
        object.__setattr__(self, "c_grid", tuple(float(c) for c in self.c_grid))
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        object.__setattr__(self, "tau_params", tuple(float(t) for t in self.tau_params))
        errors = self.validation_errors()
        if errors:
            raise ValueError("invalid sweep config: " + "; ".join(errors))

    def validation_errors(self) -> list[str]:
        errs: list[str] = []
        if not self.alphas:
            errs.append("alphas must be nonempty")
        for a in self.alphas:
            if math.isnan(a) or a <= 0:
                errs.append(f"alpha {a} must be > 0")
            elif math.isinf(a) and self.law_kind is not LawKind.GAUSSIAN:
                errs.append("alpha = inf is only a valid label for the gaussian law")
        if len(set(self.alphas)) != len(self.alphas):
            errs.append("alphas must be distinct")
        if not self.ns:
            errs.append("ns must be nonempty")
        for n in self.ns:
            if n < 2:
                errs.append(f"n {n} must be >= 2")
        if len(set(self.ns)) != len(self.ns):
            errs.append("ns must be distinct")
        if not (self.aspect > 1.0 and math.isfinite(self.aspect)):
            errs.append(f"aspect {self.aspect} must be finite and > 1")
        if self.trials_per_cell < 1:
            errs.append("trials_per_cell must be >= 1")
        if not (0 <= self.base_seed < 2**64):
            errs.append("base_seed must be in [0, 2**64)")
        if self.ns and not (1 <= self.k_vectors <= min(self.ns)):
            errs.append(f"k_vectors must be in [1, min(ns)={min(self.ns)}]")
        if not self.c_grid or any(c <= 0 or not math.isfinite(c) for c in self.c_grid):
            errs.append("c_grid must be nonempty with finite positive entries")
        if not self.epsilons or any(not (0.0 < e < 1.0) for e in self.epsilons):
            errs.append("epsilons must be nonempty with entries in (0,1)")
        if len(self.tau_params) != 2 or any(t <= 0 for t in self.tau_params):
            errs.append("tau_params must be two positive numbers (b_frak, a_frak)")
        if not (0.0 < self.census_c < 0.5):
            errs.append("census_c must be in (0, 1/2)")
        if self.max_trials < 1:
            errs.append("max_trials must be >= 1")
        total = len(self.alphas) * len(self.ns) * max(self.trials_per_cell, 0)
        if total > self.max_trials:
            errs.append(f"grid needs {total} trials, over the max_trials budget {self.max_trials}")
        return errs

    def law_for(self, alpha: float) -> TailLaw:
        if self.law_kind is LawKind.GAUSSIAN:
            return TailLaw(LawKind.GAUSSIAN, normalize_variance=self.normalize_variance)
        normalize = self.normalize_variance and alpha > 2.0
        return TailLaw(self.law_kind, alpha=alpha, normalize_variance=normalize)

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["law_kind"] = self.law_kind.value
        for key in ("alphas", "ns", "c_grid", "epsilons", "tau_params"):
            d[key] = list(d[key])
        return d


def default_sweep_config(base_seed: int = 20260814) -> SweepConfig:
    """Desk-scale default grid: a few hours of CPU, both phases covered."""
    return SweepConfig(
        alphas=(0.8, 1.2, 1.5, 1.8, 2.5, 3.0, 5.0),
        ns=(100, 200, 400, 800),
        aspect=2.0,
        trials_per_cell=50,
        base_seed=base_seed,
    )


@dataclass
class TrialRecord:
    """One sampled matrix, fully summarized.

    kth_values[k-1] is the k-th smallest singular value, so kth_values[0]
    == s_min. localization holds one dict per (vector k, threshold c) in
    (k, c_grid) order. bottom_vectors are kept so scans can recompute
    coordinate statistics without resampling.
    """

    alpha: float
    n: int
    aspect: float
    law_kind: str
    trial_index: int
    seed: int
    n_rows: int
    s_min: float
    s_top: float
    kth_values: list[float]
    degenerate_flags: list[bool]
    bottom_vectors: list[list[float]]
    localization: list[dict]
    certificate: dict
    heavy_count: int
    census_c: float


def derive_trial_seed(
    base_seed: int, law_kind: str, alpha: float, n: int, aspect: float, trial_index: int
) -> int:
    """Stable 64-bit stream seed for one trial, from the cell coordinates."""
    key = f"{base_seed}|{law_kind}|{alpha!r}|{n}|{aspect!r}|{trial_index}"
    digest = hashlib.sha256(key.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "little")


def run_trial(config: SweepConfig, alpha: float, n: int, trial_index: int) -> TrialRecord:
    law = config.law_for(alpha)
    seed = derive_trial_seed(
        config.base_seed, config.law_kind.value, alpha, n, config.aspect, trial_index
    )
    ecfg = EnsembleConfig(n=n, aspect=config.aspect, law=law, seed=seed)
    x = sample_matrix(ecfg)
    n_rows = x.shape[0]

    res = full_svd(x, k_bottom=config.k_vectors)
    s = res.singular_values
    kth_values = [float(s[n - k]) for k in range(1, config.k_vectors + 1)]

    reports: list[dict] = []
    for k in range(1, config.k_vectors + 1):
        u = res.bottom_right_vectors[k - 1]
        for c in config.c_grid:
            rep = localization_report(
                u, c, list(config.epsilons), degenerate=res.degenerate_flags[k - 1]
            )
            reports.append({"k": k, "c": float(c), **dataclasses.asdict(rep)})

    b_frak, a_frak = config.tau_params
    note = ""
    bounds = law.tail_bounds
    if not math.isinf(alpha) and alpha < 2.0 and bounds is not None:
        try:
            tau = default_tau(n, alpha, config.aspect, b_frak, a_frak, bounds.c_upper)
        except ValueError as exc:
            tau = float(n_rows) ** (0.5 - config.census_c)
            note = f"auto cutoff infeasible ({exc}); census cutoff used"
    else:
        # Finite-variance regime: no polynomial-tail cutoff; use the census
        # threshold as a bounded-column diagnostic, not a theorem constant.
        tau = float(n_rows) ** (0.5 - config.census_c)
        note = "finite-variance regime: census cutoff"
    cert = upper_certificate(x, tau, observed=(res.s_min, res.s_top))
    cert_dict = dataclasses.asdict(cert)
    if note:
        cert_dict["note"] = (cert_dict["note"] + "; " + note).lstrip("; ")

    return TrialRecord(
        alpha=float(alpha),
        n=int(n),
        aspect=float(config.aspect),
        law_kind=config.law_kind.value,
        trial_index=int(trial_index),
        seed=int(seed),
        n_rows=int(n_rows),
        s_min=float(res.s_min),
        s_top=float(res.s_top),
        kth_values=kth_values,
        degenerate_flags=[bool(f) for f in res.degenerate_flags],
        bottom_vectors=[[float(v) for v in row] for row in res.bottom_right_vectors],
        localization=reports,
        certificate=cert_dict,
        heavy_count=heavy_census(x, config.census_c),
        census_c=float(config.census_c),
    )


def _trial_task(args: tuple[SweepConfig, float, int, int]):
    config, alpha, n, trial_index = args
    try:
        return ("ok", run_trial(config, alpha, n, trial_index))
    except SpectralError as exc:
        return ("fail", {"alpha": alpha, "n": n, "trial_index": trial_index, "message": str(exc)})


def run_sweep(
    config: SweepConfig, workers: int = 1
) -> tuple[list[TrialRecord], list[dict], float]:
    """Run the whole grid. Returns (records, failures, elapsed_seconds).

    Records come back sorted by (alpha, n, trial_index) regardless of
    completion order or worker count; numerical failures are collected,
    not raised.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    tasks = [
        (config, alpha, n, t)
        for alpha in config.alphas
        for n in config.ns
        for t in range(config.trials_per_cell)
    ]
    start = time.perf_counter()
    if workers == 1:
        outcomes = [_trial_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_trial_task, tasks, chunksize=1))
    elapsed = time.perf_counter() - start

    records = [r for kind, r in outcomes if kind == "ok"]
    failures = [r for kind, r in outcomes if kind == "fail"]
    records.sort(key=lambda r: (r.alpha, r.n, r.trial_index))
    failures.sort(key=lambda f: (f["alpha"], f["n"], f["trial_index"]))
    return records, failures, elapsed


# ---------------------------------------------------------------------------
# Serialization


def write_records(records: list[TrialRecord], path: str | Path) -> None:
    """One compact JSON object per line, canonical field order.

    Byte-identical for identical configs: float formatting is repr-based
    shortest round-trip and field order is fixed by the dataclass.
    """
    with open(path, "w", encoding="ascii") as fh:
        for rec in records:
            fh.write(json.dumps(dataclasses.asdict(rec), separators=(",", ":")))
            fh.write("\n")


def read_records(path: str | Path) -> list[TrialRecord]:
    out: list[TrialRecord] = []
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            if line.strip():
                out.append(TrialRecord(**json.loads(line)))
    return out


def _cell_key(rec: TrialRecord) -> tuple[float, int]:
    return (rec.alpha, rec.n)


def _loc_entry(rec: TrialRecord, k: int, c: float) -> dict:
    for entry in rec.localization:
        if entry["k"] == k and entry["c"] == c:
            return entry
    raise KeyError(f"no localization entry for k={k}, c={c}")


def _profile_value(entry: dict, epsilon: float) -> float:
    for eps, mass in entry["min_mass_profile"]:
        if eps == epsilon:
            return float(mass)
    raise KeyError(f"epsilon {epsilon} not in stored profile")


def write_summary(records: list[TrialRecord], path: str | Path) -> None:
    """Long-format CSV: one row per cell per statistic."""
    cells: dict[tuple[float, int], list[TrialRecord]] = {}
    for rec in records:
        cells.setdefault(_cell_key(rec), []).append(rec)

    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "n", "aspect", "statistic", "value"])
        for (alpha, n) in sorted(cells):
            recs = cells[(alpha, n)]
            aspect = recs[0].aspect
            rows: list[tuple[str, float]] = [
                ("trials", float(len(recs))),
                ("median_s_min", float(np.median([r.s_min for r in recs]))),
                ("median_s_top", float(np.median([r.s_top for r in recs]))),
                ("median_heavy_count", float(np.median([r.heavy_count for r in recs]))),
                (
                    "degenerate_fraction",
                    float(np.mean([r.degenerate_flags[0] for r in recs])),
                ),
                (
                    "certificate_valid_fraction",
                    float(np.mean([r.certificate["valid"] for r in recs])),
                ),
            ]
            finite_uppers = [
                r.certificate["certified_upper"]
                for r in recs
                if math.isfinite(r.certificate["certified_upper"])
            ]
            if finite_uppers:
                rows.append(("median_certified_upper", float(np.median(finite_uppers))))
            k_vectors = len(recs[0].kth_values)
            for k in range(2, k_vectors + 1):
                rows.append(
                    (f"median_s_bottom_{k}", float(np.median([r.kth_values[k - 1] for r in recs])))
                )
            first = recs[0].localization
            cs = sorted({e["c"] for e in first if e["k"] == 1})
            epss = [eps for eps, _ in first[0]["min_mass_profile"]]
            for c in cs:
                vals = [_loc_entry(r, 1, c)["threshold_mass"] for r in recs]
                rows.append((f"median_threshold_mass_c={c:g}", float(np.median(vals))))
            for eps in epss:
                vals = [_profile_value(_loc_entry(r, 1, cs[0]), eps) for r in recs]
                rows.append((f"median_min_mass_eps={eps:g}", float(np.median(vals))))
            rows.append(
                ("median_ipr", float(np.median([_loc_entry(r, 1, cs[0])["ipr"] for r in recs])))
            )
            for stat, value in rows:
                writer.writerow([repr(alpha), n, repr(aspect), stat, repr(value)])


@dataclass
class ScalingFit:
    """Least-squares fit of ln(median s_min) against ln(n)."""

    alpha: float
    ns: list[int]
    medians: list[float]
    points: list[tuple[float, float]]
    slope: float
    intercept: float
    slope_corrected: float | None
    residual_sse: float


def fit_scaling(records: list[TrialRecord], alpha: float, min_points: int = 3, min_trials: int = 5) -> ScalingFit:
    """Fit median s_min ~ n**slope for one alpha across the swept n.

    slope_corrected refits after dividing the medians by
    (ln n)**((alpha-2)/(2 alpha)), the logarithmic part of the
    heavy-tailed envelope; it is None for alpha >= 2 where that
    correction does not apply.
    """
    by_n: dict[int, list[float]] = {}
    for rec in records:
        if rec.alpha == alpha:
            by_n.setdefault(rec.n, []).append(rec.s_min)
    ns = sorted(by_n)
    if len(ns) < min_points:
        raise ValueError(f"need at least {min_points} distinct n for alpha={alpha}, got {len(ns)}")
    for n in ns:
        if len(by_n[n]) < min_trials:
            raise ValueError(f"need at least {min_trials} trials per n, got {len(by_n[n])} at n={n}")
    medians = [float(np.median(by_n[n])) for n in ns]
    if any(m <= 0 for m in medians):
        raise ValueError("nonpositive median smallest singular value; log fit undefined")
    lx = np.log(np.asarray(ns, dtype=np.float64))
    ly = np.log(np.asarray(medians, dtype=np.float64))
    slope, intercept = np.polyfit(lx, ly, 1)
    sse = float(np.sum((ly - (slope * lx + intercept)) ** 2))
    corrected = None
    if alpha < 2.0:
        correction = ((alpha - 2.0) / (2.0 * alpha)) * np.log(np.log(np.asarray(ns, dtype=np.float64)))
        c_slope, _ = np.polyfit(lx, ly - correction, 1)
        corrected = float(c_slope)
    return ScalingFit(
        alpha=float(alpha),
        ns=ns,
        medians=medians,
        points=[(float(a), float(b)) for a, b in zip(lx, ly)],
        slope=float(slope),
        intercept=float(intercept),
        slope_corrected=corrected,
        residual_sse=sse,
    )


def write_fits(fits: list[ScalingFit], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["alpha", "n_points", "slope", "intercept", "slope_corrected", "residual_sse"]
        )
        for f in fits:
            writer.writerow(
                [
                    repr(f.alpha),
                    len(f.ns),
                    repr(f.slope),
                    repr(f.intercept),
                    "" if f.slope_corrected is None else repr(f.slope_corrected),
                    repr(f.residual_sse),
                ]
            )


def write_manifest(
    config: SweepConfig,
    records: list[TrialRecord],
    failures: list[dict],
    elapsed: float,
    path: str | Path,
) -> None:
    import platform

    cfg = config.as_dict()
    canon = json.dumps(cfg, separators=(",", ":"), sort_keys=True)
    manifest = {
        "config": cfg,
        "config_sha256": hashlib.sha256(canon.encode("ascii")).hexdigest(),
        "package_version": __version__,
        "python_version": platform.python_version(),
        "numpy_version": np.__version__,
        "record_count": len(records),
        "failures": failures,
        "elapsed_seconds": elapsed,
    }
    with open(path, "w", encoding="ascii") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Scans


@dataclass
class BracketReport:
    """Sandwich check for alpha < 2: root-n floor and heavy-tail envelope.

    floor_violations lists n where median s_min < floor_coeff * sqrt(n).
    envelope_ratios are median / (n**(1/alpha) * (ln n)**((alpha-2)/(2 alpha)));
    ratio_spread = max/min of those, the drift of the fitted constant.
    exponent_in_bracket checks slope against [1/2 - slack, 1/alpha + slack].
    """

    alpha: float
    exponent: float
    exponent_low: float
    exponent_high: float
    exponent_in_bracket: bool
    floor_coeff: float
    floor_violations: list[int]
    envelope_ratios: list[tuple[int, float]]
    ratio_spread: float


def bracket_check(fit: ScalingFit, floor_coeff: float = 0.3, slack: float = 0.05) -> BracketReport:
    if not (0.0 < fit.alpha < 2.0):
        raise ValueError(f"bracket_check applies to alpha in (0,2), got {fit.alpha}")
    if floor_coeff <= 0 or slack < 0:
        raise ValueError("floor_coeff must be > 0 and slack >= 0")
    lo = 0.5 - slack
    hi = 1.0 / fit.alpha + slack
    violations = [n for n, med in zip(fit.ns, fit.medians) if med < floor_coeff * math.sqrt(n)]
    ratios = []
    for n, med in zip(fit.ns, fit.medians):
        envelope = n ** (1.0 / fit.alpha) * math.log(n) ** ((fit.alpha - 2.0) / (2.0 * fit.alpha))
        ratios.append((n, med / envelope))
    vals = [r for _, r in ratios]
    spread = max(vals) / min(vals)
    return BracketReport(
        alpha=fit.alpha,
        exponent=fit.slope,
        exponent_low=lo,
        exponent_high=hi,
        exponent_in_bracket=bool(lo <= fit.slope <= hi),
        floor_coeff=floor_coeff,
        floor_violations=violations,
        envelope_ratios=ratios,
        ratio_spread=float(spread),
    )


@dataclass
class TransitionRow:
    alpha: float
    n: int
    trials: int
    used: int  # non-degenerate bottom vectors entering the medians
    median_threshold_mass: float
    median_min_mass: float
    theorem_mass_fraction: float  # fraction with threshold_mass >= 1 - delta
    median_ipr: float


@dataclass
class TransitionTable:
    c: float
    epsilon: float
    delta: float
    rows: list[TransitionRow]
    midpoint: float | None
    crossing_alpha: float | None


def transition_scan(
    records: list[TrialRecord],
    c: float,
    epsilon: float,
    delta: float,
    midpoint: float | None = None,
) -> TransitionTable:
    """Localization statistics of the bottom vector per (alpha, n) cell.

    Degenerate-gap flagged vectors are excluded from medians (their
    individual coordinates are not well defined) but counted in trials.
    crossing_alpha is the first grid alpha (ascending, at the largest n)
    whose median min-mass reaches the midpoint, default halfway between
    the extremes of the observed medians.
    """
    if not (0.0 < delta < 1.0):
        raise ValueError(f"delta must be in (0,1), got {delta}")
    cells: dict[tuple[float, int], list[TrialRecord]] = {}
    for rec in records:
        cells.setdefault(_cell_key(rec), []).append(rec)
    rows: list[TransitionRow] = []
    for (alpha, n) in sorted(cells):
        recs = cells[(alpha, n)]
        entries = [_loc_entry(r, 1, c) for r in recs]
        live = [e for e in entries if not e["degenerate"]]
        use = live if live else entries  # all-degenerate cell: report, don't hide
        t_mass = [float(e["threshold_mass"]) for e in use]
        m_mass = [_profile_value(e, epsilon) for e in use]
        rows.append(
            TransitionRow(
                alpha=alpha,
                n=n,
                trials=len(recs),
                used=len(use),
                median_threshold_mass=float(np.median(t_mass)),
                median_min_mass=float(np.median(m_mass)),
                theorem_mass_fraction=float(np.mean([m >= 1.0 - delta for m in t_mass])),
                median_ipr=float(np.median([float(e["ipr"]) for e in use])),
            )
        )
    n_star = max(r.n for r in rows) if rows else 0
    scan_rows = sorted((r for r in rows if r.n == n_star), key=lambda r: r.alpha)
    crossing = None
    mid = midpoint
    if len(scan_rows) >= 2:
        vals = [r.median_min_mass for r in scan_rows]
        if mid is None:
            mid = 0.5 * (min(vals) + max(vals))
        for r in scan_rows:
            if r.median_min_mass >= mid:
                crossing = r.alpha
                break
    return TransitionTable(
        c=float(c), epsilon=float(epsilon), delta=float(delta),
        rows=rows, midpoint=mid, crossing_alpha=crossing,
    )


@dataclass
class BaiYinReport:
    aspect: float
    limit: float  # 1 - sqrt(1/aspect)
    mean_ratio: float  # mean of s_min / sqrt(N)
    abs_deviation: float
    trials: int
    per_n: list[tuple[int, float]]


def baiyin_check(records: list[TrialRecord]) -> BaiYinReport:
    """Compare s_min / sqrt(N) against the finite-variance limit.

    Requires every record to come from a variance-normalized law with a
    finite second moment: gaussian, or alpha > 2 with normalization.
    """
    if not records:
        raise ValueError("no records")
    aspects = {r.aspect for r in records}
    if len(aspects) != 1:
        raise ValueError(f"records mix aspects {sorted(aspects)}")
    for r in records:
        if r.law_kind != LawKind.GAUSSIAN.value and not (r.alpha > 2.0):
            raise ValueError(
                f"record (alpha={r.alpha}, law={r.law_kind}) lacks a finite variance; "
                "the limit comparison needs alpha > 2 or a gaussian law"
            )
    aspect = next(iter(aspects))
    limit = 1.0 - math.sqrt(1.0 / aspect)
    ratios = [r.s_min / math.sqrt(r.n_rows) for r in records]
    by_n: dict[int, list[float]] = {}
    for r, ratio in zip(records, ratios):
        by_n.setdefault(r.n, []).append(ratio)
    mean_ratio = float(np.mean(ratios))
    return BaiYinReport(
        aspect=float(aspect),
        limit=float(limit),
        mean_ratio=mean_ratio,
        abs_deviation=abs(mean_ratio - limit),
        trials=len(records),
        per_n=[(n, float(np.mean(by_n[n]))) for n in sorted(by_n)],
    )


@dataclass
class KthVectorRow:
    alpha: float
    n: int
    k: int
    in_regime: bool  # k within n**(1 - 2*regime_b)
    used: int
    degenerate: int
    median_value: float  # k-th smallest singular value
    median_threshold_mass: float
    median_min_mass: float
    median_ipr: float


def kth_vector_scan(
    records: list[TrialRecord],
    c: float,
    epsilon: float,
    regime_b: float = 0.2,
) -> list[KthVectorRow]:
    """Per-k localization medians for the stored bottom vectors.

    Rows with k above n**(1-2*regime_b) are marked out of regime: the
    small-value theory covers k = O(n**(1-2b)) for b in (0, 1/2) only.
    Degenerate-flagged vectors are excluded from medians and counted.
    """
    if not (0.0 < regime_b < 0.5):
        raise ValueError(f"regime_b must be in (0, 1/2), got {regime_b}")
    cells: dict[tuple[float, int], list[TrialRecord]] = {}
    for rec in records:
        cells.setdefault(_cell_key(rec), []).append(rec)
    rows: list[KthVectorRow] = []
    for (alpha, n) in sorted(cells):
        recs = cells[(alpha, n)]
        k_max = len(recs[0].kth_values)
        for k in range(1, k_max + 1):
            entries = [(_loc_entry(r, k, c), r.kth_values[k - 1]) for r in recs]
            live = [(e, v) for e, v in entries if not e["degenerate"]]
            used = live if live else entries
            rows.append(
                KthVectorRow(
                    alpha=alpha,
                    n=n,
                    k=k,
                    in_regime=bool(k <= n ** (1.0 - 2.0 * regime_b)),
                    used=len(used),
                    degenerate=len(entries) - len(live),
                    median_value=float(np.median([v for _, v in used])),
                    median_threshold_mass=float(np.median([e["threshold_mass"] for e, _ in used])),
                    median_min_mass=float(np.median([_profile_value(e, epsilon) for e, _ in used])),
                    median_ipr=float(np.median([e["ipr"] for e, _ in used])),
                )
            )
    return rows
