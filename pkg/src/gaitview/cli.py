"""Command-line orchestration: synth | analyze | recommend | version.

analyze runs ingest -> gap fill -> zero-phase filter -> feature extraction
-> metrics -> paired stats -> PCA and writes deterministic CSV/JSON
reports (6 significant digits in CSV, full precision in JSON, sorted keys
and fixed row order, so identical inputs give byte-identical outputs).
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dimred import FeatureMatrix, marker_matrix, pca_fit, pose_matrix
from .errors import GaitViewError, NotAnalyzed, UnpairedSubject
from .features import FEATURE_SIDES, FeatureName, extract_all, signal_key_name
from .ingest import (
    DEFAULT_CONF_THRESHOLD,
    DEFAULT_MAX_GAP,
    fill_gaps,
    load_marker_map,
    parse_marker_csv,
    parse_pose_csv,
)
from .metrics import MetricConfig, MetricRecord, compute_record
from .preprocess import FilterSpec, smooth_markers, smooth_pose
from .signal_core import SideLabel, TrialId, ViewLabel
from .stats import METRIC_DIRECTION, StatResult, compare_views
from .synth import GaitModelParams, make_paired_dataset

STATS_HEADER = [
    "metric", "frontal_mean", "frontal_sd", "lateral_mean", "lateral_sd",
    "p_value", "cliffs_delta", "effect_label", "winner",
]
RECORDS_HEADER = [
    "subject", "trial", "feature", "side", "view",
    "dtw", "mcc", "mcc_lag", "kld", "ie_2d", "ie_3d",
]
PCA_HEADER = ["group", "initial_dim", "k", "explained_ratio"]
ALL_METRICS = ("dtw", "mcc", "kld", "ie")
OUT_DIR_ENV = "GAITVIEW_OUT"


@dataclass
class RunConfig:
    manifest: Path
    out_dir: Path
    alpha: float = 0.05
    pca_threshold: float = 0.95
    pca_scope: str = "pooled"  # or "per-subject"
    apply_filter: bool = True
    filter_spec: FilterSpec = field(default_factory=FilterSpec)
    metric_cfg: MetricConfig = field(default_factory=MetricConfig)
    conf_threshold: float = DEFAULT_CONF_THRESHOLD
    max_gap: int = DEFAULT_MAX_GAP
    features: tuple[FeatureName, ...] = tuple(FeatureName)
    metrics: tuple[str, ...] = ALL_METRICS
    marker_map: dict[str, str] | None = None

    def fingerprint(self) -> str:
        payload = {
            "alpha": self.alpha,
            "pca_threshold": self.pca_threshold,
            "pca_scope": self.pca_scope,
            "apply_filter": self.apply_filter,
            "filter_spec": dataclasses.asdict(self.filter_spec),
            "metric_cfg": dataclasses.asdict(self.metric_cfg),
            "conf_threshold": self.conf_threshold,
            "max_gap": self.max_gap,
            "features": [f.value for f in self.features],
            "metrics": list(self.metrics),
            "marker_map": self.marker_map,
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def load_manifest(path: Path) -> dict[int, dict[str, Path]]:
    """manifest.csv -> {subject: {kind: absolute file path}}."""
    base = path.parent
    out: dict[int, dict[str, Path]] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"subject", "trial", "kind", "path"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise GaitViewError(f"manifest {path} must have columns {sorted(required)}")
        for row in reader:
            subject = int(row["subject"])
            out.setdefault(subject, {})[row["kind"]] = base / row["path"]
    return out


def _process_trial(cfg: RunConfig, subject: int, paths: dict[str, Path]):
    """Parse, repair, filter and extract features for one subject's trial."""
    if "mocap3d" not in paths:
        raise GaitViewError(f"subject {subject}: manifest lists no mocap3d file")
    marker_path = paths["mocap3d"]
    if not marker_path.exists():
        raise GaitViewError(f"subject {subject}: missing file {marker_path}")
    trial = TrialId(subject, 1)
    markers = parse_marker_csv(marker_path)
    if cfg.apply_filter:
        markers = smooth_markers(markers, cfg.filter_spec)
    feats3d = extract_all(markers, cfg.marker_map, trial=trial, source=ViewLabel.MOCAP3D)
    view_feats = {}
    for view in (ViewLabel.FRONTAL, ViewLabel.LATERAL):
        if view.value not in paths:
            continue
        pose_path = paths[view.value]
        if not pose_path.exists():
            raise GaitViewError(f"subject {subject}: missing file {pose_path}")
        pose = parse_pose_csv(pose_path, view=view)
        pose = fill_gaps(pose, cfg.conf_threshold, cfg.max_gap)
        if cfg.apply_filter:
            pose = smooth_pose(pose, cfg.filter_spec)
        view_feats[view] = (pose, extract_all(pose, trial=trial, source=view))
    return trial, markers, feats3d, view_feats


def run_analysis(cfg: RunConfig) -> dict:
    """Full pipeline over every subject in the manifest; returns the bundle
    (records, stats, pca rows, radar data) after writing all report files."""
    manifest = load_manifest(cfg.manifest)
    if not manifest:
        raise GaitViewError(f"manifest {cfg.manifest} lists no subjects")
    records: list[MetricRecord] = []
    pooled_pose: dict[ViewLabel, list] = {ViewLabel.FRONTAL: [], ViewLabel.LATERAL: []}
    pooled_markers: list = []
    per_subject_seqs: list[tuple[int, ViewLabel, object]] = []

    for subject in sorted(manifest):
        trial, markers, feats3d, view_feats = _process_trial(cfg, subject, manifest[subject])
        pooled_markers.append(markers)
        per_subject_seqs.append((subject, ViewLabel.MOCAP3D, markers))
        for view, (pose, feats2d) in sorted(view_feats.items(), key=lambda kv: kv[0].value):
            pooled_pose[view].append(pose)
            per_subject_seqs.append((subject, view, pose))
            for feature in cfg.features:
                for side in FEATURE_SIDES[feature]:
                    records.append(
                        compute_record(
                            trial, feature, side, view,
                            feats2d.signals[(feature, side)],
                            feats3d.signals[(feature, side)],
                            cfg.metric_cfg,
                        )
                    )

    stat_results: list[StatResult] = []
    for feature in cfg.features:
        for side in FEATURE_SIDES[feature]:
            for metric in cfg.metrics:
                stat_results.append(compare_views(records, feature, side, metric, cfg.alpha))

    pca_rows = _pca_rows(cfg, pooled_pose, pooled_markers, per_subject_seqs)
    radar = _radar_data(records, cfg)
    _write_outputs(cfg, records, stat_results, pca_rows, radar)
    return {
        "records": records,
        "stats": stat_results,
        "pca": pca_rows,
        "radar": radar,
    }


def _pca_rows(cfg, pooled_pose, pooled_markers, per_subject_seqs):
    rows = []
    if cfg.pca_scope == "pooled":
        groups = [
            (ViewLabel.FRONTAL.value, pose_matrix(pooled_pose[ViewLabel.FRONTAL])
             if pooled_pose[ViewLabel.FRONTAL] else None),
            (ViewLabel.LATERAL.value, pose_matrix(pooled_pose[ViewLabel.LATERAL])
             if pooled_pose[ViewLabel.LATERAL] else None),
            (ViewLabel.MOCAP3D.value, marker_matrix(pooled_markers)),
        ]
    else:
        groups = []
        for subject, view, seq in per_subject_seqs:
            name = f"{view.value}_s{subject:02d}"
            matrix = marker_matrix([seq]) if view is ViewLabel.MOCAP3D else pose_matrix([seq])
            groups.append((name, matrix))
    for name, matrix in groups:
        if matrix is None:
            continue
        result = pca_fit(matrix, cfg.pca_threshold)
        rows.append(
            {
                "group": name,
                "initial_dim": matrix.n_cols,
                "k": result.k,
                "explained_ratio": result.explained_ratio,
            }
        )
    return rows


def _radar_metric_value(rec: MetricRecord, metric: str) -> float:
    # IE has no better direction in reports; for the radar we use closeness
    # of the 2D entropy to the 3D entropy as the fidelity axis
    if metric == "ie":
        return abs(rec.ie_2d - rec.ie_3d)
    return getattr(rec, metric)


def _radar_data(records, cfg) -> dict:
    """Per (feature, side) and metric: view means min-max normalized so the
    better-direction extreme is exactly 1 and the worse exactly 0."""
    radar: dict[str, dict[str, dict[str, float]]] = {}
    for feature in cfg.features:
        for side in FEATURE_SIDES[feature]:
            key = signal_key_name(feature, side)
            axes: dict[str, dict[str, float]] = {}
            for metric in cfg.metrics:
                means = {}
                for view in (ViewLabel.FRONTAL, ViewLabel.LATERAL):
                    vals = [
                        _radar_metric_value(r, metric)
                        for r in records
                        if r.feature == feature and r.side == side and r.view == view
                    ]
                    if vals:
                        means[view.value] = float(np.mean(vals))
                if len(means) != 2:
                    continue
                lower_is_better = metric in ("dtw", "kld", "ie")
                f, l = means["frontal"], means["lateral"]
                if f == l:
                    axes[metric] = {"frontal": 0.5, "lateral": 0.5}
                else:
                    better_frontal = (f < l) == lower_is_better
                    axes[metric] = {
                        "frontal": 1.0 if better_frontal else 0.0,
                        "lateral": 0.0 if better_frontal else 1.0,
                    }
            if axes:
                radar[key] = axes
    return radar


def _write_outputs(cfg, records, stat_results, pca_rows, radar):
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        path = out / "metric_records.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            written.append(path)
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(RECORDS_HEADER)
            ordered = sorted(
                records,
                key=lambda r: (r.trial.subject_index, r.trial.trial_index,
                               r.feature.value, r.side.value, r.view.value),
            )
            for r in ordered:
                writer.writerow([
                    r.trial.subject_index, r.trial.trial_index,
                    r.feature.value, r.side.value, r.view.value,
                    _fmt(r.dtw), _fmt(r.mcc), r.mcc_lag,
                    _fmt(r.kld), _fmt(r.ie_2d), _fmt(r.ie_3d),
                ])

        by_feature: dict[FeatureName, list[StatResult]] = {}
        for res in stat_results:
            by_feature.setdefault(res.feature, []).append(res)
        for feature in sorted(by_feature, key=lambda f: f.value):
            path = out / f"stats_{feature.value}.csv"
            with open(path, "w", encoding="utf-8", newline="") as fh:
                written.append(path)
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(STATS_HEADER)
                rows = sorted(
                    by_feature[feature], key=lambda r: (r.metric, r.side.value)
                )
                for r in rows:
                    name = r.metric if r.side is SideLabel.BILATERAL else f"{r.metric}_{r.side.value}"
                    writer.writerow([
                        name,
                        _fmt(r.mean_sd_a[0]), _fmt(r.mean_sd_a[1]),
                        _fmt(r.mean_sd_b[0]), _fmt(r.mean_sd_b[1]),
                        _fmt(r.p_value), _fmt(r.cliffs_delta),
                        r.effect_label, r.winner,
                    ])

        path = out / "pca_summary.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            written.append(path)
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(PCA_HEADER)
            for row in sorted(pca_rows, key=lambda r: r["group"]):
                writer.writerow([
                    row["group"], row["initial_dim"], row["k"], _fmt(row["explained_ratio"]),
                ])

        path = out / "radar.json"
        written.append(path)
        path.write_text(json.dumps(radar, sort_keys=True, indent=2) + "\n", encoding="utf-8")

        path = out / "run_metadata.json"
        written.append(path)
        meta = {
            "gaitview_version": __version__,
            "config_hash": cfg.fingerprint(),
            "manifest": str(cfg.manifest),
            "alpha": cfg.alpha,
            "pca_threshold": cfg.pca_threshold,
            "normalize": cfg.metric_cfg.normalize,
            "histogram_bins": cfg.metric_cfg.histogram_bins,
            "cutoff_hz": cfg.filter_spec.cutoff_hz,
            "filter_order": cfg.filter_spec.order,
        }
        path.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    except BaseException:
        for p in written:
            p.unlink(missing_ok=True)
        raise


def recommend(analyzed_dir, alpha: float = 0.05) -> list[dict]:
    """Per (feature, side) view recommendation from a completed analyze run.

    Majority vote of significant DTW/MCC/KLD winners; IE is excluded (no
    better direction). Writes recommendations.csv into the analyzed dir.
    """
    analyzed = Path(analyzed_dir)
    stats_files = sorted(analyzed.glob("stats_*.csv"))
    if not stats_files:
        raise NotAnalyzed(f"no stats_*.csv files in {analyzed}")
    rows: list[dict] = []
    for path in stats_files:
        feature = path.stem[len("stats_"):]
        votes: dict[str, list[tuple[str, str]]] = {}
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != STATS_HEADER:
                raise NotAnalyzed(f"{path} does not match the stats schema")
            for row in reader:
                name = row["metric"]
                metric, _, side = name.partition("_")
                side = side or "bilateral"
                if metric not in ("dtw", "mcc", "kld"):
                    continue
                votes.setdefault(side, [])
                if float(row["p_value"]) < alpha and row["winner"] in ("frontal", "lateral"):
                    votes[side].append((metric, row["winner"]))
        for side in sorted(votes):
            contributing = votes[side]
            n_front = sum(1 for _, w in contributing if w == "frontal")
            n_lat = sum(1 for _, w in contributing if w == "lateral")
            if n_front > n_lat:
                choice = "frontal"
            elif n_lat > n_front:
                choice = "lateral"
            else:
                choice = "tie"
            rationale = ";".join(f"{m}:{w}" for m, w in sorted(contributing))
            rows.append({
                "feature": feature, "side": side,
                "recommended_view": choice, "rationale": rationale,
            })
    out_path = analyzed / "recommendations.csv"
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["feature", "side", "recommended_view", "rationale"])
        for row in rows:
            writer.writerow([row["feature"], row["side"], row["recommended_view"], row["rationale"]])
    return rows


# --- argument parsing ---------------------------------------------------


def _read_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise GaitViewError(f"{path}:{line_no}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaitview",
        description="Quantify 2D camera-view fidelity of gait signals against 3D ground truth",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate a paired synthetic dataset")
    p_synth.add_argument("--subjects", type=int, required=True)
    p_synth.add_argument("--frames", type=int, default=169)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--noise-sd", type=float, default=0.0, help="pixel noise sd on projected keypoints")
    p_synth.add_argument("--cycle-hz", type=float, default=1.0)
    p_synth.add_argument("--out", default=os.environ.get(OUT_DIR_ENV), help="output directory")

    p_an = sub.add_parser("analyze", help="run the full comparison pipeline")
    p_an.add_argument("--manifest", required=True)
    p_an.add_argument("--out", default=os.environ.get(OUT_DIR_ENV))
    p_an.add_argument("--config", help="key=value config file; flags override it")
    p_an.add_argument("--alpha", type=float, default=None)
    p_an.add_argument("--pca-threshold", type=float, default=None)
    p_an.add_argument("--pca-scope", choices=["pooled", "per-subject"], default=None)
    p_an.add_argument("--cutoff-hz", type=float, default=None)
    p_an.add_argument("--filter-order", type=int, default=None)
    p_an.add_argument("--sample-rate-hz", type=float, default=None)
    p_an.add_argument("--no-filter", action="store_true")
    p_an.add_argument("--no-normalize", action="store_true")
    p_an.add_argument("--histogram-bins", type=int, default=None)
    p_an.add_argument("--log-base", type=float, default=None)
    p_an.add_argument("--smoothing-epsilon", type=float, default=None)
    p_an.add_argument("--conf-threshold", type=float, default=None)
    p_an.add_argument("--max-gap", type=int, default=None)
    p_an.add_argument("--features", default=None, help="comma-separated feature names")
    p_an.add_argument("--metrics", default=None, help="comma-separated metric names")
    p_an.add_argument("--marker-map", default=None, help="role = marker config file")

    p_rec = sub.add_parser("recommend", help="per-parameter view recommendation")
    p_rec.add_argument("--analyzed", required=True, help="directory written by analyze")
    p_rec.add_argument("--alpha", type=float, default=0.05)

    sub.add_parser("version", help="print version and exit")
    return parser


def _setting(args, file_cfg: dict, name: str, cast, default):
    flag = getattr(args, name, None)
    if flag is not None:
        return flag
    if name in file_cfg:
        raw = file_cfg[name]
        if cast is bool:
            return raw.lower() in ("1", "true", "yes", "on")
        return cast(raw)
    return default


def _run_config_from_args(args) -> RunConfig:
    file_cfg = _read_config_file(args.config) if args.config else {}
    out = args.out or file_cfg.get("out") or os.environ.get(OUT_DIR_ENV)
    if not out:
        raise GaitViewError("no output directory: pass --out or set " + OUT_DIR_ENV)
    filter_spec = FilterSpec(
        cutoff_hz=_setting(args, file_cfg, "cutoff_hz", float, 7.0),
        sample_rate_hz=_setting(args, file_cfg, "sample_rate_hz", float, 100.0),
        order=_setting(args, file_cfg, "filter_order", int, 4),
    )
    metric_cfg = MetricConfig(
        normalize=not args.no_normalize
        and _setting(args, file_cfg, "normalize", bool, True),
        histogram_bins=_setting(args, file_cfg, "histogram_bins", int, 256),
        log_base=_setting(args, file_cfg, "log_base", float, 2.0),
        smoothing_epsilon=_setting(args, file_cfg, "smoothing_epsilon", float, 1e-10),
    )
    feature_names = _setting(args, file_cfg, "features", str, None)
    features = (
        tuple(FeatureName(name.strip()) for name in feature_names.split(","))
        if feature_names else tuple(FeatureName)
    )
    metric_names = _setting(args, file_cfg, "metrics", str, None)
    metrics = (
        tuple(name.strip() for name in metric_names.split(","))
        if metric_names else ALL_METRICS
    )
    if not features or not metrics:
        raise GaitViewError("feature and metric selections must be non-empty")
    for metric in metrics:
        if metric not in METRIC_DIRECTION:
            raise GaitViewError(f"unknown metric {metric!r}")
    marker_map_path = _setting(args, file_cfg, "marker_map", str, None)
    return RunConfig(
        manifest=Path(args.manifest),
        out_dir=Path(out),
        alpha=_setting(args, file_cfg, "alpha", float, 0.05),
        pca_threshold=_setting(args, file_cfg, "pca_threshold", float, 0.95),
        pca_scope=_setting(args, file_cfg, "pca_scope", str, "pooled"),
        apply_filter=not args.no_filter and _setting(args, file_cfg, "apply_filter", bool, True),
        filter_spec=filter_spec,
        metric_cfg=metric_cfg,
        conf_threshold=_setting(args, file_cfg, "conf_threshold", float, DEFAULT_CONF_THRESHOLD),
        max_gap=_setting(args, file_cfg, "max_gap", int, DEFAULT_MAX_GAP),
        features=features,
        metrics=metrics,
        marker_map=load_marker_map(marker_map_path) if marker_map_path else None,
    )


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "version":
            print(f"gaitview {__version__}")
            return 0
        if args.command == "synth":
            if not args.out:
                parser.error("synth requires --out (or " + OUT_DIR_ENV + ")")
            params = GaitModelParams(
                n_frames=args.frames,
                cycle_hz=args.cycle_hz,
                noise_sd=args.noise_sd,
                seed=args.seed,
            )
            manifest = make_paired_dataset(params, args.subjects, args.out)
            print(f"wrote {manifest}")
            return 0
        if args.command == "analyze":
            cfg = _run_config_from_args(args)
            if not cfg.manifest.exists():
                raise GaitViewError(f"manifest not found: {cfg.manifest}")
            run_analysis(cfg)
            print(f"analysis written to {cfg.out_dir}")
            return 0
        if args.command == "recommend":
            rows = recommend(args.analyzed, args.alpha)
            for row in rows:
                print(
                    f"{row['feature']:16s} {row['side']:9s} -> "
                    f"{row['recommended_view']:8s} [{row['rationale']}]"
                )
            return 0
    except (GaitViewError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
