"""Color-pair datasets, metric distance tables, and the correlation report.

A dataset is a line-delimited file of `id,#RRGGBB,#RRGGBB[,human_score]`
records. `compute_distance_table` evaluates registered metrics over every
pair; `build_report` correlates each metric column against the human scores
(Pearson r and a min-max-normalized MAE) and ranks the metrics. Precomputed
distance tables (external studies whose stimuli are unpublished) load through
`load_reference_table` and feed the same report path.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import metrics as metrics_mod
from .colors import D65, Srgb8, WhitePoint, format_hex, parse_color
from .validation import check_paired_vectors


@dataclass(frozen=True)
class ColorPair:
    id: int
    a: Srgb8
    b: Srgb8


@dataclass
class ColorPairDataset:
    pairs: list[ColorPair]
    human: dict[int, float] | None = None
    source: str = ""

    def __post_init__(self):
        seen = set()
        for p in self.pairs:
            if p.id in seen:
                raise ValueError(f"duplicate pair id {p.id}")
            seen.add(p.id)
        if self.human is not None:
            missing = [p.id for p in self.pairs if p.id not in self.human]
            if missing:
                raise ValueError(f"missing human scores for pair ids {missing}")
            for pid, score in self.human.items():
                if not math.isfinite(score):
                    raise ValueError(f"non-finite human score for pair id {pid}")

    @property
    def pair_ids(self) -> list[int]:
        return [p.id for p in self.pairs]

    def human_vector(self) -> np.ndarray:
        if self.human is None:
            raise ValueError("dataset has no human scores")
        return np.array([self.human[p.id] for p in self.pairs], dtype=np.float64)


def load_dataset(path) -> ColorPairDataset:
    """Parse a `id,#RRGGBB,#RRGGBB[,human_score]` file ('#' comment lines ok)."""
    p = Path(path)
    pairs: list[ColorPair] = []
    human: dict[int, float] = {}
    declares_scores: bool | None = None
    with open(p, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = [f.strip() for f in line.split(",")]
            # hex colors contain no commas, so records have 3 or 4 fields
            if len(fields) not in (3, 4):
                raise ValueError(f"{p}:{lineno}: malformed record {line!r}")
            try:
                pid = int(fields[0])
                a = parse_color(fields[1])
                b = parse_color(fields[2])
            except ValueError as exc:
                raise ValueError(f"{p}:{lineno}: {exc}") from exc
            has_score = len(fields) == 4
            if declares_scores is None:
                declares_scores = has_score
            elif declares_scores != has_score:
                raise ValueError(
                    f"{p}:{lineno}: human score "
                    f"{'missing' if declares_scores else 'unexpected'} for pair {pid}"
                )
            if has_score:
                try:
                    human[pid] = float(fields[3])
                except ValueError as exc:
                    raise ValueError(f"{p}:{lineno}: bad human score {fields[3]!r}") from exc
            if any(q.id == pid for q in pairs):
                raise ValueError(f"{p}:{lineno}: duplicate pair id {pid}")
            pairs.append(ColorPair(pid, a, b))
    if not pairs:
        raise ValueError(f"{p}: no pairs found")
    return ColorPairDataset(pairs, human if declares_scores else None, source=str(p))


def save_dataset(ds: ColorPairDataset, path) -> Path:
    out = Path(path)
    with open(out, "w", encoding="utf-8") as fh:
        for pair in ds.pairs:
            line = f"{pair.id},{format_hex(pair.a)},{format_hex(pair.b)}"
            if ds.human is not None:
                line += f",{ds.human[pair.id]:g}"
            fh.write(line + "\n")
    return out


@dataclass
class DistanceTable:
    """Per-metric distance vectors aligned with a dataset's pair order."""

    pair_ids: list[int]
    columns: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.pair_ids)
        for mid, col in self.columns.items():
            col = np.asarray(col, dtype=np.float64)
            if col.shape != (n,):
                raise ValueError(f"column {mid!r} has {col.shape[0]} values, expected {n}")
            if not np.all(np.isfinite(col)) or np.any(col < 0):
                raise ValueError(f"column {mid!r} contains invalid distances")
            self.columns[mid] = col

    @property
    def metric_ids(self) -> list[str]:
        return list(self.columns)


def compute_distance_table(
    ds: ColorPairDataset,
    metric_ids: list[str] | tuple[str, ...] = metrics_mod.TABLE_METRICS,
    wp: WhitePoint = D65,
) -> DistanceTable:
    """One distance per (pair, metric), in dataset order."""
    descriptors = [metrics_mod.registry_lookup(mid) for mid in metric_ids]
    columns = {}
    for desc in descriptors:
        columns[desc.id] = np.array(
            [metrics_mod.evaluate(desc, p.a, p.b, wp) for p in ds.pairs]
        )
    return DistanceTable(ds.pair_ids, columns)


def load_reference_table(path) -> tuple[DistanceTable, np.ndarray]:
    """Load a precomputed distance table CSV with a trailing `human` column."""
    p = Path(path)
    with open(p, encoding="utf-8", newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    header = [h.strip() for h in rows[0]]
    if header[0] != "pair_id" or header[-1] != "human":
        raise ValueError(f"{p}: expected header pair_id,<metrics...>,human")
    metric_ids = header[1:-1]
    pair_ids, human, cols = [], [], {mid: [] for mid in metric_ids}
    for row in rows[1:]:
        values = [v.strip() for v in row]
        pair_ids.append(int(values[0]))
        for mid, v in zip(metric_ids, values[1:-1]):
            cols[mid].append(float(v))
        human.append(float(values[-1]))
    table = DistanceTable(pair_ids, {m: np.array(v) for m, v in cols.items()})
    return table, np.array(human)


def pearson(x, y) -> float:
    """Sample Pearson correlation; undefined when either variance is zero."""
    xa, ya = check_paired_vectors(x, y)
    xc = xa - xa.mean()
    yc = ya - ya.mean()
    sx = math.sqrt(float(xc @ xc))
    sy = math.sqrt(float(yc @ yc))
    if sx == 0.0 or sy == 0.0:
        raise ValueError("pearson undefined: zero variance")
    r = float(xc @ yc) / (sx * sy)
    return max(-1.0, min(1.0, r))


def spearman(x, y) -> float:
    """Spearman rank correlation (average ranks for ties)."""
    xa, ya = check_paired_vectors(x, y)
    return pearson(_ranks(xa), _ranks(ya))


def _ranks(v: np.ndarray) -> np.ndarray:
    order = np.argsort(v, kind="stable")
    ranks = np.empty_like(v)
    ranks[order] = np.arange(1, len(v) + 1, dtype=np.float64)
    # average tied groups
    for value in np.unique(v):
        mask = v == value
        if mask.sum() > 1:
            ranks[mask] = ranks[mask].mean()
    return ranks


def mae_normalized(metric_col, human) -> float:
    """Mean absolute error after min-max rescaling the metric column onto the
    human score range; invariant under positive affine maps of the column."""
    xa, ya = check_paired_vectors(metric_col, human)
    span = xa.max() - xa.min()
    if span == 0.0:
        raise ValueError("mae undefined: constant metric column")
    scaled = ya.min() + (xa - xa.min()) * (ya.max() - ya.min()) / span
    return float(np.mean(np.abs(scaled - ya)))


@dataclass(frozen=True)
class MetricScore:
    metric: str
    pearson_r: float | None
    mae: float | None
    spearman_r: float | None = None
    error: str | None = None


@dataclass
class EvaluationReport:
    scores: list[MetricScore]
    pair_count: int
    source: str = ""

    def ranking(self) -> list[MetricScore]:
        """Scores ranked by Pearson r descending; unavailable metrics last."""
        usable = [s for s in self.scores if s.error is None]
        failed = [s for s in self.scores if s.error is not None]
        return sorted(usable, key=lambda s: -s.pearson_r) + failed

    def score_for(self, metric: str) -> MetricScore:
        for s in self.scores:
            if s.metric == metric:
                return s
        raise KeyError(f"metric {metric!r} not in report")


def build_report(
    ds_or_human,
    table: DistanceTable,
    source: str = "",
) -> EvaluationReport:
    """Correlate every metric column against the human scores.

    Accepts either a scored ColorPairDataset or a raw human-score vector
    aligned with the table. Per-metric failures (zero variance, constant
    column) are recorded as unavailable instead of failing the report.
    """
    if isinstance(ds_or_human, ColorPairDataset):
        human = ds_or_human.human_vector()
        source = source or ds_or_human.source
    else:
        human = np.asarray(ds_or_human, dtype=np.float64)
    if human.shape[0] != len(table.pair_ids):
        raise ValueError("human scores not aligned with the distance table")

    scores = []
    for mid in table.metric_ids:
        col = table.columns[mid]
        try:
            scores.append(MetricScore(
                metric=mid,
                pearson_r=pearson(col, human),
                mae=mae_normalized(col, human),
                spearman_r=spearman(col, human),
            ))
        except ValueError as exc:
            scores.append(MetricScore(mid, None, None, None, error=str(exc)))
    return EvaluationReport(scores, pair_count=len(table.pair_ids), source=source)


def write_report_csv(report: EvaluationReport, path) -> Path:
    """CSV with header `metric,pearson_r,mae`, 4 decimal places throughout."""
    out = Path(path)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["metric", "pearson_r", "mae"])
        for s in report.ranking():
            if s.error is None:
                writer.writerow([s.metric, f"{s.pearson_r:.4f}", f"{s.mae:.4f}"])
            else:
                writer.writerow([s.metric, "nan", "nan"])
    return out


def render_heatmap(report: EvaluationReport, path) -> Path:
    """One-row heatmap of Pearson r values, annotated, as a standalone SVG."""
    usable = [s for s in report.ranking() if s.error is None]
    if not usable:
        raise ValueError("report contains no usable metric scores")
    import matplotlib

    matplotlib.use("Agg")
    # fixed hash salt keeps SVG element ids (and so the bytes) reproducible
    matplotlib.rcParams["svg.hashsalt"] = "chromadiff"
    import matplotlib.pyplot as plt

    values = np.array([[s.pearson_r for s in usable]])
    fig, ax = plt.subplots(figsize=(1.4 * len(usable) + 1.2, 2.2))
    ax.imshow(values, cmap="coolwarm", vmin=-1.0, vmax=1.0, aspect="auto")
    ax.set_xticks(range(len(usable)), [s.metric for s in usable], rotation=30, ha="right")
    ax.set_yticks([0], ["pearson r"])
    for i, s in enumerate(usable):
        ax.text(i, 0, f"{s.pearson_r:.4f}", ha="center", va="center", fontsize=9)
    ax.set_title("correlation with human judgments")
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, format="svg", metadata={"Date": None})
    plt.close(fig)
    return out


def aggregate_judgments(records: list[dict], ds: ColorPairDataset) -> dict[str, dict[int, float]]:
    """Reduce judgment log records to per-pair human scores, per mode.

    Rating records average their responses; 2AFC records score each pair as
    its win proportion scaled onto [0, 10].
    """
    if not records:
        raise ValueError("empty judgment log")
    known = set(ds.pair_ids)
    ratings: dict[int, list[float]] = {}
    wins: dict[int, int] = {}
    shown: dict[int, int] = {}
    for rec in records:
        pair_ids = [int(v) for v in rec["pair_ids"]]
        for pid in pair_ids:
            if pid not in known:
                raise ValueError(f"judgment references unknown pair id {pid}")
        mode = rec["mode"]
        if mode == "rating":
            ratings.setdefault(pair_ids[0], []).append(float(rec["response"]))
        elif mode == "2afc":
            chosen = int(rec["response"])
            if chosen not in pair_ids:
                raise ValueError(f"2afc choice {chosen} not among shown pairs {pair_ids}")
            for pid in pair_ids:
                shown[pid] = shown.get(pid, 0) + 1
            wins[chosen] = wins.get(chosen, 0) + 1
        else:
            raise ValueError(f"unknown judgment mode {mode!r}")

    out: dict[str, dict[int, float]] = {}
    if ratings:
        out["rating"] = {pid: float(np.mean(vals)) for pid, vals in ratings.items()}
    if shown:
        out["2afc"] = {pid: 10.0 * wins.get(pid, 0) / shown[pid] for pid in shown}
    return out
