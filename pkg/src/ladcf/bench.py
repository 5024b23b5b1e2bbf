"""OTB-style sequences, one-pass evaluation and precision/success metrics."""
import csv
import json
import logging
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import LoadError
from .tracker import BoundingBox, Tracker, TrackerConfig

log = logging.getLogger(__name__)

PRECISION_THRESHOLDS = np.arange(0, 51, dtype=float)
SUCCESS_THRESHOLDS = np.round(np.linspace(0, 1, 101), 2)
IMAGE_SUFFIXES = {".jpg", ".jpeg", ".png", ".bmp", ".ppm", ".pgm", ".tif", ".tiff"}


@dataclass
class Sequence:
    name: str
    frames: list                 # paths, or in-memory arrays for synthetic data
    groundtruth: np.ndarray      # (T, 4) x, y, w, h, 0-indexed
    attributes: list = field(default_factory=list)

    def __post_init__(self):
        self.groundtruth = np.asarray(self.groundtruth, dtype=float).reshape(-1, 4)
        if len(self.frames) != len(self.groundtruth):
            raise LoadError(f"sequence {self.name}: {len(self.frames)} frames but "
                            f"{len(self.groundtruth)} ground-truth boxes")
        if len(self.frames) < 2:
            raise LoadError(f"sequence {self.name}: needs at least 2 frames")

    def __len__(self):
        return len(self.frames)

    def frame(self, i):
        f = self.frames[i]
        if isinstance(f, np.ndarray):
            return f
        return read_image(f)


def read_image(path):
    from PIL import Image
    with Image.open(path) as im:
        if im.mode not in ("RGB", "L"):
            im = im.convert("RGB")
        return np.asarray(im)


_SPLIT = re.compile(r"[,\s]+")


def parse_boxes(text, source="groundtruth", one_indexed=True):
    boxes = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        parts = [p for p in _SPLIT.split(line) if p]
        if len(parts) != 4:
            raise LoadError(f"{source}: expected 4 values, got {len(parts)}", line=lineno)
        try:
            vals = [float(p) for p in parts]
        except ValueError:
            raise LoadError(f"{source}: unparseable box {line!r}", line=lineno) from None
        boxes.append(vals)
    boxes = np.array(boxes, dtype=float).reshape(-1, 4)
    if one_indexed:
        boxes[:, :2] -= 1
    return boxes


def load_sequence(path):
    path = Path(path)
    img_dir = path / "img"
    gt_file = path / "groundtruth_rect.txt"
    if not img_dir.is_dir() or not gt_file.is_file():
        raise LoadError(f"{path}: expected img/ and groundtruth_rect.txt")
    frames = sorted(p for p in img_dir.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    gt = parse_boxes(gt_file.read_text(), str(gt_file))
    attrs = []
    attr_file = path / "attributes.txt"
    if attr_file.is_file():
        attrs = [a for a in _SPLIT.split(attr_file.read_text().strip()) if a]
    return Sequence(path.name, frames, gt, attrs)


def find_sequences(root):
    root = Path(root)
    if (root / "groundtruth_rect.txt").is_file():
        return [root]
    return sorted(p for p in root.iterdir() if (p / "groundtruth_rect.txt").is_file())


def iou(a, b):
    a = np.asarray(a.as_tuple() if isinstance(a, BoundingBox) else a, dtype=float)
    b = np.asarray(b.as_tuple() if isinstance(b, BoundingBox) else b, dtype=float)
    ix = np.maximum(0, np.minimum(a[..., 0] + a[..., 2], b[..., 0] + b[..., 2]) - np.maximum(a[..., 0], b[..., 0]))
    iy = np.maximum(0, np.minimum(a[..., 1] + a[..., 3], b[..., 1] + b[..., 3]) - np.maximum(a[..., 1], b[..., 1]))
    inter = ix * iy
    union = a[..., 2] * a[..., 3] + b[..., 2] * b[..., 3] - inter
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(union > 0, inter / np.where(union > 0, union, 1), 0.0)
    return np.clip(out, 0, 1) if out.ndim else float(np.clip(out, 0, 1))


def center_error(a, b):
    a = np.asarray(a.as_tuple() if isinstance(a, BoundingBox) else a, dtype=float)
    b = np.asarray(b.as_tuple() if isinstance(b, BoundingBox) else b, dtype=float)
    ca = a[..., :2] + a[..., 2:] / 2
    cb = b[..., :2] + b[..., 2:] / 2
    out = np.sqrt(np.sum((ca - cb) ** 2, axis=-1))
    return out if out.ndim else float(out)


def score(trajectory, groundtruth, fps=None):
    """Precision/success curves and summary numbers for one sequence.

    Frames whose ground truth has no positive area are left out.
    """
    traj = np.asarray(trajectory, dtype=float).reshape(-1, 4)
    gt = np.asarray(groundtruth, dtype=float).reshape(-1, 4)
    if len(traj) != len(gt):
        raise ValueError(f"trajectory has {len(traj)} boxes, ground truth {len(gt)}")
    valid = (gt[:, 2] > 0) & (gt[:, 3] > 0)
    ov = iou(traj[valid], gt[valid])
    err = center_error(traj[valid], gt[valid])
    if valid.any():
        success = np.array([np.mean(ov > t) for t in SUCCESS_THRESHOLDS])
        precision = np.array([np.mean(err <= d) for d in PRECISION_THRESHOLDS])
    else:
        success = np.zeros(len(SUCCESS_THRESHOLDS))
        precision = np.zeros(len(PRECISION_THRESHOLDS))
    return {
        "frames": int(len(gt)),
        "valid_frames": int(valid.sum()),
        "success": success.tolist(),
        "precision": precision.tolist(),
        "auc": float(success.mean()),
        "op": float(success[50]),
        "dp": float(precision[20]),
        "mean_iou": float(ov.mean()) if ov.size else 0.0,
        "fps": fps,
    }


def track_sequence(seq, cfg=None):
    """One-pass run: initialise on the first ground-truth box, never reset.

    Returns (trajectory array, fps over the tracked frames).
    """
    tracker = Tracker(cfg)
    traj = np.zeros((len(seq), 4))
    traj[0] = seq.groundtruth[0]
    t0 = time.perf_counter()
    tracker.init(seq.frame(0), BoundingBox(*seq.groundtruth[0]))
    for i in range(1, len(seq)):
        traj[i] = tracker.update(seq.frame(i)).as_tuple()
    elapsed = time.perf_counter() - t0
    return traj, len(seq) / elapsed if elapsed > 0 else float("inf")


def _evaluate_one(seq, cfg):
    try:
        traj, fps = track_sequence(seq, cfg)
    except Exception as exc:  # one bad sequence must not sink the run
        log.exception("sequence %s failed", seq.name)
        return seq.name, None, f"{type(exc).__name__}: {exc}"
    entry = score(traj, seq.groundtruth, fps)
    entry["attributes"] = list(seq.attributes)
    entry["trajectory"] = traj.tolist()
    return seq.name, entry, None


@dataclass
class EvalReport:
    sequences: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)

    def mean(self, key):
        vals = [e[key] for e in self.sequences.values() if e.get(key) is not None]
        return float(np.mean(vals)) if vals else float("nan")

    def mean_curve(self, key):
        curves = [e[key] for e in self.sequences.values()]
        if not curves:
            n = len(SUCCESS_THRESHOLDS if key == "success" else PRECISION_THRESHOLDS)
            return [0.0] * n
        return np.mean(curves, axis=0).tolist()

    def summary(self):
        return {
            "sequences": len(self.sequences),
            "failed": len(self.failures),
            "auc": self.mean("auc"),
            "op": self.mean("op"),
            "dp": self.mean("dp"),
            "mean_iou": self.mean("mean_iou"),
            "fps": self.mean("fps"),
            "success": self.mean_curve("success"),
            "precision": self.mean_curve("precision"),
        }

    def to_dict(self):
        return {
            "success_thresholds": SUCCESS_THRESHOLDS.tolist(),
            "precision_thresholds": PRECISION_THRESHOLDS.tolist(),
            "summary": self.summary(),
            "sequences": self.sequences,
            "failures": self.failures,
        }


def run_ope(dataset, cfg=None, jobs=1):
    cfg = cfg or TrackerConfig()
    report = EvalReport()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_evaluate_one, dataset, [cfg] * len(dataset)))
    else:
        results = [_evaluate_one(seq, cfg) for seq in dataset]
    for name, entry, err in results:
        if err is None:
            report.sequences[name] = entry
        else:
            report.failures[name] = err
    return report


def round_half_up(x, digits=1):
    from decimal import ROUND_HALF_UP, Decimal
    q = Decimal(1).scaleb(-digits)
    return float(Decimal(repr(float(x))).quantize(q, rounding=ROUND_HALF_UP))


def summary_table(report):
    lines = [f"{'sequence':<24}{'AUC%':>8}{'OP%':>8}{'DP%':>8}{'FPS':>8}"]
    for name, e in report.sequences.items():
        lines.append(f"{name:<24}{round_half_up(100 * e['auc']):>8}{round_half_up(100 * e['op']):>8}"
                     f"{round_half_up(100 * e['dp']):>8}{round_half_up(e['fps'] or 0):>8}")
    s = report.summary()
    lines.append(f"{'mean':<24}{round_half_up(100 * s['auc']):>8}{round_half_up(100 * s['op']):>8}"
                 f"{round_half_up(100 * s['dp']):>8}{round_half_up(s['fps']):>8}")
    for name, err in report.failures.items():
        lines.append(f"{name:<24}FAILED {err}")
    return "\n".join(lines)


def write_report(report, out_dir, label="LADCF"):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "report.json", "w") as fh:
        json.dump(report.to_dict(), fh, indent=2)
    s = report.summary()
    names = list(report.sequences)
    for key, thresholds, col in (("success", SUCCESS_THRESHOLDS, "overlap_threshold"),
                                 ("precision", PRECISION_THRESHOLDS, "location_error_threshold")):
        with open(out / f"{key}_curve.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([col, "mean"] + names)
            for k, t in enumerate(thresholds):
                w.writerow([f"{t:g}", f"{s[key][k]:.6f}"] + [f"{report.sequences[n][key][k]:.6f}" for n in names])
    _plot(report, out, label)
    (out / "summary.txt").write_text(summary_table(report) + "\n")
    return out


def _plot(report, out, label):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    s = report.summary()
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(PRECISION_THRESHOLDS, s["precision"], label=f"{label} [{s['dp']:.3f}]")
    ax.set(xlim=(0, 50), ylim=(0, 1), xlabel="Location error threshold",
           ylabel="Precision", title="Precision plots of OPE")
    ax.legend(loc="lower right")
    ax.grid(alpha=0.3)
    fig.savefig(out / "precision_plot.svg")
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(SUCCESS_THRESHOLDS, s["success"], label=f"{label} [{s['auc']:.3f}]")
    ax.set(xlim=(0, 1), ylim=(0, 1), xlabel="Overlap threshold",
           ylabel="Success rate", title="Success plots of OPE")
    ax.legend(loc="lower left")
    ax.grid(alpha=0.3)
    fig.savefig(out / "success_plot.svg")
    plt.close(fig)
