"""Command-line entry point: ``ladcf track|eval|synth|selftest``."""
import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import bench, selftest
from .config import load_config
from .errors import LadcfError
from .synthetic import KINDS, make_synthetic, save_otb

log = logging.getLogger("ladcf")


def write_trajectory(traj, path):
    with open(path, "w") as fh:
        for x, y, w, h in np.asarray(traj, dtype=float):
            fh.write("%.2f,%.2f,%.2f,%.2f\n" % (x, y, w, h))


def write_overlays(seq, traj, out_dir):
    from PIL import Image, ImageDraw

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(len(seq)):
        im = Image.fromarray(seq.frame(i)).convert("RGB")
        draw = ImageDraw.Draw(im)
        gx, gy, gw, gh = seq.groundtruth[i]
        draw.rectangle([gx, gy, gx + gw, gy + gh], outline=(0, 255, 0))
        x, y, w, h = traj[i]
        draw.rectangle([x, y, x + w, y + h], outline=(255, 0, 0))
        im.save(out / f"{i + 1:04d}.png")


def cmd_track(sequence_dir, config_path=None, out_dir="out", overlay=False):
    cfg = load_config(config_path)
    seq = bench.load_sequence(sequence_dir)
    traj, fps = bench.track_sequence(seq, cfg)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_trajectory(traj, out / f"{seq.name}.txt")
    if overlay:
        write_overlays(seq, traj, out / f"{seq.name}_overlay")
    e = bench.score(traj, seq.groundtruth, fps)
    print(f"{seq.name}: {len(seq)} frames, {fps:.1f} fps, AUC {e['auc']:.3f}, "
          f"OP {e['op']:.3f}, DP {e['dp']:.3f}")
    return 0


def cmd_eval(dataset_dir, config_path=None, out_dir="out", jobs=1):
    cfg = load_config(config_path)
    dirs = bench.find_sequences(dataset_dir)
    if not dirs:
        print(f"no OTB sequences under {dataset_dir}", file=sys.stderr)
        return 1
    dataset, load_failures = [], {}
    for d in dirs:
        try:
            dataset.append(bench.load_sequence(d))
        except LadcfError as exc:
            load_failures[d.name] = f"{type(exc).__name__}: {exc}"
    report = bench.run_ope(dataset, cfg, jobs=jobs)
    report.failures.update(load_failures)
    out = bench.write_report(report, out_dir)
    for name, entry in report.sequences.items():
        write_trajectory(entry["trajectory"], out / f"{name}.txt")
    print(bench.summary_table(report))
    return 0 if not report.failures else 1


def cmd_synth(kind, frames, out_dir, seed=0, noise=8.0):
    seq = make_synthetic(kind, frames, noise=noise, seed=seed)
    save_otb(seq, out_dir)
    print(f"wrote {len(seq)} frames of '{kind}' to {out_dir}")
    return 0


def cmd_selftest(seed=0):
    return 0 if selftest.run(seed) else 1


def build_parser():
    p = argparse.ArgumentParser(prog="ladcf", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("track", help="track one OTB-format sequence")
    t.add_argument("sequence_dir")
    t.add_argument("--config")
    t.add_argument("--out", default="out")
    t.add_argument("--overlay", action="store_true", help="write per-frame overlay images")

    e = sub.add_parser("eval", help="one-pass evaluation over a dataset directory")
    e.add_argument("dataset_dir")
    e.add_argument("--config")
    e.add_argument("--out", default="out")
    e.add_argument("--jobs", type=int, default=1)

    s = sub.add_parser("synth", help="write a synthetic sequence in OTB layout")
    s.add_argument("kind", choices=KINDS)
    s.add_argument("--frames", type=int, default=100)
    s.add_argument("--noise", type=float, default=8.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)

    st = sub.add_parser("selftest", help="run the oracle cross-checks")
    st.add_argument("--seed", type=int, default=0)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "track":
            return cmd_track(args.sequence_dir, args.config, args.out, args.overlay)
        if args.command == "eval":
            return cmd_eval(args.dataset_dir, args.config, args.out, args.jobs)
        if args.command == "synth":
            return cmd_synth(args.kind, args.frames, args.out, args.seed, args.noise)
        return cmd_selftest(args.seed)
    except (LadcfError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
