"""Seeded synthetic sequences with exact ground truth."""
import numpy as np

from .bench import Sequence
from .features import resize_bilinear

KINDS = ("static", "linear", "scale-ramp")


def _texture(rng, side, blocks=8):
    cells = rng.integers(0, 256, size=(blocks, blocks, 3))
    reps = -(-side // blocks)
    tex = np.repeat(np.repeat(cells, reps, axis=0), reps, axis=1)
    return tex[:side, :side].astype(float)


def _background(rng, shape):
    H, W = shape
    coarse = rng.uniform(0, 255, size=(H // 16 + 2, W // 16 + 2, 3))
    big = resize_bilinear(coarse, max(H, W) + 32)
    return 128 + 0.35 * (big[:H, :W] - 128)


def make_synthetic(kind="linear", frames=100, noise=8.0, seed=0, frame_size=(240, 320),
                   target=40, velocity=(2.0, 0.0), growth=0.5, perturb=0.0, perturb_strength=0.6):
    """Render a textured square moving over a fixed, low-contrast background.

    kind: 'static' keeps the target at the frame centre, 'linear' moves it by
    ``velocity`` pixels per frame, 'scale-ramp' grows it linearly by a
    factor ``1 + growth`` over the sequence.  ``perturb`` is the per-frame
    probability of an abrupt appearance change (the target texture is mixed
    with fresh random blocks for that frame only).  Additive Gaussian noise
    of standard deviation ``noise`` is drawn fresh for every frame.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    rng = np.random.default_rng(seed)
    H, W = frame_size
    bg = _background(rng, (H, W))
    base_tex = _texture(rng, 256)
    imgs, boxes = [], []
    for t in range(frames):
        side = float(target)
        if kind == "static":
            cx, cy = W / 2, H / 2
        elif kind == "linear":
            cx = target + 10 + velocity[0] * t
            cy = H / 2 + velocity[1] * t
        else:
            cx, cy = W / 2, H / 2
            side = target * (1 + growth * t / max(frames - 1, 1))
        s = int(round(side))
        x0 = int(round(cx - s / 2))
        y0 = int(round(cy - s / 2))
        tex = resize_bilinear(base_tex, s) if s >= 8 else base_tex[:s, :s]
        if perturb > 0 and t > 0 and rng.random() < perturb:
            tex = (1 - perturb_strength) * tex + perturb_strength * _texture(rng, s)
        img = bg.copy()
        ys, xs = slice(max(y0, 0), min(y0 + s, H)), slice(max(x0, 0), min(x0 + s, W))
        img[ys, xs] = tex[ys.start - y0:ys.stop - y0, xs.start - x0:xs.stop - x0]
        img += rng.normal(0, noise, size=img.shape)
        imgs.append(np.clip(np.rint(img), 0, 255).astype(np.uint8))
        boxes.append((x0, y0, s, s))
    return Sequence(f"synthetic-{kind}-{seed}", imgs, np.array(boxes, dtype=float), [kind])


def save_otb(seq, out_dir):
    """Write a sequence in OTB layout (img/0001.png..., 1-indexed groundtruth_rect.txt)."""
    from pathlib import Path

    from PIL import Image

    out = Path(out_dir)
    (out / "img").mkdir(parents=True, exist_ok=True)
    for i in range(len(seq)):
        Image.fromarray(seq.frame(i)).save(out / "img" / f"{i + 1:04d}.png")
    with open(out / "groundtruth_rect.txt", "w") as fh:
        for x, y, w, h in seq.groundtruth:
            fh.write(f"{x + 1:g},{y + 1:g},{w:g},{h:g}\n")
    if seq.attributes:
        (out / "attributes.txt").write_text(",".join(seq.attributes) + "\n")
    return out
