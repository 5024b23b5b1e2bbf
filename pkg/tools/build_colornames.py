"""Regenerate src/ladcf/data/colornames.bin.

The bundled table is a soft assignment of every 5-bit-quantised RGB bin to
the eleven basic colour terms (black, blue, brown, grey, green, orange, pink,
purple, red, white, yellow) by Gaussian affinity in CIELAB.  Scores sum to
one, so the last term is dropped and the remaining ten columns are stored
as little-endian float32, row index r + 32 g + 1024 b.

A learned table (e.g. the w2c mapping) in the same layout can be dropped in
via $LADCF_CN_TABLE without touching the code.
"""
import sys
from pathlib import Path

import numpy as np
from skimage.color import rgb2lab

PROTOTYPES = np.array([
    [0, 0, 0], [0, 0, 1], [.5, .4, .25], [.5, .5, .5], [0, 1, 0], [1, .8, 0],
    [1, .5, 1], [1, 0, 1], [1, 0, 0], [1, 1, 1], [1, 1, 0],
])
BANDWIDTH = 25.0


def build():
    q = (np.arange(32) * 8 + 4) / 255.0
    b, g, r = np.meshgrid(q, q, q, indexing="ij")
    rgb = np.stack([r.ravel(), g.ravel(), b.ravel()], axis=1)
    lab = rgb2lab(rgb[None])[0]
    proto = rgb2lab(PROTOTYPES[None])[0]
    d2 = ((lab[:, None, :] - proto[None]) ** 2).sum(axis=2)
    logits = -d2 / (2 * BANDWIDTH ** 2)
    logits -= logits.max(axis=1, keepdims=True)
    p = np.exp(logits)
    p /= p.sum(axis=1, keepdims=True)
    return p[:, :10].astype("<f4")


if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else \
        Path(__file__).resolve().parents[1] / "src" / "ladcf" / "data" / "colornames.bin"
    table = build()
    table.tofile(out)
    print(f"wrote {table.shape} to {out}")
