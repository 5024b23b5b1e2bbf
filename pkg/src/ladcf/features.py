"""Search-window cropping, resampling and HOG / Color-Names cell features.

Images are numpy arrays, H x W x 3 (RGB) or H x W, any numeric dtype with
intensities on the 0..255 scale.  Feature tensors are float arrays of shape
(L, Dy, Dx).
"""
import os
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import InvalidInputError, LoadError, ShapeError

CN_ROWS = 32768
CN_CHANNELS = 10
HOG_CHANNELS = 31
HOG_BINS = 18
HOG_CLIP = 0.2
HOG_TEXTURE_WEIGHT = 0.2357
HOG_EPS = 1e-4

_DEFAULT_TABLE = None


@dataclass(frozen=True)
class ImagePatch:
    pixels: np.ndarray
    frame_index: int = -1
    origin: tuple = (0, 0)   # (x, y) of the top-left pixel in the frame


def window_side(w, h, padding):
    return (1 + padding) * np.sqrt(w * h)


def extract_search_window(frame, center, side, frame_index=-1):
    """Crop a side x side patch centred at ``center`` = (cx, cy).

    Coordinates are continuous (pixel i spans [i, i+1)); pixels outside the
    frame replicate the nearest edge pixel.
    """
    side = int(round(side))
    if side < 8:
        raise InvalidInputError(f"window side {side} is below 8 pixels")
    frame = np.asarray(frame)
    H, W = frame.shape[:2]
    x0 = int(np.floor(center[0] - side / 2 + 0.5))
    y0 = int(np.floor(center[1] - side / 2 + 0.5))
    xs = np.clip(np.arange(x0, x0 + side), 0, W - 1)
    ys = np.clip(np.arange(y0, y0 + side), 0, H - 1)
    pix = frame[ys[:, None], xs[None, :]]
    return ImagePatch(pix, frame_index, (x0, y0))


def resize_bilinear(patch, out_side):
    """Bilinear resampling to out_side x out_side, pixel-centre aligned."""
    pixels = patch.pixels if isinstance(patch, ImagePatch) else np.asarray(patch)
    if out_side < 8:
        raise InvalidInputError("output side must be >= 8")
    H, W = pixels.shape[:2]
    if (H, W) == (out_side, out_side):
        out = pixels.copy()
    else:
        out = _bilinear(pixels.astype(np.float64), out_side, out_side)
    if isinstance(patch, ImagePatch):
        return ImagePatch(out, patch.frame_index, patch.origin)
    return out


def _axis_weights(n_in, n_out):
    src = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
    src = np.clip(src, 0, n_in - 1)
    i0 = np.floor(src).astype(int)
    i1 = np.minimum(i0 + 1, n_in - 1)
    return i0, i1, src - i0


def _bilinear(img, out_h, out_w):
    y0, y1, wy = _axis_weights(img.shape[0], out_h)
    x0, x1, wx = _axis_weights(img.shape[1], out_w)
    if img.ndim == 3:
        wy = wy[:, None, None]
        wx = wx[None, :, None]
    else:
        wy = wy[:, None]
        wx = wx[None, :]
    top = img[y0][:, x0] * (1 - wx) + img[y0][:, x1] * wx
    bot = img[y1][:, x0] * (1 - wx) + img[y1][:, x1] * wx
    return top * (1 - wy) + bot * wy


def _pixels(patch):
    return patch.pixels if isinstance(patch, ImagePatch) else np.asarray(patch)


def _truncate(img, cell):
    H, W = img.shape[:2]
    Hc, Wc = (H // cell) * cell, (W // cell) * cell
    if Hc == 0 or Wc == 0:
        raise InvalidInputError(f"patch {H}x{W} is smaller than one {cell}x{cell} cell")
    return img[:Hc, :Wc]


def _cell_sum(a, cell):
    """Sum an (H, W, ...) array over non-overlapping cell x cell blocks."""
    H, W = a.shape[:2]
    return a.reshape(H // cell, cell, W // cell, cell, *a.shape[2:]).sum(axis=(1, 3))


def orientation_bin(dx, dy):
    """Nearest of 18 contrast-sensitive directions (20 degree spacing)."""
    ang = np.mod(np.arctan2(dy, dx), 2 * np.pi)
    return np.floor(ang / (2 * np.pi / HOG_BINS) + 0.5).astype(int) % HOG_BINS


def gradient_histograms(img, cell):
    """Per-cell magnitude-weighted histograms over 18 orientations.

    Gradients use centred [-1, 0, 1] differences with edge replication; for
    colour input the channel with the largest magnitude wins per pixel.
    """
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:
        img = img[:, :, None]
    p = np.pad(img, ((1, 1), (1, 1), (0, 0)), mode="edge")
    dx = p[1:-1, 2:] - p[1:-1, :-2]
    dy = p[2:, 1:-1] - p[:-2, 1:-1]
    mag2 = dx * dx + dy * dy
    best = np.argmax(mag2, axis=2)[..., None]
    dx = np.take_along_axis(dx, best, axis=2)[..., 0]
    dy = np.take_along_axis(dy, best, axis=2)[..., 0]
    mag = np.sqrt(np.take_along_axis(mag2, best, axis=2)[..., 0])
    bins = orientation_bin(dx, dy)
    H, W = mag.shape
    Dy, Dx = H // cell, W // cell
    cell_id = (np.arange(H) // cell)[:, None] * Dx + (np.arange(W) // cell)[None, :]
    hist = np.bincount((cell_id * HOG_BINS + bins).ravel(), weights=mag.ravel(),
                       minlength=Dy * Dx * HOG_BINS)
    return hist.reshape(Dy, Dx, HOG_BINS)


def normalize_hog(hist):
    """Felzenszwalb normalisation of (Dy, Dx, 18) histograms into 31 channels."""
    energy = np.sum((hist[..., :9] + hist[..., 9:]) ** 2, axis=2)
    e = np.pad(energy, 1, mode="edge")
    # block sums of the 2x2 neighbourhoods with the cell in each corner
    b = e[:-1, :-1] + e[1:, :-1] + e[:-1, 1:] + e[1:, 1:]
    Dy, Dx = energy.shape
    norms = np.stack([
        b[0:Dy, 0:Dx], b[0:Dy, 1:Dx + 1], b[1:Dy + 1, 0:Dx], b[1:Dy + 1, 1:Dx + 1],
    ])
    norms = 1.0 / np.sqrt(norms + HOG_EPS)

    sens = np.minimum(hist[None] * norms[..., None], HOG_CLIP)
    insens_hist = hist[..., :9] + hist[..., 9:]
    insens = np.minimum(insens_hist[None] * norms[..., None], HOG_CLIP)
    out = np.empty((HOG_CHANNELS, Dy, Dx))
    out[:18] = np.moveaxis(0.5 * sens.sum(axis=0), 2, 0)
    out[18:27] = np.moveaxis(0.5 * insens.sum(axis=0), 2, 0)
    out[27:31] = HOG_TEXTURE_WEIGHT * sens.sum(axis=3)
    return out


def extract_hog(patch, cell=4):
    img = _truncate(_pixels(patch), cell)
    return normalize_hog(gradient_histograms(img, cell))


def hog_upper_bounds():
    """Largest value each HOG channel can take after clipping."""
    b = np.empty(HOG_CHANNELS)
    b[:27] = 4 * HOG_CLIP * 0.5
    b[27:] = HOG_BINS * HOG_CLIP * HOG_TEXTURE_WEIGHT
    return b


class ColorNamesTable:
    """32768 x 10 lookup from 5-bit-quantised RGB to colour-name scores."""

    def __init__(self, table):
        table = np.asarray(table, dtype=np.float32)
        if table.shape != (CN_ROWS, CN_CHANNELS):
            raise LoadError(f"colour-names table must have {CN_ROWS} rows of {CN_CHANNELS}, "
                            f"got shape {table.shape}")
        if np.any(table < 0) or np.any(table > 1) or not np.all(np.isfinite(table)):
            raise LoadError("colour-names entries must lie in [0, 1]")
        table.setflags(write=False)
        self.table = table

    @classmethod
    def load(cls, path):
        path = os.fspath(path)
        if path.endswith(".csv"):
            return cls.load_csv(path)
        raw = np.fromfile(path, dtype="<f4")
        if raw.size != CN_ROWS * CN_CHANNELS:
            raise LoadError(f"{path}: expected {CN_ROWS * CN_CHANNELS} float32 values, "
                            f"found {raw.size} ({raw.size // CN_CHANNELS} rows)")
        return cls(raw.reshape(CN_ROWS, CN_CHANNELS))

    @classmethod
    def load_csv(cls, path):
        rows = []
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                try:
                    vals = [float(v) for v in line.split(",")]
                except ValueError as exc:
                    raise LoadError(f"{path}: {exc}", line=lineno) from None
                if len(vals) != CN_CHANNELS:
                    raise LoadError(f"{path}: expected {CN_CHANNELS} values", line=lineno)
                rows.append(vals)
        if len(rows) != CN_ROWS:
            raise LoadError(f"{path}: expected {CN_ROWS} rows, found {len(rows)}")
        return cls(np.array(rows))

    def save(self, path):
        self.table.astype("<f4").tofile(path)

    def save_csv(self, path):
        np.savetxt(path, self.table, delimiter=",", fmt="%.8g")


def default_table():
    """Table from $LADCF_CN_TABLE if set, else the bundled asset. Cached."""
    global _DEFAULT_TABLE
    override = os.environ.get("LADCF_CN_TABLE")
    if override:
        return ColorNamesTable.load(override)
    if _DEFAULT_TABLE is None:
        ref = resources.files("ladcf") / "data" / "colornames.bin"
        with resources.as_file(ref) as p:
            _DEFAULT_TABLE = ColorNamesTable.load(p)
    return _DEFAULT_TABLE


def colornames_index(rgb):
    # truncation equals floor on the clipped, non-negative range
    q = np.clip(rgb, 0, 255).astype(np.int32) >> 3
    return q[..., 0] + 32 * q[..., 1] + 1024 * q[..., 2]


def extract_colornames(patch, table, cell=4):
    img = _truncate(_pixels(patch), cell)
    if img.ndim == 2:
        img = np.repeat(img[:, :, None], 3, axis=2)
    elif img.shape[2] == 1:
        img = np.repeat(img, 3, axis=2)
    scores = table.table[colornames_index(img)].astype(np.float64)
    out = _cell_sum(scores, cell) / (cell * cell)
    return np.moveaxis(out, 2, 0)


def assemble(hog, cn, window=None):
    hog = np.asarray(hog, dtype=float)
    cn = np.asarray(cn, dtype=float)
    if hog.shape[1:] != cn.shape[1:]:
        raise ShapeError(f"grid mismatch: HOG {hog.shape[1:]} vs CN {cn.shape[1:]}")
    X = np.concatenate([hog, cn], axis=0)
    if window is not None:
        window = np.asarray(window, dtype=float)
        if window.shape != X.shape[1:]:
            raise ShapeError(f"window {window.shape} does not match grid {X.shape[1:]}")
        X = X * window
    return X


def extract_features(patch, table, cell=4, window=None):
    return assemble(extract_hog(patch, cell), extract_colornames(patch, table, cell), window)
