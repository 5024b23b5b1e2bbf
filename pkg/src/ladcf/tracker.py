"""Per-frame detect / move / learn / update loop of the LADCF tracker."""
import logging
from dataclasses import dataclass, field, replace

import numpy as np

from . import solver
from .errors import InvalidInputError, NumericalFailure
from .features import default_table, extract_features, extract_search_window, resize_bilinear
from .solver import SolverConfig, SpectralFilter
from .spectral import dft2, gaussian_label, hann_window, idft2, signed_shift

log = logging.getLogger(__name__)

MIN_TARGET_SIDE = 4.0


@dataclass(frozen=True)
class TrackerConfig:
    padding: float = 4.0
    scale_factor: float = 1.01
    scales: int = 5
    cell: int = 4
    sigma_factor: float = 1.0 / 16
    window: str = "hann"
    # cap on the grid side D; larger windows are resampled onto this grid
    max_cells: int = 64
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.scales < 1 or self.scales % 2 == 0:
            raise InvalidInputError("scales must be odd and >= 1")
        if not self.scale_factor > 1:
            raise InvalidInputError("scale_factor must exceed 1")
        if not self.padding > 0:
            raise InvalidInputError("padding must be positive")
        if self.cell < 1:
            raise InvalidInputError("cell must be >= 1")
        if self.window not in ("hann", "none"):
            raise InvalidInputError("window must be 'hann' or 'none'")
        if not self.sigma_factor > 0:
            raise InvalidInputError("sigma_factor must be positive")
        if self.max_cells and self.max_cells < 2:
            raise InvalidInputError("max_cells must be 0 (no cap) or >= 2")

    def exponents(self):
        s = np.arange(1, self.scales + 1)
        return np.floor((2 * s - self.scales - 1) / 2).astype(int)


@dataclass(frozen=True)
class BoundingBox:
    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if not (self.w >= 1 and self.h >= 1):
            raise InvalidInputError(f"degenerate bounding box {self}")

    @property
    def center(self):
        return (self.x + self.w / 2, self.y + self.h / 2)

    @classmethod
    def from_center(cls, cx, cy, w, h):
        return cls(cx - w / 2, cy - h / 2, w, h)

    def as_tuple(self):
        return (self.x, self.y, self.w, self.h)


@dataclass
class TrackerState:
    center: np.ndarray          # (cx, cy), sub-pixel
    size: np.ndarray            # (w, h) pixels
    n: float                    # search window side in pixels
    D: int                      # grid side in cells
    theta_model: SpectralFilter
    frame_index: int = 0
    clamped: bool = False
    window: np.ndarray = None
    label: np.ndarray = None
    last_detection: tuple = None    # (dp, s_star, score) of the latest step

    @property
    def box(self):
        return BoundingBox.from_center(self.center[0], self.center[1], self.size[0], self.size[1])


def _grid_side(n, cfg):
    D = int(np.floor(n / cfg.cell))
    if cfg.max_cells:
        D = min(D, cfg.max_cells)
    return max(D, 2)


def _features(frame, center, side, D, cfg, window, frame_index=-1):
    patch = extract_search_window(frame, center, max(side, 8), frame_index)
    patch = resize_bilinear(patch, D * cfg.cell)
    return extract_features(patch, default_table(), cfg.cell, window)


def target_mask(size, n, D):
    """Cells of the D x D grid whose centres fall inside the centred target box."""
    c = (np.arange(D) + 0.5) - D / 2
    half_w = size[0] * D / n / 2
    half_h = size[1] * D / n / 2
    cols = np.abs(c) < half_w
    rows = np.abs(c) < half_h
    if not cols.any():
        cols[D // 2] = True
    if not rows.any():
        rows[D // 2] = True
    return np.outer(rows, cols)


def init(frame, bbox, cfg=TrackerConfig()):
    if not isinstance(bbox, BoundingBox):
        bbox = BoundingBox(*bbox)
    frame = np.asarray(frame)
    H, W = frame.shape[:2]
    cx = float(np.clip(bbox.center[0], 0, W))
    cy = float(np.clip(bbox.center[1], 0, H))
    size = np.array([bbox.w, bbox.h], dtype=float)
    n = float((1 + cfg.padding) * np.sqrt(size[0] * size[1]))
    D = _grid_side(n, cfg)
    window = hann_window(D) if cfg.window == "hann" else None
    sigma = cfg.sigma_factor * np.sqrt(size[0] * size[1]) * D / n
    y = gaussian_label(D, sigma)
    X = _features(frame, (cx, cy), n, D, cfg, window, 0)
    mask = target_mask(size, n, D)
    try:
        theta = solver.init_first_frame(X, y, mask, cfg.solver)
    except NumericalFailure as exc:
        exc.frame = 0
        raise
    return TrackerState(np.array([cx, cy]), size, n, D, theta, 0, False, window, y)


def response(X, theta_model):
    """Channel-summed response of one feature tensor to the model filter."""
    return idft2(np.sum(dft2(X) * np.conj(theta_model.hat), axis=0))


def responses(state, frame, cfg):
    """Response maps for every scale of the pyramid, shape (S, D, D)."""
    out = np.empty((cfg.scales, state.D, state.D))
    for k, N in enumerate(cfg.exponents()):
        side = cfg.scale_factor ** N * state.n
        X = _features(frame, state.center, side, state.D, cfg, state.window)
        out[k] = response(X, state.theta_model)
    return out


def peak(f, D):
    """Arg-max of a response stack; first maximum wins (lowest scale, then index)."""
    k = int(np.argmax(f))
    s, row, col = np.unravel_index(k, f.shape)
    dp = (int(signed_shift(col, D)), int(signed_shift(row, D)))
    return dp, int(s) + 1, float(f.flat[k])


def detect(state, frame, cfg=TrackerConfig()):
    """Return ((dx, dy) cell offset, scale index in 1..S, peak score)."""
    return peak(responses(state, frame, cfg), state.D)


def apply_motion(state, dp, s_star, cfg=TrackerConfig()):
    if not 1 <= s_star <= cfg.scales:
        raise InvalidInputError(f"scale index {s_star} outside 1..{cfg.scales}")
    N = int(np.floor((2 * s_star - cfg.scales - 1) / 2))
    step = state.n / state.D
    center = state.center + step * np.asarray(dp, dtype=float)
    size = state.size * cfg.scale_factor ** N
    clamped = False
    if size.min() < MIN_TARGET_SIDE:
        size = size * (MIN_TARGET_SIDE / size.min())
        clamped = True
        log.warning("target size clamped to %.1f px at frame %d", MIN_TARGET_SIDE, state.frame_index)
    n = float((1 + cfg.padding) * np.sqrt(size[0] * size[1]))
    return replace(state, center=center, size=size, n=n, clamped=clamped)


def learn_at(state, frame, cfg, info=None):
    X = _features(frame, state.center, state.n, state.D, cfg, state.window, state.frame_index)
    try:
        return solver.learn(X, state.label, state.theta_model, cfg.solver, info)
    except NumericalFailure as exc:
        exc.frame = state.frame_index
        raise


def step(state, frame, cfg=TrackerConfig()):
    """Track one frame in place and return the new bounding box."""
    detection = detect(state, frame, cfg)
    moved = apply_motion(state, detection[0], detection[1], cfg)
    moved.frame_index = state.frame_index + 1
    moved.last_detection = detection
    theta = learn_at(moved, frame, cfg)
    moved.theta_model = solver.update_model(moved.theta_model, theta, cfg.solver.alpha)
    state.__dict__.update(moved.__dict__)
    return state.box


class Tracker:
    """Convenience wrapper holding one sequence's state."""

    def __init__(self, cfg=None):
        self.cfg = cfg or TrackerConfig()
        self.state = None

    def init(self, frame, bbox):
        self.state = init(frame, bbox, self.cfg)
        return self.state.box

    def update(self, frame):
        return step(self.state, frame, self.cfg)
