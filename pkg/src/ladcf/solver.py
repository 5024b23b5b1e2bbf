"""ADMM learning of group-sparse, temporally anchored correlation filters.

Spatial filters are arrays of shape (L, D, D); the group at spatial location
j is the length-L vector ``theta[:, j]``.  Frequency-domain filters are the
per-channel 2-D DFTs of those arrays.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, NumericalFailure, ShapeError
from .spectral import dft2, idft2

GROUP_NORM_EPS = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    lambda1: float = 1.0
    lambda2: float = 15.0
    mu0: float = 1.0
    mu_max: float = 20.0
    rho: float = 5.0
    K: int = 2
    r: float = 0.05
    alpha: float = 0.95
    # False relaxes the lambda ordering/positivity rules (ablations only)
    strict: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if not self.strict:
            if self.lambda1 < 0 or self.lambda2 < 0:
                raise InvalidInputError("lambda1 and lambda2 must be non-negative")
        elif not self.lambda1 > 0 or not self.lambda2 > 0:
            raise InvalidInputError("lambda1 and lambda2 must be positive")
        if self.strict and not self.lambda1 < self.lambda2:
            raise InvalidInputError("lambda1 must be smaller than lambda2")
        if not self.mu0 > 0:
            raise InvalidInputError("mu0 must be positive")
        if not self.rho > 1:
            raise InvalidInputError("rho must exceed 1")
        if not self.mu_max >= self.mu0:
            raise InvalidInputError("mu_max must be >= mu0")
        if int(self.K) != self.K or self.K < 1:
            raise InvalidInputError("K must be a positive integer")
        if not 0 < self.r <= 1:
            raise InvalidInputError("r must lie in (0, 1]")
        if not 0 <= self.alpha <= 1:
            raise InvalidInputError("alpha must lie in [0, 1]")


@dataclass
class SpectralFilter:
    """Per-channel DFT of a real spatial filter, shape (L, D, D)."""

    hat: np.ndarray

    @classmethod
    def from_spatial(cls, theta):
        return cls(dft2(np.asarray(theta, dtype=float)))

    def spatial(self):
        return idft2(self.hat)

    @property
    def channels(self):
        return self.hat.shape[0]

    @property
    def size(self):
        return self.hat.shape[-1]

    def copy(self):
        return SpectralFilter(self.hat.copy())


@dataclass
class SelectionMask:
    phi: np.ndarray  # boolean (D, D)

    @property
    def M(self):
        return int(self.phi.sum())


@dataclass
class LearnInfo:
    mus: list = field(default_factory=list)
    primal_residuals: list = field(default_factory=list)
    theta: np.ndarray = None        # last spatial theta, before selection
    theta_prime: np.ndarray = None
    mask: SelectionMask = None


def selection_count(D, r):
    return max(1, int(np.floor(D * D * r + 0.5)))


def update_theta(Xhat, yhat, model_hat, theta_prime_hat, eta_hat, mu, lambda2):
    """Closed-form frequency-domain minimizer, element-wise per channel and bin."""
    num = Xhat * np.conj(yhat) + lambda2 * model_hat + 0.5 * mu * theta_prime_hat - 0.5 * eta_hat
    den = (Xhat * np.conj(Xhat)).real + lambda2 + 0.5 * mu
    return num / den


def group_norms(planes):
    return np.sqrt(np.sum(np.square(planes), axis=0))


def update_theta_prime(theta, eta, mu, lambda1):
    """Group soft threshold of g = theta + eta/mu across the channel axis."""
    g = theta + eta / mu
    norms = group_norms(g)
    scale = np.zeros_like(norms)
    nz = norms > GROUP_NORM_EPS
    scale[nz] = np.maximum(0.0, 1.0 - lambda1 / (mu * norms[nz]))
    return g * scale


def update_multiplier(eta, theta, theta_prime, mu):
    return eta + mu * (theta - theta_prime)


def select_top_m(theta, r):
    """Zero all but the M = round(D^2 r) spatial groups of largest l2 norm.

    Ties go to the lower linear index.
    """
    if not 0 < r <= 1:
        raise InvalidInputError("r must lie in (0, 1]")
    theta = np.asarray(theta, dtype=float)
    D0, D1 = theta.shape[-2:]
    M = max(1, int(np.floor(D0 * D1 * r + 0.5)))
    norms = group_norms(theta).ravel()
    # stable sort on -norm keeps lower indices first among equals
    order = np.argsort(-norms, kind="stable")
    phi = np.zeros(D0 * D1, dtype=bool)
    phi[order[:M]] = True
    phi = phi.reshape(D0, D1)
    return theta * phi, SelectionMask(phi)


def update_model(theta_model, theta, alpha):
    if not 0 <= alpha <= 1:
        raise InvalidInputError("alpha must lie in [0, 1]")
    if alpha == 0:
        return theta_model.copy()
    if alpha == 1:
        return theta.copy()
    return SpectralFilter((1 - alpha) * theta_model.hat + alpha * theta.hat)


def _check_grid(X, y, shape=None):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 3:
        raise ShapeError(f"features must have shape (L, D, D), got {X.shape}")
    if y.shape != X.shape[1:]:
        raise ShapeError(f"label grid {y.shape} does not match features {X.shape[1:]}")
    if shape is not None and shape != X.shape:
        raise ShapeError(f"filter grid {shape} does not match features {X.shape}")
    return X, y


def _admm(X, y, model_hat, theta_prime, lambda2, cfg, project, info):
    Xhat = dft2(X)
    yhat = dft2(y)
    eta = np.zeros_like(X)
    mu = cfg.mu0
    theta = None
    for k in range(int(cfg.K)):
        info.mus.append(mu)
        # one transform carries both the consensus and multiplier terms
        rhs_hat = dft2(0.5 * mu * theta_prime - 0.5 * eta)
        num = Xhat * np.conj(yhat) + lambda2 * model_hat + rhs_hat
        den = (Xhat * np.conj(Xhat)).real + lambda2 + 0.5 * mu
        theta = idft2(num / den, check=False)
        theta_prime = project(theta, eta, mu)
        eta = update_multiplier(eta, theta, theta_prime, mu)
        if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(eta))):
            raise NumericalFailure("non-finite ADMM iterate", iteration=k)
        info.primal_residuals.append(float(np.linalg.norm(theta - theta_prime)))
        mu = min(cfg.rho * mu, cfg.mu_max)
    info.theta = theta
    info.theta_prime = theta_prime
    return theta


def learn(X, y, theta_model, cfg, info=None):
    """Run K ADMM iterations and keep the M strongest spatial groups.

    ``info``, when given, is filled with the penalty sequence, primal
    residuals, the unselected iterate and the selection mask.
    """
    X, y = _check_grid(X, y, theta_model.hat.shape)
    if not np.all(np.isfinite(theta_model.hat)):
        raise InvalidInputError("theta_model contains non-finite values")
    info = info if info is not None else LearnInfo()

    def shrink(theta, eta, mu):
        return update_theta_prime(theta, eta, mu, cfg.lambda1)

    theta = _admm(X, y, theta_model.hat, theta_model.spatial(), cfg.lambda2, cfg, shrink, info)
    theta, mask = select_top_m(theta, cfg.r)
    info.mask = mask
    return SpectralFilter(dft2(theta))


def init_first_frame(X, y, target_mask, cfg, info=None):
    """First-frame learning with a hard spatial mask in place of shrinkage.

    No temporal model exists yet, so the anchoring term is dropped.  The
    returned filter is supported on the mask only.
    """
    X, y = _check_grid(X, y)
    phi = np.asarray(target_mask.phi if isinstance(target_mask, SelectionMask) else target_mask, dtype=bool)
    if phi.shape != X.shape[1:]:
        raise ShapeError(f"mask grid {phi.shape} does not match features {X.shape[1:]}")
    if not phi.any():
        raise InvalidInputError("target mask is empty")
    info = info if info is not None else LearnInfo()

    def project(theta, eta, mu):
        return (theta + eta / mu) * phi

    zero = np.zeros(X.shape, dtype=complex)
    theta = _admm(X, y, zero, np.zeros_like(X), 0.0, cfg, project, info)
    info.mask = SelectionMask(phi.copy())
    return SpectralFilter(dft2(theta * phi))


def objective(theta, X, y, theta_model, lambda1, lambda2):
    """Multi-channel objective h(theta) evaluated through the frequency domain.

    theta and theta_model are spatial (L, D, D) arrays.
    """
    resp = idft2(np.conj(dft2(theta)) * dft2(X))
    data = np.sum((resp - y) ** 2)
    sparse = np.sum(group_norms(theta))
    temporal = np.sum((theta - theta_model) ** 2)
    return float(data + lambda1 * sparse + lambda2 * temporal)
