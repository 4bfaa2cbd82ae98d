"""Stationary kernels: squared exponential and half-integer Matérn.

Every kernel here is normalised so that ``k(x, x) == 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InputError

SE = "se"
MATERN = "matern"
MATERN_SMOOTHNESS = (0.5, 1.5, 2.5)


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family with its hyperparameters.

    ``smoothness`` is only meaningful for the Matérn family and must be one
    of 1/2, 3/2 or 5/2.
    """

    family: str = SE
    lengthscale: float = 1.0
    smoothness: float | None = None

    def __post_init__(self):
        family = str(self.family).lower()
        object.__setattr__(self, "family", family)
        if family not in (SE, MATERN):
            raise InputError(f"unknown kernel family {self.family!r}")
        if not (self.lengthscale > 0 and math.isfinite(self.lengthscale)):
            raise InputError(f"lengthscale must be positive, got {self.lengthscale!r}")
        object.__setattr__(self, "lengthscale", float(self.lengthscale))
        if family == MATERN:
            if self.smoothness is None or float(self.smoothness) not in MATERN_SMOOTHNESS:
                raise InputError(
                    f"Matern smoothness must be one of {MATERN_SMOOTHNESS}, "
                    f"got {self.smoothness!r}"
                )
            object.__setattr__(self, "smoothness", float(self.smoothness))
        else:
            object.__setattr__(self, "smoothness", None)

    def profile(self, r):
        """Kernel value as a function of Euclidean distance ``r``."""
        r = np.asarray(r, dtype=float)
        ell = self.lengthscale
        if self.family == SE:
            return np.exp(-(r * r) / (2.0 * ell * ell))
        nu = self.smoothness
        z = math.sqrt(2.0 * nu) * r / ell
        if nu == 0.5:
            return np.exp(-z)
        if nu == 1.5:
            return (1.0 + z) * np.exp(-z)
        return (1.0 + z + z * z / 3.0) * np.exp(-z)

    def to_dict(self):
        out = {"family": self.family, "lengthscale": self.lengthscale}
        if self.family == MATERN:
            out["smoothness"] = self.smoothness
        return out

    @classmethod
    def from_dict(cls, cfg):
        try:
            return cls(
                family=cfg["family"],
                lengthscale=cfg["lengthscale"],
                smoothness=cfg.get("smoothness"),
            )
        except KeyError as exc:
            raise ConfigError([f"kernel.{exc.args[0]}"]) from None


def as_points(X):
    """Coerce ``X`` to a float array of shape (n, d)."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[1] < 1:
        raise InputError(f"expected points of shape (n, d), got {X.shape}")
    return X


def kernel_eval(spec: KernelSpec, x, x2) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    x2 = np.atleast_1d(np.asarray(x2, dtype=float))
    if x.shape != x2.shape or x.ndim != 1:
        raise InputError(f"dimension mismatch: {x.shape} vs {x2.shape}")
    diff = x - x2
    r = math.sqrt(float(np.sum(diff * diff)))
    return float(spec.profile(r))


def distances(X, X2):
    """Pairwise Euclidean distances between rows of ``X`` and ``X2``."""
    if X.shape[1] != X2.shape[1]:
        raise InputError(f"dimension mismatch: {X.shape[1]} vs {X2.shape[1]}")
    diff = X[:, None, :] - X2[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def cross_kernel(spec: KernelSpec, X, X2) -> np.ndarray:
    """Matrix ``[k(X[i], X2[j])]``."""
    return spec.profile(distances(as_points(X), as_points(X2)))


def gram_matrix(spec: KernelSpec, X) -> np.ndarray:
    X = as_points(X)
    if X.shape[0] < 1:
        raise InputError("gram_matrix needs at least one point")
    return spec.profile(distances(X, X))
