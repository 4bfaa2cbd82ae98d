"""Reward functions as finite kernel expansions ``f(x) = sum_i a_i k(x, c_i)``.

The RKHS norm of such an expansion is ``sqrt(a^T K(C, C) a)``, computed
exactly, which is what makes these the ground truth for every experiment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .kernels import KernelSpec, as_points, cross_kernel, gram_matrix


@dataclass(frozen=True, eq=False)
class RkhsFunction:
    kernel: KernelSpec
    centers: np.ndarray
    coeffs: np.ndarray
    norm: float

    def __call__(self, X) -> np.ndarray:
        """Evaluate at every row of ``X``."""
        X = as_points(X)
        if X.shape[1] != self.centers.shape[1]:
            raise InputError(
                f"point dimension {X.shape[1]} != center dimension {self.centers.shape[1]}"
            )
        return cross_kernel(self.kernel, X, self.centers) @ self.coeffs

    def to_dict(self):
        return {
            "kernel": self.kernel.to_dict(),
            "centers": self.centers.tolist(),
            "coeffs": self.coeffs.tolist(),
        }

    @classmethod
    def from_dict(cls, cfg, kernel=None):
        if kernel is None:
            kernel = KernelSpec.from_dict(cfg["kernel"])
        return make_function(kernel, cfg["centers"], cfg["coeffs"])


def make_function(kernel: KernelSpec, centers, coeffs) -> RkhsFunction:
    centers = as_points(centers)
    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=float))
    if coeffs.ndim != 1 or coeffs.shape[0] != centers.shape[0] or coeffs.shape[0] < 1:
        raise InputError(
            f"{centers.shape[0]} centers but coefficient shape {coeffs.shape}"
        )
    sq = float(coeffs @ gram_matrix(kernel, centers) @ coeffs)
    return RkhsFunction(kernel, centers, coeffs, math.sqrt(max(sq, 0.0)))


def evaluate(f: RkhsFunction, x) -> float:
    """Value at a single point."""
    return float(f(np.atleast_1d(np.asarray(x, dtype=float))[None, :])[0])


def scale_to_norm(f: RkhsFunction, target: float) -> RkhsFunction:
    if not target > 0:
        raise InputError(f"target norm must be positive, got {target!r}")
    if not f.norm > 0:
        raise InputError("cannot rescale a zero-norm function")
    c = target / f.norm
    coeffs = f.coeffs * c
    # norm scales linearly, so set it directly rather than re-deriving it
    return RkhsFunction(f.kernel, f.centers, coeffs, float(target))


def sample_function(rng: np.random.Generator, kernel: KernelSpec, m: int, B: float,
                    domain) -> RkhsFunction:
    """Random expansion over ``m`` distinct domain points, rescaled to norm ``B``."""
    domain = as_points(domain)
    if m < 1:
        raise InputError("m must be >= 1")
    if m > domain.shape[0]:
        raise InputError(f"m={m} exceeds domain size {domain.shape[0]}")
    idx = rng.choice(domain.shape[0], size=m, replace=False)
    coeffs = rng.standard_normal(m)
    f = make_function(kernel, domain[np.sort(idx)], coeffs)
    return scale_to_norm(f, B)
