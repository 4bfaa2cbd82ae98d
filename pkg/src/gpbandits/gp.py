"""Heteroscedastic GP posterior with incremental (bordered) Cholesky updates.

The posterior is computed on ``K(X, X) + diag(noise_vars) + JITTER * I``.
The fixed jitter keeps the noiseless case well posed, including repeated
inputs, without any branching in the callers.

A :class:`PosteriorState` can optionally cache a finite *domain*: it then
maintains ``V = L^{-1} K(X, domain)`` row by row, so posterior means and
variances over the whole domain cost O(n * |domain|) per step instead of a
triangular solve per query.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import InputError, NumericalError
from .kernels import KernelSpec, as_points, cross_kernel

JITTER = 1e-10
# raw variances below this are a bug, not rounding
_VAR_FLOOR = -1e-9


@dataclass(frozen=True)
class Observation:
    x: np.ndarray
    y: float
    noise_var: float

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        object.__setattr__(self, "x", x)
        if not math.isfinite(self.y):
            raise InputError(f"observation y must be finite, got {self.y!r}")
        if not (self.noise_var >= 0 and math.isfinite(self.noise_var)):
            raise InputError(f"noise_var must be >= 0, got {self.noise_var!r}")


class PosteriorState:
    """GP posterior over a growing dataset.

    ``update`` mutates the state in place and returns it; use :func:`update`
    for the copy-on-update behaviour.
    """

    def __init__(self, kernel: KernelSpec, domain=None, jitter: float = JITTER,
                 capacity: int = 32):
        self.kernel = kernel
        self.jitter = float(jitter)
        self.n = 0
        self.last_var = None
        self.domain = None if domain is None else as_points(domain)
        self._dim = None if self.domain is None else self.domain.shape[1]
        self._cap = max(int(capacity), 1)
        self._X = None
        self._y = np.zeros(self._cap)
        self._noise = np.zeros(self._cap)
        self._L = np.zeros((self._cap, self._cap))
        self._z = np.zeros(self._cap)
        if self.domain is not None:
            m = self.domain.shape[0]
            self._V = np.zeros((self._cap, m))
            self._var = np.ones(m)
        if self._dim is not None:
            self._X = np.zeros((self._cap, self._dim))

    # -- construction -------------------------------------------------------

    @classmethod
    def from_data(cls, kernel, X, y, noise_vars, domain=None, jitter=JITTER):
        """Build a state with one dense factorisation instead of n updates."""
        X = as_points(X)
        y = np.asarray(y, dtype=float)
        noise_vars = np.asarray(noise_vars, dtype=float)
        n = X.shape[0]
        if y.shape != (n,) or noise_vars.shape != (n,):
            raise InputError("X, y and noise_vars must have matching lengths")
        state = cls(kernel, domain=domain, jitter=jitter, capacity=max(n, 1))
        if state._dim is None:
            state._dim = X.shape[1]
            state._X = np.zeros((state._cap, state._dim))
        elif state._dim != X.shape[1]:
            raise InputError("data and domain dimensions differ")
        if n == 0:
            return state
        A = cross_kernel(kernel, X, X) + np.diag(noise_vars) + jitter * np.eye(n)
        try:
            L = np.linalg.cholesky(A)
        except np.linalg.LinAlgError:
            raise NumericalError(-1, float("nan")) from None
        state._X[:n] = X
        state._y[:n] = y
        state._noise[:n] = noise_vars
        state._L[:n, :n] = L
        state._z[:n] = solve_triangular(L, y, lower=True)
        state.n = n
        if state.domain is not None:
            V = solve_triangular(L, cross_kernel(kernel, X, state.domain), lower=True)
            state._V[:n] = V
            state._var = 1.0 - np.sum(V * V, axis=0)
        return state

    def copy(self) -> "PosteriorState":
        new = PosteriorState.__new__(PosteriorState)
        new.__dict__.update(self.__dict__)
        for name in ("_X", "_y", "_noise", "_L", "_z", "_V", "_var"):
            if getattr(self, name, None) is not None:
                setattr(new, name, getattr(self, name).copy())
        return new

    def _grow(self):
        cap = self._cap * 2
        n = self.n

        def grow(a, shape):
            out = np.zeros(shape)
            out[tuple(slice(0, s) for s in a.shape)] = a
            return out

        self._X = grow(self._X, (cap, self._dim))
        self._y = grow(self._y, (cap,))
        self._noise = grow(self._noise, (cap,))
        L = np.zeros((cap, cap))
        L[:n, :n] = self._L[:n, :n]
        self._L = L
        self._z = grow(self._z, (cap,))
        if self.domain is not None:
            self._V = grow(self._V, (cap, self._V.shape[1]))
        self._cap = cap

    # -- updates ------------------------------------------------------------

    def update(self, x, y: float, noise_var: float, domain_index: int | None = None):
        """Append one observation by bordering the Cholesky factor.

        ``domain_index`` lets callers that pick ``x`` from the cached domain
        reuse the cached column of ``V`` instead of a triangular solve.
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = float(y)
        noise_var = float(noise_var)
        if not math.isfinite(y):
            raise InputError(f"observation y must be finite, got {y!r}")
        if not (noise_var >= 0 and math.isfinite(noise_var)):
            raise InputError(f"noise_var must be >= 0, got {noise_var!r}")
        if self._dim is None:
            self._dim = x.shape[0]
            self._X = np.zeros((self._cap, self._dim))
        if x.shape != (self._dim,):
            raise InputError(f"point has shape {x.shape}, expected ({self._dim},)")
        if self.n == self._cap:
            self._grow()
        n = self.n
        if n == 0:
            l = np.zeros(0)
        elif domain_index is not None and self.domain is not None:
            l = self._V[:n, domain_index]
        else:
            kx = cross_kernel(self.kernel, self._X[:n], x[None, :])[:, 0]
            l = solve_triangular(self._L[:n, :n], kx, lower=True, check_finite=False)
        raw_var = 1.0 - float(l @ l)
        pivot2 = raw_var + noise_var + self.jitter
        if not pivot2 > 0.0:
            raise NumericalError(n, pivot2)
        d = math.sqrt(pivot2)
        self._L[n, :n] = l
        self._L[n, n] = d
        self._z[n] = (y - float(l @ self._z[:n])) / d
        if self.domain is not None:
            kd = cross_kernel(self.kernel, x[None, :], self.domain)[0]
            row = (kd - l @ self._V[:n]) / d
            self._V[n] = row
            self._var -= row * row
        self._X[n] = x
        self._y[n] = y
        self._noise[n] = noise_var
        # prior-to-update variance at x, used by information-gain chains
        self.last_var = max(raw_var, 0.0)
        self.n = n + 1
        return self

    # -- read access --------------------------------------------------------

    @property
    def X(self):
        if self._X is None:
            return np.zeros((0, 0))
        return self._X[: self.n].copy()

    @property
    def y(self):
        return self._y[: self.n].copy()

    @property
    def noise_vars(self):
        return self._noise[: self.n].copy()

    @property
    def observations(self):
        return [Observation(self._X[i].copy(), float(self._y[i]), float(self._noise[i]))
                for i in range(self.n)]

    @property
    def chol(self):
        return self._L[: self.n, : self.n].copy()

    @property
    def weights(self):
        """Solution ``w`` of ``(K + Sigma + jitter I) w = y``."""
        if self.n == 0:
            return np.zeros(0)
        return solve_triangular(self._L[: self.n, : self.n].T, self._z[: self.n],
                                lower=False)

    def _project(self, Xq):
        Xq = as_points(Xq)
        if self._dim is not None and Xq.shape[1] != self._dim:
            raise InputError(f"query dimension {Xq.shape[1]} != {self._dim}")
        Kq = cross_kernel(self.kernel, self._X[: self.n], Xq)
        return solve_triangular(self._L[: self.n, : self.n], Kq, lower=True,
                                check_finite=False)

    def mean(self, Xq) -> np.ndarray:
        """Posterior mean at each row of ``Xq``."""
        if self.n == 0:
            return np.zeros(as_points(Xq).shape[0])
        return self._project(Xq).T @ self._z[: self.n]

    def var(self, Xq) -> np.ndarray:
        """Posterior variance at each row of ``Xq``, clamped at zero."""
        if self.n == 0:
            return np.ones(as_points(Xq).shape[0])
        V = self._project(Xq)
        return _clamp(1.0 - np.sum(V * V, axis=0))

    def mean_var(self, Xq):
        if self.n == 0:
            m = as_points(Xq).shape[0]
            return np.zeros(m), np.ones(m)
        V = self._project(Xq)
        return V.T @ self._z[: self.n], _clamp(1.0 - np.sum(V * V, axis=0))

    def domain_mean(self) -> np.ndarray:
        self._require_domain()
        if self.n == 0:
            return np.zeros(self.domain.shape[0])
        return self._V[: self.n].T @ self._z[: self.n]

    def domain_mean_given(self, y) -> np.ndarray:
        """Domain posterior mean if the stored inputs had observed ``y`` instead.

        The variance does not depend on ``y``, so this reuses the factor.
        """
        self._require_domain()
        y = np.asarray(y, dtype=float)
        if y.shape != (self.n,):
            raise InputError(f"need {self.n} observations, got shape {y.shape}")
        if self.n == 0:
            return np.zeros(self.domain.shape[0])
        z = solve_triangular(self._L[: self.n, : self.n], y, lower=True, check_finite=False)
        return self._V[: self.n].T @ z

    def domain_var(self) -> np.ndarray:
        self._require_domain()
        return _clamp(self._var)

    def _require_domain(self):
        if self.domain is None:
            raise InputError("state was built without a cached domain")


def _clamp(raw):
    assert np.all(raw >= _VAR_FLOOR), f"posterior variance {raw.min()} below floor"
    return np.maximum(raw, 0.0)


def empty_posterior(kernel: KernelSpec, domain=None) -> PosteriorState:
    return PosteriorState(kernel, domain=domain)


def update(state: PosteriorState, obs: Observation) -> PosteriorState:
    """Return a new state with ``obs`` appended; ``state`` is left untouched."""
    return state.copy().update(obs.x, obs.y, obs.noise_var)


def posterior_mean(state: PosteriorState, x) -> float:
    return float(state.mean(np.atleast_1d(np.asarray(x, dtype=float))[None, :])[0])


def posterior_var(state: PosteriorState, x) -> float:
    return float(state.var(np.atleast_1d(np.asarray(x, dtype=float))[None, :])[0])
