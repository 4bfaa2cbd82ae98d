"""Finite-domain bandit environments, noise schedules and regret bookkeeping."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InputError
from .kernels import KernelSpec, as_points
from .rkhs import RkhsFunction, make_function, sample_function

# noise draws are generated in blocks keyed by (seed, block index)
_NOISE_BLOCK = 1024


# -- noise schedules ----------------------------------------------------------

class NoiseSchedule:
    """Variance proxy ``rho_t^2`` as a function of the 1-based step ``t``."""

    kind = ""

    def rho2(self, t: int) -> float:
        raise NotImplementedError

    def rho2_range(self, start: int, stop: int) -> np.ndarray:
        """``rho_t^2`` for ``t`` in ``[start, stop]`` (inclusive)."""
        return np.array([self.rho2(t) for t in range(start, stop + 1)], dtype=float)

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Noiseless(NoiseSchedule):
    kind = "noiseless"

    def rho2(self, t):
        _check_step(t)
        return 0.0

    def rho2_range(self, start, stop):
        return np.zeros(max(stop - start + 1, 0))

    def to_dict(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class Stationary(NoiseSchedule):
    rho2_value: float
    kind = "stationary"

    def __post_init__(self):
        if not self.rho2_value >= 0:
            raise InputError("stationary rho2 must be >= 0")

    def rho2(self, t):
        _check_step(t)
        return float(self.rho2_value)

    def rho2_range(self, start, stop):
        return np.full(max(stop - start + 1, 0), float(self.rho2_value))

    def to_dict(self):
        return {"kind": self.kind, "rho2": self.rho2_value}


@dataclass(frozen=True)
class PowerDecay(NoiseSchedule):
    """``rho_t^2 = c * t^-p``."""

    c: float
    p: float
    kind = "power"

    def __post_init__(self):
        if not self.c > 0 or not self.p >= 0:
            raise InputError("power schedule needs c > 0 and p >= 0")

    def rho2(self, t):
        _check_step(t)
        return float(self.c * float(t) ** (-self.p))

    def rho2_range(self, start, stop):
        t = np.arange(start, stop + 1, dtype=float)
        return self.c * t ** (-self.p)

    def to_dict(self):
        return {"kind": self.kind, "c": self.c, "p": self.p}


@dataclass(frozen=True)
class Explicit(NoiseSchedule):
    rho2_seq: tuple
    kind = "explicit"

    def __post_init__(self):
        seq = tuple(float(v) for v in self.rho2_seq)
        if any(not (v >= 0 and math.isfinite(v)) for v in seq):
            raise InputError("explicit rho2 values must be finite and >= 0")
        object.__setattr__(self, "rho2_seq", seq)

    def rho2(self, t):
        _check_step(t)
        if t > len(self.rho2_seq):
            raise InputError(f"explicit schedule has {len(self.rho2_seq)} steps, asked for {t}")
        return self.rho2_seq[t - 1]

    def to_dict(self):
        return {"kind": self.kind, "rho2": list(self.rho2_seq)}


def _check_step(t):
    if t < 1:
        raise InputError(f"steps are 1-based, got t={t}")


def cumulative_variance(schedule: NoiseSchedule, T: int, start: int = 1) -> float:
    """``V = sum of rho_t^2`` over ``t`` in ``[start, start + T - 1]``."""
    if T < 1:
        raise InputError("T must be >= 1")
    if isinstance(schedule, Explicit) and start + T - 1 > len(schedule.rho2_seq):
        raise InputError(
            f"explicit schedule has {len(schedule.rho2_seq)} steps, need {start + T - 1}"
        )
    return float(math.fsum(schedule.rho2_range(start, start + T - 1)))


def schedule_from_dict(cfg) -> NoiseSchedule:
    kind = cfg.get("kind")
    try:
        if kind == "noiseless":
            return Noiseless()
        if kind == "stationary":
            return Stationary(float(cfg["rho2"]))
        if kind == "power":
            return PowerDecay(float(cfg["c"]), float(cfg["p"]))
        if kind == "explicit":
            return Explicit(tuple(cfg["rho2"]))
    except KeyError as exc:
        raise ConfigError([f"noise.{exc.args[0]}"]) from None
    raise ConfigError(["noise.kind"], f"unknown noise kind {kind!r}")


# -- domains --------------------------------------------------------------------

def grid_domain(dims) -> np.ndarray:
    """Axis-aligned grid over ``[0, 1]^d`` with ``dims[i]`` points on axis ``i``."""
    dims = [int(n) for n in dims]
    if not dims or any(n < 1 for n in dims):
        raise InputError(f"grid dims must be positive, got {dims}")
    axes = [np.linspace(0.0, 1.0, n) for n in dims]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)


def domain_from_dict(cfg) -> np.ndarray:
    if "grid" in cfg:
        return grid_domain(cfg["grid"]["dims"])
    if "points" in cfg:
        return as_points(cfg["points"])
    raise ConfigError(["domain"], "domain needs 'grid' or 'points'")


# -- environment ----------------------------------------------------------------

class BanditEnv:
    """Finite-domain bandit with Gaussian noise of variance ``rho_t^2``.

    The noise draw at step ``t`` depends only on ``(seed, t)``, never on the
    queried point, so different algorithms replayed on the same environment
    see identical noise at identical step indices.
    """

    def __init__(self, domain, f: RkhsFunction, schedule: NoiseSchedule, seed: int = 0):
        self.domain = as_points(domain)
        if self.domain.shape[0] < 2:
            raise InputError("domain needs at least 2 points")
        self.f = f
        self.schedule = schedule
        self.seed = int(seed)
        self.f_values = f(self.domain)
        self.xstar = int(np.argmax(self.f_values))
        self.fstar = float(self.f_values[self.xstar])
        self._noise_blocks = {}

    @property
    def kernel(self) -> KernelSpec:
        return self.f.kernel

    @property
    def size(self) -> int:
        return self.domain.shape[0]

    def with_seed(self, seed: int) -> "BanditEnv":
        """Same instance, fresh noise stream."""
        return BanditEnv(self.domain, self.f, self.schedule, seed)

    def standard_noise(self, t: int) -> float:
        _check_step(t)
        block, offset = divmod(t - 1, _NOISE_BLOCK)
        draws = self._noise_blocks.get(block)
        if draws is None:
            rng = np.random.default_rng([self.seed, block])
            draws = rng.standard_normal(_NOISE_BLOCK)
            self._noise_blocks[block] = draws
        return float(draws[offset])

    def index_of(self, x) -> int:
        if isinstance(x, (int, np.integer)):
            if not 0 <= x < self.size:
                raise InputError(f"domain index {x} out of range")
            return int(x)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        hits = np.flatnonzero(np.all(self.domain == x[None, :], axis=1))
        if hits.size == 0:
            raise InputError(f"point {x.tolist()} is not in the domain")
        return int(hits[0])

    def observe(self, t: int, x):
        """Return ``(y_t, rho_t^2)`` for a domain point or index ``x``."""
        i = self.index_of(x)
        rho2 = self.schedule.rho2(t)
        eps = self.standard_noise(t)
        y = float(self.f_values[i]) + math.sqrt(rho2) * eps if rho2 > 0 else float(self.f_values[i])
        return y, rho2

    def gap(self, i) -> float:
        return self.fstar - float(self.f_values[i])

    def to_dict(self):
        return {
            "domain": {"points": self.domain.tolist()},
            "function": self.f.to_dict(),
            "noise": self.schedule.to_dict(),
            "seed": self.seed,
            "xstar": self.xstar,
            "fstar": self.fstar,
        }


def env_from_dict(cfg, kernel: KernelSpec | None = None, seed: int | None = None) -> BanditEnv:
    """Build an environment from its JSON config.

    A sampled function uses ``function.sample.seed`` if present, otherwise the
    config's ``seed``; ``seed`` (or the override) also keys the noise stream.
    """
    missing = [k for k in ("domain", "function", "noise") if k not in cfg]
    if kernel is None and "kernel" not in cfg:
        missing.append("kernel")
    if missing:
        raise ConfigError(missing)
    if kernel is None:
        kernel = KernelSpec.from_dict(cfg["kernel"])
    domain = domain_from_dict(cfg["domain"])
    base_seed = int(cfg.get("seed", 0))
    fcfg = cfg["function"]
    if "sample" in fcfg:
        s = fcfg["sample"]
        bad = [f"function.sample.{k}" for k in ("m", "B") if k not in s]
        if bad:
            raise ConfigError(bad)
        rng = np.random.default_rng(int(s.get("seed", base_seed)))
        f = sample_function(rng, kernel, int(s["m"]), float(s["B"]), domain)
    elif "centers" in fcfg and "coeffs" in fcfg:
        f = make_function(kernel, fcfg["centers"], fcfg["coeffs"])
    else:
        raise ConfigError(["function"], "function needs 'sample' or 'centers'+'coeffs'")
    schedule = schedule_from_dict(cfg["noise"])
    return BanditEnv(domain, f, schedule, base_seed if seed is None else seed)


# -- regret records ---------------------------------------------------------------

CSV_COLUMNS = ("t", "x_index", "y", "rho2", "lambda2", "sigma_max",
               "instant_regret", "cumulative_regret")


@dataclass
class RunRecord:
    """Per-step log of one run plus its final recommendation."""

    t: np.ndarray
    x_index: np.ndarray
    y: np.ndarray
    rho2: np.ndarray
    lambda2: np.ndarray
    sigma_max: np.ndarray
    instant_regret: np.ndarray
    cumulative_regret: np.ndarray
    recommendation: int
    simple_regret: float
    meta: dict = field(default_factory=dict)

    @property
    def steps(self) -> int:
        return int(self.t.shape[0])

    @property
    def R_T(self) -> float:
        return float(self.cumulative_regret[-1]) if self.steps else 0.0

    @property
    def r_T(self) -> float:
        return self.simple_regret

    def rows(self):
        for i in range(self.steps):
            yield tuple(getattr(self, c)[i] for c in CSV_COLUMNS)

    def summary(self):
        return {
            "steps": self.steps,
            "R_T": self.R_T,
            "r_T": self.r_T,
            "recommendation": self.recommendation,
            "V_T": float(math.fsum(self.rho2)),
            "first_duplicate_step": self.meta.get("first_duplicate_step"),
        }


def regret_accumulate(env: BanditEnv, chosen, recommendation, *, y=None, rho2=None,
                      lambda2=None, sigma_max=None, meta=None) -> RunRecord:
    """Exact regrets of a chosen index sequence against the cached optimum.

    Regret is measured on ``f``; observation noise never enters it.
    """
    chosen = np.asarray([env.index_of(int(i)) for i in chosen], dtype=int)
    n = chosen.shape[0]
    rec = env.index_of(int(recommendation))
    inst = env.fstar - env.f_values[chosen]

    def col(v):
        return np.zeros(n) if v is None else np.asarray(v, dtype=float)

    return RunRecord(
        t=np.arange(1, n + 1),
        x_index=chosen,
        y=col(y),
        rho2=col(rho2),
        lambda2=col(lambda2),
        sigma_max=col(sigma_max),
        instant_regret=inst,
        cumulative_regret=np.cumsum(inst),
        recommendation=rec,
        simple_regret=env.fstar - float(env.f_values[rec]),
        meta=dict(meta or {}),
    )
