"""Variance-reduction, phased-elimination and UCB bandit algorithms.

Every ``beta_*`` function returns the *square root* of the confidence
parameter, i.e. the multiplier of the posterior standard deviation in
``mu +/- beta^{1/2} sigma``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .envs import BanditEnv, RunRecord, regret_accumulate
from .errors import ConfigError, InputError
from .gp import PosteriorState
from .infogain import greedy_mig_bracket

DEFAULT_N1 = 8


# -- confidence widths ------------------------------------------------------------

def _check_delta(delta):
    if not 0.0 < delta < 1.0:
        raise InputError(f"delta must lie in (0, 1), got {delta!r}")


def _batch_log_term(domain_size, delta, horizon):
    _check_delta(delta)
    if domain_size < 1 or horizon < 1:
        raise InputError("domain_size and horizon must be >= 1")
    return math.sqrt(2.0 * math.log(2.0 * domain_size * (1.0 + math.log2(horizon)) / delta))


def beta_noiseless(B: float) -> float:
    if not B > 0:
        raise InputError("B must be positive")
    return float(B)


def beta_noisy_pe(B, rho, lambda2, domain_size, delta, horizon) -> float:
    """``(B + rho / lambda) * sqrt(2 ln(2|X|(1 + log2 T) / delta))``."""
    if not lambda2 > 0:
        raise InputError("lambda2 must be positive for the noisy width")
    if B < 0 or rho < 0:
        raise InputError("B and rho must be non-negative")
    return (B + rho / math.sqrt(lambda2)) * _batch_log_term(domain_size, delta, horizon)


def beta_nsv(B, domain_size, delta, horizon) -> float:
    """``B + sqrt(2 ln(2|X|(1 + log2 T) / delta))``."""
    if B < 0:
        raise InputError("B must be non-negative")
    return B + _batch_log_term(domain_size, delta, horizon)


def beta_noisy_fixed(B, rho, lambda2, domain_size, delta) -> float:
    """Single-posterior width ``B + (rho / lambda) sqrt(2 ln(2|X| / delta))``."""
    _check_delta(delta)
    if not lambda2 > 0:
        raise InputError("lambda2 must be positive for the noisy width")
    return B + rho / math.sqrt(lambda2) * math.sqrt(2.0 * math.log(2.0 * domain_size / delta))


def beta_nsv_fixed(B, domain_size, delta) -> float:
    """Single-posterior width ``B + sqrt(2 ln(2|X| / delta))``."""
    _check_delta(delta)
    return B + math.sqrt(2.0 * math.log(2.0 * domain_size / delta))


def beta_adaptive(B, delta, realized_gain: float, mig_upper: float) -> float:
    """``B + sqrt(2 gamma + 2 ln(1/delta))`` with ``gamma`` taken as ``mig_upper``.

    ``realized_gain`` only feeds the run log; the width must use an upper
    bound on the maximum information gain to stay valid.
    """
    _check_delta(delta)
    if mig_upper < 0 or realized_gain < 0:
        raise InputError("information gains must be non-negative")
    return B + math.sqrt(2.0 * mig_upper + 2.0 * math.log(1.0 / delta))


def mvr_lambda2_for_norm(B: float, c: float = 1.0) -> float:
    """Regularisation ``lambda^2 = c / B^2`` for the RKHS-norm-optimal regime."""
    if not B > 0 or not c > 0:
        raise InputError("B and c must be positive")
    return c / (B * B)


# -- confidence settings ----------------------------------------------------------
# domain_size / horizon left as None are filled in from the run.

@dataclass(frozen=True)
class NoiselessDeterministic:
    B: float
    kind = "noiseless"

    def width(self, domain_size=None, horizon=None):
        return beta_noiseless(self.B)


@dataclass(frozen=True)
class NoisyFixed:
    B: float
    rho: float
    lambda2: float
    delta: float
    domain_size: int | None = None
    horizon: int | None = None
    kind = "noisy"

    def width(self, domain_size=None, horizon=None):
        return beta_noisy_pe(self.B, self.rho, self.lambda2,
                             self.domain_size or domain_size, self.delta,
                             self.horizon or horizon)


@dataclass(frozen=True)
class NsvFixed:
    B: float
    delta: float
    domain_size: int | None = None
    horizon: int | None = None
    kind = "nsv"

    def width(self, domain_size=None, horizon=None):
        return beta_nsv(self.B, self.domain_size or domain_size, self.delta,
                        self.horizon or horizon)


@dataclass(frozen=True)
class AdaptiveHetero:
    B: float
    delta: float
    mig_source: str = "greedy_upper"
    kind = "adaptive"

    def __post_init__(self):
        _check_delta(self.delta)
        if self.mig_source != "greedy_upper":
            raise InputError(f"unsupported mig_source {self.mig_source!r}")


_SETTINGS = {c.kind: c for c in (NoiselessDeterministic, NoisyFixed, NsvFixed, AdaptiveHetero)}


def confidence_from_dict(cfg):
    kind = cfg.get("kind")
    cls = _SETTINGS.get(kind)
    if cls is None:
        raise ConfigError(["confidence.kind"], f"unknown confidence kind {kind!r}")
    fields = {k: v for k, v in cfg.items() if k != "kind"}
    try:
        return cls(**fields)
    except TypeError as exc:
        raise ConfigError(["confidence"], f"bad confidence fields for {kind!r}: {exc}") from None


def confidence_to_dict(setting):
    return {"kind": setting.kind, **asdict(setting)}


# -- algorithm configs ------------------------------------------------------------

@dataclass(frozen=True)
class MVR:
    lambda2: float = 0.0
    name = "mvr"


@dataclass(frozen=True)
class PE:
    confidence: object
    lambda2: float = 0.0
    N1: int = DEFAULT_N1
    name = "pe"


@dataclass(frozen=True)
class VaMVR:
    name = "va_mvr"


@dataclass(frozen=True)
class VaPE:
    confidence: object
    N1: int = DEFAULT_N1
    name = "va_pe"


@dataclass(frozen=True)
class VaGPUCB:
    confidence: AdaptiveHetero
    zeta2: float
    name = "va_gp_ucb"


@dataclass(frozen=True)
class GPUCB:
    """Homoscedastic GP-UCB with the adaptive width, for comparisons."""

    confidence: AdaptiveHetero
    lambda2: float
    name = "gp_ucb"


_ALGOS = {c.name: c for c in (MVR, PE, VaMVR, VaPE, VaGPUCB, GPUCB)}


def algo_from_dict(cfg):
    name = cfg.get("algorithm")
    cls = _ALGOS.get(name)
    if cls is None:
        raise ConfigError(["algorithm"], f"unknown algorithm {name!r}")
    kw = {k: v for k, v in cfg.items() if k not in ("algorithm", "label")}
    if name == "mvr" and "lambda2_scale" in kw:
        bad = [k for k in ("B",) if k not in kw]
        if bad:
            raise ConfigError(bad, "lambda2_scale needs B")
        kw = {"lambda2": mvr_lambda2_for_norm(kw.pop("B"), kw.pop("lambda2_scale"))}
    if "confidence" in kw:
        kw["confidence"] = confidence_from_dict(kw["confidence"])
    try:
        return cls(**kw)
    except TypeError as exc:
        raise ConfigError([name], f"bad fields for {name!r}: {exc}") from None


def algo_to_dict(algo):
    out = {"algorithm": algo.name}
    for k, v in asdict(algo).items():
        out[k] = v
    if hasattr(algo, "confidence"):
        out["confidence"] = confidence_to_dict(algo.confidence)
    return out


# -- shared loops -----------------------------------------------------------------

class _Log:
    def __init__(self):
        self.chosen, self.y, self.rho2, self.lambda2, self.sigma_max = [], [], [], [], []
        self.first_duplicate_step = None

    def add(self, t, idx, y, rho2, lam2, sigma_max):
        self.chosen.append(idx)
        self.y.append(y)
        self.rho2.append(rho2)
        self.lambda2.append(lam2)
        self.sigma_max.append(sigma_max)

    def record(self, env, recommendation, meta):
        meta = dict(meta)
        meta["first_duplicate_step"] = self.first_duplicate_step
        return regret_accumulate(env, self.chosen, recommendation, y=self.y, rho2=self.rho2,
                                 lambda2=self.lambda2, sigma_max=self.sigma_max, meta=meta)


def _variance_reduction(env: BanditEnv, candidates, t_start, steps, lambda2_of, log):
    """Run ``steps`` maximum-variance picks over ``candidates`` from step ``t_start``.

    ``lambda2_of(rho2)`` maps the revealed variance proxy to the noise
    parameter used in the posterior. Returns the posterior over candidates.
    """
    state = PosteriorState(env.kernel, domain=env.domain[candidates], capacity=max(steps, 1))
    noiseless_seen = set()
    for j in range(steps):
        t = t_start + j
        local = int(np.argmax(state.domain_var()))
        idx = int(candidates[local])
        y, rho2 = env.observe(t, idx)
        lam2 = lambda2_of(rho2)
        if lam2 == 0.0:
            if local in noiseless_seen and log.first_duplicate_step is None:
                log.first_duplicate_step = t
            noiseless_seen.add(local)
        state.update(env.domain[idx], y, lam2, domain_index=local)
        log.add(t, idx, y, rho2, lam2, math.sqrt(float(state.domain_var().max())))
    return state


def mvr_selection(kernel, domain, noise_vars, candidates=None):
    """MVR input sequence for a given noise sequence, without any observations.

    Selections never read ``y``, so this reproduces the picks of
    :func:`run_mvr` / :func:`run_va_mvr` for the same noise parameters.
    Returns ``(picks, state)``.
    """
    domain = np.asarray(domain, dtype=float)
    if candidates is None:
        candidates = np.arange(domain.shape[0])
    candidates = np.asarray(candidates, dtype=int)
    noise_vars = np.asarray(noise_vars, dtype=float)
    state = PosteriorState(kernel, domain=domain[candidates], capacity=max(len(noise_vars), 1))
    picks = np.empty(len(noise_vars), dtype=int)
    for t, lam2 in enumerate(noise_vars):
        local = int(np.argmax(state.domain_var()))
        picks[t] = candidates[local]
        state.update(domain[picks[t]], 0.0, lam2, domain_index=local)
    return picks, state


# -- MVR family -----------------------------------------------------------------

def run_mvr(env: BanditEnv, T: int, lambda2: float) -> RunRecord:
    if T < 1:
        raise InputError("T must be >= 1")
    if not lambda2 >= 0:
        raise InputError("lambda2 must be >= 0")
    log = _Log()
    cand = np.arange(env.size)
    state = _variance_reduction(env, cand, 1, T, lambda_const(lambda2), log)
    rec = int(np.argmax(state.domain_mean()))
    return log.record(env, rec, {"algorithm": "mvr", "lambda2": lambda2})


def run_va_mvr(env: BanditEnv, T: int) -> RunRecord:
    if T < 1:
        raise InputError("T must be >= 1")
    log = _Log()
    state = _variance_reduction(env, np.arange(env.size), 1, T, _identity, log)
    rec = int(np.argmax(state.domain_mean()))
    return log.record(env, rec, {"algorithm": "va_mvr"})


def lambda_const(lambda2):
    lambda2 = float(lambda2)
    return lambda rho2: lambda2


def _identity(rho2):
    return rho2


# -- phased elimination ---------------------------------------------------------

def _phased_elimination(env, T, N1, beta_sqrt, lambda2_of, log):
    if T < 1:
        raise InputError("T must be >= 1")
    if int(N1) < 1:
        raise InputError("N1 must be >= 1")
    cand = np.arange(env.size)
    batches = []
    t = 1
    size = int(N1)
    best = None
    last_state = None
    while t <= T:
        steps = min(size, T - t + 1)
        before = len(cand)
        state = _variance_reduction(env, cand, t, steps, lambda2_of, log)
        last_state, last_cand = state, cand
        info = {
            "batch": len(batches) + 1,
            "start": t,
            "size": steps,
            "full": steps == size,
            "candidates": before,
            "regret": float(np.sum(env.fstar - env.f_values[log.chosen[t - 1:t - 1 + steps]])),
        }
        if steps == size:
            mu = state.domain_mean()
            sd = np.sqrt(state.domain_var())
            ucb = mu + beta_sqrt * sd
            lcb = mu - beta_sqrt * sd
            err = np.abs(env.f_values[cand] - mu)
            info["sigma_max"] = float(sd.max())
            info["cb_holds"] = bool(np.all(err <= beta_sqrt * sd))
            info["xstar_in"] = bool(env.xstar in cand)
            best = int(cand[int(np.argmax(lcb))])
            cand = cand[ucb >= lcb.max()]
            info["survivors"] = len(cand)
        batches.append(info)
        t += steps
        size *= 2
    if best is None:
        best = int(last_cand[int(np.argmax(last_state.domain_mean()))])
    return best, batches


def run_pe(env: BanditEnv, T: int, config: PE) -> RunRecord:
    lambda2 = float(config.lambda2)
    if not lambda2 >= 0:
        raise InputError("lambda2 must be >= 0")
    beta_sqrt = config.confidence.width(env.size, T)
    log = _Log()
    rec, batches = _phased_elimination(env, T, config.N1, beta_sqrt, lambda_const(lambda2), log)
    return log.record(env, rec, {"algorithm": "pe", "lambda2": lambda2, "N1": config.N1,
                                 "beta_sqrt": beta_sqrt, "batches": batches})


def run_va_pe(env: BanditEnv, T: int, config: VaPE) -> RunRecord:
    beta_sqrt = config.confidence.width(env.size, T)
    log = _Log()
    rec, batches = _phased_elimination(env, T, config.N1, beta_sqrt, _identity, log)
    return log.record(env, rec, {"algorithm": "va_pe", "N1": config.N1,
                                 "beta_sqrt": beta_sqrt, "batches": batches})


# -- UCB ------------------------------------------------------------------------

def _next_pow2(t):
    return 1 << (int(t) - 1).bit_length()


class _MigCache:
    """Greedy MIG upper values at power-of-two horizons for one noise floor."""

    def __init__(self, kernel, domain, noise_floor):
        self.kernel, self.domain, self.noise_floor = kernel, domain, noise_floor
        self.values = {}

    def upper(self, t):
        T = _next_pow2(t)
        if T not in self.values:
            self.values[T] = greedy_mig_bracket(self.kernel, self.domain, T, self.noise_floor).upper
        return self.values[T]


def _ucb_loop(env, T, confidence, noise_floor, lambda2_of):
    if T < 1:
        raise InputError("T must be >= 1")
    if not noise_floor > 0:
        raise InputError("noise floor must be positive")
    state = PosteriorState(env.kernel, domain=env.domain, capacity=T)
    migs = _MigCache(env.kernel, env.domain, noise_floor)
    log = _Log()
    betas, lcbs = [], []
    realized = 0.0
    for t in range(1, T + 1):
        mig = migs.upper(t)
        beta_sqrt = beta_adaptive(confidence.B, confidence.delta, realized, mig)
        mu = state.domain_mean()
        var = state.domain_var()
        sd = np.sqrt(var)
        idx = int(np.argmax(mu + beta_sqrt * sd))
        lcbs.append(float(mu[idx] - beta_sqrt * sd[idx]))
        betas.append(beta_sqrt)
        y, rho2 = env.observe(t, idx)
        lam2 = lambda2_of(rho2)
        realized += 0.5 * math.log1p(var[idx] / lam2)
        state.update(env.domain[idx], y, lam2, domain_index=idx)
        log.add(t, idx, y, rho2, lam2, math.sqrt(float(state.domain_var().max())))
    t_best = int(np.argmax(lcbs))
    rec = log.chosen[t_best]
    meta = {"beta_sqrt": betas, "realized_gain": realized,
            "mig_upper": {str(k): v for k, v in sorted(migs.values.items())},
            "mig_noise_floor": noise_floor, "recommended_step": t_best + 1}
    return log, rec, meta


def run_va_gp_ucb(env: BanditEnv, T: int, config: VaGPUCB) -> RunRecord:
    zeta2 = float(config.zeta2)
    if not zeta2 > 0:
        raise InputError("zeta2 must be positive")
    # lambda_t^2 >= zeta^2 always, so gamma_t(Sigma_t) <= gamma_t(zeta^2 I)
    log, rec, meta = _ucb_loop(env, T, config.confidence, zeta2,
                               lambda rho2: max(rho2, zeta2))
    meta.update(algorithm="va_gp_ucb", zeta2=zeta2)
    return log.record(env, rec, meta)


def run_gp_ucb(env: BanditEnv, T: int, config: GPUCB) -> RunRecord:
    lambda2 = float(config.lambda2)
    if not lambda2 > 0:
        raise InputError("lambda2 must be positive")
    log, rec, meta = _ucb_loop(env, T, config.confidence, lambda2, lambda_const(lambda2))
    meta.update(algorithm="gp_ucb", lambda2=lambda2)
    return log.record(env, rec, meta)


def run(env: BanditEnv, T: int, algo) -> RunRecord:
    """Dispatch on the algorithm config type."""
    if isinstance(algo, MVR):
        return run_mvr(env, T, algo.lambda2)
    if isinstance(algo, PE):
        return run_pe(env, T, algo)
    if isinstance(algo, VaMVR):
        return run_va_mvr(env, T)
    if isinstance(algo, VaPE):
        return run_va_pe(env, T, algo)
    if isinstance(algo, VaGPUCB):
        return run_va_gp_ucb(env, T, algo)
    if isinstance(algo, GPUCB):
        return run_gp_ucb(env, T, algo)
    raise InputError(f"unknown algorithm config {algo!r}")
