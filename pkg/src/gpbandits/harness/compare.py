"""Paired comparison of stationary and variance-aware algorithms."""

from __future__ import annotations

import math
import statistics

from ..algorithms import (PE, NoiselessDeterministic, NoisyFixed, NsvFixed, VaPE, run_mvr,
                          run_pe, run_va_mvr, run_va_pe)
from ..envs import BanditEnv, NoiseSchedule, cumulative_variance
from ..rkhs import RkhsFunction


def compare_variance_aware(domain, f: RkhsFunction, schedule: NoiseSchedule, T: int, seeds,
                           *, delta: float = 0.1, N1: int = 8, B: float | None = None) -> dict:
    """Run MVR vs VA-MVR and PE vs VA-PE on identical noise streams.

    The stationary baselines use ``lambda^2 = V_T / T``, the average noise
    variance; stationary PE uses the noisy width with ``rho = lambda``, or the
    deterministic width when there is no noise at all.
    Simple regret decides the MVR pair and cumulative regret the PE pair.
    """
    B = f.norm if B is None else float(B)
    V_T = cumulative_variance(schedule, T)
    lam2 = V_T / T
    if lam2 > 0:
        pe_cfg = PE(NoisyFixed(B, math.sqrt(lam2), lam2, delta), lam2, N1)
    else:
        pe_cfg = PE(NoiselessDeterministic(B), 0.0, N1)
    va_cfg = VaPE(NsvFixed(B, delta), N1)
    rows = []
    for s in seeds:
        env = BanditEnv(domain, f, schedule, s)
        mvr, va_mvr = run_mvr(env, T, lam2), run_va_mvr(env, T)
        pe, va_pe = run_pe(env, T, pe_cfg), run_va_pe(env, T, va_cfg)
        rows.append({
            "seed": s,
            "mvr": {"r_T": mvr.r_T, "R_T": mvr.R_T},
            "va_mvr": {"r_T": va_mvr.r_T, "R_T": va_mvr.R_T},
            "pe": {"r_T": pe.r_T, "R_T": pe.R_T},
            "va_pe": {"r_T": va_pe.r_T, "R_T": va_pe.R_T},
        })

    def med(name, key):
        return statistics.median(r[name][key] for r in rows)

    medians = {name: {"r_T": med(name, "r_T"), "R_T": med(name, "R_T")}
               for name in ("mvr", "va_mvr", "pe", "va_pe")}
    mvr_ok = medians["va_mvr"]["r_T"] <= medians["mvr"]["r_T"]
    pe_ok = medians["va_pe"]["R_T"] <= medians["pe"]["R_T"]
    return {
        "T": T, "seeds": list(seeds), "V_T": V_T, "lambda2_stationary": lam2,
        "noise": schedule.to_dict(), "B": B, "delta": delta, "N1": N1,
        "per_seed": rows, "medians": medians,
        "mvr_pass": mvr_ok, "pe_pass": pe_ok,
        "mvr_strict": medians["va_mvr"]["r_T"] < medians["mvr"]["r_T"],
        "pe_strict": medians["va_pe"]["R_T"] < medians["pe"]["R_T"],
        "pass": mvr_ok and pe_ok,
    }
