"""Kernelized bandit optimization with stationary and time-varying noise."""

from .errors import ConfigError, InputError, NumericalError
from .kernels import KernelSpec, cross_kernel, gram_matrix, kernel_eval
from .gp import (JITTER, Observation, PosteriorState, empty_posterior, posterior_mean,
                 posterior_var, update)
from .infogain import (MigBracket, chain_info_gain, chain_terms, epcl_count,
                       epcl_count_nonstationary, greedy_gain_curve, greedy_mig_bracket,
                       info_gain, mig_monotonicity_check)
from .rkhs import RkhsFunction, evaluate, make_function, sample_function, scale_to_norm
from .envs import (BanditEnv, Explicit, NoiseSchedule, Noiseless, PowerDecay, RunRecord,
                   Stationary, cumulative_variance, env_from_dict, grid_domain,
                   regret_accumulate)
from .algorithms import (GPUCB, MVR, PE, AdaptiveHetero, NoiselessDeterministic, NoisyFixed,
                         NsvFixed, VaGPUCB, VaMVR, VaPE, beta_adaptive, beta_noiseless,
                         beta_noisy_pe, beta_nsv, run, run_gp_ucb, run_mvr, run_pe,
                         run_va_gp_ucb, run_va_mvr, run_va_pe)

__version__ = "0.1.0"
