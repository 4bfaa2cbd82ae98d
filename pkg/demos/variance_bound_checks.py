"""Numerical checks of the posterior variance bound and the count of large-variance steps.

Run with ``python3 demos/variance_bound_checks.py``.
"""

from gpbandits import KernelSpec, PowerDecay, grid_domain
from gpbandits.harness import verify_epcl, verify_lemma1, verify_lemma1_nonstationary

kernel = KernelSpec("se", 0.2)
domain = grid_domain([128])

# %% Max posterior variance after T maximum-variance picks, against its bound
for report in (verify_lemma1(kernel, domain, 0.01, [64, 256]),
               verify_lemma1_nonstationary(kernel, domain, PowerDecay(0.1, 1.0), [64, 256])):
    for inst in report.instances:
        state = "n/a" if inst["pass"] is None else ("ok" if inst["pass"] else "FAIL")
        print(f"{report.check:22s} {inst['label']:12s} {inst['lhs']:.4f} <= {inst['rhs']:.4f}  {state}")

# %% How often the variance exceeds the noise level
for rule in ("mvr", "random"):
    r = verify_epcl(kernel, domain, rule, 128, lambda2=0.01, sequences=10)
    worst = max(i["lhs"] for i in r.instances)
    print(f"{rule:6s} worst count {worst} bound {r.instances[0]['rhs']:.1f} passed {r.passed}")
