"""Greedy bracket on the maximum information gain and how it grows with T.

Run with ``python3 demos/information_gain_bracket.py``.
"""

from gpbandits import KernelSpec, grid_domain, greedy_mig_bracket

domain = grid_domain([16, 16])

# %% Smoother kernels gain information more slowly
for kernel in (KernelSpec("se", 0.2), KernelSpec("matern", 0.2, 1.5), KernelSpec("matern", 0.2, 0.5)):
    print(kernel.family, kernel.smoothness)
    for T in (16, 64, 256):
        b = greedy_mig_bracket(kernel, domain, T, 0.1)
        print(f"  T={T:4d}  lower {b.lower:8.3f}  upper {b.upper:8.3f}")

# %% Less noise means more information per observation
for noise in (1.0, 0.1, 0.01):
    b = greedy_mig_bracket(KernelSpec("se", 0.2), domain, 64, noise)
    print(f"noise {noise:5.2f}  upper {b.upper:.3f}")
