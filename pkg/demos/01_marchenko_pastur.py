"""
The Marchenko-Pastur building block
===================================

Every large-system quantity in ``fbl_mimo`` is built from delta0, the
positive root of a quadratic that doubles as a Stieltjes transform.
This script compares it with the eigenvalues of one sampled channel.
"""

import numpy as np

from fbl_mimo import delta0, delta0_prime, mp_measure_integral, mp_support

# channel with N = 2K receive antennas, so c = 2
K, N = 200, 400
c = N / K
lo, hi = mp_support(c)
print(f"support of mu_c for c = {c:g}: [{lo:.4f}, {hi:.4f}]")

# one draw of K^-1 H H^H, padded with the N - K structural zeros
rng = np.random.default_rng(0)
H = (rng.standard_normal((N, K)) + 1j * rng.standard_normal((N, K))) / np.sqrt(2)
lam = np.concatenate([np.linalg.eigvalsh(H.conj().T @ H / K), np.zeros(N - K)])

print(f"\n{'x':>8} {'delta0':>12} {'quadrature':>12} {'eigenvalues':>12}")
for x in (0.01, 0.1, 1.0, 10.0):
    quad = c * mp_measure_integral(lambda t: 1 / (t + x), c)
    emp = np.sum(1 / (lam + x)) / K
    print(f"{x:8g} {delta0(x, c):12.6f} {quad:12.6f} {emp:12.6f}")

# delta0 is decreasing in x, and its derivative has a closed form
xs = np.logspace(-2, 2, 5)
print("\ndelta0'(x):", np.array2string(delta0_prime(xs, c), precision=5))
