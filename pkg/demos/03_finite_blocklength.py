"""
How long does a block need to be?
=================================

Finite-n upper bounds on the error probability of an 8 x 16 system
sending one bit per transmit antenna and channel use.  Capacity reaches
log 2 near -2.44 dB, so the interesting SNRs sit just above that.
"""

import math

import numpy as np

from fbl_mimo import SystemGeometry, capacity, finite_upper, snr_db_to_sigma2, sweep

K, N, R = 8, 16, math.log(2.0)

for snr_db in (-2.0, -1.0, 0.0):
    s2 = snr_db_to_sigma2(snr_db)
    print(f"SNR {snr_db:+.0f} dB, C = {capacity(s2, N / K):.4f} nats")
    for n in (36, 72, 144):
        fb = finite_upper(R, SystemGeometry(N=N, K=K, n=n), s2)
        print(f"  n = {n:3d}: bound {fb.total:.3e} (gaussian {fb.gaussian_term:.2e}, exp {fb.exp_term:.2e})")

# out-of-regime rows carry an error string in place of a bound
rows = sweep("blocklength", np.array([1.0, 2.0, 5.0, 10.0, 20.0]), K=K, N=N, R=R, snr_db=-0.785)
print("\nSNR -0.785 dB over n/K")
for row in rows:
    if row.error:
        print(f"  n/K {row.x:5g}: {row.error}")
    else:
        print(f"  n/K {row.x:5g}: finite {row.bound.total:.3e}, outage floor {row.outage.limit:.3e}")
