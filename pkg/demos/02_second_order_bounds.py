"""
Second-order rates at a glance
==============================

Capacity, the two dispersion terms theta_minus < theta_plus, and the
Gaussian error bounds they imply for a rate slightly below capacity.
The last block shows the outage regime, where n/K grows while the rate
backoff is scaled by K only.
"""

from fbl_mimo import compute_stats, outage_bounds, pe_bounds, snr_db_to_sigma2

sigma2 = snr_db_to_sigma2(10.0)

print(f"{'c':>5} {'beta':>6} {'C':>8} {'theta-':>8} {'theta+':>8} {'Pe low':>9} {'Pe up':>9}")
for c in (0.5, 1.0, 2.0):
    for beta in (1.0, 10.0, 100.0):
        st = compute_stats(sigma2, c, beta)
        b = pe_bounds(-1.0, st)
        print(f"{c:5g} {beta:6g} {st.capacity:8.4f} {st.theta_minus:8.4f} "
              f"{st.theta_plus:8.4f} {b.lower:9.5f} {b.upper:9.5f}")

# with the backoff fixed in K units, the bounds squeeze onto an outage floor
print("\noutage regime, c = 1, r = -1")
for beta in (1.0, 10.0, 100.0, 1000.0):
    ob = outage_bounds(-1.0, sigma2, 1.0, beta)
    print(f"  beta {beta:6g}: [{ob.lower:.5f}, {ob.upper:.5f}]  -> {ob.limit:.5f}")
