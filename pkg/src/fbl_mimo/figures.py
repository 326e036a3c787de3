"""Preset parameter grids and row builders for the three figure families.

Every builder returns ``(columns, rows)`` where each row is a dict keyed
by ``columns``.  Out-of-regime points keep their row with the numeric
fields set to ``None`` and a message in ``error``.
"""

import math

import numpy as np

from .errors import DomainError
from .finite_blocklength import sweep
from .second_order import compute_stats, outage_bounds, pe_bounds, snr_db_to_sigma2

OUTAGE_COLUMNS = ["c", "beta", "upper", "lower", "limit", "error"]
SNR_COLUMNS = ["snr_db", "n", "bound", "error"]
BLOCKLENGTH_COLUMNS = ["n_over_K", "finite_bound", "out_upper", "out_lower", "out_limit", "error"]

# outage versus beta at a fixed normalized rate
FIG3 = dict(snr_db=10.0, r=-1.0, cs=(0.5, 1.0, 2.0), betas=tuple(10.0 ** (k / 10) for k in range(21)))
# finite-n error bound versus SNR
FIG4 = dict(K=8, N=16, R=math.log(2.0), ns=(36, 144), snr_db=tuple(np.round(np.arange(-60, 41) / 10, 10)))
# finite-n and outage bounds versus n/K
FIG5 = dict(K=8, N=16, R=math.log(2.0), snr_db=-0.785, n_over_K=tuple(np.arange(4, 129) / 4))


def outage_rows(snr_db, r, cs, betas):
    sigma2 = snr_db_to_sigma2(snr_db)
    rows = []
    for c in cs:
        for beta in betas:
            row = dict(c=c, beta=beta, upper=None, lower=None, limit=None, error=None)
            try:
                ob = outage_bounds(r, sigma2, c, beta)
                row.update(upper=ob.upper, lower=ob.lower, limit=ob.limit)
            except DomainError as exc:
                row["error"] = str(exc)
            rows.append(row)
    return OUTAGE_COLUMNS, rows


def snr_rows(K, N, R, ns, snr_db):
    rows = []
    for n in ns:
        for sr in sweep("snr", snr_db, K=K, N=N, R=R, n=n):
            rows.append(dict(snr_db=sr.x, n=n,
                             bound=None if sr.bound is None else sr.bound.total,
                             error=sr.error))
    return SNR_COLUMNS, rows


def blocklength_rows(K, N, R, snr_db, n_over_K):
    rows = []
    for sr in sweep("blocklength", n_over_K, K=K, N=N, R=R, snr_db=snr_db):
        ob = sr.outage
        rows.append(dict(
            n_over_K=sr.x,
            finite_bound=None if sr.bound is None else sr.bound.total,
            out_upper=None if ob is None else ob.upper,
            out_lower=None if ob is None else ob.lower,
            out_limit=None if ob is None else ob.limit,
            error=sr.error,
        ))
    return BLOCKLENGTH_COLUMNS, rows


def figure_rows(figure):
    if figure == 3:
        return outage_rows(**FIG3)
    if figure == 4:
        return snr_rows(**FIG4)
    if figure == 5:
        return blocklength_rows(**FIG5)
    raise DomainError(f"no preset for figure {figure!r}")


def bounds_record(snr_db, c, beta, r):
    """Statistics and Gaussian error bounds as a flat dict."""
    st = compute_stats(snr_db_to_sigma2(snr_db), c, beta)
    eb = pe_bounds(r, st)
    return dict(
        capacity=st.capacity,
        theta_minus=st.theta_minus,
        theta_plus=st.theta_plus,
        zeta0=st.zeta0,
        zeta1_lin=st.zeta1_lin,
        zeta1_quad=st.zeta1_quad,
        zeta2=st.zeta2,
        pe_lower=eb.lower,
        pe_upper=eb.upper,
    )
