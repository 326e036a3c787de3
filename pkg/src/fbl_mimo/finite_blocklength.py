"""Finite-n approximation of the Feinstein achievability bound.

For a rate ``R`` (nats per channel use per transmit antenna) the bound is

    Phi(sqrt(nK) / theta_plus * (R - C + delta_star)) + exp(-nK * delta_star)

where ``delta_star`` is the slack that (approximately) minimizes the sum.
The vanishing remainder of the underlying asymptotic statement is not
included, so the value is an approximation, not a certified bound.  Totals
above one are kept as computed.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, OutOfRegimeError
from .second_order import (
    OutageBounds,
    SystemGeometry,
    capacity,
    outage_bounds,
    phi,
    snr_db_to_sigma2,
    theta_pair,
)

__all__ = ["FiniteBound", "SweepRow", "delta_star", "finite_upper", "sweep"]


@dataclass(frozen=True)
class FiniteBound:
    rate: float
    capacity: float
    theta_plus: float
    delta_star: float
    gaussian_term: float
    exp_term: float

    @property
    def total(self) -> float:
        return self.gaussian_term + self.exp_term


@dataclass(frozen=True)
class SweepRow:
    """One grid point of a sweep.

    ``x`` is the SNR in dB for ``kind="snr"`` and ``n/K`` for
    ``kind="blocklength"``.  When the point is out of regime ``bound`` is
    ``None`` and ``error`` says why.
    """

    x: float
    bound: Optional[FiniteBound]
    outage: Optional[OutageBounds] = None
    error: Optional[str] = None


def delta_star(R, C, theta_plus, n, K):
    """Optimizing slack of the finite-n Feinstein approximation.

    Raises
    ------
    OutOfRegimeError
        When the discriminant under the square root is negative, which
        happens for rates well above capacity.
    """
    nK = float(n) * float(K)
    if nK <= 0 or theta_plus <= 0:
        raise DomainError("n, K and theta_plus must be positive")
    gap = C - R
    tp2 = theta_plus * theta_plus
    head = gap + tp2
    log_term = tp2 / nK * math.log(2.0 * math.pi * nK * tp2)
    disc = 1.0 - (gap * gap + log_term) / (head * head)
    if not disc >= 0:
        raise OutOfRegimeError(
            f"negative discriminant {disc:.6g}: (C-R)^2 = {gap * gap:.6g} and "
            f"theta+^2 log(2 pi nK theta+^2)/nK = {log_term:.6g} exceed "
            f"(C-R+theta+^2)^2 = {head * head:.6g}"
        )
    # 1 - sqrt(disc) loses digits when disc ~ 1; use (1 - disc)/(1 + sqrt(disc))
    return head * (1.0 - disc) / (1.0 + math.sqrt(disc))


def finite_upper(R, geom, sigma2):
    """Finite-n Feinstein approximation for geometry ``geom`` at noise ``sigma2``."""
    R = float(R)
    C = capacity(sigma2, geom.c)
    _, tp = theta_pair(sigma2, geom.c, geom.beta)
    ds = delta_star(R, C, tp, geom.n, geom.K)
    nK = geom.nK
    return FiniteBound(
        rate=R,
        capacity=C,
        theta_plus=tp,
        delta_star=ds,
        gaussian_term=phi(math.sqrt(nK) / tp * (R - C + ds)),
        exp_term=math.exp(-nK * ds),
    )


def _check_grid(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("grid must be a nonempty 1-d sequence")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be strictly increasing")
    return grid


def _blocklength(nk, K):
    n = nk * K
    n_int = round(n)
    if n_int < 1 or abs(n - n_int) > 1e-9 * max(1.0, n):
        raise DomainError(f"n/K = {nk} with K = {K} does not give an integer block length")
    return int(n_int)


def sweep(kind, grid, *, K, N, R, n=None, snr_db=None):
    """Evaluate the finite-n bound along an SNR or block-length grid.

    Parameters
    ----------
    kind : {"snr", "blocklength"}
        ``"snr"``: ``grid`` holds SNRs in dB and ``n`` is fixed.
        ``"blocklength"``: ``grid`` holds ``n/K`` values and ``snr_db`` is
        fixed.  Block-length rows also carry the outage bounds at
        ``r = K (R - C)``.
    grid : sequence of float
        Strictly increasing.
    K, N : int
        Transmit / receive antennas.
    R : float
        Rate in nats per channel use per transmit antenna.

    Returns
    -------
    list of SweepRow
        One row per grid point, in grid order.  Errors at a point are
        recorded in that row and the sweep continues.
    """
    grid = _check_grid(grid)
    rows = []
    if kind == "snr":
        if n is None:
            raise DomainError("snr sweep needs a fixed block length n")
        geom = SystemGeometry(N=N, K=K, n=n)
        for x in grid:
            try:
                rows.append(SweepRow(x=float(x), bound=finite_upper(R, geom, snr_db_to_sigma2(x))))
            except DomainError as exc:
                rows.append(SweepRow(x=float(x), bound=None, error=str(exc)))
    elif kind == "blocklength":
        if snr_db is None:
            raise DomainError("blocklength sweep needs a fixed snr_db")
        sigma2 = snr_db_to_sigma2(snr_db)
        C = capacity(sigma2, N / K)
        r = K * (R - C)
        for x in grid:
            bound = outage = err = None
            try:
                geom = SystemGeometry(N=N, K=K, n=_blocklength(x, K))
                outage = outage_bounds(r, sigma2, geom.c, geom.beta)
                bound = finite_upper(R, geom, sigma2)
            except DomainError as exc:
                err = str(exc)
            rows.append(SweepRow(x=float(x), bound=bound, outage=outage, error=err))
    else:
        raise DomainError(f"unknown sweep kind {kind!r}")
    return rows
