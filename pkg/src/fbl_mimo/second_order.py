"""Second-order statistics of the MIMO Rayleigh block-fading channel.

Rates are in nats per channel use per transmit antenna, i.e.
``R = log(M) / (n K)``.  A second-order rate ``r`` is the deviation from
capacity scaled by ``sqrt(nK)``: ``R = C + r / sqrt(nK)``.  The outage
flavour uses a ``K`` scaling instead, ``R = C + r / K``.

SNR is ``1 / sigma2``; :func:`snr_db_to_sigma2` converts.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import erfc

from .errors import DomainError
from .mp_core import (
    DEFAULT_QUADRATURE,
    delta0,
    delta0_prime,
    delta_gamma_tables,
    tail_quadrature,
)

__all__ = [
    "SystemGeometry",
    "SecondOrderStats",
    "ErrorBounds",
    "OutageBounds",
    "InputSpread",
    "AsymptoticLimits",
    "phi",
    "snr_db_to_sigma2",
    "sigma2_to_snr_db",
    "capacity",
    "fading_variance",
    "theta_pair",
    "compute_stats",
    "pe_bounds",
    "outage_bounds",
    "theta_n_radicand",
    "theta_n_constrained",
    "asymptotic_limits",
]

_SQRT1_2 = 1.0 / math.sqrt(2.0)


def phi(z):
    """Standard normal CDF, ``0.5 * erfc(-z / sqrt 2)``."""
    out = 0.5 * erfc(-np.asarray(z, dtype=float) * _SQRT1_2)
    return float(out) if np.ndim(out) == 0 else out


def snr_db_to_sigma2(snr_db):
    return 10.0 ** (-float(snr_db) / 10.0)


def sigma2_to_snr_db(sigma2):
    return -10.0 * math.log10(sigma2)


def _positive(name, value):
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be finite and > 0, got {value!r}")
    return value


@dataclass(frozen=True)
class SystemGeometry:
    """Receive antennas ``N``, transmit antennas ``K`` and block length ``n``."""

    N: int
    K: int
    n: int

    def __post_init__(self):
        for name in ("N", "K", "n"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise DomainError(f"{name} must be a positive integer, got {v!r}")

    @property
    def c(self) -> float:
        return self.N / self.K

    @property
    def beta(self) -> float:
        return self.n / self.K

    @property
    def ratios(self):
        """``(c, beta)`` as exact fractions."""
        return Fraction(self.N, self.K), Fraction(self.n, self.K)

    @property
    def nK(self) -> int:
        return self.n * self.K


@dataclass(frozen=True)
class InputSpread:
    """Normalized traces of ``A = I_K - XX^H / n``: ``a = tr A / K``, ``b = tr A^2 / K``.

    Inputs meeting the energy constraint have ``0 <= a <= 1``; unconstrained
    Gaussian draws can give ``a < 0``, so only ``a <= 1`` is enforced here.
    """

    a: float
    b: float

    def __post_init__(self):
        if not self.a <= 1.0:
            raise DomainError(f"tr A / K must be <= 1, got {self.a}")
        if self.b < self.a * self.a * (1.0 - 1e-12) - 1e-15:
            raise DomainError(f"tr A^2 / K = {self.b} below (tr A / K)^2 = {self.a ** 2}")


@dataclass(frozen=True)
class SecondOrderStats:
    sigma2: float
    c: float
    beta: float
    capacity: float
    theta_minus: float
    theta_plus: float
    zeta0: float
    zeta1_lin: float
    zeta1_quad: float
    zeta2: float

    def zeta1(self, a):
        """Polynomial ``zeta1_lin * a + zeta1_quad * a**2``."""
        return self.zeta1_lin * a + self.zeta1_quad * a * a


@dataclass(frozen=True)
class ErrorBounds:
    r: float
    lower: float
    upper: float


@dataclass(frozen=True)
class OutageBounds:
    r: float
    lower: float
    upper: float
    limit: float
    theta_minus_out: float
    theta_plus_out: float
    theta_out: float


@dataclass(frozen=True)
class AsymptoticLimits:
    """High-SNR limits of ``theta^2`` and low-SNR leading coefficients.

    ``high_snr_infinite`` is set when ``c == 1``; the two limits are then
    ``math.inf``.  The low-SNR coefficients multiply ``1 / sigma2``.
    """

    c: float
    beta: float
    high_snr_theta_minus_sq: float
    high_snr_theta_plus_sq: float
    high_snr_infinite: bool
    low_snr_capacity: float
    low_snr_theta_plus_sq: float
    low_snr_theta_minus_sq: float


def capacity(sigma2, c):
    """Per-antenna ergodic capacity ``C`` in nats."""
    s2 = _positive("sigma2", sigma2)
    c = _positive("c", c)
    d = float(delta0(s2, c))
    return math.log1p(d) + c * math.log1p(1.0 / (s2 * (1.0 + d))) - d / (1.0 + d)


def fading_variance(sigma2, c):
    """``-log(1 - delta0^2 / (c (1 + delta0)^2))``, the squared limiting outage scale.

    This is the part of ``theta^2`` that scales with ``beta``.
    """
    s2 = _positive("sigma2", sigma2)
    c = _positive("c", c)
    d = float(delta0(s2, c))
    return -math.log1p(-(d * d) / (c * (1.0 + d) ** 2))


def _theta_sq(sigma2, c, beta):
    d = float(delta0(sigma2, c))
    dp = float(delta0_prime(sigma2, c))
    L = -math.log1p(-(d * d) / (c * (1.0 + d) ** 2))
    return beta * L + (c + sigma2 * sigma2 * dp), beta * L + 2.0 * (c - sigma2 * d)


def theta_pair(sigma2, c, beta):
    """``(theta_minus, theta_plus)`` without the zeta coefficients."""
    s2 = _positive("sigma2", sigma2)
    c = _positive("c", c)
    beta = _positive("beta", beta)
    tm2, tp2 = _theta_sq(s2, c, beta)
    return math.sqrt(tm2), math.sqrt(tp2)


def _zeta1_tail_integrand(u, s2, c):
    tab = delta_gamma_tables(u, s2, c, 2)
    d0u = tab.delta[0]
    return s2 * tab.gamma[2] / (1.0 - c + u * (1.0 + 2.0 * d0u))


def compute_stats(sigma2, c, beta, spec=DEFAULT_QUADRATURE):
    """Capacity, ``theta_minus``, ``theta_plus`` and the zeta coefficients.

    The linear zeta coefficient contains an integral over ``[sigma2, inf)``
    evaluated with :func:`tail_quadrature`; a
    :class:`~fbl_mimo.errors.ConvergenceError` from it propagates.
    """
    s2 = _positive("sigma2", sigma2)
    c = _positive("c", c)
    beta = _positive("beta", beta)

    tab = delta_gamma_tables(s2, s2, c, 1)
    d0, d1 = float(tab.delta[0]), float(tab.delta[1])
    tm2, tp2 = _theta_sq(s2, c, beta)

    cube = d0 * (1.0 + d0) ** 3
    tail = tail_quadrature(lambda u: _zeta1_tail_integrand(u, s2, c), s2, spec)
    zeta1_lin = (
        -beta * (s2 * d1 * d1 + 2.0 * s2 / beta * d0 * (1.0 + d0) * d1) / cube
        - beta * tail
    )
    num = d0 * d0 * d1 * d1 - (d0 + s2 * d1) * (
        -s2 * d1 ** 3 + (1.0 + 2.0 * d0) * d1 * d1 - d0 * d0 * d1
    )
    zeta1_quad = beta * num / cube ** 2

    return SecondOrderStats(
        sigma2=s2, c=c, beta=beta,
        capacity=capacity(s2, c),
        theta_minus=math.sqrt(tm2),
        theta_plus=math.sqrt(tp2),
        zeta0=float(tab.gamma[1]),
        zeta1_lin=zeta1_lin,
        zeta1_quad=zeta1_quad,
        zeta2=beta * d1 / (1.0 + d0) ** 4,
    )


def pe_bounds(r, stats):
    """Gaussian bounds on the optimal average error probability at rate ``r``.

    For ``r > 0`` the lower bound is the constant 1/2.
    """
    r = float(r)
    upper = phi(r / stats.theta_plus)
    lower = phi(r / stats.theta_minus) if r <= 0 else 0.5
    return ErrorBounds(r=r, lower=lower, upper=upper)


def outage_bounds(r, sigma2, c, beta):
    """Bounds on the second-order outage probability, ``R = C + r/K``.

    ``limit`` is the ``beta -> inf`` value ``Phi(r / theta_out)``.
    """
    r = float(r)
    s2 = _positive("sigma2", sigma2)
    c = _positive("c", c)
    beta = _positive("beta", beta)
    d = float(delta0(s2, c))
    dp = float(delta0_prime(s2, c))
    L = -math.log1p(-(d * d) / (c * (1.0 + d) ** 2))
    t_minus = math.sqrt(L + (c + s2 * s2 * dp) / beta)
    t_plus = math.sqrt(L + 2.0 * (c - s2 * d) / beta)
    t_out = math.sqrt(L)
    return OutageBounds(
        r=r,
        lower=min(phi(r / t_minus), 0.5),
        upper=phi(r / t_plus),
        limit=phi(r / t_out),
        theta_minus_out=t_minus,
        theta_plus_out=t_plus,
        theta_out=t_out,
    )


def theta_n_radicand(stats, spread):
    """``theta_minus^2 + zeta1(a) + zeta2 * b`` for one input realization."""
    return stats.theta_minus ** 2 + stats.zeta1(spread.a) + stats.zeta2 * spread.b


def theta_n_constrained(stats, spread):
    """Scale of the information density for a given input spread.

    Returns ``None`` when the radicand is not positive; there is no
    meaningful scale in that case and callers must handle it explicitly.
    """
    rad = theta_n_radicand(stats, spread)
    if not rad > 0:
        return None
    return math.sqrt(rad)


def asymptotic_limits(c, beta):
    c = _positive("c", c)
    beta = _positive("beta", beta)
    if c < 1:
        base = -beta * math.log1p(-c)
        tm2, tp2 = base + c, base + 2.0 * c
    elif c > 1:
        base = -beta * math.log1p(-1.0 / c)
        tm2, tp2 = base + 1.0, base + 2.0
    else:
        tm2 = tp2 = math.inf
    return AsymptoticLimits(
        c=c, beta=beta,
        high_snr_theta_minus_sq=tm2,
        high_snr_theta_plus_sq=tp2,
        high_snr_infinite=(c == 1),
        low_snr_capacity=c,
        low_snr_theta_plus_sq=2.0 * c,
        low_snr_theta_minus_sq=2.0 * c,
    )
