"""Marchenko-Pastur spectral functionals and the quadrature they need.

``delta0(x, c)`` is ``c`` times the Stieltjes transform of the
Marchenko-Pastur law ``mu_c`` evaluated at ``-x``; it is the limit of
``E[(1/K) tr (HH^H/K + x I_N)^{-1}]`` for an ``N x K`` channel with i.i.d.
``CN(0, 1)`` entries and ``N/K -> c``.  Everything else in the package is a
rational function of ``delta0`` and its derivatives, plus two integrals
over ``[sigma2, inf)`` that are evaluated by :func:`tail_quadrature`.
"""

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ConsistencyError, ConvergenceError, DomainError

__all__ = [
    "MpPoint",
    "DeltaGammaTable",
    "QuadratureSpec",
    "DEFAULT_QUADRATURE",
    "delta0",
    "delta0_prime",
    "delta_gamma_tables",
    "mp_support",
    "mp_measure_integral",
    "tail_quadrature",
]


def _check_positive(name, value):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError(f"{name} must be finite and > 0, got {value!r}")
    return arr


@dataclass(frozen=True)
class MpPoint:
    """Spectral argument ``x`` and antenna ratio ``c = N/K``."""

    x: float
    c: float

    def __post_init__(self):
        _check_positive("x", self.x)
        _check_positive("c", self.c)


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("quadrature tolerances must be > 0")
        if int(self.max_subdivisions) < 1:
            raise DomainError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()


def delta0(x, c):
    """Positive root of ``x d^2 + (1 - c + x) d - c = 0``.

    Parameters
    ----------
    x : float or array_like
        Spectral argument (noise power), ``x > 0``.
    c : float or array_like
        Antenna ratio ``N/K``, ``c > 0``.

    Returns
    -------
    float or ndarray
        ``delta0(x)``, with ``0 < delta0 < c/x``.

    Notes
    -----
    The discriminant ``(1-c+x)^2 + 4cx`` is evaluated in the factored form
    ``(x + (1-sqrt c)^2)(x + (1+sqrt c)^2)``.  When ``1 - c + x > 0`` the
    textbook root subtracts two nearly equal numbers, so the conjugate form
    ``2c / ((1-c+x) + sqrt(disc))`` is used instead.
    """
    x = _check_positive("x", x)
    c = _check_positive("c", c)
    sc = np.sqrt(c)
    # product of square roots, so huge x cannot overflow
    root = np.sqrt(x + (1.0 - sc) ** 2) * np.sqrt(x + (1.0 + sc) ** 2)
    p = 1.0 - c + x
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(p > 0, 2.0 * c / (p + root), (root - p) / (2.0 * x))
    return out[()] if out.ndim == 0 else out


def delta0_prime(x, c):
    """Derivative of :func:`delta0` with respect to ``x`` (always negative)."""
    d = delta0(x, c)
    x = np.asarray(x, dtype=float)
    out = -d * (1.0 + d) / (1.0 - c + x * (1.0 + 2.0 * d))
    return out[()] if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class DeltaGammaTable:
    """``delta_t(x)`` and ``gamma_t(x)`` for ``t = 0..order``.

    ``delta[t]`` is the deterministic equivalent of
    ``E[(1/K) tr Q(x) Q(sigma2)^t]`` where ``Q(u) = (HH^H/K + u I)^{-1}``,
    and ``gamma[t]`` the companion quantity for ``Q(x) Q(sigma2)^t HH^H/K``.
    Rows are indexed by ``t``; trailing axes follow the shape of ``x``.
    """

    x: np.ndarray
    base_noise: float
    c: float
    order: int
    delta: np.ndarray
    gamma: np.ndarray


def _delta_recursion(d0, base_noise, d0_base, d_base, denom, order):
    # d_base=None means x == base_noise: the recursion reads its own output
    out = [d0]
    if d_base is None:
        d_base = out
    for t in range(1, order + 1):
        acc = out[t - 1] * (1.0 + d0_base)
        for k in range(1, t):
            acc = acc + (out[k - 1] - base_noise * out[k]) * d_base[t - k]
        out.append(acc / denom)
    return out


def delta_gamma_tables(x, base_noise, c, order):
    """Evaluate the ``delta_t`` / ``gamma_t`` recursions up to ``order``.

    The recursion needs ``delta_t(base_noise)`` for all ``t <= order``,
    which is built first (it is the same recursion with ``x = base_noise``).

    Raises
    ------
    DomainError
        On non-positive ``x``, ``base_noise`` or ``c``, or negative order.
    ConsistencyError
        If the recursion denominator is not strictly positive.  It is
        positive analytically; this only guards against round-off at
        extreme arguments.
    """
    x = _check_positive("x", x)
    s2 = float(_check_positive("base_noise", base_noise))
    c = float(_check_positive("c", c))
    order = int(order)
    if order < 0:
        raise DomainError("order must be >= 0")

    d0s = float(delta0(s2, c))
    denom_s = 1.0 - c + s2 * (1.0 + d0s) + s2 * d0s
    if not denom_s > 0:
        raise ConsistencyError(f"recursion denominator {denom_s} <= 0 at sigma2={s2}, c={c}")
    d_base = _delta_recursion(d0s, s2, d0s, None, denom_s, order)

    d0x = np.asarray(delta0(x, c), dtype=float)
    denom_x = 1.0 - c + s2 * (1.0 + d0s) + x * d0x
    if np.any(denom_x <= 0):
        raise ConsistencyError(f"recursion denominator <= 0 at x={x}, sigma2={s2}, c={c}")
    d_x = _delta_recursion(d0x, s2, d0s, d_base, denom_x, order)

    gamma = [d0x / (1.0 + d0x)]
    gamma += [d_x[t - 1] - s2 * d_x[t] for t in range(1, order + 1)]
    return DeltaGammaTable(
        x=x, base_noise=s2, c=c, order=order,
        delta=np.array(d_x), gamma=np.array(gamma),
    )


def mp_support(c):
    """Edges ``(a, b)`` of the continuous part of ``mu_c``."""
    sc = np.sqrt(float(c))
    return (1.0 - sc) ** 2, (1.0 + sc) ** 2


def _quad(func, lo, hi, spec, what):
    res = integrate.quad(
        func, lo, hi,
        epsabs=spec.abs_tol, epsrel=spec.rel_tol,
        limit=int(spec.max_subdivisions), full_output=1,
    )
    value, abserr = res[0], res[1]
    if len(res) > 3 and not abserr <= max(spec.abs_tol, spec.rel_tol * abs(value)):
        raise ConvergenceError(f"{what}: {res[3]}", estimate=value, abserr=abserr)
    return value


def mp_measure_integral(f, c, spec=DEFAULT_QUADRATURE):
    """Integrate ``f`` against the Marchenko-Pastur law ``mu_c``.

    ``mu_c`` has density ``sqrt((b-t)(t-a)) / (2 pi c t)`` on ``[a, b]``,
    ``a, b = (1 -+ sqrt c)^2``, plus an atom of mass ``1 - 1/c`` at zero when
    ``c > 1``.  The substitution ``t = a + (b-a) sin^2(phi)`` cancels the
    square-root behaviour at both edges, leaving a smooth integrand on
    ``[0, pi/2]``.

    ``f`` is called with scalar floats.
    """
    c = float(_check_positive("c", c))
    a, b = mp_support(c)
    w = b - a

    def integrand(phi):
        s2, c2 = np.sin(phi) ** 2, np.cos(phi) ** 2
        t = a + w * s2
        # (b-a)^2 sin^2 cos^2 / (pi c t); for c == 1, a == 0 and sin^2/t -> 1/b
        weight = w * c2 / (np.pi * c) * (w * s2 / t if t > 0 else 1.0)
        return f(t) * weight

    total = _quad(integrand, 0.0, 0.5 * np.pi, spec, "mp_measure_integral")
    atom = max(0.0, 1.0 - 1.0 / c)
    if atom > 0:
        total += atom * f(0.0)
    return total


def tail_quadrature(g, lower, spec=DEFAULT_QUADRATURE):
    """``int_lower^inf g(u) du`` via ``u = lower / v`` on ``(0, 1]``.

    ``g`` should decay at least like ``u**-2`` so that the transformed
    integrand stays bounded as ``v -> 0``.
    """
    lower = float(_check_positive("lower", lower))

    def integrand(v):
        u = lower / v
        # g(u) lower / v^2 without forming v^2, which underflows near v = 0
        return g(u) * u / v

    return _quad(integrand, 0.0, 1.0, spec, "tail_quadrature")
