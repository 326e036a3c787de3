"""Analytic identities of ``delta0`` and the second-order statistics.

Each check evaluates one identity on a parameter grid and reports the
worst residual against its tolerance.  :func:`run_identities` is what the
``validate`` command runs.  ``delta0_fn`` can be swapped for a perturbed
function to confirm that the suite actually detects errors.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import mp_core
from .second_order import compute_stats, theta_pair

C_GRID = (0.1, 0.5, 1.0, 2.0, 10.0)
X_GRID = tuple(np.logspace(-3, 3, 25))
INTEGRAL_GRID = tuple((s2, c) for s2 in (0.1, 1.0) for c in (0.5, 2.0))
STIELTJES_POINTS = ((0.5, 0.01), (0.1, 0.1), (1.0, 0.3), (2.0, 0.1), (10.0, 2.0),
                    (0.5, 10.0), (1.0, 1.0), (2.0, 100.0), (0.1, 0.001), (10.0, 0.05))


@dataclass(frozen=True)
class IdentityResult:
    name: str
    worst: float
    tol: float
    error: str = None

    @property
    def passed(self) -> bool:
        return bool(self.worst < self.tol)


def _grid():
    for c in C_GRID:
        for x in X_GRID:
            yield float(x), c


def _worst(values):
    return float(max(values))


def quadratic_residual(d0=mp_core.delta0):
    return _worst(abs(x * d0(x, c) ** 2 + (1 - c + x) * d0(x, c) - c) for x, c in _grid())


def property_iii(d0=mp_core.delta0):
    # delta0 = c / (1 - c + x (1 + delta0)), relative to max(1, delta0)
    out = []
    for x, c in _grid():
        d = d0(x, c)
        out.append(abs(d - c / (1 - c + x * (1 + d))) / max(1.0, d))
    return _worst(out)


def property_iv(d0=mp_core.delta0):
    """gamma_0 in ratio form versus ``c - x delta0``."""
    return _worst(abs(d0(x, c) / (1 + d0(x, c)) - (c - x * d0(x, c))) for x, c in _grid())


def property_v(d0=mp_core.delta0):
    return _worst(abs(1 / (1 + d0(x, c)) - (1 - c + x * d0(x, c))) for x, c in _grid())


def sandwich(d0=mp_core.delta0):
    """Signed margin of ``c/((1+sqrt c)^2 + x) < delta0 < c/x`` (negative is good)."""
    out = []
    for x, c in _grid():
        d = d0(x, c)
        out.append(max(c / ((1 + math.sqrt(c)) ** 2 + x) - d, d - c / x))
    return _worst(out)


def property_vi(d0=mp_core.delta0):
    """Differentiated quadratic, ``(2x d + 1 - c + x) d' + d (1 + d) = 0``."""
    out = []
    for x, c in _grid():
        d = d0(x, c)
        dp = mp_core.delta0_prime(x, c)
        out.append(abs((2 * x * d + 1 - c + x) * dp + d * (1 + d)) / max(1.0, d * (1 + d)))
    return _worst(out)


def derivative_identity(d0=mp_core.delta0):
    """delta_1(sigma2) from the recursion against -delta0'(sigma2)."""
    out = []
    for x, c in _grid():
        tab = mp_core.delta_gamma_tables(x, x, c, 1)
        d = d0(x, c)
        dp = -d * (1 + d) / (1 - c + x * (1 + 2 * d))
        out.append(abs(tab.delta[1] + dp) / max(1.0, abs(dp)))
    return _worst(out)


def gamma0_dual_form():
    out = []
    for x, c in _grid():
        tab = mp_core.delta_gamma_tables(x, x, c, 0)
        out.append(abs(tab.gamma[0] - (c - x * tab.delta[0])))
    return _worst(out)


def stieltjes(d0=mp_core.delta0):
    return _worst(
        abs(d0(x, c) / c - mp_core.mp_measure_integral(lambda t: 1.0 / (t + x), c))
        for c, x in STIELTJES_POINTS
    )


def capacity_integral(d0=mp_core.delta0):
    from .second_order import capacity

    return _worst(
        abs(capacity(s2, c) - mp_core.tail_quadrature(lambda u: c / u - d0(u, c), s2))
        for s2, c in INTEGRAL_GRID
    )


def log_integral(d0=mp_core.delta0):
    out = []
    for s2, c in INTEGRAL_GRID:
        d = d0(s2, c)
        closed = -math.log1p(-d * d / (c * (1 + d) ** 2))

        def g(u):
            tab = mp_core.delta_gamma_tables(u, s2, c, 1)
            return (tab.delta[0] - s2 * tab.delta[1]) / (1 - c + u * (1 + 2 * tab.delta[0]))

        out.append(abs(closed - mp_core.tail_quadrature(g, s2)))
    return _worst(out)


TIGHTNESS_GRID = tuple((s2, c) for s2 in (1e-2, 0.1, 1.0, 10.0) for c in C_GRID)


def tightness():
    out = []
    for s2, c in TIGHTNESS_GRID:
        tm, tp = theta_pair(s2, c, 1.0)
        mp = c * mp_core.mp_measure_integral(lambda t: t * t / (t + s2) ** 2, c)
        out.append(abs(tp * tp - tm * tm - mp))
    return _worst(out)


def theta_order():
    """Margin ``theta_minus - theta_plus`` (must be negative)."""
    return _worst(
        tm - tp for s2, c in TIGHTNESS_GRID for tm, tp in [theta_pair(s2, c, 10.0)]
    )


def zeta_signs():
    """``-min(zeta0, zeta2, capacity)`` over the integral grid (must be negative)."""
    out = []
    for s2, c in INTEGRAL_GRID:
        st = compute_stats(s2, c, 10.0)
        out.append(-min(st.zeta0, st.zeta2, st.capacity))
    return _worst(out)


def run_identities(delta0_fn=None):
    """Run the full suite; returns a list of :class:`IdentityResult`."""
    d0 = delta0_fn or mp_core.delta0
    checks = [
        ("quadratic residual", lambda: quadratic_residual(d0), 1e-10),
        ("property (iii) fixed point", lambda: property_iii(d0), 1e-10),
        ("property (iv) gamma0 forms", lambda: property_iv(d0), 1e-10),
        ("property (v) reciprocal", lambda: property_v(d0), 1e-10),
        ("bounds (i)/(ii) sandwich", lambda: sandwich(d0), 0.0),
        ("property (vi) derivative", lambda: property_vi(d0), 1e-10),
        ("delta1(sigma2) = -delta0'(sigma2)", lambda: derivative_identity(d0), 1e-10),
        ("gamma0 recursion dual form", gamma0_dual_form, 1e-10),
        ("Stieltjes transform oracle", lambda: stieltjes(d0), 1e-6),
        ("capacity tail integral", lambda: capacity_integral(d0), 1e-8),
        ("log tail integral", lambda: log_integral(d0), 1e-8),
        ("tightness theta+^2 - theta-^2", tightness, 1e-6),
        ("theta+ > theta-", theta_order, 0.0),
        ("zeta0, zeta2, C > 0", zeta_signs, 0.0),
    ]
    results = []
    for name, fn, tol in checks:
        try:
            results.append(IdentityResult(name, fn(), tol))
        except (ArithmeticError, RuntimeError, ValueError) as exc:
            # a broken delta0 can make a tail integral diverge: that is a failure, not a crash
            results.append(IdentityResult(name, math.inf, tol, error=f"{type(exc).__name__}: {exc}"))
    return results
