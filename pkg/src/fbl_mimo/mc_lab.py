"""Seeded Monte Carlo sampling of the mutual information density.

Each trial draws a channel ``H`` (N x K), an input block ``X`` (K x n) and
noise ``W`` (N x n), forms ``Y = H X / sqrt(K) + sigma W`` and evaluates

    I = (1/K) logdet(I_N + HH^H / (sigma2 K))
        + (1/(nK)) [tr(Q Y Y^H) - tr(W W^H)],   Q = (HH^H/K + sigma2 I_N)^{-1}

Randomness is counter based: trial ``i`` of a run with seed ``s`` uses a
Philox4x64-10 generator keyed by ``(s, i)``.  A trial's draws therefore do
not depend on which worker runs it or in what order, and any single trial
can be regenerated in isolation.
"""

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import DecompositionError, DiagnosticError, DomainError, SimulationError
from .second_order import InputSpread, SystemGeometry, phi

__all__ = [
    "INPUT_LAWS",
    "TrialConfig",
    "SampleSet",
    "EmpiricalSummary",
    "trial_rng",
    "hermitian_logdet_solve",
    "information_density",
    "input_spread",
    "sample_information_density",
    "run_trials",
    "default_workers",
    "empirical_feinstein",
    "ks_distance",
    "clt_diagnostics",
]

INPUT_LAWS = ("gaussian", "qpsk")
_U64 = 2 ** 64


@dataclass(frozen=True)
class TrialConfig:
    geom: SystemGeometry
    sigma2: float
    input_law: str = "gaussian"
    trials: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.input_law not in INPUT_LAWS:
            raise DomainError(f"input_law must be one of {INPUT_LAWS}, got {self.input_law!r}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError("trials must be a positive integer")
        if not (0 <= int(self.seed) < _U64):
            raise DomainError("seed must be an unsigned 64-bit integer")
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0):
            raise DomainError("sigma2 must be > 0")


@dataclass(frozen=True)
class SampleSet:
    """Per-trial information density values with input spreads.

    ``values``, ``a`` and ``b`` are 1-d float arrays of length
    ``config.trials``.
    """

    config: TrialConfig
    values: np.ndarray
    a: np.ndarray
    b: np.ndarray

    @property
    def spreads(self):
        return [InputSpread(float(x), float(y)) for x, y in zip(self.a, self.b)]

    def to_csv(self, path=None):
        """Write ``trial,I,a,b`` rows with 17 significant digits.

        Returns the text when ``path`` is None.
        """
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "I", "a", "b"])
        for i, (v, a, b) in enumerate(zip(self.values, self.a, self.b)):
            w.writerow([i, f"{v:.17g}", f"{a:.17g}", f"{b:.17g}"])
        text = buf.getvalue()
        if path is None:
            return text
        with open(path, "w", newline="", encoding="ascii") as fh:
            fh.write(text)
        return None

    @classmethod
    def from_csv(cls, path, config):
        with open(path, newline="", encoding="ascii") as fh:
            rows = list(csv.DictReader(fh))
        vals = np.array([[float(r["I"]), float(r["a"]), float(r["b"])] for r in rows])
        if len(rows) == 0:
            vals = np.zeros((0, 3))
        return cls(config=config, values=vals[:, 0], a=vals[:, 1], b=vals[:, 2])


@dataclass(frozen=True)
class EmpiricalSummary:
    mean: float
    std: float
    standardized_ks: float
    reference_center: float
    reference_scale: float


def trial_rng(seed, trial_index):
    """Generator for one trial: Philox keyed by ``(seed, trial_index)``."""
    key = np.array([int(seed) % _U64, int(trial_index) % _U64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _complex_normal(rng, shape):
    # CN(0, 1): independent real and imaginary parts with variance 1/2
    z = rng.standard_normal((2,) + shape)
    return (z[0] + 1j * z[1]) * math.sqrt(0.5)


def hermitian_logdet_solve(M, B):
    """``(log det M, M^{-1} B)`` for Hermitian positive-definite ``M``.

    Uses a Cholesky factorization and triangular solves.

    Raises
    ------
    DecompositionError
        If the factorization hits a non-positive pivot.
    """
    M = np.asarray(M)
    try:
        factor = linalg.cho_factor(M, lower=True, check_finite=True)
    except (linalg.LinAlgError, ValueError) as exc:
        raise DecompositionError(f"Cholesky factorization failed: {exc}") from exc
    logdet = 2.0 * float(np.sum(np.log(np.real(np.diag(factor[0])))))
    return logdet, linalg.cho_solve(factor, B, check_finite=False)


def information_density(H, X, W, sigma2):
    """Information density for given realizations (no sampling).

    ``H`` is N x K, ``X`` is K x n, ``W`` is N x n.
    """
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    X = np.atleast_2d(np.asarray(X, dtype=complex))
    W = np.atleast_2d(np.asarray(W, dtype=complex))
    N, K = H.shape
    n = X.shape[1]
    M = H @ H.conj().T / K + sigma2 * np.eye(N)
    Y = H @ X / math.sqrt(K) + math.sqrt(sigma2) * W
    logdet_m, QY = hermitian_logdet_solve(M, Y)
    # logdet(I + HH^H/(sigma2 K)) = logdet(M) - N log sigma2
    cap = (logdet_m - N * math.log(sigma2)) / K
    quad = float(np.real(np.vdot(Y, QY)))
    noise = float(np.real(np.vdot(W, W)))
    return cap + (quad - noise) / (n * K)


def input_spread(X, power=1.0):
    """Spread of ``A = I_K - power * X X^H / n``.

    ``power`` lets callers pass an integer-valued constellation and its
    exact energy normalization separately, so ``tr A`` is computed without
    rounding (QPSK with ``power = 1/2`` gives ``a == 0`` exactly).
    """
    X = np.atleast_2d(X)
    K, n = X.shape
    A = np.eye(K) - power * (X @ X.conj().T) / n
    a = float(np.real(np.trace(A))) / K
    b = float(np.real(np.vdot(A, A))) / K
    return InputSpread(a, b)


_QPSK = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j])


def _draw(config, rng):
    g = config.geom
    H = _complex_normal(rng, (g.N, g.K))
    if config.input_law == "gaussian":
        X = _complex_normal(rng, (g.K, g.n))
        spread = input_spread(X)
    else:
        Z = _QPSK[rng.integers(0, 4, size=(g.K, g.n))]
        X = Z * math.sqrt(0.5)
        spread = input_spread(Z, power=0.5)
    W = _complex_normal(rng, (g.N, g.n))
    return H, X, W, spread


def sample_information_density(config, trial_index):
    """Draw one trial and return ``(I, InputSpread)``.

    A numerically degenerate draw is redrawn once from the same stream;
    a second failure raises :class:`~fbl_mimo.errors.DecompositionError`.
    """
    if not (0 <= trial_index < config.trials):
        raise DomainError(f"trial_index {trial_index} outside [0, {config.trials})")
    rng = trial_rng(config.seed, trial_index)
    for attempt in range(2):
        H, X, W, spread = _draw(config, rng)
        try:
            return information_density(H, X, W, config.sigma2), spread
        except DecompositionError:
            if attempt == 1:
                raise


def default_workers():
    """Worker count from ``FBL_MIMO_THREADS`` (0 or unset means all CPUs)."""
    raw = os.environ.get("FBL_MIMO_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"FBL_MIMO_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise DomainError("FBL_MIMO_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def _run_chunk(config, start, stop, out):
    for i in range(start, stop):
        try:
            v, s = sample_information_density(config, i)
        except Exception as exc:
            raise SimulationError(f"trial {i} failed: {exc}", trial=i) from exc
        out[i] = (v, s.a, s.b)


def run_trials(config, workers=None):
    """Run every trial of ``config``.

    Results land in an index-addressed buffer, so the output is identical
    for any ``workers`` value.
    """
    workers = default_workers() if workers is None else int(workers)
    if workers < 1:
        raise DomainError("workers must be >= 1")
    T = config.trials
    out = np.empty((T, 3))
    if workers == 1 or T < 2:
        _run_chunk(config, 0, T, out)
    else:
        bounds = np.linspace(0, T, min(workers, T) + 1).astype(int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_chunk, config, lo, hi, out)
                       for lo, hi in zip(bounds[:-1], bounds[1:])]
            for f in futures:
                f.result()
    return SampleSet(config=config, values=out[:, 0].copy(), a=out[:, 1].copy(), b=out[:, 2].copy())


def empirical_feinstein(samples, R, delta_range=(1e-6, 10.0)):
    """Empirical Feinstein bound ``inf_d Pr[I <= R + d] + exp(-nK d)``.

    The objective is a right-continuous step function plus a decreasing
    exponential, so on each interval between jumps its infimum is the
    left limit at the next jump.  The infimum over ``delta_range`` is thus
    found exactly by enumerating the jumps ``d_i = I_i - R`` and the range
    end points.

    Returns
    -------
    (delta_opt, value)
        ``value`` is the infimum; when it is approached from the left of a
        jump, ``delta_opt`` is that jump location.
    """
    values = np.sort(np.asarray(samples.values, dtype=float))
    T = values.size
    if T == 0:
        raise DomainError("empirical_feinstein needs at least one sample")
    nK = samples.config.geom.nK
    lo, hi = delta_range

    def closed(d):
        return np.searchsorted(values, R + d, side="right") / T + math.exp(-nK * d)

    cands = [(closed(lo), lo), (closed(hi), hi)]
    jumps = values - R
    inside = (jumps > lo) & (jumps <= hi)
    if np.any(inside):
        d = jumps[inside]
        # left limit: samples strictly below the jump
        below = np.searchsorted(values, values[inside], side="left") / T
        obj = below + np.exp(-nK * d)
        k = int(np.argmin(obj))
        cands.append((float(obj[k]), float(d[k])))
    value, delta = min(cands)
    return float(delta), float(value)


def ks_distance(z):
    """Kolmogorov-Smirnov distance between the sample ``z`` and ``Phi``."""
    z = np.sort(np.asarray(z, dtype=float))
    T = z.size
    F = phi(z)
    i = np.arange(1, T + 1)
    return float(max(np.max(i / T - F), np.max(F - (i - 1) / T)))


def clt_diagnostics(samples, stats, mode="gaussian_input"):
    """Standardize samples with the theoretical center and scale.

    ``gaussian_input``: ``z = sqrt(nK) (I - C) / theta_plus``.
    ``constrained_input``: ``z = sqrt(nK) (I - C + zeta0 a) / theta_n(a, b)``
    with a per-trial scale.

    Raises
    ------
    DiagnosticError
        In constrained mode, if any trial has a non-positive variance
        radicand; the offending trial indices are attached.
    """
    I = np.asarray(samples.values, dtype=float)
    nK = samples.config.geom.nK
    C = stats.capacity
    if mode == "gaussian_input":
        center = np.full_like(I, C)
        scale = np.full_like(I, stats.theta_plus)
    elif mode == "constrained_input":
        a = np.asarray(samples.a, dtype=float)
        b = np.asarray(samples.b, dtype=float)
        rad = stats.theta_minus ** 2 + stats.zeta1(a) + stats.zeta2 * b
        bad = np.flatnonzero(~(rad > 0))
        if bad.size:
            raise DiagnosticError(
                f"non-positive theta_n^2 in {bad.size} trial(s): {bad[:20].tolist()}",
                trials=bad.tolist(),
            )
        center = C - stats.zeta0 * a
        scale = np.sqrt(rad)
    else:
        raise DomainError(f"unknown mode {mode!r}")
    z = math.sqrt(nK) * (I - center) / scale
    return EmpiricalSummary(
        mean=float(np.mean(z)),
        std=float(np.std(z)),
        standardized_ks=ks_distance(z),
        reference_center=float(np.mean(center)),
        reference_scale=float(np.mean(scale)),
    )
