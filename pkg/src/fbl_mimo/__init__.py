"""Second-order coding rates and finite-blocklength bounds for MIMO
Rayleigh block-fading channels with Gaussian inputs.

Large-system quantities come from the Marchenko-Pastur law
(:mod:`fbl_mimo.mp_core`), closed-form statistics and bounds from
:mod:`fbl_mimo.second_order` and :mod:`fbl_mimo.finite_blocklength`, and
Monte Carlo checks from :mod:`fbl_mimo.mc_lab`.
"""

__version__ = "0.1.0"

from .errors import (
    ConsistencyError,
    ConvergenceError,
    DecompositionError,
    DiagnosticError,
    DomainError,
    OutOfRegimeError,
    SimulationError,
)
from .mp_core import (
    DEFAULT_QUADRATURE,
    DeltaGammaTable,
    MpPoint,
    QuadratureSpec,
    delta0,
    delta0_prime,
    delta_gamma_tables,
    mp_measure_integral,
    mp_support,
    tail_quadrature,
)
from .second_order import (
    AsymptoticLimits,
    ErrorBounds,
    InputSpread,
    OutageBounds,
    SecondOrderStats,
    SystemGeometry,
    asymptotic_limits,
    capacity,
    compute_stats,
    outage_bounds,
    pe_bounds,
    phi,
    sigma2_to_snr_db,
    snr_db_to_sigma2,
    theta_n_constrained,
    theta_pair,
)
from .finite_blocklength import FiniteBound, SweepRow, delta_star, finite_upper, sweep
from .mc_lab import (
    SampleSet,
    TrialConfig,
    clt_diagnostics,
    empirical_feinstein,
    information_density,
    ks_distance,
    run_trials,
    sample_information_density,
)
