"""Tempered 1/2-stable subordinators, elastic drifted Brownian motion, and
the fractional boundary conditions connecting them.

Hot simulation loops run through a compiled extension when available; see
``elasticbm.KERNEL_BACKEND`` for the active backend ("cython" or "numpy")
and the ``ELASTICBM_NO_EXT`` environment variable to force the fallback.
"""
from ._kernels import BACKEND as KERNEL_BACKEND
from .diffusion import (DIFFUSION_VARIANCE_RATE, DiffusionPath,
                        LocalTimeAccumulator, bang_bang_gamma_samples,
                        bm_max_samples, elastic_kill, elastic_survival_curve,
                        running_max, simulate_bang_bang, simulate_bm)
from .errors import InversionUnstableError, QuadratureError, ResourceCapError
from .fracbvp import (ElasticConfig, SolutionField, boundary_residual,
                      density_p, density_p0, density_p0_alt, laplace_invert,
                      laplace_invert_grid, relaxation,
                      relaxation_crossing_time, solve_u,
                      solve_u_laplace_domain, tempered_caputo)
from .randtime import (MonotonePath, RngStream, inverse_density, inverse_mean,
                       inverse_survival, potential_lt1, potential_lt2,
                       sample_increment, sample_inverse, sample_inverse_path,
                       sample_subordinator_path, sample_truncated_inverse,
                       subordinator_cdf, subordinator_density)
from .symbols import (SpecialValue, TemperedSymbol, gauss_kernel, levy_tail,
                      levy_tail_primitive, mittag_leffler_half, phi,
                      phi_analytic)
from .verify import (PINNED_SEED, EcdfSummary, LawCheckReport,
                     check_functional_equiv, check_local_time,
                     check_thm_neg_drift, check_thm_pos_drift, identity_suite,
                     ks_to_cdf, ks_two_sample, run_suite)

__version__ = "0.1.0"
