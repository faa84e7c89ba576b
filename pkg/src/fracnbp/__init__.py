"""Space-fractional negative binomial processes: pmfs, simulation and checks."""
from .distributions import (
    adaptive_table,
    compound_x_pgf,
    distorder_pgf,
    distorder_pmf,
    distorder_pmf_table,
    gamma_density,
    nb_pmf,
    polya_pgf,
    polya_pmf,
    polya_pmf_table,
    sfnb_laplace_exponent,
    sfnb_levy_measure,
    sfnb_pgf,
    sfnb_pmf,
    sfnb_pmf_table,
    sfpp_pgf,
    sfpp_pmf,
    small_increment_prob,
)
from .errors import (
    AccuracyLoss,
    ClampWarning,
    DivergentSeries,
    EmptySample,
    EventBudgetExceeded,
    FracNBError,
    InsufficientSupport,
    InvalidSupport,
    MaxTermsExceeded,
)
from .multivariate import (
    multi_laplace_exponent,
    multi_levy_measure,
    multi_nb_pmf,
    multi_pgf,
    multi_pmf_table,
    multi_sfnb_pmf,
)
from .params import DistOrderParams, MultiParams, PmfTable, PolyaParams, SfnbParams
from .residuals import fractional_difference, governing_residual
from .simulation import (
    RngStream,
    SamplePath,
    TimeGrid,
    sample_multi_sfnb,
    sample_sfnb,
    sample_stable_unit,
    sim_gamma_path,
    sim_multi_sfnb,
    sim_poisson_arrivals,
    sim_sfnb_path,
    sim_stable_path,
    simulate_paths,
)
from .validation import GofReport, chi_square_stat, empirical_pmf, gof_report, mc_laplace_check, tv_distance
from .wright import DEFAULT_CONFIG, SeriesConfig, WrightSpec21, gen_binomial, wright_2psi1

__version__ = "0.1.0"
