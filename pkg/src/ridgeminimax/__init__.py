"""Ridge regression risk theory for high-dimensional Gaussian linear models."""

__version__ = "0.1.0"

from .mp_law import (  # noqa: E402
    RhoLimit, asymptotic_risk, asymptotic_risk_low_dim, mp_cdf, mp_density, mp_expect,
    mp_stieltjes, mp_support,
)
from .model import DataSet, ModelConfig, generate, load_dataset, sample_sphere, write_dataset  # noqa: E402
from .estimators import adaptive_ridge, adaptive_tau_squared, null_estimate, ols, ridge  # noqa: E402
from .spectra import (  # noqa: E402
    esd_kolmogorov_distance, exact_ridge_risk, general_t_ridge_risk, spectrum, theorem2_gap_bound,
)
