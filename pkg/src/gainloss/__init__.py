"""Gain/loss asymmetry and leverage effect toolkit for daily price series."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateInputError,
    DomainError,
    EmptyError,
    FitError,
    GainLossError,
    IngestError,
    SimulationError,
    SizeError,
    StationarityError,
)
from .series import (  # noqa: E402
    LogPriceSeries,
    PriceSeries,
    ReturnSeries,
    SeriesStats,
    derive_seed,
    permute_returns,
    rebuild,
    returns,
    series_hash,
    stats,
    to_log,
)
from .models import (  # noqa: E402
    EgarchParams,
    RetardedParams,
    SimulationSpec,
    egarch_unconditional_variance,
    simulate_egarch,
    simulate_iid_gaussian,
    simulate_retarded,
)
from .fpt import FptDistribution, FptSamples, empirical_distribution, fpt_samples, fpt_samples_fast, fpt_samples_naive  # noqa: E402
from .leverage import LeverageCurve, leverage_bouchaud, leverage_corr, leverage_curve, leverage_homogeneous  # noqa: E402
from .fitters import (  # noqa: E402
    AsymmetryMeasure,
    ExpDecayFit,
    GenGammaParams,
    LinearFit,
    asymmetry,
    fit_expdecay,
    fit_gengamma,
    gengamma_mode,
    gengamma_pdf,
    linear_fit,
)
from .wavelet import WaveletSpec, dwt, high_pass_filtration, high_pass_returns, idwt  # noqa: E402
from .estimators import (  # noqa: E402
    FirstPassageTime,
    GainLossAsymmetry,
    GenGammaDensity,
    LeverageEstimator,
    ReturnPermuter,
    WaveletHighPass,
)
