"""Change-point tests for high-dimensional time series via projections and panels.

Submodules
----------
model       data-generating model: signal shapes, factor noise, synthetic panels
projection  oracle / pre-oracle / quasi-oracle / random search directions
stats       CUSUM processes, variance estimators, test statistics
limits      Monte-Carlo null-limit laws, quantile tables, p-values
efficiency  closed-form high-dimensional efficiency calculators
segment     binary segmentation and the Fuller log-squared-return transform
harness     size/power simulation studies (paper-style figures 1-5)
cli         command-line front end
"""

from . import efficiency, errors, harness, limits, model, projection, segment, stats
from .errors import ChangePointError
from .model import (
    Amoc,
    ChangeSpec,
    Epidemic,
    ErrorStructure,
    FullyDependent,
    GeneralLinear,
    IndependentComponents,
    Mixed,
    PanelSeries,
    Tabulated,
    covariance,
    drift_curve,
    generate,
)
from .projection import (
    Projection,
    Provenance,
    inverse_sqrt,
    oracle,
    pre_oracle,
    quasi_oracle,
    random_unit,
    scaled_random,
    scaled_search,
)
from .segment import (
    PanelTester,
    ProjectionTester,
    SegmentationResult,
    binary_segmentation,
    fuller_transform,
)
from .stats import (
    CusumProcess,
    TestResult,
    WeightFunction,
    amoc_statistic,
    changepoint_estimate,
    component_variances,
    epidemic_statistic,
    panel_cusum,
    panel_statistic,
    projected_cusum,
    tau,
    tau_hat1,
    tau_hat2,
)

__version__ = "0.1.0"
