"""Size/location decomposition of support functions for set-valued time series."""

__version__ = "0.1.0"

from .decomposition import DecompProfile, SeriesProfiles, SupportProfile, decompose, decompose_body, profile
from .dependence import DependenceReport, corr_component, cov_component, lag_corr_proxy, psd_check, report
from .errors import (
    ConfigError,
    DataError,
    DegeneracyError,
    SizeLocError,
    StructuralError,
    ValidationError,
)
from .geometry import (
    Disc2D,
    Interval1D,
    Polygon2D,
    Singleton,
    minkowski_sum,
    negate,
    scale,
    steiner_exact,
    support_eval,
    translate,
)
from .sphere import DirectionSet, equal_angle_grid, sample_uniform_antithetic, two_point_1d
