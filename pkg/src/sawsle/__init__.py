"""Monte Carlo laboratory for half-plane SAWs and chordal SLE as
parameterized curves: pivot sampling, slit-map SLE traces, zipper
capacity, 1/nu-variation estimators, and the comparison experiments."""

from .curves import ParamCurve, point_at, rescale_curve
from .walks import (Walk, init_walk, pivot_step, run_chain, scaled_path,
                    PivotChain, enumerate_half_plane_saws)
from .loewner import (TimePartition, DrivingFunction, SleTrace,
                      partition_times, sample_driving, incremental_slit_map,
                      inverse_slit_map, trace_point, trace_points,
                      sample_trace, sample_endpoints)
from .zipper import (CapacityProfile, ElementaryMap, ZipperError,
                     elementary_arc_map, elementary_segment_map,
                     zip_points, zip_curve, time_at_capacity)
from .variation import (VariationSample, var_p_uniform, var_no, var_cap,
                        time_at_variation, variation_times,
                        intersection_estimate, variance_vs_dt,
                        capacity_parameterized, TraceExhausted)
from .stats import (EmpiricalCDF, CovarianceProfile, polar, polar_arrays,
                    ecdf, cdf_diff, cdf_grid, normalize_by_mean,
                    batched_means, batched_means_matrix, covariance_profile,
                    moment_estimates)

__version__ = "0.1.0"

from .experiments import (ExperimentConfig, ConfigError, list_experiments,
                          run, run_experiment, resume)  # noqa: E402
