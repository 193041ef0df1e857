"""Grid-less phase-difference-projection DOA estimation for non-uniform linear arrays.

The package splits the problem the way a deployment would: an offline
stage traces the wrapped phase-difference pattern of an array layout once
(`trace_wpdp`), and the online stage turns each snapshot's wrapped phase
differences into an arrival angle with a handful of dot products
(`estimate_pdp`). Grid-search references (`estimate_mle`,
`estimate_music`), the estimation-variance lower bound (`crlb`),
multiplication-count models (`op_count`) and a deterministic Monte Carlo
harness (`run_scenario`) round out the toolkit. Scikit-learn style
wrappers live in `pdpdoa.estimators`.
"""

from .baselines import GridSpec, crlb, estimate_mle, estimate_music, op_count
from .estimators import (
    MleDoaEstimator,
    MusicDoaEstimator,
    PdpDoaEstimator,
    PhaseDifferenceTransformer,
)
from .geometry import (
    ArrayGeometry,
    PairSet,
    geometry_from_meters,
    make_geometry,
    make_pairs,
)
from .harness import (
    PRESETS,
    R1_POSITIONS,
    R2_POSITIONS,
    ScenarioConfig,
    ScenarioResult,
    load_config,
    rmse_deg,
    run_scenario,
    save_config,
    summary_csv,
    write_csv,
)
from .pdp import DoaEstimate, estimate_pdp, nearest_projection_point
from .signal import (
    SourceParams,
    measure_wpd,
    steering_vector,
    synthesize_snapshot,
    wrap,
    wrap_count,
)
from .wpdp import (
    AmbiguityReport,
    WpdpModel,
    count_lines_formula,
    detect_ambiguity,
    export_segments_csv,
    hyperplane_distance,
    load_model,
    project,
    save_model,
    trace_wpdp,
)

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry",
    "PairSet",
    "make_geometry",
    "make_pairs",
    "geometry_from_meters",
    "SourceParams",
    "steering_vector",
    "synthesize_snapshot",
    "wrap",
    "wrap_count",
    "measure_wpd",
    "WpdpModel",
    "AmbiguityReport",
    "project",
    "hyperplane_distance",
    "count_lines_formula",
    "trace_wpdp",
    "detect_ambiguity",
    "save_model",
    "load_model",
    "export_segments_csv",
    "DoaEstimate",
    "nearest_projection_point",
    "estimate_pdp",
    "GridSpec",
    "estimate_mle",
    "estimate_music",
    "crlb",
    "op_count",
    "PdpDoaEstimator",
    "MleDoaEstimator",
    "MusicDoaEstimator",
    "PhaseDifferenceTransformer",
    "ScenarioConfig",
    "ScenarioResult",
    "run_scenario",
    "rmse_deg",
    "summary_csv",
    "write_csv",
    "save_config",
    "load_config",
    "PRESETS",
    "R1_POSITIONS",
    "R2_POSITIONS",
    "__version__",
]
