"""Coarse-to-fine UAV emergency-landing-site assessment.

Stage 1 derives a binary suitability raster from semantic labels and
cross-validates it against a map layer; Stage 2 proposes candidate centers
with a radial convolution kernel and a dual tabu mechanism around a
pluggable safe/unsafe verifier; Stage 3 fuses POI proximity, dynamic
context, and regulatory buffers into ranked, justified landing sites.
"""

from . import errors
from .evaluation import (
    BenchmarkQuery,
    RankingOutcome,
    VerdictEntry,
    VerdictLog,
    load_benchmark,
    load_verdict_log,
    passing_rate,
    precision_recall_posratio,
    ranking_metrics,
)
from .pipeline import PipelineConfig, run_pipeline
from .proposal import (
    Candidate,
    Kernel,
    LoopConfig,
    ResponseMap,
    build_kernel,
    compute_response,
    penalize_soft,
    propose,
    run_proposal_loop,
    suppress_hard,
)
from .ranking import (
    ActiveHours,
    DynamicContext,
    LandingSite,
    PoiRecord,
    RegulatoryConfig,
    Weather,
    build_ranking_prompt,
    load_pois,
    poi_distance,
    rank_sites,
    regulatory_check,
    render_justification,
    safety_score,
    score_sites,
)
from .raster import (
    ClassMapping,
    CrossValidationPolicy,
    LabelRaster,
    RasterMeta,
    SuitabilityRaster,
    cross_validate,
    derive_suitability,
    load_label_raster,
    load_suitability_raster,
    pixel_to_world,
    save_raster,
    world_to_pixel,
)
from .verify import (
    EndpointConfig,
    HazardLayer,
    PatchRequest,
    RemoteVerifier,
    RuleOracleVerifier,
    Verdict,
    build_patch_prompt,
    parse_verdict,
    remote_verify,
    rule_oracle_verify,
)

__version__ = "0.1.0"
