"""taxi-sentinel: pilot-ATC transcript understanding and surface collision risk."""

from importlib.resources import files
from pathlib import Path

__version__ = "0.1.0"


def data_path(name: str) -> Path:
    """Path to a bundled data file, e.g. data_path('fixtures/haneda_graph.json')."""
    return Path(str(files("taxisentinel").joinpath("data", name)))


from .airport import (  # noqa: E402
    AirportGraph,
    Link,
    Node,
    NodeKind,
    SpeedClass,
    TaxiPlan,
    classify_link,
    link_destination,
    load_graph,
    plan_from_nodes,
    plan_overlap,
    resolve_destination,
    shortest_taxi_plan,
)
from .evaluation import (  # noqa: E402
    AnnotatedUtterance,
    MetricsReport,
    corpus_stats,
    merge_override,
    score,
)
from .montecarlo import (  # noqa: E402
    AircraftSpec,
    ScenarioConfig,
    SnapshotFrame,
    load_scenario,
    mc_collision_oracle,
    replay,
    sample_route_times,
)
from .risk import (  # noqa: E402
    CollisionSpot,
    RiskScore,
    collision_probability,
    expected_inverse_speed,
    overlap_density,
    overlap_density_quadrature,
    risk_map,
)
from .rules import (  # noqa: E402
    EntityLabel,
    EntitySpan,
    RuleSet,
    SpanSource,
    compile_ruleset,
    match_rules,
    normalize_callsign,
)
from .speedfit import (  # noqa: E402
    FitReport,
    LognormalHypothesis,
    NormalHypothesis,
    SpeedSample,
    TrackPoint,
    WeightClass,
    anova_f,
    fit_link_reports,
    fit_lognormal,
    kruskal_wallis,
    ks_test,
    link_speed_extract,
    qq_points,
)
from .transcripts import (  # noqa: E402
    BuildResult,
    InfoRow,
    Utterance,
    build_info_table,
    carry_forward,
    classify_dest_runway,
    read_transcript_jsonl,
)
from .traveltime import (  # noqa: E402
    LinkTimeDist,
    LogNormalParams,
    RouteTimeDist,
    from_physical_moments,
    fw_compose,
    link_time_dist,
    route_cdf,
    route_pdf,
    time_moments,
)
