"""Categorical episode logs and functor-based reasoning."""

from .belog import (
    BeLog,
    BeRelation,
    BeVerbType,
    characteristics,
    class_centre,
    equivalence_from_class,
    is_member,
    mapping_compatibility,
    prototype_distance,
    similarity_by_characteristics,
)
from .boolmat import (
    BoolMatrix,
    CompletenessReport,
    adjacency,
    causal_closure,
    conversion_pair,
    evaluate_conversion,
)
from .errors import CognilogError, ParseError
from .model import (
    Action,
    ELog,
    Kind,
    Participant,
    RawData,
    SLog,
    ValidationReport,
    build_elog,
    canonical_action_order,
    decompose_transitive,
    extract_subepisode,
    validate_category,
)
from .reasoning import (
    AbstractionResult,
    ClassificationResult,
    ComprehensionTree,
    InferenceResult,
    Plan,
    abstract_episode,
    classify_story,
    comprehend,
    generate_slog,
    infer_missing,
    plan,
)
from .search import (
    Functor,
    Score,
    SearchConfig,
    brute_force_functors,
    natural_transformation,
    search_functors,
)
from .store import Store, format_belog, format_log, load, parse_belog, parse_log, save
from .temporal import (
    Interval,
    TemporalReport,
    VendlerClass,
    check_temporal_consistency,
    vendler_type,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
