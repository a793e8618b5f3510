"""Delphi consultation service for refining publisher prestige rankings."""

from .analytics import (
    ChangeStats,
    ConcentrationResult,
    EqualizationReport,
    ResponseRateRow,
    change_stats,
    concentration,
    equalization_report,
    gini,
    lorenz,
    response_rates,
    total_response_rates,
)
from .delphi import (
    ExpertResponse,
    FinalCategory,
    Panel,
    PanelState,
    PublisherRoundAggregate,
    QuestionnaireItem,
    ResponseItem,
)
from .ranking import (
    CategoryMapping,
    Field,
    RankedEntry,
    RankedList,
    Scope,
    assign_cumulative_quartiles,
    import_ranking,
    map_quartile_to_category,
    quartile_of_share,
    round_to_category_numeric,
)
from .sampling import (
    Roster,
    SampleSpec,
    SamplingParams,
    Stratum,
    Subject,
    allocate,
    draw_sample,
    extend_sample,
    required_sample_size,
)
from .service import PanelService
from .simulate import SimulationConfig, run_consultation, run_equalization
from .store import PanelStore

__version__ = "0.1.0"

__all__ = [
    "CategoryMapping",
    "ChangeStats",
    "ConcentrationResult",
    "EqualizationReport",
    "ExpertResponse",
    "Field",
    "FinalCategory",
    "Panel",
    "PanelService",
    "PanelState",
    "PanelStore",
    "PublisherRoundAggregate",
    "QuestionnaireItem",
    "RankedEntry",
    "RankedList",
    "ResponseItem",
    "ResponseRateRow",
    "Roster",
    "SampleSpec",
    "SamplingParams",
    "Scope",
    "SimulationConfig",
    "Stratum",
    "Subject",
    "allocate",
    "assign_cumulative_quartiles",
    "change_stats",
    "concentration",
    "draw_sample",
    "equalization_report",
    "extend_sample",
    "gini",
    "import_ranking",
    "lorenz",
    "map_quartile_to_category",
    "quartile_of_share",
    "required_sample_size",
    "response_rates",
    "round_to_category_numeric",
    "run_consultation",
    "run_equalization",
    "total_response_rates",
]
