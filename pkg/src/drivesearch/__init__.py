"""Natural-language scenario retrieval over vehicle test-drive logs.

Aligns multi-frequency signal tables with video frame catalogs, turns both
modalities into text descriptions, answers free-text queries by embedding
similarity, and quantifies how trustworthy each result set is from the
shape of its distance distribution.
"""

from .corpus import (
    CatalogEntry,
    CorpusCatalog,
    Description,
    FrameRef,
    Modality,
    RecordId,
    SignalKind,
    SignalTable,
    TimeSpan,
    load_descriptions,
    load_manifest,
    save_descriptions,
    save_manifest,
)
from .describer import (
    FixtureBackend,
    GeoRegion,
    InterpreterRule,
    PromptSpec,
    RemoteBackend,
    describe_video,
    get_prompt,
    interpret_signals,
    load_prompt_catalog,
    load_regions,
    load_rules,
)
from .engine import (
    Engine,
    EngineConfig,
    Query,
    QueryResponse,
    RankedResult,
    Weights,
    load_engine,
    run_query,
)
from .ingest import (
    ChannelFilter,
    UnifiedSignalTable,
    align_and_concat,
    prune_channels,
    sample_frames,
)
from .metrics import (
    BandThresholds,
    DistanceSeries,
    MetricsReport,
    RelevanceBand,
    Verdict,
    VerdictConfig,
    band,
    compute_metrics,
    export_plot_data,
    make_series,
    verdict,
)
from .similarity import (
    HashedBagProvider,
    RemoteProvider,
    VectorIndex,
    build_index,
    cosine,
    distance,
    embed,
    load_index,
    save_index,
)

__version__ = "0.1.0"
