"""Information dynamics of ordered document streams.

Pipeline: parse and normalize a news corpus, represent documents as topic
distributions, compute windowed novelty/transience/resonance signals,
extract smooth trends, fit windowed resonance-on-novelty slopes, and detect
decoupling episodes. A seeded synthetic stream generator provides ground
truth for validating every stage.
"""

from .errors import DataError, NumericalError
from .ingest import (
    BowMatrix,
    Document,
    Vocabulary,
    build_bow,
    builtin_stopwords,
    load_stem_map,
    load_stopwords,
    normalize,
    parse_corpus,
    tokenize,
)
from .topics import DocRepresentation, LdaConfig, fit_lda, load_representations, write_representations
from .infodyn import (
    SignalSeries,
    WindowSpec,
    compute_signals,
    jsd,
    kld,
    load_signals,
    novelty,
    transience,
    write_signals,
)
from .trendfilter import FilterConfig, SegmentFit, TrendSeries, adaptive_trend, fit_segment, stitch
from .decouple import (
    BaselineSummary,
    DecouplingReport,
    Episode,
    EventSpec,
    SlidingWindow,
    SlopeFit,
    WindowSlope,
    baseline_slopes,
    detect,
    event_window_slopes,
    ols_fit,
)
from .synth import DEFAULT_BASE_DRIFT, DEFAULT_NOISE, InjectedEvent, StreamConfig, generate, ground_truth

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "NumericalError",
    "Document",
    "Vocabulary",
    "BowMatrix",
    "parse_corpus",
    "tokenize",
    "normalize",
    "build_bow",
    "load_stopwords",
    "builtin_stopwords",
    "load_stem_map",
    "LdaConfig",
    "DocRepresentation",
    "fit_lda",
    "load_representations",
    "write_representations",
    "WindowSpec",
    "SignalSeries",
    "kld",
    "jsd",
    "novelty",
    "transience",
    "compute_signals",
    "write_signals",
    "load_signals",
    "FilterConfig",
    "SegmentFit",
    "TrendSeries",
    "fit_segment",
    "stitch",
    "adaptive_trend",
    "SlopeFit",
    "EventSpec",
    "WindowSlope",
    "SlidingWindow",
    "Episode",
    "BaselineSummary",
    "DecouplingReport",
    "ols_fit",
    "baseline_slopes",
    "event_window_slopes",
    "detect",
    "StreamConfig",
    "InjectedEvent",
    "generate",
    "ground_truth",
    "DEFAULT_BASE_DRIFT",
    "DEFAULT_NOISE",
]
