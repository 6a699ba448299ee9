//! Core of mesoscope: corpus ingestion, text processing, the three
//! cross-response analyses (exact matches, unique words, positional
//! diction clustering) and view models for rendering them.

pub mod analysis;
pub mod corpus;
pub mod exact_matches;
pub mod pdc;
pub mod render;
pub mod synthetic;
pub mod textproc;
pub mod unique_words;

pub use analysis::{
    analyze, AnalysisConfig, AnalysisDocument, AnalysisError, AnalysisResult, Feature,
    UnknownFeature,
};
pub use corpus::{ingest_jsonl, ingest_str, Corpus, CorpusError, Dimension, ResponseRecord};
pub use exact_matches::{find_exact_matches, ExactMatchConfig, ExactMatchError, MatchSet, Occurrence};
pub use pdc::{cluster, cluster_with, MergeEvent, PdcConfig, PdcResult, SentenceGroup, SentenceRef};
pub use render::{
    assign_colors, build_grid, build_interleaved, build_linear, GridSpec, GridViewModel,
    Highlight, InterleavedViewModel, LegendEntry, LinearViewModel, Palette, PaletteError,
    RenderError, PALETTE_SIZE,
};
pub use textproc::{Sentence, Span, StopList, StopListError, Token};
pub use unique_words::{unique_words, UniqueWord, UniqueWordsConfig, UniqueWordsResult};
