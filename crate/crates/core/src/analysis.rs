//! Feature selection and a single entry point that runs any analysis.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::corpus::Corpus;
use crate::exact_matches::{find_exact_matches_with, ExactMatchConfig, ExactMatchError, MatchSet};
use crate::pdc::{cluster_with, PdcConfig, PdcResult};
use crate::unique_words::{unique_words_with, UniqueWordsConfig, UniqueWordsResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    None,
    ExactMatches,
    UniqueWords,
    Pdc,
}

impl Feature {
    pub const ALL: [Feature; 4] = [
        Feature::None,
        Feature::ExactMatches,
        Feature::UniqueWords,
        Feature::Pdc,
    ];
    /// Features that produce an analysis.
    pub const ANALYSES: [Feature; 3] = [Feature::ExactMatches, Feature::UniqueWords, Feature::Pdc];

    pub fn as_str(self) -> &'static str {
        match self {
            Feature::None => "none",
            Feature::ExactMatches => "exact_matches",
            Feature::UniqueWords => "unique_words",
            Feature::Pdc => "pdc",
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown feature `{0}` (expected none, exact_matches, unique_words or pdc)")]
pub struct UnknownFeature(pub String);

impl FromStr for Feature {
    type Err = UnknownFeature;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Feature::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| UnknownFeature(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnalysisConfig {
    pub exact: ExactMatchConfig,
    pub unique: UniqueWordsConfig,
    pub pdc: PdcConfig,
}

impl AnalysisConfig {
    /// The parameters that determine `feature`'s output, echoed alongside
    /// results and used for cache keys.
    pub fn params(&self, feature: Feature) -> Value {
        match feature {
            Feature::None => json!({}),
            Feature::ExactMatches => json!({
                "length_weight": self.exact.length_weight,
                "count_weight": self.exact.count_weight,
                "min_words": self.exact.min_words,
                "max_sets": self.exact.max_sets,
            }),
            Feature::UniqueWords => {
                let list = &self.unique.stop_list;
                json!({
                    "top_n": self.unique.top_n,
                    "stop_list_version": list.version(),
                    "stop_list_words": list.words(),
                })
            }
            Feature::Pdc => json!({
                "text_weight": self.pdc.text_weight,
                "position_weight": self.pdc.position_weight,
                "threshold": self.pdc.threshold,
                "min_distinct_ratio": self.pdc.min_distinct_ratio,
            }),
        }
    }

    /// Like [`params`](Self::params) but with the stop list abbreviated to
    /// its version and size, for human-facing output.
    pub fn params_summary(&self, feature: Feature) -> Value {
        let mut v = self.params(feature);
        if feature == Feature::UniqueWords {
            v["stop_list_words"] = json!(self.unique.stop_list.len());
        }
        v
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error(transparent)]
    ExactMatches(#[from] ExactMatchError),
}

/// Serializes as the feature's own schema.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum AnalysisResult {
    ExactMatches(Vec<MatchSet>),
    UniqueWords(UniqueWordsResult),
    Pdc(PdcResult),
}

impl AnalysisResult {
    pub fn feature(&self) -> Feature {
        match self {
            AnalysisResult::ExactMatches(_) => Feature::ExactMatches,
            AnalysisResult::UniqueWords(_) => Feature::UniqueWords,
            AnalysisResult::Pdc(_) => Feature::Pdc,
        }
    }
}

/// Runs `feature` over `corpus`; `Feature::None` yields `None`.
pub fn analyze(
    corpus: &Corpus,
    feature: Feature,
    config: &AnalysisConfig,
) -> Result<Option<AnalysisResult>, AnalysisError> {
    Ok(match feature {
        Feature::None => None,
        Feature::ExactMatches => Some(AnalysisResult::ExactMatches(find_exact_matches_with(
            corpus,
            &config.exact,
        )?)),
        Feature::UniqueWords => Some(AnalysisResult::UniqueWords(unique_words_with(
            corpus,
            &config.unique,
        ))),
        Feature::Pdc => Some(AnalysisResult::Pdc(cluster_with(corpus, &config.pdc))),
    })
}

/// The JSON document written by `analyze` and served by the HTTP API.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisDocument<'a> {
    pub feature: Feature,
    pub params: Value,
    pub result: &'a AnalysisResult,
}
