use std::path::PathBuf;
use std::sync::Arc;

use clap::Args;
use mesoscope_core::analysis::AnalysisConfig;
use mesoscope_core::exact_matches::ExactMatchConfig;
use mesoscope_core::pdc::PdcConfig;
use mesoscope_core::render::{Palette, PaletteError};
use mesoscope_core::textproc::{StopList, StopListError};
use mesoscope_core::unique_words::UniqueWordsConfig;
use thiserror::Error;

/// Analysis constants and resource files shared by every subcommand.
#[derive(Debug, Clone, PartialEq, Args)]
pub struct AnalysisArgs {
    /// Weight on content similarity in the PDC merge gate.
    #[arg(long, env = "MESOSCOPE_PDC_TEXT_WEIGHT", default_value_t = 1.5)]
    pub pdc_text_weight: f64,
    /// Weight on position similarity in the PDC merge gate.
    #[arg(long, env = "MESOSCOPE_PDC_POSITION_WEIGHT", default_value_t = 1.0)]
    pub pdc_position_weight: f64,
    /// A pair merges only when the weighted sum exceeds this.
    #[arg(long, env = "MESOSCOPE_PDC_THRESHOLD", default_value_t = 1.2)]
    pub pdc_threshold: f64,
    /// Minimum share of distinct responses within a merged group.
    #[arg(long, env = "MESOSCOPE_PDC_MIN_DISTINCT", default_value_t = 0.7)]
    pub pdc_min_distinct: f64,
    /// Exact-match score per word of match length.
    #[arg(long, env = "MESOSCOPE_EM_LENGTH_WEIGHT", default_value_t = 0.75)]
    pub em_length_weight: f64,
    /// Exact-match score per response containing the match.
    #[arg(long, env = "MESOSCOPE_EM_COUNT_WEIGHT", default_value_t = 1.0)]
    pub em_count_weight: f64,
    /// Shortest exact match, in words.
    #[arg(long, env = "MESOSCOPE_EM_MIN_WORDS", default_value_t = 3)]
    pub em_min_words: usize,
    /// Stop-list file (one word per line) replacing the built-in list.
    #[arg(long, env = "MESOSCOPE_STOP_LIST")]
    pub stop_list: Option<PathBuf>,
    /// Palette file with twelve #rrggbb colors.
    #[arg(long, env = "MESOSCOPE_PALETTE")]
    pub palette: Option<PathBuf>,
}

impl Default for AnalysisArgs {
    fn default() -> Self {
        AnalysisArgs {
            pdc_text_weight: 1.5,
            pdc_position_weight: 1.0,
            pdc_threshold: 1.2,
            pdc_min_distinct: 0.7,
            em_length_weight: 0.75,
            em_count_weight: 1.0,
            em_min_words: 3,
            stop_list: None,
            palette: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error(transparent)]
    StopList(#[from] StopListError),
    #[error(transparent)]
    Palette(#[from] PaletteError),
    #[error("--em-min-words must be at least 1")]
    MinWords,
}

impl AnalysisArgs {
    pub fn analysis_config(&self) -> Result<AnalysisConfig, ConfigError> {
        if self.em_min_words == 0 {
            return Err(ConfigError::MinWords);
        }
        let stop_list = match &self.stop_list {
            Some(path) => StopList::from_path(path)?,
            None => StopList::builtin().clone(),
        };
        Ok(AnalysisConfig {
            exact: ExactMatchConfig {
                length_weight: self.em_length_weight,
                count_weight: self.em_count_weight,
                min_words: self.em_min_words,
                ..ExactMatchConfig::default()
            },
            unique: UniqueWordsConfig {
                stop_list: Arc::new(stop_list),
                ..UniqueWordsConfig::default()
            },
            pdc: PdcConfig {
                text_weight: self.pdc_text_weight,
                position_weight: self.pdc_position_weight,
                threshold: self.pdc_threshold,
                min_distinct_ratio: self.pdc_min_distinct,
            },
        })
    }

    pub fn palette(&self) -> Result<Palette, ConfigError> {
        Ok(match &self.palette {
            Some(path) => Palette::from_path(path)?,
            None => Palette::default(),
        })
    }
}
