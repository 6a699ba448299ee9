//! Presentation-agnostic view models: the grid with highlight layers, the
//! interleaved PDC document, and the grouped linear list.

mod grid;
mod interleaved;
mod linear;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::Feature;
use crate::corpus::CorpusError;

pub use grid::{build_grid, GridCell, GridSpec, GridViewModel};
pub use interleaved::{build_interleaved, InterleavedBlock, InterleavedLine, InterleavedViewModel, LineWord};
pub use linear::{build_linear, LinearEntry, LinearGroup, LinearViewModel};

pub const PALETTE_SIZE: usize = 12;

/// Qualitative palette suited to text backgrounds (ColorBrewer Set3).
pub const DEFAULT_PALETTE: [&str; PALETTE_SIZE] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5",
    "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f",
];

#[derive(Debug, Error)]
pub enum PaletteError {
    #[error("cannot read palette {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("palette needs exactly {PALETTE_SIZE} colors, found {0}")]
    WrongSize(usize),
    #[error("palette entry `{0}` is not a #rrggbb color")]
    BadColor(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Palette {
    colors: Vec<String>,
}

impl Default for Palette {
    fn default() -> Self {
        Palette {
            colors: DEFAULT_PALETTE.iter().map(|c| c.to_string()).collect(),
        }
    }
}

impl Palette {
    /// One `#rrggbb` color per line; blank lines and `#`-prefixed comments
    /// (a `#` followed by a space) are ignored.
    pub fn parse(text: &str) -> Result<Palette, PaletteError> {
        let colors: Vec<String> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with("# "))
            .map(str::to_string)
            .collect();
        if colors.len() != PALETTE_SIZE {
            return Err(PaletteError::WrongSize(colors.len()));
        }
        for c in &colors {
            let hex = c.strip_prefix('#').unwrap_or("");
            if hex.len() != 6 || !hex.bytes().all(|b| b.is_ascii_hexdigit()) {
                return Err(PaletteError::BadColor(c.clone()));
            }
        }
        Ok(Palette { colors })
    }

    pub fn from_path(path: &Path) -> Result<Palette, PaletteError> {
        let text = std::fs::read_to_string(path).map_err(|source| PaletteError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Palette::parse(&text)
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }
}

/// Rank `i` gets color `i`; items past the palette get none.
pub fn assign_colors<K: Ord + Clone>(ranked: &[K]) -> BTreeMap<K, usize> {
    ranked
        .iter()
        .take(PALETTE_SIZE)
        .enumerate()
        .map(|(i, k)| (k.clone(), i))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Highlight {
    pub response_id: String,
    pub start: usize,
    pub end: usize,
    pub color: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegendEntry {
    pub color: usize,
    pub label: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RenderError {
    #[error("unknown dimension `{0}`")]
    UnknownDimension(String),
    #[error("dimension `{dimension}` has no value `{value}`")]
    UnknownValue { dimension: String, value: String },
    #[error("rows and columns both use `{0}`; pick two different dimensions")]
    SameAxis(String),
    #[error("`{0}` is already a row or column dimension and cannot be fixed")]
    FixedIsAxis(String),
    #[error("dimension `{0}` has several values; select one to show (e.g. --fix {0}=VALUE)")]
    MissingFixed(String),
    #[error(
        "cell ({row}, {col}) matches {count} responses; fix another dimension to choose one{hint}"
    )]
    AmbiguousCell {
        row: String,
        col: String,
        count: usize,
        hint: String,
    },
    #[error("badge dimension `{dimension}` has {count} values; at most {PALETTE_SIZE} are supported")]
    TooManyBadgeValues { dimension: String, count: usize },
    #[error("view wants a {expected} analysis but was given {given}")]
    FeatureMismatch { expected: Feature, given: Feature },
    #[error("analysis refers to sentence {index} of `{response_id}`, which this corpus does not have")]
    StaleAnalysis { response_id: String, index: usize },
}

impl From<CorpusError> for RenderError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::UnknownDimension(d) => RenderError::UnknownDimension(d),
            CorpusError::UnknownValue { dimension, value } => {
                RenderError::UnknownValue { dimension, value }
            }
            other => unreachable!("slice only reports unknown dimensions or values: {other}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colors_by_rank() {
        let m = assign_colors(&["a", "b", "c", "d"]);
        assert_eq!(m.values().copied().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        assert_eq!(m["c"], 2);
        assert!(assign_colors::<u8>(&[]).is_empty());
        let many: Vec<u32> = (0..13).collect();
        let m = assign_colors(&many);
        assert_eq!(m.len(), 12);
        assert_eq!(m.get(&12), None);
        assert_eq!(m[&11], 11);
    }

    #[test]
    fn palette_parsing() {
        let text = DEFAULT_PALETTE.join("\n");
        assert_eq!(Palette::parse(&text).unwrap(), Palette::default());
        assert!(matches!(
            Palette::parse("#ffffff\n"),
            Err(PaletteError::WrongSize(1))
        ));
        let bad = format!("{}\nblue", DEFAULT_PALETTE[..11].join("\n"));
        assert!(matches!(Palette::parse(&bad), Err(PaletteError::BadColor(_))));
    }
}
