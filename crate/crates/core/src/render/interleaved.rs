use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{LegendEntry, Palette, RenderError, PALETTE_SIZE};
use crate::corpus::Corpus;
use crate::pdc::PdcResult;
use crate::textproc::{segment_corpus, Sentence};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineWord {
    pub text: String,
    /// Byte offsets relative to the start of the line's sentence.
    pub start: usize,
    pub end: usize,
    pub gray: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterleavedLine {
    pub response_id: String,
    pub sentence_index: usize,
    pub badge_color: Option<usize>,
    pub text: String,
    pub words: Vec<LineWord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterleavedBlock {
    pub group_id: usize,
    pub median_pos: f64,
    pub mean_pos: f64,
    pub lines: Vec<InterleavedLine>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterleavedViewModel {
    pub badge_dim: String,
    pub legend: Vec<LegendEntry>,
    pub blocks: Vec<InterleavedBlock>,
    pub palette: Vec<String>,
}

/// One block per PDC group in result order; lines follow each group's
/// display order and carry its gray flags.
pub fn build_interleaved(
    corpus: &Corpus,
    pdc: &PdcResult,
    badge_dim: &str,
    palette: &Palette,
) -> Result<InterleavedViewModel, RenderError> {
    let badge_values: Vec<String> = match corpus.dimension(badge_dim) {
        Some(d) => d.values.clone(),
        None if corpus.is_empty() => Vec::new(),
        None => return Err(RenderError::UnknownDimension(badge_dim.to_string())),
    };
    if badge_values.len() > PALETTE_SIZE {
        return Err(RenderError::TooManyBadgeValues {
            dimension: badge_dim.to_string(),
            count: badge_values.len(),
        });
    }
    let legend = badge_values
        .iter()
        .enumerate()
        .map(|(color, v)| LegendEntry {
            color,
            label: v.clone(),
        })
        .collect();

    let segmented = segment_corpus(corpus);
    let sentences: HashMap<&str, &[Sentence]> = segmented
        .iter()
        .map(|r| (r.id.as_str(), r.sentences.as_slice()))
        .collect();
    let badges: HashMap<&str, Option<usize>> = corpus
        .records()
        .iter()
        .map(|r| {
            let color = r
                .dimension_value(badge_dim)
                .and_then(|v| badge_values.iter().position(|b| *b == *v));
            (r.id.as_str(), color)
        })
        .collect();

    let mut blocks = Vec::with_capacity(pdc.groups.len());
    for g in &pdc.groups {
        let mut lines = Vec::with_capacity(g.order.len());
        for (line_no, &member) in g.order.iter().enumerate() {
            let m = &g.members[member];
            let stale = || RenderError::StaleAnalysis {
                response_id: m.response_id.clone(),
                index: m.sentence_index,
            };
            let s = sentences
                .get(m.response_id.as_str())
                .and_then(|ss| ss.get(m.sentence_index))
                .filter(|s| s.span == m.char_span)
                .ok_or_else(stale)?;
            let flags = g.gray.get(line_no).ok_or_else(stale)?;
            let words: Vec<_> = s.words().collect();
            if words.len() != flags.len() {
                return Err(stale());
            }
            let text = &segmented_text(&segmented, &m.response_id)[s.span.start..s.span.end];
            lines.push(InterleavedLine {
                response_id: m.response_id.clone(),
                sentence_index: m.sentence_index,
                badge_color: badges.get(m.response_id.as_str()).copied().flatten(),
                text: text.to_string(),
                words: words
                    .iter()
                    .zip(flags)
                    .map(|(t, &gray)| LineWord {
                        text: t.surface.clone(),
                        start: t.span.start - s.span.start,
                        end: t.span.end - s.span.start,
                        gray,
                    })
                    .collect(),
            });
        }
        blocks.push(InterleavedBlock {
            group_id: g.id,
            median_pos: g.median_pos,
            mean_pos: g.mean_pos,
            lines,
        });
    }

    Ok(InterleavedViewModel {
        badge_dim: badge_dim.to_string(),
        legend,
        blocks,
        palette: palette.colors().to_vec(),
    })
}

fn segmented_text<'a>(segmented: &'a [crate::textproc::SegmentedResponse], id: &str) -> &'a str {
    segmented
        .iter()
        .find(|r| r.id == id)
        .map(|r| r.text.as_str())
        .unwrap_or_default()
}
