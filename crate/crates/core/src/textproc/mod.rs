//! Tokenization, sentence segmentation, stop words and sentence positions.
//!
//! Every analysis compares words by their case-folded form; there is no
//! stemming. Offsets are UTF-8 byte offsets into the response text.

mod sentences;
mod stopwords;
mod tokenize;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Corpus;

pub use sentences::{split_sentences, ABBREVIATIONS};
pub use stopwords::{is_stop_word, StopList, StopListError, BUILTIN_STOP_LIST};
pub use tokenize::tokenize;

/// Half-open byte range `[start, end)`. Serializes as `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub const fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn shift(self, by: usize) -> Span {
        Span::new(self.start + by, self.end + by)
    }

    pub fn slice<'a>(&self, text: &'a str) -> &'a str {
        &text[self.start..self.end]
    }
}

impl From<(usize, usize)> for Span {
    fn from((start, end): (usize, usize)) -> Self {
        Span { start, end }
    }
}

impl From<Span> for (usize, usize) {
    fn from(s: Span) -> Self {
        (s.start, s.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    /// Lower-cased surface; empty for punctuation tokens.
    pub norm: String,
    pub span: Span,
    pub is_word: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sentence {
    pub response_id: String,
    pub index: usize,
    pub span: Span,
    /// Tokens with spans relative to the whole response text.
    pub tokens: Vec<Token>,
    pub norm_pos: f64,
}

impl Sentence {
    pub fn words(&self) -> impl Iterator<Item = &Token> + '_ {
        self.tokens.iter().filter(|t| t.is_word)
    }

    pub fn word_norms(&self) -> Vec<&str> {
        self.words().map(|t| t.norm.as_str()).collect()
    }

    pub fn word_count(&self) -> usize {
        self.words().count()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TextError {
    #[error("sentence index {index} out of range for {count} sentences")]
    PositionOutOfRange { index: usize, count: usize },
}

/// Index scaled to `[0, 1]`; a lone sentence sits at 0.5.
pub fn normalized_position(index: usize, count: usize) -> Result<f64, TextError> {
    if count == 0 || index >= count {
        return Err(TextError::PositionOutOfRange { index, count });
    }
    if count == 1 {
        return Ok(0.5);
    }
    Ok(index as f64 / (count - 1) as f64)
}

/// Splits and tokenizes one response.
pub fn segment(response_id: &str, text: &str) -> Vec<Sentence> {
    let spans = split_sentences(text);
    let count = spans.len();
    spans
        .into_iter()
        .enumerate()
        .map(|(index, span)| {
            let tokens = tokenize(span.slice(text))
                .into_iter()
                .map(|mut t| {
                    t.span = t.span.shift(span.start);
                    t
                })
                .collect();
            Sentence {
                response_id: response_id.to_string(),
                index,
                span,
                tokens,
                norm_pos: normalized_position(index, count).expect("index < count"),
            }
        })
        .collect()
}

/// A response with its sentences.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentedResponse {
    pub id: String,
    pub text: String,
    pub sentences: Vec<Sentence>,
}

impl SegmentedResponse {
    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(Sentence::word_count).sum()
    }
}

/// Segments every record, preserving corpus order.
pub fn segment_corpus(corpus: &Corpus) -> Vec<SegmentedResponse> {
    corpus
        .records()
        .iter()
        .map(|r| SegmentedResponse {
            id: r.id.clone(),
            text: r.text.clone(),
            sentences: segment(&r.id, &r.text),
        })
        .collect()
}
