//! Unique words: the top TF-IDF words of each response, where the document
//! set is the set of responses being analyzed.
//!
//! `score(w, d) = count(w, d) * ln(N / df(w))`, stop words removed before
//! counting. A word found in every response scores zero and is never shown.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::textproc::{tokenize, Span, StopList};

#[derive(Debug, Clone, PartialEq)]
pub struct UniqueWordsConfig {
    pub top_n: usize,
    pub stop_list: Arc<StopList>,
}

impl Default for UniqueWordsConfig {
    fn default() -> Self {
        UniqueWordsConfig {
            top_n: 5,
            stop_list: Arc::new(StopList::builtin().clone()),
        }
    }
}

/// TF-IDF scores per response, in corpus order.
#[derive(Debug, Clone, PartialEq)]
pub struct TfIdfTable {
    pub documents: usize,
    pub rows: Vec<(String, BTreeMap<String, f64>)>,
}

impl TfIdfTable {
    pub fn get(&self, response_id: &str, word: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|(id, _)| id == response_id)
            .and_then(|(_, m)| m.get(word).copied())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniqueWord {
    pub word: String,
    pub score: f64,
    pub spans: Vec<Span>,
}

/// Serializes as `{response_id: [{word, score, spans}]}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UniqueWordsResult {
    pub per_response: BTreeMap<String, Vec<UniqueWord>>,
}

pub fn compute_tfidf(corpus: &Corpus, stop_list: &StopList) -> TfIdfTable {
    let counts: Vec<HashMap<String, usize>> = corpus
        .records()
        .iter()
        .map(|r| {
            let mut tf: HashMap<String, usize> = HashMap::new();
            for t in tokenize(&r.text) {
                if t.is_word && !stop_list.contains(&t.norm) {
                    *tf.entry(t.norm).or_default() += 1;
                }
            }
            tf
        })
        .collect();
    let mut df: HashMap<&str, usize> = HashMap::new();
    for tf in &counts {
        for w in tf.keys() {
            *df.entry(w.as_str()).or_default() += 1;
        }
    }
    let n = corpus.len() as f64;
    let rows = corpus
        .records()
        .iter()
        .zip(&counts)
        .map(|(r, tf)| {
            let scores = tf
                .iter()
                .map(|(w, &count)| {
                    let idf = (n / df[w.as_str()] as f64).ln();
                    (w.clone(), count as f64 * idf)
                })
                .collect();
            (r.id.clone(), scores)
        })
        .collect();
    TfIdfTable {
        documents: corpus.len(),
        rows,
    }
}

pub fn unique_words(corpus: &Corpus) -> UniqueWordsResult {
    unique_words_with(corpus, &UniqueWordsConfig::default())
}

pub fn unique_words_with(corpus: &Corpus, config: &UniqueWordsConfig) -> UniqueWordsResult {
    let table = compute_tfidf(corpus, &config.stop_list);
    let mut per_response = BTreeMap::new();
    for (record, (id, scores)) in corpus.records().iter().zip(&table.rows) {
        let mut ranked: Vec<(&String, f64)> = scores
            .iter()
            .filter(|(_, &s)| s > 0.0)
            .map(|(w, &s)| (w, s))
            .collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked.truncate(config.top_n);

        let tokens = tokenize(&record.text);
        let words = ranked
            .into_iter()
            .map(|(w, score)| UniqueWord {
                word: w.clone(),
                score,
                spans: tokens
                    .iter()
                    .filter(|t| t.is_word && t.norm == *w)
                    .map(|t| t.span)
                    .collect(),
            })
            .collect();
        per_response.insert(id.clone(), words);
    }
    UniqueWordsResult { per_response }
}
