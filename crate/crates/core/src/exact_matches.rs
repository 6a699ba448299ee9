//! Exact matches: word runs shared verbatim by two or more responses.
//!
//! The pipeline finds every maximal common word run for each pair of
//! responses, cuts runs at sentence boundaries, drops pieces shorter than
//! `min_words`, re-counts each surviving phrase over the whole corpus, drops
//! phrases contained in another surviving phrase, then ranks by
//! `length_weight * words + count_weight * responses` and keeps the top
//! `min(max_sets, n / 2)`.
//!
//! Matching is over case-folded word tokens. Punctuation between words is
//! ignored for matching but included in the reported spans.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Corpus;
use crate::textproc::{segment_corpus, SegmentedResponse, Sentence, Span};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactMatchError {
    #[error("need at least two responses")]
    TooFewResponses,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactMatchConfig {
    pub length_weight: f64,
    pub count_weight: f64,
    pub min_words: usize,
    pub max_sets: usize,
}

impl Default for ExactMatchConfig {
    fn default() -> Self {
        ExactMatchConfig {
            length_weight: 0.75,
            count_weight: 1.0,
            min_words: 3,
            max_sets: 12,
        }
    }
}

impl ExactMatchConfig {
    pub fn score(&self, word_len: usize, resp_count: usize) -> f64 {
        self.length_weight * word_len as f64 + self.count_weight * resp_count as f64
    }

    /// Number of match sets kept for a corpus of `n` responses.
    pub fn cap(&self, n: usize) -> usize {
        self.max_sets.min(n / 2)
    }
}

/// Ranking score with the default weights.
pub fn score(word_len: usize, resp_count: usize) -> f64 {
    ExactMatchConfig::default().score(word_len, resp_count)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Occurrence {
    pub response_id: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchSet {
    /// Case-folded words joined by single spaces.
    pub key: String,
    pub score: f64,
    pub word_len: usize,
    pub resp_count: usize,
    pub occurrences: Vec<Occurrence>,
}

impl MatchSet {
    pub fn words(&self) -> impl Iterator<Item = &str> + '_ {
        self.key.split(' ')
    }
}

/// Every maximal common word run between two responses with at least
/// `min_words` words, longest first (ties by position in `a`, then `b`).
/// Sentence boundaries are ignored at this stage.
pub fn pairwise_common_substrings(
    a: &[Sentence],
    b: &[Sentence],
    min_words: usize,
) -> Vec<Vec<String>> {
    let mut interner = Interner::default();
    let wa = WordSeq::from_sentences(a, &mut interner);
    let wb = WordSeq::from_sentences(b, &mut interner);
    let mut runs = maximal_runs(&wa.ids, &wb.ids, min_words.max(1));
    runs.sort_by(|x, y| y.len.cmp(&x.len).then(x.a.cmp(&y.a)).then(x.b.cmp(&y.b)));
    let mut seen = HashSet::new();
    runs.into_iter()
        .filter(|r| seen.insert(&wa.ids[r.a..r.a + r.len]))
        .map(|r| {
            wa.ids[r.a..r.a + r.len]
                .iter()
                .map(|&id| interner.word(id).to_string())
                .collect()
        })
        .collect()
}

pub fn find_exact_matches(corpus: &Corpus) -> Result<Vec<MatchSet>, ExactMatchError> {
    find_exact_matches_with(corpus, &ExactMatchConfig::default())
}

pub fn find_exact_matches_with(
    corpus: &Corpus,
    config: &ExactMatchConfig,
) -> Result<Vec<MatchSet>, ExactMatchError> {
    find_in_segmented(&segment_corpus(corpus), config)
}

pub fn find_in_segmented(
    responses: &[SegmentedResponse],
    config: &ExactMatchConfig,
) -> Result<Vec<MatchSet>, ExactMatchError> {
    let n = responses.len();
    if n < 2 {
        return Err(ExactMatchError::TooFewResponses);
    }
    let min_words = config.min_words.max(1);
    let mut interner = Interner::default();
    let seqs: Vec<WordSeq> = responses
        .iter()
        .map(|r| WordSeq::from_sentences(&r.sentences, &mut interner))
        .collect();

    // Steps 1-3: pairwise maximal runs, cut at sentence boundaries in both
    // responses, short pieces dropped.
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let per_pair: Vec<HashSet<Vec<u32>>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (&seqs[i], &seqs[j]);
            let mut keys = HashSet::new();
            for run in maximal_runs(&a.ids, &b.ids, min_words) {
                let mut piece_start = 0;
                for k in 1..=run.len {
                    let cut = k == run.len
                        || a.sentence[run.a + k] != a.sentence[run.a + k - 1]
                        || b.sentence[run.b + k] != b.sentence[run.b + k - 1];
                    if cut {
                        if k - piece_start >= min_words {
                            keys.insert(a.ids[run.a + piece_start..run.a + k].to_vec());
                        }
                        piece_start = k;
                    }
                }
            }
            keys
        })
        .collect();
    let mut candidates: HashSet<Vec<u32>> = HashSet::new();
    for keys in per_pair {
        candidates.extend(keys);
    }

    // Drop phrases contained in a longer candidate.
    let mut contained: HashSet<&[u32]> = HashSet::new();
    for key in &candidates {
        let len = key.len();
        for s in 0..len {
            for e in (s + min_words)..=len {
                if e - s < len && candidates.contains(&key[s..e]) {
                    contained.insert(&key[s..e]);
                }
            }
        }
    }
    let survivors: Vec<&Vec<u32>> = candidates
        .iter()
        .filter(|k| !contained.contains(k.as_slice()))
        .collect();

    // Step 4: count each survivor across the whole collection and rank.
    let index = SeedIndex::build(&seqs, min_words);
    let mut sets: Vec<MatchSet> = survivors
        .into_par_iter()
        .map(|key| {
            let occurrences = index.occurrences(key, &seqs);
            let resp_count = {
                let mut ids: Vec<usize> = occurrences.iter().map(|o| o.0).collect();
                ids.dedup();
                ids.len()
            };
            MatchSet {
                key: interner.join(key),
                score: config.score(key.len(), resp_count),
                word_len: key.len(),
                resp_count,
                occurrences: occurrences
                    .into_iter()
                    .map(|(r, pos)| {
                        let span = seqs[r].span(pos, key.len());
                        Occurrence {
                            response_id: responses[r].id.clone(),
                            start: span.start,
                            end: span.end,
                        }
                    })
                    .collect(),
            }
        })
        .collect();
    sets.sort_by(|x, y| y.score.total_cmp(&x.score).then_with(|| x.key.cmp(&y.key)));

    // Step 5.
    sets.truncate(config.cap(n));
    Ok(sets)
}

#[derive(Default)]
struct Interner {
    ids: HashMap<String, u32>,
    words: Vec<String>,
}

impl Interner {
    fn intern(&mut self, w: &str) -> u32 {
        if let Some(&id) = self.ids.get(w) {
            return id;
        }
        let id = self.words.len() as u32;
        self.words.push(w.to_string());
        self.ids.insert(w.to_string(), id);
        id
    }

    fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    fn join(&self, ids: &[u32]) -> String {
        ids.iter()
            .map(|&id| self.word(id))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A response flattened to its word tokens.
struct WordSeq {
    ids: Vec<u32>,
    sentence: Vec<u32>,
    spans: Vec<Span>,
}

impl WordSeq {
    fn from_sentences(sentences: &[Sentence], interner: &mut Interner) -> WordSeq {
        let mut seq = WordSeq {
            ids: Vec::new(),
            sentence: Vec::new(),
            spans: Vec::new(),
        };
        for s in sentences {
            for t in s.words() {
                seq.ids.push(interner.intern(&t.norm));
                seq.sentence.push(s.index as u32);
                seq.spans.push(t.span);
            }
        }
        seq
    }

    fn span(&self, pos: usize, len: usize) -> Span {
        Span::new(self.spans[pos].start, self.spans[pos + len - 1].end)
    }

    fn same_sentence(&self, pos: usize, len: usize) -> bool {
        self.sentence[pos] == self.sentence[pos + len - 1]
    }
}

#[derive(Debug, Clone, Copy)]
struct Run {
    a: usize,
    b: usize,
    len: usize,
}

/// Common runs that cannot be extended left or right in their alignment.
fn maximal_runs(a: &[u32], b: &[u32], min: usize) -> Vec<Run> {
    let (n, m) = (a.len(), b.len());
    let mut out = Vec::new();
    if n < min || m < min {
        return out;
    }
    let mut prev = vec![0u32; m + 1];
    let mut cur = vec![0u32; m + 1];
    for i in 0..n {
        let ai = a[i];
        for j in 0..m {
            if ai == b[j] {
                let len = prev[j] + 1;
                cur[j + 1] = len;
                let len = len as usize;
                if len >= min && (i + 1 == n || j + 1 == m || a[i + 1] != b[j + 1]) {
                    out.push(Run {
                        a: i + 1 - len,
                        b: j + 1 - len,
                        len,
                    });
                }
            } else {
                cur[j + 1] = 0;
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    out
}

/// Positions of every sentence-internal seed (first `k` words) in the corpus.
struct SeedIndex {
    k: usize,
    seeds: HashMap<Vec<u32>, Vec<(usize, usize)>>,
}

impl SeedIndex {
    fn build(seqs: &[WordSeq], k: usize) -> SeedIndex {
        let mut seeds: HashMap<Vec<u32>, Vec<(usize, usize)>> = HashMap::new();
        for (r, s) in seqs.iter().enumerate() {
            for pos in 0..s.ids.len().saturating_sub(k - 1) {
                if s.same_sentence(pos, k) {
                    seeds
                        .entry(s.ids[pos..pos + k].to_vec())
                        .or_default()
                        .push((r, pos));
                }
            }
        }
        SeedIndex { k, seeds }
    }

    /// Non-overlapping sentence-internal occurrences, scanning left to right
    /// within each response; sorted by (response, position).
    fn occurrences(&self, key: &[u32], seqs: &[WordSeq]) -> Vec<(usize, usize)> {
        let Some(hits) = self.seeds.get(&key[..self.k]) else {
            return Vec::new();
        };
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &(r, pos) in hits {
            let s = &seqs[r];
            if pos + key.len() > s.ids.len()
                || s.ids[pos..pos + key.len()] != *key
                || !s.same_sentence(pos, key.len())
            {
                continue;
            }
            if let Some(&(lr, lp)) = out.last() {
                if lr == r && lp + key.len() > pos {
                    continue;
                }
            }
            out.push((r, pos));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Corpus, ResponseRecord};
    use crate::textproc::segment;

    fn corpus(texts: &[&str]) -> Corpus {
        Corpus::from_records(
            texts
                .iter()
                .enumerate()
                .map(|(i, t)| ResponseRecord::new(format!("r{i}"), *t))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn score_values() {
        assert_eq!(score(4, 3), 6.0);
        assert_eq!(score(3, 2), 4.25);
        assert_eq!(score(8, 2), 8.0);
        assert_eq!(score(3, 5), 7.25);
        assert!(score(8, 2) > score(3, 5));
    }

    #[test]
    fn pairwise_identity() {
        let a = segment("a", "One two three four five.");
        let runs = pairwise_common_substrings(&a, &a, 3);
        assert_eq!(runs, vec![vec!["one", "two", "three", "four", "five"]]);
    }

    #[test]
    fn pairwise_no_shared_trigram() {
        let a = segment("a", "the quick brown fox");
        let b = segment("b", "the quick red fox");
        assert!(pairwise_common_substrings(&a, &b, 3).is_empty());
    }

    #[test]
    fn pairwise_prefix() {
        let a = segment("a", "I hope this helps you today");
        let b = segment("b", "I hope this helps a lot");
        assert_eq!(
            pairwise_common_substrings(&a, &b, 3),
            vec![vec!["i", "hope", "this", "helps"]]
        );
    }

    #[test]
    fn pairwise_finds_crossing_runs() {
        let a = segment("a", "p q r x s t u");
        let b = segment("b", "s t u y p q r");
        let runs = pairwise_common_substrings(&a, &b, 3);
        assert_eq!(runs, vec![vec!["p", "q", "r"], vec!["s", "t", "u"]]);
    }

    #[test]
    fn too_few_responses() {
        let c = corpus(&["Only one response here."]);
        assert_eq!(
            find_exact_matches(&c).unwrap_err(),
            ExactMatchError::TooFewResponses
        );
        assert_eq!(
            ExactMatchError::TooFewResponses.to_string(),
            "need at least two responses"
        );
    }

    #[test]
    fn toy_corpus() {
        let c = corpus(&[
            "Cats sleep a lot. However, it is important to note that they play.",
            "Dogs bark loudly at night.",
            "Birds sing. However, it is important to note the weather.",
            "Fish swim in circles all day.",
        ]);
        let sets = find_exact_matches(&c).unwrap();
        assert_eq!(sets.len(), 1);
        let m = &sets[0];
        assert_eq!(m.key, "however it is important to note");
        assert_eq!(m.word_len, 6);
        assert_eq!(m.resp_count, 2);
        assert_eq!(m.score, 0.75 * 6.0 + 2.0);
        let text = &c.records()[0].text;
        let occ = &m.occurrences[0];
        assert_eq!(&text[occ.start..occ.end], "However, it is important to note");
    }

    #[test]
    fn sentence_boundaries_cut_runs() {
        // "c d e" is shared, but "a b c" crosses a boundary in the second text.
        let c = corpus(&["a b c d e f.", "a b. c d e f."]);
        let keys: Vec<_> = find_exact_matches(&c)
            .unwrap()
            .into_iter()
            .map(|m| m.key)
            .collect();
        assert_eq!(keys, vec!["c d e f"]);
    }

    #[test]
    fn contained_phrases_are_dropped() {
        let c = corpus(&[
            "w x y z here.",
            "w x y z there.",
            "then x y z again.",
            "nothing shared at all.",
        ]);
        let keys: Vec<_> = find_exact_matches(&c)
            .unwrap()
            .into_iter()
            .map(|m| (m.key, m.resp_count))
            .collect();
        assert_eq!(keys, vec![("w x y z".to_string(), 2)]);
    }

    #[test]
    fn rematch_counts_whole_collection() {
        let c = corpus(&[
            "the big red barn stood.",
            "a big red barn fell.",
            "my big red barn burned.",
            "no barns here.",
        ]);
        let sets = find_exact_matches(&c).unwrap();
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].key, "big red barn");
        assert_eq!(sets[0].resp_count, 3);
        assert_eq!(sets[0].occurrences.len(), 3);
    }

    #[test]
    fn cap_is_half_the_corpus() {
        let cfg = ExactMatchConfig::default();
        assert_eq!(cfg.cap(6), 3);
        assert_eq!(cfg.cap(30), 12);
        assert_eq!(cfg.cap(3), 1);
        let texts: Vec<String> = (0..6)
            .map(|i| format!("alpha beta gamma {i}. delta epsilon zeta {i}. eta theta iota {i}. kappa lambda mu {i}."))
            .collect();
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        let sets = find_exact_matches(&corpus(&refs)).unwrap();
        assert_eq!(sets.len(), 3);
        // Equal scores fall back to key order.
        let keys: Vec<_> = sets.iter().map(|m| m.key.as_str()).collect();
        assert_eq!(keys, vec!["alpha beta gamma", "delta epsilon zeta", "eta theta iota"]);
    }

    #[test]
    fn overlapping_self_occurrences_are_not_double_counted() {
        let c = corpus(&["go go go go go.", "go go go."]);
        let sets = find_exact_matches(&c).unwrap();
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].key, "go go go");
        assert_eq!(sets[0].resp_count, 2);
        // Only one non-overlapping occurrence fits in each response.
        assert_eq!(sets[0].occurrences.len(), 2);
    }
}
