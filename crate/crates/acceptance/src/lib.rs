//! Brute-force reference implementations used by the acceptance suite.
//!
//! These share only tokenization and sentence splitting with the core
//! crate. Everything downstream of the word lists is recomputed the slow,
//! obvious way.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use mesoscope_core::corpus::{Corpus, ResponseRecord};
use mesoscope_core::pdc::PdcConfig;
use mesoscope_core::textproc::{segment, tokenize, Sentence, StopList};

/// One word of a sentence: normalized form and byte span in the response.
#[derive(Debug, Clone, PartialEq)]
pub struct Word {
    pub norm: String,
    pub start: usize,
    pub end: usize,
}

fn sentence_words(s: &Sentence) -> Vec<Word> {
    s.words()
        .map(|t| Word {
            norm: t.norm.clone(),
            start: t.span.start,
            end: t.span.end,
        })
        .collect()
}

/// Each response as a list of sentences, each a list of words.
pub fn sentence_words_of(corpus: &Corpus) -> Vec<(String, Vec<Vec<Word>>)> {
    corpus
        .records()
        .iter()
        .map(|r| {
            let sentences = segment(&r.id, &r.text).iter().map(sentence_words).collect();
            (r.id.clone(), sentences)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleMatch {
    pub key: String,
    pub score: f64,
    pub word_len: usize,
    pub resp_count: usize,
    /// `(response_id, start, end)` in corpus order, left to right.
    pub occurrences: Vec<(String, usize, usize)>,
}

/// Exact matches by enumeration: every sentence-internal n-gram of at
/// least `min_words` words, kept when two or more responses contain it and
/// no longer such n-gram contains it; then counted, scored and capped.
pub fn exact_matches(
    corpus: &Corpus,
    min_words: usize,
    length_weight: f64,
    count_weight: f64,
    max_sets: usize,
) -> Result<Vec<OracleMatch>, &'static str> {
    if corpus.len() < 2 {
        return Err("need at least two responses");
    }
    let docs = sentence_words_of(corpus);
    let mut holders: BTreeMap<Vec<String>, BTreeSet<usize>> = BTreeMap::new();
    for (r, (_, sentences)) in docs.iter().enumerate() {
        for words in sentences {
            for i in 0..words.len() {
                for j in i + min_words..=words.len() {
                    let gram = words[i..j].iter().map(|w| w.norm.clone()).collect();
                    holders.entry(gram).or_default().insert(r);
                }
            }
        }
    }
    let shared: Vec<&Vec<String>> = holders
        .iter()
        .filter(|(_, rs)| rs.len() >= 2)
        .map(|(g, _)| g)
        .collect();
    let maximal: Vec<&Vec<String>> = shared
        .iter()
        .filter(|g| {
            !shared
                .iter()
                .any(|h| h.len() > g.len() && h.windows(g.len()).any(|w| w == g.as_slice()))
        })
        .copied()
        .collect();

    let mut out: Vec<OracleMatch> = maximal
        .into_iter()
        .map(|key| {
            let k = key.len();
            let mut occurrences = Vec::new();
            let mut responses = BTreeSet::new();
            for (r, (id, sentences)) in docs.iter().enumerate() {
                for words in sentences {
                    let mut i = 0;
                    while i + k <= words.len() {
                        if words[i..i + k].iter().zip(key).all(|(w, n)| w.norm == *n) {
                            occurrences.push((id.clone(), words[i].start, words[i + k - 1].end));
                            responses.insert(r);
                            i += k;
                        } else {
                            i += 1;
                        }
                    }
                }
            }
            OracleMatch {
                key: key.join(" "),
                score: length_weight * k as f64 + count_weight * responses.len() as f64,
                word_len: k,
                resp_count: responses.len(),
                occurrences,
            }
        })
        .collect();
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.key.cmp(&b.key)));
    out.truncate(max_sets.min(corpus.len() / 2));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleWord {
    pub word: String,
    pub score: f64,
    pub spans: Vec<(usize, usize)>,
}

/// Top-`top_n` words per response by `count * ln(N / df)`, stop words
/// removed, positive scores only, ties alphabetical.
pub fn unique_words(
    corpus: &Corpus,
    stop_list: &StopList,
    top_n: usize,
) -> BTreeMap<String, Vec<OracleWord>> {
    let n = corpus.len() as f64;
    let words_of = |r: &ResponseRecord| -> Vec<(String, usize, usize)> {
        tokenize(&r.text)
            .into_iter()
            .filter(|t| t.is_word && !stop_list.contains(&t.norm))
            .map(|t| (t.norm, t.span.start, t.span.end))
            .collect()
    };
    let docs: Vec<Vec<(String, usize, usize)>> = corpus.records().iter().map(words_of).collect();
    let mut out = BTreeMap::new();
    for (r, record) in corpus.records().iter().enumerate() {
        let mut scored: Vec<OracleWord> = Vec::new();
        let distinct: BTreeSet<&String> = docs[r].iter().map(|w| &w.0).collect();
        for word in distinct {
            let tf = docs[r].iter().filter(|w| w.0 == *word).count() as f64;
            let df = docs.iter().filter(|d| d.iter().any(|w| w.0 == *word)).count() as f64;
            let score = tf * (n / df).ln();
            if score > 0.0 {
                scored.push(OracleWord {
                    word: word.clone(),
                    score,
                    spans: docs[r]
                        .iter()
                        .filter(|w| w.0 == *word)
                        .map(|w| (w.1, w.2))
                        .collect(),
                });
            }
        }
        scored.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.word.cmp(&b.word)));
        scored.truncate(top_n);
        out.insert(record.id.clone(), scored);
    }
    out
}

/// `(|X in Y| + |Y in X|) / (|X| + |Y|)` by direct counting.
pub fn content_similarity(x: &[&str], y: &[&str]) -> f64 {
    if x.is_empty() || y.is_empty() {
        return 0.0;
    }
    let mut hits = 0;
    for w in x {
        if y.contains(w) {
            hits += 1;
        }
    }
    for w in y {
        if x.contains(w) {
            hits += 1;
        }
    }
    hits as f64 / (x.len() + y.len()) as f64
}

pub type SentenceId = (String, usize);

/// Reference single-link clustering. Candidate pairs are visited by
/// content similarity (descending), then by the `(response_id, index)`
/// order of the lower and the higher member; a pair merges when it passes
/// the gate, its members are in different groups and the union keeps the
/// distinctness ratio. Returns the partition as sorted member lists.
pub fn pdc_partition(corpus: &Corpus, config: &PdcConfig) -> BTreeSet<Vec<SentenceId>> {
    let mut nodes: Vec<(SentenceId, Vec<String>, f64)> = Vec::new();
    for r in corpus.records() {
        for s in segment(&r.id, &r.text) {
            let words = s.words().map(|t| t.norm.clone()).collect();
            nodes.push(((r.id.clone(), s.index), words, s.norm_pos));
        }
    }
    nodes.sort_by(|a, b| a.0.cmp(&b.0));
    let n = nodes.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if nodes[i].0 .0 == nodes[j].0 .0 {
                continue;
            }
            let xi: Vec<&str> = nodes[i].1.iter().map(String::as_str).collect();
            let xj: Vec<&str> = nodes[j].1.iter().map(String::as_str).collect();
            let c = content_similarity(&xi, &xj);
            let p = 1.0 - (nodes[i].2 - nodes[j].2).abs();
            if config.text_weight * c + config.position_weight * p > config.threshold {
                pairs.push((c, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut group: Vec<usize> = (0..n).collect();
    for (_, i, j) in pairs {
        let (gi, gj) = (group[i], group[j]);
        if gi == gj {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&k| group[k] == gi || group[k] == gj).collect();
        let distinct: BTreeSet<&str> = members.iter().map(|&k| nodes[k].0 .0.as_str()).collect();
        if (distinct.len() as f64) / (members.len() as f64) < config.min_distinct_ratio {
            continue;
        }
        for k in members {
            group[k] = gi;
        }
    }
    let mut parts: HashMap<usize, Vec<SentenceId>> = HashMap::new();
    for (k, g) in group.iter().enumerate() {
        parts.entry(*g).or_default().push(nodes[k].0.clone());
    }
    parts
        .into_values()
        .map(|mut v| {
            v.sort();
            v
        })
        .collect()
}

/// Expected gray flags for lines given as word-norm lists: word `i` of
/// line `k` is gray iff line `k - 1` has the same word at index `i`.
pub fn expected_gray(lines: &[Vec<String>]) -> Vec<Vec<bool>> {
    lines
        .iter()
        .enumerate()
        .map(|(k, line)| {
            (0..line.len())
                .map(|i| k > 0 && i < lines[k - 1].len() && lines[k - 1][i] == line[i])
                .collect()
        })
        .collect()
}

/// Builds a corpus from word/punctuation codes. Each response is a list of
/// `(word, mark)` pairs; mark selects the punctuation after the word.
pub fn corpus_from_codes(vocab: &[&str], responses: &[Vec<(usize, u8)>]) -> Corpus {
    let records = responses
        .iter()
        .enumerate()
        .filter_map(|(r, words)| {
            let mut text = String::new();
            for (i, &(w, mark)) in words.iter().enumerate() {
                if i > 0 {
                    text.push(if mark == 9 { '\n' } else { ' ' });
                }
                text.push_str(vocab[w % vocab.len()]);
                text.push_str(match mark {
                    5 | 6 => ".",
                    7 => ",",
                    8 => "!",
                    _ => "",
                });
            }
            (!text.trim().is_empty()).then(|| ResponseRecord::new(format!("r{r}"), text))
        })
        .collect();
    Corpus::from_records(records).expect("generated ids are unique")
}

#[cfg(test)]
mod tests {
    use super::*;
    use mesoscope_core::corpus::ingest_str;

    #[test]
    fn oracle_finds_the_shared_phrase() {
        let c = ingest_str(
            r#"{"id":"a","text":"However, it is important to note that lamps glow."}
{"id":"b","text":"Lamps glow. However, it is important to note the heat."}
{"id":"c","text":"Nothing shared here at all."}
{"id":"d","text":"Something else entirely."}"#,
        )
        .unwrap();
        let m = exact_matches(&c, 3, 0.75, 1.0, 12).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].key, "however it is important to note");
        assert_eq!(m[0].resp_count, 2);
    }

    #[test]
    fn reference_similarity() {
        assert!((content_similarity(&["a", "b", "c"], &["a", "b", "d"]) - 4.0 / 6.0).abs() < 1e-12);
        assert_eq!(content_similarity(&["a", "a"], &["a"]), 1.0);
        assert_eq!(content_similarity(&[], &["a"]), 0.0);
    }

    #[test]
    fn gray_rule() {
        let lines = vec![
            vec!["a".to_string(), "b".into(), "c".into()],
            vec!["a".to_string(), "x".into(), "c".into(), "d".into()],
        ];
        assert_eq!(
            expected_gray(&lines),
            vec![vec![false; 3], vec![true, false, true, false]]
        );
    }

    #[test]
    fn codes_to_text() {
        let c = corpus_from_codes(&["x", "y"], &[vec![(0, 0), (1, 5)], vec![(1, 7), (0, 9)]]);
        assert_eq!(c.records()[0].text, "x y.");
        assert_eq!(c.records()[1].text, "y,\nx");
    }
}
