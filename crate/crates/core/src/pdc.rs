//! Positional Diction Clustering.
//!
//! Groups sentences from different responses that share wording and sit at
//! a similar relative position in their responses. Each sentence starts in
//! its own group. Cross-response sentence pairs are visited in decreasing
//! order of content similarity; a pair merges its two groups when
//!
//! * `text_weight * content + position_weight * position > threshold`, and
//! * the merged group keeps at least `min_distinct_ratio` of its sentences
//!   from distinct responses.
//!
//! Content similarity is `(|X in Y| + |Y in X|) / (|X| + |Y|)` where
//! `|X in Y|` counts the words of `X` that also occur in `Y`. Position
//! similarity is `1 - |pos(x) - pos(y)|` on normalized sentence positions.
//!
//! Groups come back ordered by median normalized position. Ties go to the
//! group drawn from the longest response, then to the lowest
//! `(response_id, index)` member.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::textproc::{segment_corpus, SegmentedResponse, Sentence, Span};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdcConfig {
    pub text_weight: f64,
    pub position_weight: f64,
    pub threshold: f64,
    pub min_distinct_ratio: f64,
}

impl Default for PdcConfig {
    fn default() -> Self {
        PdcConfig {
            text_weight: 1.5,
            position_weight: 1.0,
            threshold: 1.2,
            min_distinct_ratio: 0.7,
        }
    }
}

impl PdcConfig {
    pub fn gate_value(&self, content: f64, position: f64) -> f64 {
        self.text_weight * content + self.position_weight * position
    }

    pub fn passes_gate(&self, content: f64, position: f64) -> bool {
        self.gate_value(content, position) > self.threshold
    }

    pub fn distinct_enough(&self, distinct: usize, size: usize) -> bool {
        distinct as f64 / size as f64 >= self.min_distinct_ratio
    }
}

/// `(|X in Y| + |Y in X|) / (|X| + |Y|)` over word tokens. A sentence with
/// no words has similarity 0 to everything.
pub fn content_similarity(x: &Sentence, y: &Sentence) -> f64 {
    let xs = x.word_norms();
    let ys = y.word_norms();
    if xs.is_empty() || ys.is_empty() {
        return 0.0;
    }
    let x_in_y = xs.iter().filter(|w| ys.contains(w)).count();
    let y_in_x = ys.iter().filter(|w| xs.contains(w)).count();
    (x_in_y + y_in_x) as f64 / (xs.len() + ys.len()) as f64
}

pub fn position_similarity(x: &Sentence, y: &Sentence) -> f64 {
    1.0 - (x.norm_pos - y.norm_pos).abs()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceRef {
    pub response_id: String,
    pub sentence_index: usize,
    pub char_span: Span,
    pub norm_pos: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceGroup {
    pub id: usize,
    pub median_pos: f64,
    pub mean_pos: f64,
    pub distinct_ratio: f64,
    pub is_singleton: bool,
    /// Sorted by `(response_id, sentence_index)`.
    pub members: Vec<SentenceRef>,
    /// Member indices in display order.
    pub order: Vec<usize>,
    /// Per displayed line, one flag per word token.
    pub gray: Vec<Vec<bool>>,
}

impl SentenceGroup {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PdcResult {
    pub groups: Vec<SentenceGroup>,
}

/// One accepted merge, recorded when tracing is on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergeEvent {
    pub first: (String, usize),
    pub second: (String, usize),
    pub content: f64,
    pub position: f64,
    pub gate_value: f64,
    pub merged_size: usize,
    pub merged_distinct: usize,
}

pub fn cluster(corpus: &Corpus) -> PdcResult {
    cluster_with(corpus, &PdcConfig::default())
}

pub fn cluster_with(corpus: &Corpus, config: &PdcConfig) -> PdcResult {
    cluster_segmented(&segment_corpus(corpus), config, None)
}

/// Like [`cluster_with`], also returning every accepted merge.
pub fn cluster_traced(corpus: &Corpus, config: &PdcConfig) -> (PdcResult, Vec<MergeEvent>) {
    let mut trace = Vec::new();
    let result = cluster_segmented(&segment_corpus(corpus), config, Some(&mut trace));
    (result, trace)
}

struct Node<'a> {
    response: usize,
    sentence: &'a Sentence,
    /// Sorted distinct word ids with their counts.
    bag: Vec<(u32, u32)>,
    words: u32,
}

fn content_from_bags(x: &Node, y: &Node) -> f64 {
    if x.words == 0 || y.words == 0 {
        return 0.0;
    }
    let (mut i, mut j) = (0, 0);
    let mut shared = 0u32;
    while i < x.bag.len() && j < y.bag.len() {
        match x.bag[i].0.cmp(&y.bag[j].0) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                shared += x.bag[i].1 + y.bag[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    shared as f64 / (x.words + y.words) as f64
}

pub fn cluster_segmented(
    responses: &[SegmentedResponse],
    config: &PdcConfig,
    mut trace: Option<&mut Vec<MergeEvent>>,
) -> PdcResult {
    let mut vocab: HashMap<&str, u32> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    for (r, resp) in responses.iter().enumerate() {
        for s in &resp.sentences {
            let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
            let mut words = 0;
            for t in s.words() {
                let next = vocab.len() as u32;
                let id = *vocab.entry(t.norm.as_str()).or_insert(next);
                *counts.entry(id).or_default() += 1;
                words += 1;
            }
            nodes.push(Node {
                response: r,
                sentence: s,
                bag: counts.into_iter().collect(),
                words,
            });
        }
    }
    let n = nodes.len();

    // Rank of each node under (response_id, index) order, for tie-breaks.
    let mut by_key: Vec<usize> = (0..n).collect();
    by_key.sort_by(|&a, &b| sentence_key(nodes[a].sentence).cmp(&sentence_key(nodes[b].sentence)));
    let mut rank = vec![0u32; n];
    for (r, &i) in by_key.iter().enumerate() {
        rank[i] = r as u32;
    }

    // Pairs failing the combined gate can never merge, so they are dropped
    // before sorting; the visiting order of the rest is unchanged.
    let mut pairs: Vec<(f64, u32, u32)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let nodes = &nodes;
            let rank = &rank;
            (i + 1..n).filter_map(move |j| {
                let (x, y) = (&nodes[i], &nodes[j]);
                if x.response == y.response {
                    return None;
                }
                let c = content_from_bags(x, y);
                let p = 1.0 - (x.sentence.norm_pos - y.sentence.norm_pos).abs();
                if !config.passes_gate(c, p) {
                    return None;
                }
                let (lo, hi) = if rank[i] < rank[j] {
                    (rank[i], rank[j])
                } else {
                    (rank[j], rank[i])
                };
                Some((c, lo, hi))
            })
        })
        .collect();
    pairs.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });

    let mut groups = DisjointGroups::new(nodes.iter().map(|n| n.response as u32));
    for (c, lo, hi) in pairs {
        let (a, b) = (by_key[lo as usize], by_key[hi as usize]);
        let (ra, rb) = (groups.find(a), groups.find(b));
        if ra == rb {
            continue;
        }
        let size = groups.size(ra) + groups.size(rb);
        let distinct = groups.union_distinct(ra, rb);
        if !config.distinct_enough(distinct, size) {
            continue;
        }
        groups.union(ra, rb);
        if let Some(trace) = trace.as_deref_mut() {
            let (x, y) = (nodes[a].sentence, nodes[b].sentence);
            let p = position_similarity(x, y);
            trace.push(MergeEvent {
                first: (x.response_id.clone(), x.index),
                second: (y.response_id.clone(), y.index),
                content: c,
                position: p,
                gate_value: config.gate_value(c, p),
                merged_size: size,
                merged_distinct: distinct,
            });
        }
    }

    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &i in &by_key {
        members.entry(groups.find(i)).or_default().push(i);
    }
    let response_words: Vec<usize> = responses.iter().map(SegmentedResponse::word_count).collect();

    let mut built: Vec<(SentenceGroup, usize, u32)> = members
        .into_values()
        .map(|idx| {
            let sentences: Vec<&Sentence> = idx.iter().map(|&i| nodes[i].sentence).collect();
            let mut positions: Vec<f64> = sentences.iter().map(|s| s.norm_pos).collect();
            positions.sort_by(f64::total_cmp);
            let mut resp: Vec<usize> = idx.iter().map(|&i| nodes[i].response).collect();
            let longest = resp.iter().map(|&r| response_words[r]).max().unwrap_or(0);
            resp.sort_unstable();
            resp.dedup();
            let order = order_within_group(&sentences);
            let ordered: Vec<&Sentence> = order.iter().map(|&k| sentences[k]).collect();
            let group = SentenceGroup {
                id: 0,
                median_pos: median(&positions),
                mean_pos: positions.iter().sum::<f64>() / positions.len() as f64,
                distinct_ratio: resp.len() as f64 / idx.len() as f64,
                is_singleton: idx.len() == 1,
                members: sentences
                    .iter()
                    .map(|s| SentenceRef {
                        response_id: s.response_id.clone(),
                        sentence_index: s.index,
                        char_span: s.span,
                        norm_pos: s.norm_pos,
                    })
                    .collect(),
                gray: grayout_flags(&ordered),
                order,
            };
            (group, longest, rank[idx[0]])
        })
        .collect();
    built.sort_by(|a, b| {
        a.0.median_pos
            .total_cmp(&b.0.median_pos)
            .then(b.1.cmp(&a.1))
            .then(a.2.cmp(&b.2))
    });
    PdcResult {
        groups: built
            .into_iter()
            .enumerate()
            .map(|(id, (mut g, _, _))| {
                g.id = id;
                g
            })
            .collect(),
    }
}

fn sentence_key(s: &Sentence) -> (&str, usize) {
    (s.response_id.as_str(), s.index)
}

/// Median of sorted values; mean of the middle two for even counts.
fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Union-find that tracks, per root, how many members come from each
/// response.
struct DisjointGroups {
    parent: Vec<usize>,
    size: Vec<usize>,
    responses: Vec<Vec<(u32, u32)>>,
}

impl DisjointGroups {
    fn new(responses: impl Iterator<Item = u32>) -> Self {
        let responses: Vec<Vec<(u32, u32)>> = responses.map(|r| vec![(r, 1)]).collect();
        let n = responses.len();
        DisjointGroups {
            parent: (0..n).collect(),
            size: vec![1; n],
            responses,
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn size(&self, root: usize) -> usize {
        self.size[root]
    }

    fn union_distinct(&self, a: usize, b: usize) -> usize {
        let (x, y) = (&self.responses[a], &self.responses[b]);
        let shared = x
            .iter()
            .filter(|(r, _)| y.binary_search_by_key(r, |e| e.0).is_ok())
            .count();
        x.len() + y.len() - shared
    }

    fn union(&mut self, a: usize, b: usize) {
        let (big, small) = if self.size[a] >= self.size[b] { (a, b) } else { (b, a) };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        let moved = std::mem::take(&mut self.responses[small]);
        let target = &mut self.responses[big];
        for (r, c) in moved {
            match target.binary_search_by_key(&r, |e| e.0) {
                Ok(i) => target[i].1 += c,
                Err(i) => target.insert(i, (r, c)),
            }
        }
    }
}

fn positional_overlap(a: &[&str], b: &[&str]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x == y).count()
}

/// Display order for a group: start from the sentence with the most words,
/// then repeatedly take the unplaced sentence sharing the most same-index
/// words with the last one placed. Ties go to the lowest
/// `(response_id, index)`. Returns indices into `sentences`.
pub fn order_within_group(sentences: &[&Sentence]) -> Vec<usize> {
    if sentences.is_empty() {
        return Vec::new();
    }
    let words: Vec<Vec<&str>> = sentences.iter().map(|s| s.word_norms()).collect();
    let key = |i: usize| sentence_key(sentences[i]);
    let first = (0..sentences.len())
        .min_by(|&a, &b| words[b].len().cmp(&words[a].len()).then(key(a).cmp(&key(b))))
        .expect("non-empty");
    let mut order = vec![first];
    let mut placed = vec![false; sentences.len()];
    placed[first] = true;
    while order.len() < sentences.len() {
        let last = &words[*order.last().expect("non-empty")];
        let next = (0..sentences.len())
            .filter(|&i| !placed[i])
            .min_by(|&a, &b| {
                positional_overlap(last, &words[b])
                    .cmp(&positional_overlap(last, &words[a]))
                    .then(key(a).cmp(&key(b)))
            })
            .expect("an unplaced sentence remains");
        placed[next] = true;
        order.push(next);
    }
    order
}

/// For each line after the first, word `i` is grayed when the line above
/// has the same word at index `i`.
pub fn grayout_flags(ordered: &[&Sentence]) -> Vec<Vec<bool>> {
    let words: Vec<Vec<&str>> = ordered.iter().map(|s| s.word_norms()).collect();
    words
        .iter()
        .enumerate()
        .map(|(k, line)| match k.checked_sub(1).map(|p| &words[p]) {
            None => vec![false; line.len()],
            Some(above) => line
                .iter()
                .enumerate()
                .map(|(i, w)| above.get(i) == Some(w))
                .collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ResponseRecord;
    use crate::textproc::segment;

    fn sentence(text: &str) -> Sentence {
        segment("x", text).remove(0)
    }

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
    fn content_similarity_values() {
        let a = sentence("one two three four");
        assert_eq!(content_similarity(&a, &a), 1.0);
        let b = sentence("five six seven");
        assert_eq!(content_similarity(&a, &b), 0.0);
        let x = sentence("a b c");
        let y = sentence("a b d");
        assert!((content_similarity(&x, &y) - 4.0 / 6.0).abs() < 1e-12);
        let empty = sentence("...");
        assert_eq!(content_similarity(&empty, &a), 0.0);
    }

    #[test]
    fn repeated_words_count_per_token() {
        // |X in Y| counts every X token present in Y: (2 + 1) / (2 + 1).
        let x = sentence("go go");
        let y = sentence("go");
        assert_eq!(content_similarity(&x, &y), 1.0);
    }

    #[test]
    fn position_similarity_values() {
        let mut x = sentence("a");
        let mut y = sentence("b");
        x.norm_pos = 0.0;
        y.norm_pos = 1.0;
        assert_eq!(position_similarity(&x, &y), 0.0);
        x.norm_pos = 0.25;
        y.norm_pos = 0.75;
        assert_eq!(position_similarity(&x, &y), 0.5);
        y.norm_pos = 0.25;
        assert_eq!(position_similarity(&x, &y), 1.0);
    }

    #[test]
    fn identical_single_sentences_merge() {
        let (r, trace) = cluster_traced(
            &corpus(&["The bulb glows.", "The bulb glows."]),
            &PdcConfig::default(),
        );
        assert_eq!(r.groups.len(), 1);
        assert_eq!(r.groups[0].members.len(), 2);
        assert_eq!(trace.len(), 1);
        assert_eq!(trace[0].gate_value, 2.5);
    }

    #[test]
    fn gate_threshold_is_strict() {
        let cfg = PdcConfig::default();
        assert!(!cfg.passes_gate(0.1, 1.0));
        assert!(cfg.passes_gate(0.2, 1.0));
        // 1.5 * 0.2 + 0.9 = 1.2 exactly in real arithmetic
        assert!(!cfg.passes_gate(0.0, 1.2));
    }

    #[test]
    fn low_content_pair_never_merges() {
        // One shared word out of 10 each: c = 0.1, same position.
        let r = cluster(&corpus(&[
            "shared a1 a2 a3 a4 a5 a6 a7 a8 a9",
            "shared b1 b2 b3 b4 b5 b6 b7 b8 b9",
        ]));
        assert_eq!(r.groups.len(), 2);
        assert!(r.groups.iter().all(|g| g.is_singleton));
    }

    #[test]
    fn same_response_pairs_stay_apart() {
        let r = cluster(&corpus(&[
            "Echo this line. Echo this line.",
            "Something else entirely here.",
        ]));
        assert_eq!(r.groups.len(), 3);
        assert!(r.groups.iter().all(|g| g.members.len() == 1));
    }

    #[test]
    fn distinctness_gate_blocks_second_copy() {
        // r0 has two copies of the sentence, r1 one: merging all three would
        // give 2 distinct / 3 members < 0.7.
        let r = cluster(&corpus(&[
            "Light comes out. Light comes out.",
            "Light comes out.",
        ]));
        let sizes: Vec<usize> = r.groups.iter().map(SentenceGroup::len).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 3);
        assert!(sizes.contains(&2));
        for g in r.groups.iter().filter(|g| g.len() > 1) {
            assert!(g.distinct_ratio >= 0.7);
        }
    }

    #[test]
    fn groups_sorted_by_median() {
        let r = cluster(&corpus(&[
            "Hello there friend. The middle part is long. Goodbye now friend.",
            "Hello there pal. Goodbye now pal.",
        ]));
        let medians: Vec<f64> = r.groups.iter().map(|g| g.median_pos).collect();
        assert!(medians.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(r.groups.first().unwrap().len(), 2);
        assert_eq!(r.groups.last().unwrap().len(), 2);
        let ids: Vec<usize> = r.groups.iter().map(|g| g.id).collect();
        assert_eq!(ids, vec![0, 1, 2]);
    }

    #[test]
    fn median_of_even_count() {
        assert_eq!(median(&[0.0, 0.5, 1.0]), 0.5);
        assert_eq!(median(&[0.0, 0.5]), 0.25);
    }

    #[test]
    fn tie_prefers_longer_response() {
        // Two singletons at position 0.5; the longer response's group first.
        let r = cluster(&corpus(&["short one", "a noticeably longer single response here"]));
        assert_eq!(r.groups.len(), 2);
        assert_eq!(r.groups[0].members[0].response_id, "r1");
    }

    #[test]
    fn order_singleton() {
        let s = sentence("just me");
        assert_eq!(order_within_group(&[&s]), vec![0]);
    }

    #[test]
    fn order_identical_uses_tie_break() {
        let a = segment("b", "same words").remove(0);
        let b = segment("a", "same words").remove(0);
        assert_eq!(order_within_group(&[&a, &b]), vec![1, 0]);
    }

    #[test]
    fn order_greedy_chain() {
        let a = segment("a", "how does a lightbulb work").remove(0);
        let b = segment("b", "how does a filament work").remove(0);
        let c = segment("c", "why we use glass").remove(0);
        assert_eq!(order_within_group(&[&c, &b, &a]), vec![2, 1, 0]);
    }

    #[test]
    fn gray_flags() {
        let a = sentence("how does a lightbulb work");
        let b = sentence("how does a filament work");
        assert_eq!(
            grayout_flags(&[&a, &b]),
            vec![vec![false; 5], vec![true, true, true, false, true]]
        );
        let x = sentence("a b");
        let y = sentence("a b c");
        assert_eq!(grayout_flags(&[&x, &y])[1], vec![true, true, false]);
    }

    #[test]
    fn empty_corpus() {
        assert!(cluster(&Corpus::default()).groups.is_empty());
    }
}
