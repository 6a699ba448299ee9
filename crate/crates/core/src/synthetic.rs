//! Seeded synthetic corpora for property checks and benchmarks.
//!
//! Responses are built from a small vocabulary and a pool of shared phrases
//! so that exact matches, repeated words and positionally similar sentences
//! all occur often.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, ResponseRecord};

const SYLLABLES: [&str; 12] = [
    "ba", "ko", "mi", "tu", "re", "sa", "lo", "ne", "vi", "da", "po", "zu",
];
const FUNCTION_WORDS: [&str; 10] = [
    "the", "a", "is", "of", "and", "to", "it", "in", "that", "however",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Synth {
    pub responses: usize,
    pub min_words: usize,
    pub max_words: usize,
    /// Number of content words (at most 144).
    pub vocab: usize,
    /// Number of shared phrases sentences draw from.
    pub phrases: usize,
    /// Probability that a sentence opens with a shared phrase.
    pub phrase_rate: f64,
    pub models: usize,
}

impl Default for Synth {
    fn default() -> Self {
        Synth {
            responses: 6,
            min_words: 10,
            max_words: 40,
            vocab: 24,
            phrases: 6,
            phrase_rate: 0.6,
            models: 2,
        }
    }
}

impl Synth {
    pub fn generate(&self, seed: u64) -> Corpus {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vocab: Vec<String> = (0..self.vocab.clamp(1, 144))
            .map(|i| format!("{}{}", SYLLABLES[i % 12], SYLLABLES[i / 12]))
            .collect();
        let pick_word = |rng: &mut ChaCha8Rng| -> String {
            if rng.random_bool(0.2) {
                FUNCTION_WORDS.choose(rng).unwrap().to_string()
            } else {
                vocab.choose(rng).unwrap().clone()
            }
        };
        let phrases: Vec<Vec<String>> = (0..self.phrases)
            .map(|_| {
                let len = rng.random_range(3..=6);
                (0..len).map(|_| pick_word(&mut rng)).collect()
            })
            .collect();

        let records = (0..self.responses)
            .map(|r| {
                let target = rng.random_range(self.min_words..=self.max_words.max(self.min_words));
                let text = self.response_text(&mut rng, target, &phrases, &pick_word);
                let mut rec = ResponseRecord::new(format!("r{r:03}"), text);
                rec.model = format!("m{}", r % self.models.max(1));
                rec.gen_index = (r / self.models.max(1)) as u64;
                rec
            })
            .collect();
        Corpus::from_records(records).expect("synthetic ids are unique and texts non-empty")
    }

    fn response_text(
        &self,
        rng: &mut ChaCha8Rng,
        target: usize,
        phrases: &[Vec<String>],
        pick_word: &dyn Fn(&mut ChaCha8Rng) -> String,
    ) -> String {
        let list_style = rng.random_bool(0.15);
        let mut out = String::new();
        let mut written = 0;
        let mut sentence_no = 0;
        while written < target.max(1) {
            let mut words: Vec<String> = Vec::new();
            if !phrases.is_empty() && rng.random_bool(self.phrase_rate) {
                words.extend(phrases.choose(rng).unwrap().iter().cloned());
            }
            let extra = rng.random_range(1..=8).min(target.max(1) - written);
            for _ in 0..extra.max(1) {
                words.push(pick_word(rng));
            }
            if !phrases.is_empty() && rng.random_bool(self.phrase_rate / 3.0) {
                words.extend(phrases.choose(rng).unwrap().iter().cloned());
            }
            written += words.len();

            let mut sentence = String::new();
            for (i, w) in words.iter().enumerate() {
                if i > 0 {
                    // occasional hard line break, which also ends a sentence
                    sentence.push(if rng.random_bool(0.05) { '\n' } else { ' ' });
                }
                if i == 0 && rng.random_bool(0.7) {
                    let mut cs = w.chars();
                    let first = cs.next().unwrap().to_uppercase().collect::<String>();
                    sentence.push_str(&first);
                    sentence.push_str(cs.as_str());
                } else {
                    sentence.push_str(w);
                }
                if i + 1 < words.len() && rng.random_bool(0.08) {
                    sentence.push(',');
                }
            }
            sentence.push(*['.', '.', '.', '!', '?'].choose(rng).unwrap());

            sentence_no += 1;
            if list_style {
                out.push_str(&format!("{sentence_no}. {sentence}\n"));
            } else {
                if !out.is_empty() {
                    out.push(' ');
                }
                out.push_str(&sentence);
            }
        }
        out
    }
}
