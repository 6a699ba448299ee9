//! Corpus fixtures shared by the criterion benches.

use mesoscope_core::corpus::Corpus;
use mesoscope_core::synthetic::Synth;

/// `responses` responses of roughly `words` words each, fixed seed.
pub fn corpus(responses: usize, words: usize) -> Corpus {
    Synth {
        responses,
        min_words: words * 9 / 10,
        max_words: words * 11 / 10,
        vocab: 120,
        phrases: 16,
        phrase_rate: 0.5,
        models: 4,
    }
    .generate(20240611)
}

#[cfg(test)]
mod tests {
    #[test]
    fn sizes() {
        assert_eq!(super::corpus(8, 50).len(), 8);
    }
}
