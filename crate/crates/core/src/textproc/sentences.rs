use super::Span;

/// Lower-cased words that never end a sentence when followed by a period.
pub const ABBREVIATIONS: &[&str] = &[
    "approx", "cf", "co", "dept", "dr", "e.g", "etc", "fig", "i.e", "inc", "jr", "ltd", "mr",
    "mrs", "ms", "mt", "prof", "sr", "st", "vs",
];

const TERMINATORS: [char; 3] = ['.', '!', '?'];
const CLOSERS: [char; 8] = ['"', '\'', ')', ']', '}', '\u{201D}', '\u{2019}', '\u{00BB}'];

/// Rule-based sentence splitter.
///
/// Every line break closes a sentence. Within a line, a run of `.`, `!` or
/// `?` (plus closing quotes or brackets) followed by whitespace or the end of
/// the line closes a sentence, unless the run is a single period after an
/// abbreviation or after a list marker (`1.`, `a.`) opening the line.
/// Returned spans are trimmed and cover every non-whitespace character.
pub fn split_sentences(text: &str) -> Vec<Span> {
    let mut out = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        split_line(line, offset, &mut out);
        offset += line.len();
    }
    out
}

fn split_line(line: &str, base: usize, out: &mut Vec<Span>) {
    let chars: Vec<(usize, char)> = line.char_indices().collect();
    let Some(line_first) = chars.iter().find(|(_, c)| !c.is_whitespace()).map(|p| p.0) else {
        return;
    };
    let mut start: Option<usize> = None;
    let mut i = 0;
    while i < chars.len() {
        let (off, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let sent_start = *start.get_or_insert(off);
        if !TERMINATORS.contains(&c) {
            i += 1;
            continue;
        }
        let mut j = i;
        while j < chars.len() && TERMINATORS.contains(&chars[j].1) {
            j += 1;
        }
        let single_period = c == '.' && j == i + 1;
        while j < chars.len() && CLOSERS.contains(&chars[j].1) {
            j += 1;
        }
        let at_break = j == chars.len() || chars[j].1.is_whitespace();
        if at_break && !(single_period && period_suppressed(line, sent_start, off, line_first)) {
            let end = chars.get(j).map_or(line.len(), |p| p.0);
            out.push(Span::new(base + sent_start, base + end));
            start = None;
        }
        i = j;
    }
    if let Some(s) = start {
        let end = line.trim_end().len();
        out.push(Span::new(base + s, base + end));
    }
}

fn period_suppressed(line: &str, sent_start: usize, dot: usize, line_first: usize) -> bool {
    let before = &line[sent_start..dot];
    let word_start = before
        .char_indices()
        .rev()
        .find(|(_, c)| c.is_whitespace())
        .map_or(sent_start, |(p, c)| sent_start + p + c.len_utf8());
    let raw = &line[word_start..dot];
    let word = raw.trim_start_matches(|c: char| !c.is_alphanumeric());
    if word.is_empty() {
        return false;
    }
    let lower = word.to_lowercase();
    if ABBREVIATIONS.contains(&lower.as_str()) {
        return true;
    }
    word_start == line_first && is_list_marker(word)
}

fn is_list_marker(word: &str) -> bool {
    let digits = !word.is_empty() && word.len() <= 3 && word.bytes().all(|b| b.is_ascii_digit());
    let letter = word.len() == 1 && word.bytes().all(|b| b.is_ascii_alphabetic());
    digits || letter
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pieces(text: &str) -> Vec<&str> {
        split_sentences(text)
            .into_iter()
            .map(|s| s.slice(text))
            .collect()
    }

    #[test]
    fn two_sentences() {
        assert_eq!(pieces("Hi there. How are you?"), vec!["Hi there.", "How are you?"]);
    }

    #[test]
    fn numbered_list_items() {
        assert_eq!(
            pieces("1. Skim headings\n2. Read intro"),
            vec!["1. Skim headings", "2. Read intro"]
        );
    }

    #[test]
    fn abbreviation_does_not_split() {
        assert_eq!(pieces("Dr. Smith agreed."), vec!["Dr. Smith agreed."]);
    }

    #[test]
    fn every_abbreviation_is_respected() {
        for abbr in ABBREVIATIONS {
            let text = format!("See {abbr}. the rest of it.");
            assert_eq!(split_sentences(&text).len(), 1, "split after {abbr}.");
            let capitalized = format!("Ask {}{}. Then go.", abbr[..1].to_uppercase(), &abbr[1..]);
            assert_eq!(split_sentences(&capitalized).len(), 1, "split after {capitalized}");
        }
    }

    #[test]
    fn decimals_do_not_split() {
        assert_eq!(
            pieces("Pi is about 3.14 today. Yes!"),
            vec!["Pi is about 3.14 today.", "Yes!"]
        );
    }

    #[test]
    fn mid_line_number_still_splits() {
        assert_eq!(pieces("I counted to 5. Then I stopped."), vec![
            "I counted to 5.",
            "Then I stopped."
        ]);
    }

    #[test]
    fn closers_and_runs() {
        assert_eq!(
            pieces("He said \"stop!\" Then what?! Nothing..."),
            vec!["He said \"stop!\"", "Then what?!", "Nothing..."]
        );
    }

    #[test]
    fn line_without_terminator_closes() {
        assert_eq!(
            pieces("Title\n\n  - bullet one\n- bullet two.  \r\n"),
            vec!["Title", "- bullet one", "- bullet two."]
        );
    }

    #[test]
    fn whitespace_only() {
        assert!(split_sentences("  \n\t ").is_empty());
    }

    #[test]
    fn abbreviation_inside_other_punctuation() {
        assert_eq!(
            pieces("Use tools (e.g. hammers). Done."),
            vec!["Use tools (e.g. hammers).", "Done."]
        );
        assert_eq!(pieces("Fruit, i.e., apples. Ok."), vec!["Fruit, i.e., apples.", "Ok."]);
    }
}
