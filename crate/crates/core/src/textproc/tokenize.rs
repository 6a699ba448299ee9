use super::{Span, Token};

/// Whitespace tokenizer. Leading and trailing non-alphanumeric runs of each
/// chunk become punctuation tokens; internal hyphens and apostrophes stay
/// inside the word.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut chunk_start = None;
    for (i, c) in text.char_indices() {
        match (c.is_whitespace(), chunk_start) {
            (true, Some(s)) => {
                push_chunk(text, s, i, &mut tokens);
                chunk_start = None;
            }
            (false, None) => chunk_start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = chunk_start {
        push_chunk(text, s, text.len(), &mut tokens);
    }
    tokens
}

fn push_chunk(text: &str, start: usize, end: usize, out: &mut Vec<Token>) {
    let chunk = &text[start..end];
    let first = chunk.char_indices().find(|(_, c)| c.is_alphanumeric());
    let Some((core_start, _)) = first else {
        out.push(punct(text, Span::new(start, end)));
        return;
    };
    let (last, last_c) = chunk
        .char_indices()
        .rev()
        .find(|(_, c)| c.is_alphanumeric())
        .expect("chunk has an alphanumeric char");
    let core_end = last + last_c.len_utf8();

    if core_start > 0 {
        out.push(punct(text, Span::new(start, start + core_start)));
    }
    let span = Span::new(start + core_start, start + core_end);
    let surface = span.slice(text);
    out.push(Token {
        surface: surface.to_string(),
        norm: surface.to_lowercase(),
        span,
        is_word: true,
    });
    if core_end < chunk.len() {
        out.push(punct(text, Span::new(start + core_end, end)));
    }
}

fn punct(text: &str, span: Span) -> Token {
    Token {
        surface: span.slice(text).to_string(),
        norm: String::new(),
        span,
        is_word: false,
    }
}
