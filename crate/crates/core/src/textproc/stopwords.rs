use std::collections::HashSet;
use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

/// The shipped stop list, verbatim.
pub const BUILTIN_STOP_LIST: &str = include_str!("../../data/stopwords.txt");

#[derive(Debug, Error)]
pub enum StopListError {
    #[error("cannot read stop list {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A set of case-folded function words excluded from unique-word scoring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopList {
    words: HashSet<String>,
    /// First comment line of the source file, if any.
    version: String,
}

impl StopList {
    /// Parses one word per line; `#` starts a comment line.
    pub fn parse(text: &str) -> StopList {
        let mut version = String::new();
        let mut words = HashSet::new();
        for line in text.lines().map(str::trim) {
            if let Some(comment) = line.strip_prefix('#') {
                if version.is_empty() {
                    version = comment.trim().to_string();
                }
                continue;
            }
            if !line.is_empty() {
                words.insert(line.to_lowercase());
            }
        }
        StopList { words, version }
    }

    pub fn from_path(path: &Path) -> Result<StopList, StopListError> {
        let text = std::fs::read_to_string(path).map_err(|source| StopListError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Ok(StopList::parse(&text))
    }

    pub fn builtin() -> &'static StopList {
        static LIST: OnceLock<StopList> = OnceLock::new();
        LIST.get_or_init(|| StopList::parse(BUILTIN_STOP_LIST))
    }

    pub fn contains(&self, norm: &str) -> bool {
        self.words.contains(norm)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    /// Words in sorted order.
    pub fn words(&self) -> Vec<&str> {
        let mut w: Vec<&str> = self.words.iter().map(String::as_str).collect();
        w.sort_unstable();
        w
    }
}

impl Default for StopList {
    fn default() -> Self {
        StopList::builtin().clone()
    }
}

/// Membership in the built-in stop list.
pub fn is_stop_word(norm: &str) -> bool {
    StopList::builtin().contains(norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership() {
        assert!(is_stop_word("the"));
        assert!(is_stop_word("however"));
        assert!(!is_stop_word("filament"));
        assert!(!is_stop_word("The"));
    }

    #[test]
    fn builtin_list_matches_file_exactly() {
        let expected: Vec<&str> = BUILTIN_STOP_LIST
            .lines()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
            .collect();
        let list = StopList::builtin();
        assert_eq!(list.words(), expected);
        assert_eq!(list.version(), "mesoscope stop list v1");
    }

    #[test]
    fn custom_list() {
        let l = StopList::parse("# custom\nFoo\n\nbar\n");
        assert!(l.contains("foo"));
        assert!(l.contains("bar"));
        assert!(!l.contains("the"));
        assert_eq!(l.len(), 2);
    }
}
