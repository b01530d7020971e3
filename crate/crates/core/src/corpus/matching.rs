//! Cross-source record matching by year, author last names and title
//! edit distance.

use serde::{Deserialize, Serialize};

/// Maximum title edit distance, relative to the longer title.
pub const MAX_TITLE_DISTANCE_RATIO: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub title: String,
    pub year: i32,
    /// Sorted, so that equality is multiset equality.
    pub author_last_names: Vec<String>,
}

impl PublicationRecord {
    pub fn new(title: &str, year: i32, mut last_names: Vec<String>) -> Self {
        last_names.sort();
        Self {
            title: title.to_string(),
            year,
            author_last_names: last_names,
        }
    }

    /// Build from full author names, keeping each name's last token.
    pub fn from_author_names<'a>(title: &str, year: i32, authors: impl IntoIterator<Item = &'a str>) -> Self {
        Self::new(title, year, authors.into_iter().map(|a| last_name(a).to_string()).collect())
    }
}

/// Final whitespace-separated token of an author name.
pub fn last_name(full_name: &str) -> &str {
    full_name.split_whitespace().last().unwrap_or("")
}

/// Lowercase and collapse runs of whitespace.
pub fn normalize_title(title: &str) -> String {
    title.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// Edit distance over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Same year, same multiset of last names, and normalized titles within
/// 25% edit distance of the longer one. Two empty titles never match.
pub fn match_records(a: &PublicationRecord, b: &PublicationRecord) -> bool {
    if a.year != b.year || a.author_last_names != b.author_last_names {
        return false;
    }
    let (ta, tb) = (normalize_title(&a.title), normalize_title(&b.title));
    let longest = ta.chars().count().max(tb.chars().count());
    if longest == 0 {
        return false;
    }
    levenshtein(&ta, &tb) as f64 / longest as f64 <= MAX_TITLE_DISTANCE_RATIO
}
