//! Papers, citation tables and the filtered citation network.

mod filter;
mod io;
mod matching;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, Months, NaiveDate};
use serde::{Deserialize, Serialize};

pub use filter::filter_citations;
pub use io::{
    parse_citations, parse_date, parse_papers, parse_records, write_citations, write_papers,
    PAPER_HEADER,
};
pub use matching::{last_name, levenshtein, match_records, normalize_title, PublicationRecord};

/// Citations to papers older than this many months are discarded.
pub const CITATION_WINDOW_MONTHS: u32 = 120;

/// Gender category of a paper, from the first and last author.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GenderCategory {
    MM,
    MW,
    WM,
    WW,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

impl GenderCategory {
    /// The four categories that enter imbalance reports.
    pub const KNOWN: [GenderCategory; 4] = [Self::MM, Self::MW, Self::WM, Self::WW];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::MM => "MM",
            Self::MW => "MW",
            Self::WM => "WM",
            Self::WW => "WW",
            Self::Unknown => "UNKNOWN",
        }
    }

    /// Position in [`GenderCategory::KNOWN`], `None` for unknown.
    pub fn index(self) -> Option<usize> {
        match self {
            Self::MM => Some(0),
            Self::MW => Some(1),
            Self::WM => Some(2),
            Self::WW => Some(3),
            Self::Unknown => None,
        }
    }

    /// At least one of first and last author is a woman (the "W|W" group).
    pub fn has_woman(self) -> bool {
        matches!(self, Self::MW | Self::WM | Self::WW)
    }
}

impl fmt::Display for GenderCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GenderCategory {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "MM" => Ok(Self::MM),
            "MW" => Ok(Self::MW),
            "WM" => Ok(Self::WM),
            "WW" => Ok(Self::WW),
            "UNKNOWN" => Ok(Self::Unknown),
            _ => Err(()),
        }
    }
}

/// Inferred gender of a single author.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuthorGender {
    Man,
    Woman,
    Unknown,
}

/// Combine first- and last-author genders into a paper category.
///
/// Sole-author papers use the single author's gender twice.
pub fn gender_category(first: AuthorGender, last: AuthorGender, sole_author: bool) -> GenderCategory {
    use AuthorGender::*;
    let last = if sole_author { first } else { last };
    match (first, last) {
        (Man, Man) => GenderCategory::MM,
        (Man, Woman) => GenderCategory::MW,
        (Woman, Man) => GenderCategory::WM,
        (Woman, Woman) => GenderCategory::WW,
        _ => GenderCategory::Unknown,
    }
}

/// CORE conference rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConferenceRank {
    #[serde(rename = "A*")]
    AStar,
    A,
    B,
    C,
    Unranked,
}

impl ConferenceRank {
    pub const ALL: [ConferenceRank; 5] = [Self::AStar, Self::A, Self::B, Self::C, Self::Unranked];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::AStar => "A*",
            Self::A => "A",
            Self::B => "B",
            Self::C => "C",
            Self::Unranked => "Unranked",
        }
    }
}

impl fmt::Display for ConferenceRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConferenceRank {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "A*" | "AStar" => Ok(Self::AStar),
            "A" => Ok(Self::A),
            "B" => Ok(Self::B),
            "C" => Ok(Self::C),
            "Unranked" => Ok(Self::Unranked),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paper {
    pub id: String,
    pub pub_date: NaiveDate,
    pub gender: GenderCategory,
    pub rank: ConferenceRank,
    pub country: String,
    pub topic: String,
    pub subfield: String,
    pub first_author: String,
    pub last_author: String,
}

impl Paper {
    pub fn year(&self) -> i32 {
        self.pub_date.year()
    }

    /// Earliest publication date this paper may cite.
    pub fn window_start(&self) -> NaiveDate {
        self.pub_date
            .checked_sub_months(Months::new(CITATION_WINDOW_MONTHS))
            .unwrap_or(NaiveDate::MIN)
    }

    /// Both authors of `other` are among this paper's first/last authors.
    pub fn shares_authors_with(&self, other: &Paper) -> bool {
        let mine = [self.first_author.as_str(), self.last_author.as_str()];
        mine.contains(&other.first_author.as_str()) && mine.contains(&other.last_author.as_str())
    }

    /// Whether a citation from `self` to `cited` survives the filtering rules.
    pub fn may_keep_citation_to(&self, cited: &Paper) -> bool {
        cited.pub_date >= self.window_start() && !self.shares_authors_with(cited)
    }

    /// Value of one grouping attribute.
    pub fn attribute(&self, attr: Attribute) -> &str {
        match attr {
            Attribute::Rank => self.rank.as_str(),
            Attribute::Country => &self.country,
            Attribute::Topic => &self.topic,
        }
    }
}

/// Paper attribute usable for homophilic grouping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attribute {
    Rank,
    Country,
    Topic,
}

impl Attribute {
    pub const ALL: [Attribute; 3] = [Self::Rank, Self::Country, Self::Topic];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Rank => "rank",
            Self::Country => "country",
            Self::Topic => "topic",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl FromStr for Attribute {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.trim() {
            "rank" => Ok(Self::Rank),
            "country" => Ok(Self::Country),
            "topic" => Ok(Self::Topic),
            other => Err(crate::Error::InvalidArgument(format!("unknown attribute `{other}`"))),
        }
    }
}

/// Subset of {rank, country, topic}.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AttributeSet {
    bits: u8,
}

impl AttributeSet {
    pub const EMPTY: AttributeSet = AttributeSet { bits: 0 };
    pub const ALL: AttributeSet = AttributeSet { bits: 0b111 };

    pub fn new(attrs: &[Attribute]) -> Self {
        let mut set = Self::EMPTY;
        for a in attrs {
            set.bits |= 1 << a.slot();
        }
        set
    }

    pub fn contains(self, attr: Attribute) -> bool {
        self.bits & (1 << attr.slot()) != 0
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    /// Members in canonical order (rank, country, topic).
    pub fn iter(self) -> impl Iterator<Item = Attribute> {
        Attribute::ALL.into_iter().filter(move |a| self.contains(*a))
    }
}

impl fmt::Display for AttributeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.iter().map(Attribute::as_str).collect();
        f.write_str(&names.join(","))
    }
}

impl FromStr for AttributeSet {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        let attrs = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty() && *t != "none")
            .map(str::parse)
            .collect::<crate::Result<Vec<Attribute>>>()?;
        Ok(Self::new(&attrs))
    }
}

/// Projection of a paper onto `attrs`, in canonical attribute order.
pub fn category_key(paper: &Paper, attrs: AttributeSet) -> Vec<&str> {
    attrs.iter().map(|a| paper.attribute(a)).collect()
}

/// Compact category key: interned attribute ids, `u32::MAX` outside the set.
pub type KeyIds = [u32; 3];

/// Immutable directed citation graph over filtered papers.
///
/// Node `i` is `papers[i]`. Adjacency lists are sorted and duplicate free.
#[derive(Debug, Clone)]
pub struct CitationNetwork {
    papers: Vec<Paper>,
    out_adj: Vec<Vec<u32>>,
    in_adj: Vec<Vec<u32>>,
    citations: usize,
    attr_ids: Vec<KeyIds>,
    by_id: HashMap<String, u32>,
}

impl CitationNetwork {
    /// Assemble a network from already validated parts.
    pub(crate) fn from_parts(papers: Vec<Paper>, mut out_adj: Vec<Vec<u32>>) -> Self {
        let n = papers.len();
        let mut in_adj = vec![Vec::new(); n];
        let mut citations = 0;
        for (i, targets) in out_adj.iter_mut().enumerate() {
            targets.sort_unstable();
            targets.dedup();
            citations += targets.len();
            for &j in targets.iter() {
                in_adj[j as usize].push(i as u32);
            }
        }
        let mut interner: [HashMap<&str, u32>; 3] = Default::default();
        let attr_ids = papers
            .iter()
            .map(|p| {
                let mut ids = [0u32; 3];
                for attr in Attribute::ALL {
                    let table = &mut interner[attr.slot()];
                    let next = table.len() as u32;
                    ids[attr.slot()] = *table.entry(p.attribute(attr)).or_insert(next);
                }
                ids
            })
            .collect();
        let by_id = papers
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id.clone(), i as u32))
            .collect();
        Self {
            papers,
            out_adj,
            in_adj,
            citations,
            attr_ids,
            by_id,
        }
    }

    pub fn len(&self) -> usize {
        self.papers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.papers.is_empty()
    }

    /// Number of citations `M`.
    pub fn citation_count(&self) -> usize {
        self.citations
    }

    pub fn papers(&self) -> &[Paper] {
        &self.papers
    }

    pub fn paper(&self, i: usize) -> &Paper {
        &self.papers[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).map(|&i| i as usize)
    }

    /// Papers cited by `i`, ascending.
    pub fn cited_by(&self, i: usize) -> &[u32] {
        &self.out_adj[i]
    }

    /// Papers citing `j`, ascending.
    pub fn citers_of(&self, j: usize) -> &[u32] {
        &self.in_adj[j]
    }

    /// `k_i`.
    pub fn out_degree(&self, i: usize) -> usize {
        self.out_adj[i].len()
    }

    /// `c_j`.
    pub fn in_degree(&self, j: usize) -> usize {
        self.in_adj[j].len()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        self.out_adj.iter().map(Vec::len).collect()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        self.in_adj.iter().map(Vec::len).collect()
    }

    /// All citations `(citing, cited)` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(i, t)| t.iter().map(move |&j| (i, j as usize)))
    }

    /// Interned category key of paper `i` under `attrs`.
    pub fn key_ids(&self, i: usize, attrs: AttributeSet) -> KeyIds {
        let mut key = self.attr_ids[i];
        for attr in Attribute::ALL {
            if !attrs.contains(attr) {
                key[attr.slot()] = u32::MAX;
            }
        }
        key
    }

    /// Interned id of a single attribute value of paper `i`.
    pub fn attribute_id(&self, i: usize, attr: Attribute) -> u32 {
        self.attr_ids[i][attr.slot()]
    }

    /// Citations as id pairs, the input to [`filter_citations`].
    pub fn edge_ids(&self) -> Vec<(String, String)> {
        self.edges()
            .map(|(i, j)| (self.papers[i].id.clone(), self.papers[j].id.clone()))
            .collect()
    }

    /// Paper counts per gender category, unknown last.
    pub fn gender_counts(&self) -> [usize; 5] {
        let mut counts = [0; 5];
        for p in &self.papers {
            counts[p.gender.index().unwrap_or(4)] += 1;
        }
        counts
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use AuthorGender::*;

    #[test]
    fn gender_category_combinations() {
        assert_eq!(gender_category(Man, Woman, false), GenderCategory::MW);
        assert_eq!(gender_category(Woman, Unknown, true), GenderCategory::WW);
        assert_eq!(gender_category(Man, Unknown, true), GenderCategory::MM);
        assert_eq!(gender_category(Unknown, Man, false), GenderCategory::Unknown);
        assert_eq!(gender_category(Woman, Man, false), GenderCategory::WM);
    }

    #[test]
    fn category_key_projects_in_canonical_order() {
        let p = paper("P1", "2010-01-01", GenderCategory::MM, ("A*", "US", "T1"));
        assert_eq!(category_key(&p, AttributeSet::ALL), vec!["A*", "US", "T1"]);
        assert_eq!(category_key(&p, AttributeSet::new(&[Attribute::Rank])), vec!["A*"]);
        assert!(category_key(&p, AttributeSet::EMPTY).is_empty());
        let topic_rank: AttributeSet = "topic,rank".parse().unwrap();
        assert_eq!(category_key(&p, topic_rank), vec!["A*", "T1"]);
    }

    #[test]
    fn attribute_set_round_trips_through_text() {
        let s: AttributeSet = "rank,country,topic".parse().unwrap();
        assert_eq!(s, AttributeSet::ALL);
        assert_eq!(s.to_string(), "rank,country,topic");
        assert!("".parse::<AttributeSet>().unwrap().is_empty());
        assert!("rank,venue".parse::<AttributeSet>().is_err());
    }

    #[test]
    fn toy4_degrees() {
        let net = toy4();
        assert_eq!(net.len(), 4);
        assert_eq!(net.citation_count(), 3);
        assert_eq!(net.out_degrees(), vec![0, 0, 1, 2]);
        assert_eq!(net.in_degrees(), vec![2, 1, 0, 0]);
        assert_eq!(net.key_ids(0, AttributeSet::ALL), net.key_ids(1, AttributeSet::ALL));
        assert_ne!(net.key_ids(0, AttributeSet::ALL), net.key_ids(2, AttributeSet::ALL));
        assert_eq!(net.key_ids(0, AttributeSet::EMPTY), net.key_ids(2, AttributeSet::EMPTY));
    }
}
