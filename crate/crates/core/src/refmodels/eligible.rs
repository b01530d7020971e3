//! Eligible-set computation.
//!
//! A paper `j` is eligible for citer `i` when `j != i`, `j` was published
//! no later than `i` and at most ten calendar years before it, and not both
//! of `j`'s first and last authors are first or last author of `i`.

use std::collections::HashMap;

use chrono::NaiveDate;

use crate::corpus::{AttributeSet, CitationNetwork, KeyIds};

/// Papers bucketed by category key, each bucket sorted by (date, id).
pub(crate) struct EligibilityIndex<'a> {
    net: &'a CitationNetwork,
    attrs: AttributeSet,
    buckets: HashMap<KeyIds, Bucket>,
}

struct Bucket {
    dates: Vec<NaiveDate>,
    papers: Vec<u32>,
}

/// Date-then-id order used wherever papers need a total order in time.
pub(crate) fn chronological_order(net: &CitationNetwork) -> Vec<u32> {
    let mut order: Vec<u32> = (0..net.len() as u32).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (net.paper(a as usize), net.paper(b as usize));
        pa.pub_date.cmp(&pb.pub_date).then_with(|| pa.id.cmp(&pb.id))
    });
    order
}

impl<'a> EligibilityIndex<'a> {
    pub(crate) fn new(net: &'a CitationNetwork, attrs: AttributeSet) -> Self {
        let mut buckets: HashMap<KeyIds, Bucket> = HashMap::new();
        for idx in chronological_order(net) {
            let i = idx as usize;
            let bucket = buckets.entry(net.key_ids(i, attrs)).or_insert_with(|| Bucket {
                dates: Vec::new(),
                papers: Vec::new(),
            });
            bucket.dates.push(net.paper(i).pub_date);
            bucket.papers.push(idx);
        }
        Self { net, attrs, buckets }
    }

    /// Eligible papers for `citer` inside the bucket `key`, ascending by index.
    fn eligible_in(&self, citer: usize, key: &KeyIds) -> Vec<u32> {
        let Some(bucket) = self.buckets.get(key) else {
            return Vec::new();
        };
        let paper = self.net.paper(citer);
        let lo = bucket.dates.partition_point(|d| *d < paper.window_start());
        let hi = bucket.dates.partition_point(|d| *d <= paper.pub_date);
        let mut out: Vec<u32> = bucket.papers[lo..hi]
            .iter()
            .copied()
            .filter(|&j| j as usize != citer && !paper.shares_authors_with(self.net.paper(j as usize)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Eligible set of `citer` when the index was built with no attributes,
    /// otherwise the eligible papers sharing `citer`'s own key.
    pub(crate) fn random(&self, citer: usize) -> Vec<u32> {
        debug_assert!(self.attrs.is_empty());
        self.eligible_in(citer, &self.net.key_ids(citer, self.attrs))
    }

    /// Eligible papers in the category of `cited`. The observed target is
    /// always a member, even when it lies outside the eligible window.
    pub(crate) fn homophilic(&self, citer: usize, cited: usize) -> Vec<u32> {
        let mut out = self.eligible_in(citer, &self.net.key_ids(cited, self.attrs));
        if let Err(pos) = out.binary_search(&(cited as u32)) {
            out.insert(pos, cited as u32);
        }
        out
    }
}

/// Papers that `i` could cite.
pub fn eligible_set_rd(net: &CitationNetwork, i: usize) -> Vec<usize> {
    EligibilityIndex::new(net, AttributeSet::EMPTY)
        .random(i)
        .into_iter()
        .map(|j| j as usize)
        .collect()
}

/// Papers that `i` could cite in the category of `i_prime` under `attrs`.
pub fn eligible_set_hd(net: &CitationNetwork, i: usize, i_prime: usize, attrs: AttributeSet) -> Vec<usize> {
    EligibilityIndex::new(net, attrs)
        .homophilic(i, i_prime)
        .into_iter()
        .map(|j| j as usize)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures::{toy4, toy_pd};

    #[test]
    fn toy4_random_sets() {
        let net = toy4();
        assert_eq!(eligible_set_rd(&net, 2), vec![0, 1]);
        assert_eq!(eligible_set_rd(&net, 3), vec![0, 1, 2]);
        // Same date, neither precedes the other: both may cite each other.
        assert_eq!(eligible_set_rd(&net, 0), vec![1]);
    }

    #[test]
    fn toy4_homophilic_sets() {
        let net = toy4();
        assert_eq!(eligible_set_hd(&net, 2, 0, AttributeSet::ALL), vec![0, 1]);
        assert_eq!(eligible_set_hd(&net, 3, 1, AttributeSet::ALL), vec![0, 1]);
        assert_eq!(eligible_set_hd(&net, 3, 0, AttributeSet::EMPTY), eligible_set_rd(&net, 3));
    }

    #[test]
    fn shared_authors_exclude_candidates() {
        let net = toy_pd();
        let p3 = net.index_of("P3").unwrap();
        let p2 = net.index_of("P2").unwrap();
        let rd = eligible_set_rd(&net, p3);
        assert!(!rd.contains(&p2));
        assert!(rd.contains(&net.index_of("P1").unwrap()));
    }

    #[test]
    fn cited_future_paper_still_in_its_group() {
        // P1 (2010) cites P2 (2011): P2 is outside P1's eligible window but
        // must belong to the group of that observed citation.
        use crate::corpus::fixtures::paper;
        use crate::corpus::{filter_citations, GenderCategory::*};
        let papers = vec![
            paper("P1", "2010", MM, ("A", "US", "T")),
            paper("P2", "2011", WW, ("A", "US", "T")),
        ];
        let net = filter_citations(papers, &[("P1".into(), "P2".into())]).unwrap();
        assert!(eligible_set_rd(&net, 0).is_empty());
        assert_eq!(eligible_set_hd(&net, 0, 1, AttributeSet::ALL), vec![1]);
    }
}
