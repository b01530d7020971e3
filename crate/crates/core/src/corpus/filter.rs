use std::collections::HashMap;

use super::{CitationNetwork, Paper};
use crate::{Error, Result};

/// Apply the citation filtering rules and build the network.
///
/// A citation `u -> v` is dropped when `v` was published more than ten
/// calendar years before `u`, or when both of `v`'s first and last authors
/// are first or last author of `u`. Self-loops and duplicates are removed,
/// then papers left without any citation in either direction. Surviving
/// papers keep their input order.
pub fn filter_citations(papers: Vec<Paper>, raw_edges: &[(String, String)]) -> Result<CitationNetwork> {
    let mut index: HashMap<&str, usize> = HashMap::with_capacity(papers.len());
    for (i, p) in papers.iter().enumerate() {
        if index.insert(p.id.as_str(), i).is_some() {
            return Err(Error::DuplicatePaper(p.id.clone()));
        }
    }

    let mut out_adj: Vec<Vec<u32>> = vec![Vec::new(); papers.len()];
    for (citing, cited) in raw_edges {
        let (Some(&u), Some(&v)) = (index.get(citing.as_str()), index.get(cited.as_str())) else {
            return Err(Error::UnknownEndpoint {
                citing: citing.clone(),
                cited: cited.clone(),
            });
        };
        if u != v && papers[u].may_keep_citation_to(&papers[v]) {
            out_adj[u].push(v as u32);
        }
    }
    for targets in &mut out_adj {
        targets.sort_unstable();
        targets.dedup();
    }

    let mut connected = vec![false; papers.len()];
    for (u, targets) in out_adj.iter().enumerate() {
        if !targets.is_empty() {
            connected[u] = true;
        }
        for &v in targets {
            connected[v as usize] = true;
        }
    }
    let mut new_index = vec![u32::MAX; papers.len()];
    let mut next = 0u32;
    for (i, keep) in connected.iter().enumerate() {
        if *keep {
            new_index[i] = next;
            next += 1;
        }
    }

    let dropped = papers.len() - next as usize;
    if dropped > 0 {
        log::debug!("dropped {dropped} paper(s) without surviving citations");
    }

    let mut kept_papers = Vec::with_capacity(next as usize);
    let mut kept_adj = Vec::with_capacity(next as usize);
    for ((paper, targets), keep) in papers.into_iter().zip(out_adj).zip(&connected) {
        if *keep {
            kept_papers.push(paper);
            kept_adj.push(targets.into_iter().map(|v| new_index[v as usize]).collect());
        }
    }
    Ok(CitationNetwork::from_parts(kept_papers, kept_adj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures::paper;
    use crate::corpus::GenderCategory::*;
    use proptest::prelude::*;

    fn e(a: &str, b: &str) -> (String, String) {
        (a.to_string(), b.to_string())
    }

    #[test]
    fn drops_citations_older_than_ten_years() {
        let papers = vec![
            paper("old", "2000-01-01", MM, ("A", "US", "T")),
            paper("new", "2012-01-01", MM, ("A", "US", "T")),
            paper("mid", "2002-01-01", WW, ("A", "US", "T")),
        ];
        let net = filter_citations(papers, &[e("new", "old"), e("new", "mid")]).unwrap();
        assert_eq!(net.citation_count(), 1);
        assert!(net.index_of("old").is_none());
        assert_eq!(net.edge_ids(), vec![e("new", "mid")]);
    }

    #[test]
    fn exactly_ten_years_is_kept() {
        let papers = vec![
            paper("a", "2000-03-15", MM, ("A", "US", "T")),
            paper("b", "2010-03-15", MM, ("A", "US", "T")),
            paper("c", "2000-03-14", MM, ("A", "US", "T")),
        ];
        let net = filter_citations(papers, &[e("b", "a"), e("b", "c")]).unwrap();
        assert_eq!(net.edge_ids(), vec![e("b", "a")]);
    }

    #[test]
    fn drops_self_citations_by_author_overlap() {
        let mut citing = paper("u", "2012-01-01", MM, ("A", "US", "T"));
        citing.first_author = "a1".into();
        citing.last_author = "a2".into();
        let mut cited = paper("v", "2011-01-01", MM, ("A", "US", "T"));
        cited.first_author = "a1".into();
        cited.last_author = "a2".into();
        let mut partial = paper("w", "2011-01-01", MM, ("A", "US", "T"));
        partial.first_author = "a2".into();
        let net = filter_citations(vec![citing, cited, partial], &[e("u", "v"), e("u", "w")]).unwrap();
        assert_eq!(net.edge_ids(), vec![e("u", "w")]);
    }

    #[test]
    fn removes_isolated_papers_and_duplicates() {
        let papers = vec![
            paper("a", "2010", MM, ("A", "US", "T")),
            paper("b", "2011", MM, ("A", "US", "T")),
            paper("lonely", "2011", WW, ("A", "US", "T")),
        ];
        let net = filter_citations(papers, &[e("b", "a"), e("b", "a"), e("a", "a")]).unwrap();
        assert_eq!(net.len(), 2);
        assert_eq!(net.citation_count(), 1);
        assert!(net.index_of("lonely").is_none());
    }

    #[test]
    fn unknown_endpoint_is_an_error() {
        let papers = vec![paper("a", "2010", MM, ("A", "US", "T"))];
        let err = filter_citations(papers, &[e("a", "ghost")]).unwrap_err();
        assert!(err.to_string().contains("ghost"));
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let papers = vec![
            paper("a", "2010", MM, ("A", "US", "T")),
            paper("a", "2011", MM, ("A", "US", "T")),
        ];
        assert!(matches!(filter_citations(papers, &[]), Err(Error::DuplicatePaper(_))));
    }

    fn arb_corpus() -> impl Strategy<Value = (Vec<Paper>, Vec<(String, String)>)> {
        let paper_strategy = (0i64..8000, 0u8..4, 0u8..4);
        (
            prop::collection::vec(paper_strategy, 2..25),
            prop::collection::vec((0usize..25, 0usize..25), 0..80),
        )
            .prop_map(|(specs, raw)| {
                let papers: Vec<Paper> = specs
                    .iter()
                    .enumerate()
                    .map(|(i, (days, fa, la))| {
                        let mut p = paper(&format!("p{i}"), "2000-01-01", MM, ("A", "US", "T"));
                        p.pub_date += chrono::Duration::days(*days);
                        p.first_author = format!("a{fa}");
                        p.last_author = format!("a{la}");
                        p
                    })
                    .collect();
                let n = papers.len();
                let edges = raw
                    .into_iter()
                    .map(|(a, b)| (format!("p{}", a % n), format!("p{}", b % n)))
                    .collect();
                (papers, edges)
            })
    }

    proptest! {
        #[test]
        fn filtering_is_idempotent((papers, edges) in arb_corpus()) {
            let once = filter_citations(papers, &edges).unwrap();
            let twice = filter_citations(once.papers().to_vec(), &once.edge_ids()).unwrap();
            prop_assert_eq!(once.papers(), twice.papers());
            prop_assert_eq!(once.edge_ids(), twice.edge_ids());
        }

        #[test]
        fn surviving_edges_satisfy_predicates((papers, edges) in arb_corpus()) {
            let net = filter_citations(papers, &edges).unwrap();
            for (i, j) in net.edges() {
                prop_assert!(i != j);
                prop_assert!(net.paper(i).may_keep_citation_to(net.paper(j)));
            }
            for i in 0..net.len() {
                prop_assert!(net.out_degree(i) + net.in_degree(i) >= 1);
            }
            let k: usize = net.out_degrees().iter().sum();
            let c: usize = net.in_degrees().iter().sum();
            prop_assert_eq!(k, net.citation_count());
            prop_assert_eq!(c, net.citation_count());
        }
    }
}
