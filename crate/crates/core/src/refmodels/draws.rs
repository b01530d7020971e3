use std::collections::HashMap;

use rayon::prelude::*;

use super::{chronological_order, ContributionGroup, EligibilityIndex, ExpectedCitations, ModelKind};
use crate::corpus::{AttributeSet, CitationNetwork};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Merge per-citation member sets of one citer; identical sets add up.
fn merge_groups<T: Scalar>(citer: u32, per_citation: Vec<(Vec<u32>, u32)>) -> Vec<ContributionGroup<T>> {
    let mut slots: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut merged: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
    for (members, target) in per_citation {
        match slots.get(&members) {
            Some(&s) => merged[s].1.push(target),
            None => {
                slots.insert(members.clone(), merged.len());
                merged.push((members, vec![target]));
            }
        }
    }
    merged
        .into_iter()
        .map(|(members, targets)| ContributionGroup::new(citer, members, targets))
        .collect()
}

fn accumulate<T: Scalar>(n: usize, groups: &[ContributionGroup<T>]) -> Vec<T> {
    let mut c_bar = vec![T::zero(); n];
    for g in groups {
        for &j in &g.members {
            c_bar[j as usize] += g.weight.clone();
        }
    }
    c_bar
}

/// Random-draws model: each citation of `i` goes uniformly to its
/// eligible set, so `w̄_ij = k_i / |V̄(i)|`.
///
/// Fails when a paper makes citations but has nothing eligible to cite.
pub fn random_draws<T: Scalar>(net: &CitationNetwork) -> Result<ExpectedCitations<T>> {
    let index = EligibilityIndex::new(net, AttributeSet::EMPTY);
    let per_citer: Vec<Result<Option<ContributionGroup<T>>>> = (0..net.len())
        .into_par_iter()
        .map(|i| {
            let k = net.out_degree(i);
            if k == 0 {
                return Ok(None);
            }
            let members = index.random(i);
            if members.is_empty() {
                return Err(Error::EmptyEligibleSet {
                    paper: net.paper(i).id.clone(),
                    citations: k,
                });
            }
            Ok(Some(ContributionGroup::new(i as u32, members, net.cited_by(i).to_vec())))
        })
        .collect();
    let groups = per_citer
        .into_iter()
        .filter_map(Result::transpose)
        .collect::<Result<Vec<_>>>()?;
    let c_bar = accumulate(net.len(), &groups);
    Ok(ExpectedCitations::from_groups(ModelKind::RandomDraws, AttributeSet::EMPTY, net, groups, c_bar))
}

/// Homophilic-draws model: the citation `i -> i'` goes uniformly to the
/// papers eligible for `i` that share `i'`'s category under `attrs`.
pub fn homophilic_draws<T: Scalar>(net: &CitationNetwork, attrs: AttributeSet) -> ExpectedCitations<T> {
    let index = EligibilityIndex::new(net, attrs);
    let groups: Vec<ContributionGroup<T>> = (0..net.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let per_citation = net
                .cited_by(i)
                .iter()
                .map(|&t| (index.homophilic(i, t as usize), t))
                .collect();
            merge_groups(i as u32, per_citation)
        })
        .collect();
    let c_bar = accumulate(net.len(), &groups);
    ExpectedCitations::from_groups(ModelKind::HomophilicDraws, attrs, net, groups, c_bar)
}

/// Preferential-draws model.
///
/// Papers are visited in (date, id) order. A citation `x_l -> i'` goes
/// uniformly to the homophilic group of `i'` restricted to papers whose
/// running expected in-citations (from papers before `x_l`) tie with
/// those of `i'`. All citations of one paper read the same snapshot.
pub fn preferential_draws<T: Scalar>(net: &CitationNetwork, attrs: AttributeSet, tie_eps: f64) -> ExpectedCitations<T> {
    let index = EligibilityIndex::new(net, attrs);
    let mut running = vec![T::zero(); net.len()];
    let mut per_citer: Vec<Vec<ContributionGroup<T>>> = vec![Vec::new(); net.len()];
    for x in chronological_order(net) {
        let i = x as usize;
        if net.out_degree(i) == 0 {
            continue;
        }
        let per_citation: Vec<(Vec<u32>, u32)> = net
            .cited_by(i)
            .par_iter()
            .map(|&t| {
                let anchor = &running[t as usize];
                let members = index
                    .homophilic(i, t as usize)
                    .into_iter()
                    .filter(|&j| running[j as usize].tied(anchor, tie_eps))
                    .collect();
                (members, t)
            })
            .collect();
        let groups = merge_groups::<T>(x, per_citation);
        for g in &groups {
            for &j in &g.members {
                running[j as usize] += g.weight.clone();
            }
        }
        per_citer[i] = groups;
    }
    let groups: Vec<_> = per_citer.into_iter().flatten().collect();
    ExpectedCitations::from_groups(ModelKind::PreferentialDraws, attrs, net, groups, running)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures::{paper, toy4, toy_pd};
    use crate::corpus::{filter_citations, GenderCategory::*};
    use num_rational::BigRational;

    fn q(n: u64, d: u64) -> BigRational {
        BigRational::ratio(n, d)
    }

    #[test]
    fn toy4_random_draws_exact() {
        let net = toy4();
        let ec = random_draws::<BigRational>(&net).unwrap();
        assert_eq!(ec.citation_probability(2, 0), q(1, 2));
        assert_eq!(ec.citation_probability(3, 2), q(2, 3));
        assert_eq!(ec.c_bar(), &[q(7, 6), q(7, 6), q(2, 3), q(0, 1)]);
        assert_eq!(ec.groups_of(0).len(), 0);
        assert_eq!(ec.citation_probability(0, 1), q(0, 1));
    }

    #[test]
    fn toy4_homophilic_draws_exact() {
        let net = toy4();
        let ec = homophilic_draws::<BigRational>(&net, AttributeSet::ALL);
        assert_eq!(ec.c_bar(), &[q(3, 2), q(3, 2), q(0, 1), q(0, 1)]);
        // P4's two citations share a group and merge.
        assert_eq!(ec.groups_of(3).len(), 1);
        assert_eq!(ec.groups_of(3)[0].weight, q(1, 1));
    }

    #[test]
    fn toy4_preferential_matches_homophilic() {
        let net = toy4();
        let pd = preferential_draws::<BigRational>(&net, AttributeSet::ALL, 0.0);
        let hd = homophilic_draws::<BigRational>(&net, AttributeSet::ALL);
        assert_eq!(pd.c_bar(), hd.c_bar());
    }

    #[test]
    fn toy_pd_contrast() {
        let net = toy_pd();
        let p1 = net.index_of("P1").unwrap();
        let p2 = net.index_of("P2").unwrap();
        let hd = homophilic_draws::<BigRational>(&net, AttributeSet::ALL);
        let pd = preferential_draws::<BigRational>(&net, AttributeSet::ALL, 0.0);
        assert_eq!((hd.c_bar()[p1].clone(), hd.c_bar()[p2].clone()), (q(3, 2), q(1, 2)));
        assert_eq!((pd.c_bar()[p1].clone(), pd.c_bar()[p2].clone()), (q(2, 1), q(0, 1)));
        let fpd = preferential_draws::<f64>(&net, AttributeSet::ALL, 1e-9);
        assert!((fpd.c_bar()[p1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn empty_attribute_set_reproduces_random_draws_for_single_citations() {
        let net = toy4();
        let hd = homophilic_draws::<BigRational>(&net, AttributeSet::EMPTY);
        let rd = random_draws::<BigRational>(&net).unwrap();
        // P3 makes exactly one citation.
        for j in 0..net.len() {
            assert_eq!(hd.citation_probability(2, j), rd.citation_probability(2, j));
        }
    }

    #[test]
    fn singleton_group_gets_full_unit() {
        let papers = vec![
            paper("a", "2010", MM, ("A", "US", "T1")),
            paper("b", "2011", WW, ("A", "US", "T2")),
        ];
        let net = filter_citations(papers, &[("b".into(), "a".into())]).unwrap();
        let rd = random_draws::<f64>(&net).unwrap();
        assert_eq!(rd.citation_probability(1, 0), 1.0);
        let hd = homophilic_draws::<f64>(&net, AttributeSet::ALL);
        assert_eq!(hd.c_bar(), &[1.0, 0.0]);
    }

    #[test]
    fn random_draws_rejects_empty_eligible_set() {
        let papers = vec![
            paper("a", "2010", MM, ("A", "US", "T1")),
            paper("b", "2011", WW, ("A", "US", "T2")),
        ];
        let net = filter_citations(papers, &[("a".into(), "b".into())]).unwrap();
        match random_draws::<f64>(&net) {
            Err(Error::EmptyEligibleSet { paper, .. }) => assert_eq!(paper, "a"),
            other => panic!("expected error, got {other:?}"),
        }
        // HD keeps the cited paper in the group.
        let hd = homophilic_draws::<f64>(&net, AttributeSet::ALL);
        assert_eq!(hd.c_bar(), &[0.0, 1.0]);
    }

    #[test]
    fn observed_model_matches_network() {
        let net = toy4();
        let ec = ExpectedCitations::<f64>::from_observed(&net);
        ec.check_network(&net).unwrap();
        assert_eq!(ec.c_bar(), &[2.0, 1.0, 0.0, 0.0]);
        let rd = random_draws::<f64>(&net).unwrap();
        rd.check_network(&net).unwrap();
        assert!(rd.check_network(&toy_pd()).is_err());
    }
}
