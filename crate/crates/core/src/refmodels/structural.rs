//! Structural comparison between the observed network and a model.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{ExpectedCitations, ModelKind};
use crate::corpus::{Attribute, AttributeSet, CitationNetwork, GenderCategory};
use crate::scalar::Scalar;

/// Citations from papers with attribute value `from` to papers with `to`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairCount {
    pub attribute: Attribute,
    pub from: String,
    pub to: String,
    pub observed: f64,
    pub expected: f64,
}

/// Fraction of papers with value `>= threshold`, observed and expected.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalCurve {
    /// `None` for all papers, otherwise one gender category.
    pub gender: Option<GenderCategory>,
    pub thresholds: Vec<f64>,
    pub observed: Vec<f64>,
    pub expected: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StructuralReport {
    pub model: ModelKind,
    pub attrs: AttributeSet,
    /// `(k, number of papers with out-degree k)`.
    pub out_degree_histogram: Vec<(usize, usize)>,
    /// `max_i |Σ_j w̄_ij - k_i|`.
    pub max_out_degree_deviation: f64,
    pub pair_counts: Vec<PairCount>,
    pub survival: Vec<SurvivalCurve>,
    /// Two-sample KS distance between observed `c_j` and expected `c̄_j`.
    pub in_degree_ks: f64,
}

/// `S(x) = |{v >= x}| / |values|` at each threshold.
pub fn survival_function(values: &[f64], thresholds: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len().max(1) as f64;
    thresholds
        .iter()
        .map(|&x| (sorted.len() - sorted.partition_point(|&v| v < x)) as f64 / n)
        .collect()
}

/// Two-sample Kolmogorov-Smirnov statistic `sup_x |F_a(x) - F_b(x)|`.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.len() == b.len() { 0.0 } else { 1.0 };
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut best) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    best
}

/// Compare out-degrees, per-attribute citation pair counts and in-degree
/// survival functions between `net` and the model `ec`.
pub fn structural_report<T: Scalar>(net: &CitationNetwork, ec: &ExpectedCitations<T>) -> StructuralReport {
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for k in net.out_degrees() {
        *histogram.entry(k).or_default() += 1;
    }
    let max_out_degree_deviation = ec
        .row_sums()
        .iter()
        .enumerate()
        .map(|(i, s)| (s.to_f64() - net.out_degree(i) as f64).abs())
        .fold(0.0, f64::max);

    let mut pair_counts = Vec::new();
    for attr in Attribute::ALL {
        let mut cells: BTreeMap<(&str, &str), (f64, f64)> = BTreeMap::new();
        for (i, j) in net.edges() {
            let key = (net.paper(i).attribute(attr), net.paper(j).attribute(attr));
            cells.entry(key).or_default().0 += 1.0;
        }
        for g in ec.groups() {
            let from = net.paper(g.citing as usize).attribute(attr);
            let w = g.weight.to_f64();
            for &j in &g.members {
                cells.entry((from, net.paper(j as usize).attribute(attr))).or_default().1 += w;
            }
        }
        pair_counts.extend(cells.into_iter().map(|((from, to), (observed, expected))| PairCount {
            attribute: attr,
            from: from.to_string(),
            to: to.to_string(),
            observed,
            expected,
        }));
    }

    let observed: Vec<f64> = net.in_degrees().into_iter().map(|c| c as f64).collect();
    let expected: Vec<f64> = ec.c_bar().iter().map(Scalar::to_f64).collect();
    let max_c = observed.iter().chain(&expected).fold(0.0f64, |m, &v| m.max(v)).ceil() as usize;
    let thresholds: Vec<f64> = (0..=max_c).map(|x| x as f64).collect();

    let curve = |gender: Option<GenderCategory>| {
        let pick = |values: &[f64]| -> Vec<f64> {
            values
                .iter()
                .enumerate()
                .filter(|(i, _)| gender.is_none_or(|g| net.paper(*i).gender == g))
                .map(|(_, v)| *v)
                .collect()
        };
        SurvivalCurve {
            gender,
            thresholds: thresholds.clone(),
            observed: survival_function(&pick(&observed), &thresholds),
            expected: survival_function(&pick(&expected), &thresholds),
        }
    };
    let mut survival = vec![curve(None)];
    survival.extend(GenderCategory::KNOWN.into_iter().map(|g| curve(Some(g))));

    StructuralReport {
        model: ec.model(),
        attrs: ec.attrs(),
        out_degree_histogram: histogram.into_iter().collect(),
        max_out_degree_deviation,
        pair_counts,
        survival,
        in_degree_ks: ks_distance(&observed, &expected),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures::toy4;
    use crate::refmodels::{homophilic_draws, random_draws};

    #[test]
    fn survival_starts_at_one() {
        let s = survival_function(&[0.0, 1.0, 3.0, 3.0], &[0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s, vec![1.0, 0.75, 0.5, 0.5, 0.0]);
    }

    #[test]
    fn ks_examples() {
        assert_eq!(ks_distance(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert_eq!(ks_distance(&[0.0, 0.0], &[5.0, 5.0]), 1.0);
        assert!((ks_distance(&[0.0, 1.0, 2.0, 3.0], &[0.0, 1.0]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn homophilic_report_preserves_rank_pairs_on_toy4() {
        let net = toy4();
        let ec = homophilic_draws::<f64>(&net, AttributeSet::ALL);
        let report = structural_report(&net, &ec);
        let rank: Vec<_> = report.pair_counts.iter().filter(|p| p.attribute == Attribute::Rank).collect();
        assert_eq!(rank.len(), 1);
        assert_eq!((rank[0].observed, rank[0].expected), (3.0, 3.0));
        assert!(report.max_out_degree_deviation < 1e-12);
        assert_eq!(report.survival[0].observed[0], 1.0);
        assert_eq!(report.survival[0].expected[0], 1.0);
        assert_eq!(report.out_degree_histogram, vec![(0, 2), (1, 1), (2, 1)]);
    }

    #[test]
    fn random_report_breaks_topic_pairs_on_toy4() {
        let net = toy4();
        let ec = random_draws::<f64>(&net).unwrap();
        let report = structural_report(&net, &ec);
        let t1t1 = report
            .pair_counts
            .iter()
            .find(|p| p.attribute == Attribute::Topic && p.from == "T1" && p.to == "T1")
            .unwrap();
        assert_eq!(t1t1.observed, 2.0);
        assert!((t1t1.expected - 4.0 / 3.0).abs() < 1e-12);
    }
}
