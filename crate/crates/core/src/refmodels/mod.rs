//! Reference models: expected citation probabilities under the
//! random-draws (RD), homophilic-draws (HD) and preferential-draws (PD)
//! null models.
//!
//! Every model redistributes each observed citation uniformly over a set of
//! papers. The result is stored as a list of [`ContributionGroup`]s rather
//! than a dense `N x N` matrix: each group says "citer `i` sends
//! `weight` expected citations to every paper in `members`".

mod draws;
mod eligible;
mod structural;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{AttributeSet, CitationNetwork};
use crate::scalar::Scalar;
use crate::{Error, Result};

pub use draws::{homophilic_draws, preferential_draws, random_draws};
pub use eligible::{eligible_set_hd, eligible_set_rd};
pub(crate) use eligible::{chronological_order, EligibilityIndex};
pub use structural::{ks_distance, structural_report, survival_function, PairCount, StructuralReport, SurvivalCurve};

/// Default tolerance for treating two running expected counts as equal.
pub const DEFAULT_TIE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "RD")]
    RandomDraws,
    #[serde(rename = "HD")]
    HomophilicDraws,
    #[serde(rename = "PD")]
    PreferentialDraws,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [Self::RandomDraws, Self::HomophilicDraws, Self::PreferentialDraws];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::RandomDraws => "RD",
            Self::HomophilicDraws => "HD",
            Self::PreferentialDraws => "PD",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rd" => Ok(Self::RandomDraws),
            "hd" => Ok(Self::HomophilicDraws),
            "pd" => Ok(Self::PreferentialDraws),
            other => Err(Error::InvalidArgument(format!("unknown model `{other}`"))),
        }
    }
}

/// Which model to run and with which parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Grouping attributes; ignored by RD.
    pub attrs: AttributeSet,
    /// Tie tolerance for PD running totals (floating point only).
    pub tie_eps: f64,
}

impl ModelSpec {
    pub fn random() -> Self {
        Self {
            kind: ModelKind::RandomDraws,
            attrs: AttributeSet::EMPTY,
            tie_eps: DEFAULT_TIE_EPS,
        }
    }

    pub fn homophilic(attrs: AttributeSet) -> Self {
        Self {
            kind: ModelKind::HomophilicDraws,
            attrs,
            tie_eps: DEFAULT_TIE_EPS,
        }
    }

    pub fn preferential(attrs: AttributeSet) -> Self {
        Self {
            kind: ModelKind::PreferentialDraws,
            attrs,
            tie_eps: DEFAULT_TIE_EPS,
        }
    }

    pub fn build<T: Scalar>(&self, net: &CitationNetwork) -> Result<ExpectedCitations<T>> {
        match self.kind {
            ModelKind::RandomDraws => random_draws(net),
            ModelKind::HomophilicDraws => Ok(homophilic_draws(net, self.attrs)),
            ModelKind::PreferentialDraws => Ok(preferential_draws(net, self.attrs, self.tie_eps)),
        }
    }
}

/// A uniform redistribution of one or more observed citations of `citing`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContributionGroup<T> {
    pub citing: u32,
    /// Ascending paper indices.
    pub members: Vec<u32>,
    /// Observed cited papers whose citations this group redistributes.
    pub targets: Vec<u32>,
    /// `targets.len() / members.len()`.
    pub weight: T,
}

impl<T: Scalar> ContributionGroup<T> {
    pub(crate) fn new(citing: u32, members: Vec<u32>, targets: Vec<u32>) -> Self {
        let weight = T::ratio(targets.len() as u64, members.len() as u64);
        Self {
            citing,
            members,
            targets,
            weight,
        }
    }

    pub fn multiplicity(&self) -> usize {
        self.targets.len()
    }

    pub fn contains(&self, j: u32) -> bool {
        self.members.binary_search(&j).is_ok()
    }
}

/// Output of a reference model: `w̄_ij` as groups and `c̄_j` per paper.
#[derive(Debug, Clone)]
pub struct ExpectedCitations<T> {
    model: ModelKind,
    attrs: AttributeSet,
    papers: usize,
    citations: usize,
    /// Sorted by citer; `starts[i]..starts[i + 1]` are the groups of `i`.
    groups: Vec<ContributionGroup<T>>,
    starts: Vec<usize>,
    c_bar: Vec<T>,
}

impl<T: Scalar> ExpectedCitations<T> {
    pub(crate) fn from_groups(
        model: ModelKind,
        attrs: AttributeSet,
        net: &CitationNetwork,
        groups: Vec<ContributionGroup<T>>,
        c_bar: Vec<T>,
    ) -> Self {
        debug_assert!(groups.windows(2).all(|w| w[0].citing <= w[1].citing));
        let mut starts = vec![0; net.len() + 1];
        for g in &groups {
            starts[g.citing as usize + 1] += 1;
        }
        for i in 0..net.len() {
            starts[i + 1] += starts[i];
        }
        Self {
            model,
            attrs,
            papers: net.len(),
            citations: net.citation_count(),
            groups,
            starts,
            c_bar,
        }
    }

    /// Degenerate model that puts every observed citation in its own
    /// singleton group, reproducing the observed network exactly.
    pub fn from_observed(net: &CitationNetwork) -> Self {
        let groups: Vec<_> = net
            .edges()
            .map(|(i, j)| ContributionGroup::new(i as u32, vec![j as u32], vec![j as u32]))
            .collect();
        let c_bar = net.in_degrees().into_iter().map(|c| T::from_count(c as u64)).collect();
        Self::from_groups(ModelKind::RandomDraws, AttributeSet::EMPTY, net, groups, c_bar)
    }

    pub fn model(&self) -> ModelKind {
        self.model
    }

    pub fn attrs(&self) -> AttributeSet {
        self.attrs
    }

    pub fn groups(&self) -> &[ContributionGroup<T>] {
        &self.groups
    }

    /// Groups whose citer is `i`.
    pub fn groups_of(&self, i: usize) -> &[ContributionGroup<T>] {
        &self.groups[self.starts[i]..self.starts[i + 1]]
    }

    /// `c̄_j` for every paper.
    pub fn c_bar(&self) -> &[T] {
        &self.c_bar
    }

    pub fn paper_count(&self) -> usize {
        self.papers
    }

    pub fn citation_count(&self) -> usize {
        self.citations
    }

    /// `w̄_ij`.
    pub fn citation_probability(&self, i: usize, j: usize) -> T {
        let mut total = T::zero();
        for g in self.groups_of(i) {
            if g.contains(j as u32) {
                total += g.weight.clone();
            }
        }
        total
    }

    /// `Σ_j w̄_ij` for every citer.
    pub fn row_sums(&self) -> Vec<T> {
        (0..self.papers)
            .map(|i| {
                let mut s = T::zero();
                for g in self.groups_of(i) {
                    s += g.weight.clone() * T::from_count(g.members.len() as u64);
                }
                s
            })
            .collect()
    }

    /// Check that this model was computed on `net`.
    pub fn check_network(&self, net: &CitationNetwork) -> Result<()> {
        if self.papers != net.len() || self.citations != net.citation_count() {
            return Err(Error::ModelMismatch(format!(
                "model covers {} papers / {} citations, network has {} / {}",
                self.papers,
                self.citations,
                net.len(),
                net.citation_count()
            )));
        }
        for i in 0..net.len() {
            let mut targets: Vec<u32> = self.groups_of(i).iter().flat_map(|g| g.targets.iter().copied()).collect();
            targets.sort_unstable();
            if targets != net.cited_by(i) {
                return Err(Error::ModelMismatch(format!(
                    "citations of {} differ from the network",
                    net.paper(i).id
                )));
            }
        }
        Ok(())
    }

    /// Lossy conversion to `f64`, e.g. to run PageRank on an exact model.
    pub fn to_f64(&self) -> ExpectedCitations<f64> {
        ExpectedCitations {
            model: self.model,
            attrs: self.attrs,
            papers: self.papers,
            citations: self.citations,
            groups: self
                .groups
                .iter()
                .map(|g| ContributionGroup {
                    citing: g.citing,
                    members: g.members.clone(),
                    targets: g.targets.clone(),
                    weight: g.weight.to_f64(),
                })
                .collect(),
            starts: self.starts.clone(),
            c_bar: self.c_bar.iter().map(Scalar::to_f64).collect(),
        }
    }
}
