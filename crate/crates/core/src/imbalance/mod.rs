//! Observed versus expected citations per gender category, with
//! bootstrap confidence intervals and stratified breakdowns.
//!
//! Citations whose observed target has an unknown gender category are left
//! out of both the observed and the expected counts.

mod predicate;
mod stats;

use std::collections::BTreeSet;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{CitationNetwork, GenderCategory};
use crate::refmodels::{ExpectedCitations, ModelKind};
use crate::scalar::Scalar;
use crate::Result;

pub use predicate::PaperFilter;
pub use stats::{average_ranks, percentile_sorted, spearman};

/// Observed citation counts into each known gender category.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GenderCounts {
    /// Indexed like [`GenderCategory::KNOWN`].
    pub counts: [usize; 4],
    /// Selected citations whose target has an unknown category.
    pub unknown_targets: usize,
}

impl GenderCounts {
    pub fn get(&self, g: GenderCategory) -> usize {
        g.index().map_or(self.unknown_targets, |i| self.counts[i])
    }
}

/// `n_{g,obs}`: citations from `from` papers to `to` papers in category `g`.
pub fn observed_by_gender(net: &CitationNetwork, from: &PaperFilter, to: &PaperFilter) -> GenderCounts {
    let mut out = GenderCounts::default();
    for (i, j) in net.edges() {
        if !from.matches(net.paper(i)) || !to.matches(net.paper(j)) {
            continue;
        }
        match net.paper(j).gender.index() {
            Some(g) => out.counts[g] += 1,
            None => out.unknown_targets += 1,
        }
    }
    out
}

/// Number of members of each group in each gender category.
fn member_gender_counts<T: Scalar>(net: &CitationNetwork, ec: &ExpectedCitations<T>) -> Vec<[u64; 4]> {
    ec.groups()
        .iter()
        .map(|g| {
            let mut counts = [0u64; 4];
            for &j in &g.members {
                if let Some(idx) = net.paper(j as usize).gender.index() {
                    counts[idx] += 1;
                }
            }
            counts
        })
        .collect()
}

/// Citations of a group that fall in scope: target in `to` with a known
/// category.
fn scoped_multiplicity(net: &CitationNetwork, targets: &[u32], to: &PaperFilter) -> u64 {
    targets
        .iter()
        .map(|&t| net.paper(t as usize))
        .filter(|p| p.gender.index().is_some() && to.matches(p))
        .count() as u64
}

/// `n̄_{g,r}`: expected citations from `from` into category `g`, counting
/// only observed citations that land in `to`.
///
/// Each in-scope citation contributes the fraction of its group's members
/// that are in `g`.
pub fn expected_by_gender<T: Scalar>(
    net: &CitationNetwork,
    ec: &ExpectedCitations<T>,
    from: &PaperFilter,
    to: &PaperFilter,
) -> Result<[T; 4]> {
    ec.check_network(net)?;
    let gender_counts = member_gender_counts(net, ec);
    let mut out: [T; 4] = std::array::from_fn(|_| T::zero());
    for (g, counts) in ec.groups().iter().zip(&gender_counts) {
        if !from.matches(net.paper(g.citing as usize)) {
            continue;
        }
        let k = scoped_multiplicity(net, &g.targets, to);
        if k == 0 {
            continue;
        }
        let size = g.members.len() as u64;
        for (slot, &c) in out.iter_mut().zip(counts) {
            if c > 0 {
                *slot += T::ratio(k * c, size);
            }
        }
    }
    Ok(out)
}

/// `(n_obs - n_expected) / n_expected`, undefined when nothing is expected.
pub fn over_under(n_obs: usize, n_expected: f64) -> Option<f64> {
    (n_expected > 0.0).then(|| (n_obs as f64 - n_expected) / n_expected)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BootstrapConfig {
    pub resamples: usize,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            resamples: 500,
            seed: 0,
        }
    }
}

/// Per-citer observed and expected counts, the unit the bootstrap resamples.
struct CiterContributions {
    observed: Vec<[f64; 4]>,
    expected: Vec<[f64; 4]>,
}

impl CiterContributions {
    fn new<T: Scalar>(net: &CitationNetwork, ec: &ExpectedCitations<T>, from: &PaperFilter, to: &PaperFilter) -> Self {
        let n = net.len();
        let mut observed = vec![[0.0; 4]; n];
        let mut expected = vec![[0.0; 4]; n];
        let gender_counts = member_gender_counts(net, ec);
        for (g, counts) in ec.groups().iter().zip(&gender_counts) {
            let i = g.citing as usize;
            if !from.matches(net.paper(i)) {
                continue;
            }
            let k = scoped_multiplicity(net, &g.targets, to) as f64;
            let size = g.members.len() as f64;
            for (slot, &c) in expected[i].iter_mut().zip(counts) {
                *slot += k * c as f64 / size;
            }
        }
        for (i, j) in net.edges() {
            if from.matches(net.paper(i)) && to.matches(net.paper(j)) {
                if let Some(idx) = net.paper(j).gender.index() {
                    observed[i][idx] += 1.0;
                }
            }
        }
        Self { observed, expected }
    }

    fn over_under(&self, multiplicity: &[u32]) -> [Option<f64>; 4] {
        let mut obs = [0.0; 4];
        let mut exp = [0.0; 4];
        for (i, &m) in multiplicity.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let m = m as f64;
            for g in 0..4 {
                obs[g] += m * self.observed[i][g];
                exp[g] += m * self.expected[i][g];
            }
        }
        std::array::from_fn(|g| (exp[g] > 0.0).then(|| (obs[g] - exp[g]) / exp[g]))
    }
}

/// Percentile bootstrap 95% intervals of the over/under-citation per
/// gender category.
///
/// Each resample draws `N` papers with replacement; a paper drawn `m`
/// times contributes its citations and their group fractions `m` times.
/// Group memberships come from the full-network model. Resample `r` uses
/// its own ChaCha stream derived from `(seed, r)`, so results do not depend
/// on thread scheduling. Resamples where a category has no expected
/// citations are skipped for that category.
pub fn bootstrap_ci<T: Scalar>(
    net: &CitationNetwork,
    ec: &ExpectedCitations<T>,
    from: &PaperFilter,
    to: &PaperFilter,
    config: &BootstrapConfig,
) -> Result<[Option<(f64, f64)>; 4]> {
    ec.check_network(net)?;
    if config.resamples < 2 {
        return Err(crate::Error::InvalidArgument("bootstrap needs at least 2 resamples".into()));
    }
    let contributions = CiterContributions::new(net, ec, from, to);
    let n = net.len();
    let samples: Vec<[Option<f64>; 4]> = (0..config.resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(r as u64);
            let mut multiplicity = vec![0u32; n];
            for _ in 0..n {
                multiplicity[rng.random_range(0..n)] += 1;
            }
            contributions.over_under(&multiplicity)
        })
        .collect();
    Ok(std::array::from_fn(|g| {
        let mut values: Vec<f64> = samples.iter().filter_map(|s| s[g]).collect();
        if values.len() < 2 {
            return None;
        }
        values.sort_by(f64::total_cmp);
        Some((percentile_sorted(&values, 0.025), percentile_sorted(&values, 0.975)))
    }))
}

/// One row of an imbalance report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImbalanceReport {
    pub model: ModelKind,
    pub from: String,
    pub to: String,
    pub gender: GenderCategory,
    pub n_obs: usize,
    pub n_expected: f64,
    /// `None` when `n_expected` is zero.
    pub over_under: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
}

impl ImbalanceReport {
    /// `ok`, `undefined` (nothing expected) or `no_ci`.
    pub fn status(&self) -> &'static str {
        match (self.over_under, self.ci_low) {
            (None, _) => "undefined",
            (Some(_), None) => "no_ci",
            _ => "ok",
        }
    }

    pub fn ci_contains(&self, value: f64) -> bool {
        matches!((self.ci_low, self.ci_high), (Some(lo), Some(hi)) if lo <= value && value <= hi)
    }
}

/// Point estimates (and optionally bootstrap intervals) for every known
/// gender category.
pub fn imbalance_reports<T: Scalar>(
    net: &CitationNetwork,
    ec: &ExpectedCitations<T>,
    from: &PaperFilter,
    to: &PaperFilter,
    bootstrap: Option<&BootstrapConfig>,
) -> Result<Vec<ImbalanceReport>> {
    let observed = observed_by_gender(net, from, to);
    let expected = expected_by_gender(net, ec, from, to)?;
    let cis = match bootstrap {
        Some(cfg) => bootstrap_ci(net, ec, from, to, cfg)?,
        None => [None; 4],
    };
    Ok(GenderCategory::KNOWN
        .iter()
        .enumerate()
        .map(|(g, &gender)| {
            let n_expected = expected[g].to_f64();
            let over_under = over_under(observed.counts[g], n_expected);
            let ci = over_under.and(cis[g]);
            ImbalanceReport {
                model: ec.model(),
                from: from.to_string(),
                to: to.to_string(),
                gender,
                n_obs: observed.counts[g],
                n_expected,
                over_under,
                ci_low: ci.map(|c| c.0),
                ci_high: ci.map(|c| c.1),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stratifier {
    ConferenceRank,
    Subfield,
}

/// Reports with `to` restricted to each stratum in turn and `from` = all.
/// Strata appear in rank order or sorted subfield id.
pub fn stratified_imbalance<T: Scalar>(
    net: &CitationNetwork,
    ec: &ExpectedCitations<T>,
    stratifier: Stratifier,
    bootstrap: Option<&BootstrapConfig>,
) -> Result<Vec<ImbalanceReport>> {
    let clauses: Vec<String> = match stratifier {
        Stratifier::ConferenceRank => {
            let present: BTreeSet<_> = net.papers().iter().map(|p| p.rank).collect();
            present.into_iter().map(|r| format!("rank={r}")).collect()
        }
        Stratifier::Subfield => {
            let present: BTreeSet<_> = net.papers().iter().map(|p| p.subfield.as_str()).collect();
            present.into_iter().map(|s| format!("subfield={s}")).collect()
        }
    };
    let from = PaperFilter::all();
    let mut out = Vec::new();
    for clause in clauses {
        let to: PaperFilter = clause.parse()?;
        out.extend(imbalance_reports(net, ec, &from, &to, bootstrap)?);
    }
    Ok(out)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV export; undefined values are empty fields, see the `status` column.
pub fn write_reports_csv<W: Write>(output: W, reports: &[ImbalanceReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(output);
    w.write_record([
        "model", "from", "to", "gender", "n_obs", "n_expected", "over_under", "ci_low", "ci_high", "status",
    ])?;
    for r in reports {
        w.write_record([
            r.model.as_str().to_string(),
            r.from.clone(),
            r.to.clone(),
            r.gender.to_string(),
            r.n_obs.to_string(),
            r.n_expected.to_string(),
            opt(r.over_under),
            opt(r.ci_low),
            opt(r.ci_high),
            r.status().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
