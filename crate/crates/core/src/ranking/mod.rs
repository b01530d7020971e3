//! Citation-count and PageRank impact scores, normalized by publication
//! year and subfield, and the share of W|W papers among top-ranked papers.

mod pagerank;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::corpus::CitationNetwork;
use crate::refmodels::{ExpectedCitations, ModelKind};
use crate::scalar::Scalar;
use crate::{Error, Result};

pub use pagerank::{transition_row_sums, PageRankConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Citations,
    PageRank,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Citations => "citations",
            Self::PageRank => "pagerank",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "citations" => Ok(Self::Citations),
            "pagerank" => Ok(Self::PageRank),
            other => Err(Error::InvalidArgument(format!("unknown metric `{other}`"))),
        }
    }
}

/// Where scores come from: the observed network or a reference model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Source {
    #[serde(rename = "observed")]
    Observed,
    #[serde(untagged)]
    Model(ModelKind),
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Observed => f.write_str("observed"),
            Self::Model(kind) => write!(f, "{kind}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingResult {
    pub metric: Metric,
    pub source: Source,
    pub raw: Vec<f64>,
    pub normalized: Vec<f64>,
    /// PageRank only.
    pub alpha: Option<f64>,
    pub iterations_used: usize,
    pub converged: bool,
}

/// Divide each score by the mean score of papers with the same publication
/// year and subfield. Strata with mean zero normalize to zero.
pub fn normalized_scores(raw: &[f64], net: &CitationNetwork) -> Vec<f64> {
    assert_eq!(raw.len(), net.len(), "one score per paper");
    let mut strata: HashMap<(i32, &str), (f64, usize)> = HashMap::new();
    for (p, &s) in net.papers().iter().zip(raw) {
        let e = strata.entry((p.year(), p.subfield.as_str())).or_default();
        e.0 += s;
        e.1 += 1;
    }
    let mut warned = false;
    net.papers()
        .iter()
        .zip(raw)
        .map(|(p, &s)| {
            let (sum, count) = strata[&(p.year(), p.subfield.as_str())];
            let mean = sum / count as f64;
            if mean > 0.0 {
                s / mean
            } else {
                if !warned {
                    log::warn!("stratum ({}, {}) has mean score 0; normalizing to 0", p.year(), p.subfield);
                    warned = true;
                }
                0.0
            }
        })
        .collect()
}

/// Observed in-citations `c_j` as scores.
pub fn citations_observed(net: &CitationNetwork) -> RankingResult {
    let raw: Vec<f64> = net.in_degrees().into_iter().map(|c| c as f64).collect();
    RankingResult {
        metric: Metric::Citations,
        source: Source::Observed,
        normalized: normalized_scores(&raw, net),
        raw,
        alpha: None,
        iterations_used: 0,
        converged: true,
    }
}

/// Expected in-citations `c̄_j` as scores.
pub fn citations_reference<T: Scalar>(ec: &ExpectedCitations<T>, net: &CitationNetwork) -> Result<RankingResult> {
    ec.check_network(net)?;
    let raw: Vec<f64> = ec.c_bar().iter().map(Scalar::to_f64).collect();
    Ok(RankingResult {
        metric: Metric::Citations,
        source: Source::Model(ec.model()),
        normalized: normalized_scores(&raw, net),
        raw,
        alpha: None,
        iterations_used: 0,
        converged: true,
    })
}

/// PageRank on the observed network, teleporting in proportion to `c_j`.
pub fn pagerank_observed(net: &CitationNetwork, cfg: &PageRankConfig) -> Result<RankingResult> {
    let run = pagerank::observed(net, cfg)?;
    Ok(RankingResult {
        metric: Metric::PageRank,
        source: Source::Observed,
        normalized: normalized_scores(&run.scores, net),
        raw: run.scores,
        alpha: Some(cfg.alpha),
        iterations_used: run.iterations,
        converged: run.converged,
    })
}

/// PageRank under a reference model: citer `i` moves to `j` with
/// probability `w̄_ij / k_i`, teleport in proportion to `c̄_j`. The
/// transition matrix is applied group by group and never materialized.
pub fn pagerank_reference<T: Scalar>(
    ec: &ExpectedCitations<T>,
    net: &CitationNetwork,
    cfg: &PageRankConfig,
) -> Result<RankingResult> {
    let run = pagerank::reference(ec, net, cfg)?;
    Ok(RankingResult {
        metric: Metric::PageRank,
        source: Source::Model(ec.model()),
        normalized: normalized_scores(&run.scores, net),
        raw: run.scores,
        alpha: Some(cfg.alpha),
        iterations_used: run.iterations,
        converged: run.converged,
    })
}

/// Paper indices by descending score, ties by ascending paper id.
pub fn ranking_order(scores: &[f64], net: &CitationNetwork) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(Ordering::Equal)
            .then_with(|| net.paper(a).id.cmp(&net.paper(b).id))
    });
    order
}

/// Number of papers in the top `d` percent: `ceil(d N / 100)`, at least 1.
pub fn top_count(n: usize, d: f64) -> usize {
    let raw = (d * n as f64 / 100.0 - 1e-9).ceil();
    (raw.max(1.0) as usize).min(n)
}

/// Fraction of MW, WM and WW papers among the top `d` percent by score.
pub fn top_share(scores: &[f64], net: &CitationNetwork, d: f64) -> f64 {
    if net.is_empty() {
        return 0.0;
    }
    let top = top_count(net.len(), d);
    let order = ranking_order(scores, net);
    let women = order[..top].iter().filter(|&&i| net.paper(i).gender.has_woman()).count();
    women as f64 / top as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShareRow {
    pub d: f64,
    pub source: Source,
    pub metric: Metric,
    pub ww_share: f64,
}

/// Top-d% W|W share of each ranking (normalized scores) over `d_grid`.
pub fn share_curve(net: &CitationNetwork, rankings: &[RankingResult], d_grid: &[f64]) -> Result<Vec<ShareRow>> {
    if let Some(bad) = d_grid.iter().find(|d| !(**d > 0.0 && **d <= 100.0)) {
        return Err(Error::InvalidArgument(format!("d = {bad} outside (0, 100]")));
    }
    let mut rows = Vec::new();
    for &d in d_grid {
        for r in rankings {
            rows.push(ShareRow {
                d,
                source: r.source,
                metric: r.metric,
                ww_share: top_share(&r.normalized, net, d),
            });
        }
    }
    Ok(rows)
}

/// CSV `paper_id,raw,normalized,rank`, rank 1 being the highest score.
pub fn write_ranking_csv<W: Write>(output: W, result: &RankingResult, net: &CitationNetwork) -> Result<()> {
    let mut rank = vec![0usize; net.len()];
    for (pos, i) in ranking_order(&result.normalized, net).into_iter().enumerate() {
        rank[i] = pos + 1;
    }
    let mut w = csv::Writer::from_writer(output);
    w.write_record(["paper_id", "raw", "normalized", "rank"])?;
    for i in 0..net.len() {
        w.write_record([
            net.paper(i).id.clone(),
            result.raw[i].to_string(),
            result.normalized[i].to_string(),
            rank[i].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// CSV `d,source,metric,ww_share`.
pub fn write_share_csv<W: Write>(output: W, rows: &[ShareRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(output);
    w.write_record(["d", "source", "metric", "ww_share"])?;
    for r in rows {
        w.write_record([r.d.to_string(), r.source.to_string(), r.metric.to_string(), r.ww_share.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
