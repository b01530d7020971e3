//! PageRank with teleportation proportional to (expected) in-citations.
//!
//! ```text
//! p_i(t+1) = (1 - α) v_i + α Σ_j T_ji p_j(t)
//! ```
//!
//! `v_i = c_i / M` for the observed network and `c̄_i / M` for a reference
//! model. Rows of papers that make no citations are replaced by `v`.

use serde::{Deserialize, Serialize};

use crate::corpus::CitationNetwork;
use crate::refmodels::ExpectedCitations;
use crate::scalar::Scalar;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PageRankConfig {
    pub alpha: f64,
    /// Stop once the mean absolute update falls below this.
    pub eps: f64,
    pub t_max: usize,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        Self {
            alpha: 0.85,
            eps: 1e-6,
            t_max: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct PowerIteration {
    pub scores: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
}

/// Iterate from `p(0) = teleport`. `scatter(p, out)` must add
/// `Σ_j T_ji p_j` over non-dangling `j` into `out`.
fn iterate(
    teleport: &[f64],
    dangling: &[bool],
    cfg: &PageRankConfig,
    scatter: impl Fn(&[f64], &mut [f64]),
) -> PowerIteration {
    let n = teleport.len();
    let mut p = teleport.to_vec();
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for t in 1..=cfg.t_max {
        next.iter_mut().for_each(|x| *x = 0.0);
        scatter(&p, &mut next);
        let dangling_mass: f64 = p.iter().zip(dangling).filter(|(_, d)| **d).map(|(x, _)| x).sum();
        for i in 0..n {
            next[i] = (1.0 - cfg.alpha) * teleport[i] + cfg.alpha * (next[i] + dangling_mass * teleport[i]);
        }
        residual = p.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum::<f64>() / n as f64;
        std::mem::swap(&mut p, &mut next);
        if residual < cfg.eps {
            return PowerIteration {
                scores: p,
                iterations: t,
                converged: true,
                residual,
            };
        }
    }
    PowerIteration {
        scores: p,
        iterations: cfg.t_max,
        converged: false,
        residual,
    }
}

pub(crate) fn observed(net: &CitationNetwork, cfg: &PageRankConfig) -> Result<PowerIteration> {
    let m = net.citation_count();
    if m == 0 {
        return Err(Error::NoCitations);
    }
    let teleport: Vec<f64> = net.in_degrees().into_iter().map(|c| c as f64 / m as f64).collect();
    let dangling: Vec<bool> = (0..net.len()).map(|i| net.out_degree(i) == 0).collect();
    Ok(iterate(&teleport, &dangling, cfg, |p, out| {
        for (i, &pi) in p.iter().enumerate() {
            let targets = net.cited_by(i);
            if targets.is_empty() {
                continue;
            }
            let share = pi / targets.len() as f64;
            for &j in targets {
                out[j as usize] += share;
            }
        }
    }))
}

pub(crate) fn reference<T: Scalar>(
    ec: &ExpectedCitations<T>,
    net: &CitationNetwork,
    cfg: &PageRankConfig,
) -> Result<PowerIteration> {
    ec.check_network(net)?;
    let m = net.citation_count();
    if m == 0 {
        return Err(Error::NoCitations);
    }
    let teleport: Vec<f64> = ec.c_bar().iter().map(|c| c.to_f64() / m as f64).collect();
    let dangling: Vec<bool> = (0..net.len()).map(|i| net.out_degree(i) == 0).collect();
    // weight / k_i per group, fixed across iterations.
    let per_member: Vec<f64> = ec
        .groups()
        .iter()
        .map(|g| g.weight.to_f64() / net.out_degree(g.citing as usize) as f64)
        .collect();
    Ok(iterate(&teleport, &dangling, cfg, |p, out| {
        for (g, &w) in ec.groups().iter().zip(&per_member) {
            let share = p[g.citing as usize] * w;
            for &j in &g.members {
                out[j as usize] += share;
            }
        }
    }))
}

/// `Σ_j T̄_ij` for every paper; each is 1 up to rounding when the model is
/// consistent with the network.
pub fn transition_row_sums<T: Scalar>(ec: &ExpectedCitations<T>, net: &CitationNetwork) -> Vec<f64> {
    let m = net.citation_count() as f64;
    let teleport_total: f64 = ec.c_bar().iter().map(|c| c.to_f64() / m).sum();
    (0..net.len())
        .map(|i| {
            let k = net.out_degree(i);
            if k == 0 {
                return teleport_total;
            }
            ec.groups_of(i)
                .iter()
                .map(|g| g.weight.to_f64() * g.members.len() as f64 / k as f64)
                .sum()
        })
        .collect()
}
