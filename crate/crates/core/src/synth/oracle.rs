//! Monte Carlo oracle for the reference models.
//!
//! Simulates the random draw process of each model literally and tallies
//! how often each paper is drawn. Eligible sets are recomputed here by a
//! direct scan over all papers, independently of the indexed computation
//! in `refmodels`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::corpus::{category_key, CitationNetwork, Paper};
use crate::refmodels::{ModelKind, ModelSpec};
use crate::{Error, Result};

/// Largest network the oracle accepts.
pub const ORACLE_MAX_PAPERS: usize = 200;

/// Empirical mean and standard error of draw counts.
#[derive(Debug, Clone)]
pub struct OracleEstimate {
    pub model: ModelKind,
    pub samples: usize,
    papers: usize,
    /// Row-major `papers x papers`: mean number of `i -> j` draws per run.
    pub w_mean: Vec<f64>,
    pub w_se: Vec<f64>,
    /// Mean number of draws received by each paper per run.
    pub c_mean: Vec<f64>,
    pub c_se: Vec<f64>,
}

impl OracleEstimate {
    pub fn w(&self, i: usize, j: usize) -> (f64, f64) {
        let idx = i * self.papers + j;
        (self.w_mean[idx], self.w_se[idx])
    }
}

fn eligible(citer: &Paper, candidate: &Paper) -> bool {
    let authors = [citer.first_author.as_str(), citer.last_author.as_str()];
    let shares_both = authors.contains(&candidate.first_author.as_str())
        && authors.contains(&candidate.last_author.as_str());
    candidate.id != citer.id
        && candidate.pub_date <= citer.pub_date
        && candidate.pub_date >= citer.window_start()
        && !shares_both
}

/// One observed citation and the papers it may be redrawn to.
struct Draw {
    citer: usize,
    target: usize,
    pool: Vec<usize>,
}

fn draw_pools(net: &CitationNetwork, spec: &ModelSpec) -> Result<Vec<Draw>> {
    let papers = net.papers();
    let mut draws = Vec::new();
    for (i, citer) in papers.iter().enumerate() {
        let open: Vec<usize> = (0..papers.len()).filter(|&j| eligible(citer, &papers[j])).collect();
        for &t in net.cited_by(i) {
            let t = t as usize;
            let pool = match spec.kind {
                ModelKind::RandomDraws => {
                    if open.is_empty() {
                        return Err(Error::EmptyEligibleSet {
                            paper: citer.id.clone(),
                            citations: net.out_degree(i),
                        });
                    }
                    open.clone()
                }
                _ => {
                    let key = category_key(&papers[t], spec.attrs);
                    let mut pool: Vec<usize> = open
                        .iter()
                        .copied()
                        .filter(|&j| j == t || category_key(&papers[j], spec.attrs) == key)
                        .collect();
                    if !pool.contains(&t) {
                        pool.push(t);
                    }
                    pool
                }
            };
            draws.push(Draw { citer: i, target: t, pool });
        }
    }
    if spec.kind == ModelKind::PreferentialDraws {
        draws.sort_by(|a, b| {
            let (pa, pb) = (&papers[a.citer], &papers[b.citer]);
            pa.pub_date.cmp(&pb.pub_date).then_with(|| pa.id.cmp(&pb.id))
        });
    }
    Ok(draws)
}

/// Outcome of one run of the draw process: the drawn `(citer, paper)` pairs.
fn run_once(draws: &[Draw], kind: ModelKind, n: usize, rng: &mut ChaCha8Rng, out: &mut Vec<(usize, usize)>) {
    out.clear();
    if kind != ModelKind::PreferentialDraws {
        for d in draws {
            out.push((d.citer, d.pool[rng.random_range(0..d.pool.len())]));
        }
        return;
    }
    // Realized counts decide ties; a paper's own draws take effect only
    // after all of its citations are drawn.
    let mut counts = vec![0u32; n];
    let mut tied: Vec<usize> = Vec::new();
    let mut start = 0;
    while start < draws.len() {
        let citer = draws[start].citer;
        let mut end = start;
        while end < draws.len() && draws[end].citer == citer {
            let d = &draws[end];
            let anchor = counts[d.target];
            tied.clear();
            tied.extend(d.pool.iter().copied().filter(|&j| counts[j] == anchor));
            out.push((citer, tied[rng.random_range(0..tied.len())]));
            end += 1;
        }
        for &(_, j) in &out[start..end] {
            counts[j] += 1;
        }
        start = end;
    }
}

#[derive(Clone)]
struct Moments {
    w_sum: Vec<f64>,
    w_sq: Vec<f64>,
    c_sum: Vec<f64>,
    c_sq: Vec<f64>,
}

impl Moments {
    fn new(n: usize) -> Self {
        Self {
            w_sum: vec![0.0; n * n],
            w_sq: vec![0.0; n * n],
            c_sum: vec![0.0; n],
            c_sq: vec![0.0; n],
        }
    }

    fn add(&mut self, n: usize, pairs: &mut [(usize, usize)], column: &mut [u32]) {
        pairs.sort_unstable();
        let mut idx = 0;
        while idx < pairs.len() {
            let mut run = idx;
            while run < pairs.len() && pairs[run] == pairs[idx] {
                run += 1;
            }
            let (i, j) = pairs[idx];
            let x = (run - idx) as f64;
            self.w_sum[i * n + j] += x;
            self.w_sq[i * n + j] += x * x;
            column[j] += (run - idx) as u32;
            idx = run;
        }
        for (j, c) in column.iter_mut().enumerate() {
            if *c > 0 {
                let x = *c as f64;
                self.c_sum[j] += x;
                self.c_sq[j] += x * x;
                *c = 0;
            }
        }
    }

    fn merge(mut self, other: &Moments) -> Self {
        for (a, b) in [
            (&mut self.w_sum, &other.w_sum),
            (&mut self.w_sq, &other.w_sq),
            (&mut self.c_sum, &other.c_sum),
            (&mut self.c_sq, &other.c_sq),
        ] {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        self
    }
}

fn mean_and_se(sum: &[f64], sq: &[f64], samples: usize) -> (Vec<f64>, Vec<f64>) {
    let s = samples as f64;
    sum.iter()
        .zip(sq)
        .map(|(&a, &b)| {
            let mean = a / s;
            let var = if samples > 1 { ((b - a * a / s) / (s - 1.0)).max(0.0) } else { 0.0 };
            (mean, (var / s).sqrt())
        })
        .unzip()
}

/// Run the draw process of `spec` `samples` times.
///
/// RD and HD redraw every citation independently and uniformly from its
/// pool. PD visits citers in (date, id) order and restricts each pool to
/// papers whose realized count so far equals that of the observed target.
/// Sample `s` uses ChaCha stream `s` of `seed`.
pub fn monte_carlo_oracle(net: &CitationNetwork, spec: &ModelSpec, samples: usize, seed: u64) -> Result<OracleEstimate> {
    let n = net.len();
    if n > ORACLE_MAX_PAPERS {
        return Err(Error::OracleTooLarge {
            papers: n,
            limit: ORACLE_MAX_PAPERS,
        });
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("oracle needs at least one sample".into()));
    }
    let draws = draw_pools(net, spec)?;
    const CHUNK: usize = 1024;
    let chunks: Vec<Moments> = (0..samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut m = Moments::new(n);
            let mut pairs = Vec::with_capacity(draws.len());
            let mut column = vec![0u32; n];
            for s in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(s as u64);
                run_once(&draws, spec.kind, n, &mut rng, &mut pairs);
                m.add(n, &mut pairs, &mut column);
            }
            m
        })
        .collect();
    let total = chunks.iter().fold(Moments::new(n), |acc, m| acc.merge(m));
    let (w_mean, w_se) = mean_and_se(&total.w_sum, &total.w_sq, samples);
    let (c_mean, c_se) = mean_and_se(&total.c_sum, &total.c_sq, samples);
    Ok(OracleEstimate {
        model: spec.kind,
        samples,
        papers: n,
        w_mean,
        w_se,
        c_mean,
        c_se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures::{paper, toy4};
    use crate::corpus::{filter_citations, AttributeSet, GenderCategory::*};

    #[test]
    fn toy4_random_draws_frequency() {
        let net = toy4();
        let est = monte_carlo_oracle(&net, &ModelSpec::random(), 100_000, 1).unwrap();
        let (mean, se) = est.w(3, 2);
        assert!((mean - 2.0 / 3.0).abs() <= 3.0 * se, "{mean} +- {se}");
        assert_eq!(est.w(0, 1), (0.0, 0.0));
    }

    #[test]
    fn toy4_homophilic_in_degree() {
        let net = toy4();
        let est = monte_carlo_oracle(&net, &ModelSpec::homophilic(AttributeSet::ALL), 100_000, 2).unwrap();
        assert!((est.c_mean[0] - 1.5).abs() <= 3.0 * est.c_se[0]);
    }

    #[test]
    fn forced_draw_is_exact() {
        let papers = vec![
            paper("a", "2010", MM, ("A", "US", "T1")),
            paper("b", "2011", WW, ("A", "US", "T2")),
        ];
        let net = filter_citations(papers, &[("b".into(), "a".into())]).unwrap();
        let est = monte_carlo_oracle(&net, &ModelSpec::random(), 1000, 0).unwrap();
        assert_eq!(est.w(1, 0), (1.0, 0.0));
    }

    #[test]
    fn deterministic_under_seed() {
        let net = toy4();
        let spec = ModelSpec::preferential(AttributeSet::ALL);
        let a = monte_carlo_oracle(&net, &spec, 3000, 5).unwrap();
        let b = monte_carlo_oracle(&net, &spec, 3000, 5).unwrap();
        assert_eq!(a.c_mean, b.c_mean);
        assert_eq!(a.w_mean, b.w_mean);
    }

    #[test]
    fn refuses_large_networks() {
        let cfg = crate::synth::SynthConfig {
            n_papers: 400,
            ..Default::default()
        };
        let net = crate::synth::generate_network(&cfg).unwrap();
        assert!(matches!(
            monte_carlo_oracle(&net, &ModelSpec::random(), 10, 0),
            Err(Error::OracleTooLarge { .. })
        ));
    }
}
