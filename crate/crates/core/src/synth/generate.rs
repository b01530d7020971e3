use chrono::Duration;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SynthConfig;
use crate::corpus::{filter_citations, CitationNetwork, ConferenceRank, GenderCategory, Paper};
use crate::Result;

fn make_papers(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Vec<Paper> {
    let mut offsets = index::sample(rng, cfg.window_days() as usize, cfg.n_papers).into_vec();
    offsets.sort_unstable();
    let categories = WeightedIndex::new(cfg.category_weights).expect("validated weights");
    let width = (cfg.n_papers - 1).to_string().len();
    offsets
        .into_iter()
        .enumerate()
        .map(|(l, day)| {
            let gender = GenderCategory::KNOWN[categories.sample(rng)];
            let rank = ConferenceRank::ALL[rng.random_range(0..cfg.n_ranks)];
            let country = rng.random_range(0..cfg.n_countries);
            let topic = rng.random_range(0..cfg.n_topics);
            let (first_author, last_author) = if cfg.author_pool == 0 {
                (format!("a{l}f"), format!("a{l}l"))
            } else {
                let first = rng.random_range(0..cfg.author_pool);
                let mut last = rng.random_range(0..cfg.author_pool - 1);
                if last >= first {
                    last += 1;
                }
                (format!("a{first}"), format!("a{last}"))
            };
            Paper {
                id: format!("S{l:0width$}"),
                pub_date: cfg.start_date + Duration::days(day as i64),
                gender,
                rank,
                country: format!("K{country}"),
                topic: format!("T{topic}"),
                subfield: format!("F{}", topic % cfg.n_subfields),
                first_author,
                last_author,
            }
        })
        .collect()
}

/// Generate a synthetic citation network.
///
/// Papers get strictly increasing publication dates, so the papers a new
/// paper may cite are exactly its eligible set at that point. The result
/// goes through [`filter_citations`], which only drops papers that neither
/// cite nor are cited. Identical configs give identical networks.
pub fn generate_network(cfg: &SynthConfig) -> Result<CitationNetwork> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let papers = make_papers(cfg, &mut rng);
    let attrs: Vec<[&str; 3]> = papers
        .iter()
        .map(|p| [p.rank.as_str(), p.country.as_str(), p.topic.as_str()])
        .collect();

    let mut in_degree = vec![0usize; papers.len()];
    let mut edges = Vec::new();
    let mut candidates: Vec<usize> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut first_eligible = 0;
    for l in 1..papers.len() {
        let citer = &papers[l];
        let window_start = citer.window_start();
        while papers[first_eligible].pub_date < window_start {
            first_eligible += 1;
        }
        candidates.clear();
        weights.clear();
        for j in first_eligible..l {
            if citer.shares_authors_with(&papers[j]) {
                continue;
            }
            let matches: f64 = (0..3).filter(|&a| attrs[l][a] == attrs[j][a]).map(|a| cfg.homophily[a]).sum();
            let mut w = (1.0 + cfg.pa_strength * in_degree[j] as f64) * matches.exp();
            if papers[j].gender.has_woman() {
                w *= cfg.gender_bias;
            }
            candidates.push(j);
            weights.push(w);
        }
        let k = cfg.out_degree.sample(&mut rng).min(candidates.len());
        let mut total: f64 = weights.iter().sum();
        for _ in 0..k {
            let mut u = rng.random::<f64>() * total;
            let mut pick = weights.len() - 1;
            for (idx, &w) in weights.iter().enumerate() {
                if u < w {
                    pick = idx;
                    break;
                }
                u -= w;
            }
            // Guard against rounding landing on an already drawn slot.
            while weights[pick] == 0.0 {
                pick -= 1;
            }
            total -= weights[pick];
            weights[pick] = 0.0;
            edges.push((l, candidates[pick]));
        }
        for &(_, j) in &edges[edges.len() - k..] {
            in_degree[j] += 1;
        }
    }
    let edge_ids: Vec<(String, String)> = edges
        .into_iter()
        .map(|(i, j)| (papers[i].id.clone(), papers[j].id.clone()))
        .collect();
    filter_citations(papers, &edge_ids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::OutDegree;

    fn small(seed: u64) -> SynthConfig {
        SynthConfig {
            n_papers: 200,
            seed,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn same_seed_same_network() {
        let a = generate_network(&small(3)).unwrap();
        let b = generate_network(&small(3)).unwrap();
        assert_eq!(a.papers(), b.papers());
        assert_eq!(a.edge_ids(), b.edge_ids());
        let c = generate_network(&small(4)).unwrap();
        assert_ne!(a.edge_ids(), c.edge_ids());
    }

    #[test]
    fn refiltering_is_a_no_op() {
        let cfg = SynthConfig {
            author_pool: 30,
            pa_strength: 1.0,
            homophily: [0.5, 0.5, 1.0],
            ..small(11)
        };
        let net = generate_network(&cfg).unwrap();
        let again = filter_citations(net.papers().to_vec(), &net.edge_ids()).unwrap();
        assert_eq!(again.edge_ids(), net.edge_ids());
        assert_eq!(again.len(), net.len());
    }

    #[test]
    fn out_degree_is_respected_when_possible() {
        let cfg = SynthConfig {
            out_degree: OutDegree::Fixed(3),
            ..small(5)
        };
        let net = generate_network(&cfg).unwrap();
        let full = net.out_degrees().iter().filter(|&&k| k == 3).count();
        assert!(full >= net.len() - 3);
        assert!(net.out_degrees().iter().all(|&k| k <= 3));
    }

    #[test]
    fn infeasible_config_errors() {
        let cfg = SynthConfig {
            n_papers: 3,
            out_degree: OutDegree::Fixed(3),
            ..SynthConfig::default()
        };
        assert!(generate_network(&cfg).is_err());
    }
}
