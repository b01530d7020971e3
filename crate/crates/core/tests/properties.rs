use citebias::ranking::{pagerank_observed, pagerank_reference, transition_row_sums, PageRankConfig};
use citebias::refmodels::ExpectedCitations;
use citebias::synth::{generate_network, OutDegree, SynthConfig};
use citebias::{AttributeSet, CitationNetwork, ModelSpec, Rational, Scalar};
use proptest::prelude::*;

fn small_config() -> impl Strategy<Value = SynthConfig> {
    (
        10usize..80,
        1usize..=4,
        1usize..=3,
        1usize..=4,
        0usize..3,
        0.0f64..2.0,
        0.0f64..1.5,
        any::<u64>(),
    )
        .prop_map(|(n, ranks, countries, topics, pool, pa, h, seed)| SynthConfig {
            n_papers: n,
            n_ranks: ranks,
            n_countries: countries,
            n_topics: topics,
            out_degree: OutDegree::Uniform(1, 5),
            homophily: [h, 0.0, h],
            pa_strength: pa,
            author_pool: pool * n / 4,
            seed,
            ..SynthConfig::default()
        })
}

fn specs() -> Vec<ModelSpec> {
    let mut out = vec![ModelSpec::random()];
    for bits in 1..8u8 {
        let attrs: Vec<_> = citebias::corpus::Attribute::ALL
            .iter()
            .enumerate()
            .filter(|(k, _)| bits & (1 << k) != 0)
            .map(|(_, a)| *a)
            .collect();
        let set = AttributeSet::new(&attrs);
        out.push(ModelSpec::homophilic(set));
        out.push(ModelSpec::preferential(set));
    }
    out
}

fn net_from(cfg: &SynthConfig) -> Option<CitationNetwork> {
    generate_network(cfg).ok().filter(|n| n.citation_count() > 0)
}

/// Dense transition matrix including the dangling rule.
fn dense_rank(rows: &[Vec<f64>], tele: &[f64], cfg: &PageRankConfig) -> Vec<f64> {
    let n = tele.len();
    let mut p = tele.to_vec();
    for _ in 0..cfg.t_max {
        let mut next: Vec<f64> = tele.iter().map(|t| (1.0 - cfg.alpha) * t).collect();
        for (i, row) in rows.iter().enumerate() {
            let total: f64 = row.iter().sum();
            for j in 0..n {
                let step = if total == 0.0 { tele[j] } else { row[j] / total };
                next[j] += cfg.alpha * p[i] * step;
            }
        }
        let delta = p.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum::<f64>() / n as f64;
        p = next;
        if delta < cfg.eps {
            break;
        }
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rows_sum_to_out_degree_and_total_is_m(cfg in small_config()) {
        let Some(net) = net_from(&cfg) else { return Ok(()) };
        for spec in specs() {
            let ec = spec.build::<f64>(&net).unwrap();
            for (i, r) in ec.row_sums().iter().enumerate() {
                prop_assert!((r - net.out_degree(i) as f64).abs() < 1e-9);
            }
            let total: f64 = ec.c_bar().iter().sum();
            prop_assert!((total - net.citation_count() as f64).abs() < 1e-9);
            ec.check_network(&net).unwrap();
        }
    }

    #[test]
    fn exact_models_conserve_exactly_and_match_floats(cfg in small_config()) {
        let Some(net) = net_from(&cfg) else { return Ok(()) };
        for spec in specs() {
            let exact = spec.build::<Rational>(&net).unwrap();
            let total = exact.c_bar().iter().fold(Rational::from_integer(0.into()), |a, b| a + b);
            prop_assert_eq!(total, Rational::from_integer((net.citation_count() as i64).into()));
            let float = spec.build::<f64>(&net).unwrap();
            for (a, b) in exact.c_bar().iter().zip(float.c_bar()) {
                prop_assert!((a.to_f64() - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn members_are_eligible_and_keep_the_category(cfg in small_config()) {
        let Some(net) = net_from(&cfg) else { return Ok(()) };
        for spec in specs() {
            let ec = spec.build::<f64>(&net).unwrap();
            for g in ec.groups() {
                let citer = net.paper(g.citing as usize);
                for &m in &g.members {
                    let cand = net.paper(m as usize);
                    prop_assert!(m != g.citing);
                    prop_assert!(cand.pub_date <= citer.pub_date && cand.pub_date >= citer.window_start());
                    prop_assert!(!citer.shares_authors_with(cand));
                }
                // Every target of a homophilic group shares its members' key.
                for attr in spec.attrs.iter() {
                    let key = net.paper(g.members[0] as usize).attribute(attr);
                    for &x in g.members.iter().chain(&g.targets) {
                        prop_assert_eq!(net.paper(x as usize).attribute(attr), key);
                    }
                }
            }
        }
    }

    #[test]
    fn pagerank_matches_dense_iteration(cfg in small_config()) {
        let Some(net) = net_from(&cfg) else { return Ok(()) };
        let n = net.len();
        let pr = PageRankConfig::default();
        let m = net.citation_count() as f64;
        let tele: Vec<f64> = net.in_degrees().iter().map(|&c| c as f64 / m).collect();

        let mut rows = vec![vec![0.0; n]; n];
        for (i, j) in net.edges() {
            rows[i][j] += 1.0;
        }
        let lib = pagerank_observed(&net, &pr).unwrap();
        for (a, b) in lib.raw.iter().zip(dense_rank(&rows, &tele, &pr)) {
            prop_assert!((a - b).abs() < 1e-9);
        }

        for spec in [ModelSpec::random(), ModelSpec::preferential(AttributeSet::ALL)] {
            let ec = spec.build::<f64>(&net).unwrap();
            let mut rows = vec![vec![0.0; n]; n];
            for g in ec.groups() {
                for &j in &g.members {
                    rows[g.citing as usize][j as usize] += g.weight;
                }
            }
            for s in transition_row_sums(&ec, &net) {
                prop_assert!((s - 1.0).abs() < 1e-9);
            }
            let tele: Vec<f64> = ec.c_bar().iter().map(|c| c / m).collect();
            let lib = pagerank_reference(&ec, &net, &pr).unwrap();
            prop_assert!((lib.raw.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            for (a, b) in lib.raw.iter().zip(dense_rank(&rows, &tele, &pr)) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn observed_model_reproduces_observed_pagerank(cfg in small_config()) {
        let Some(net) = net_from(&cfg) else { return Ok(()) };
        let pr = PageRankConfig::default();
        let a = pagerank_observed(&net, &pr).unwrap();
        let b = pagerank_reference(&ExpectedCitations::<f64>::from_observed(&net), &net, &pr).unwrap();
        for (x, y) in a.raw.iter().zip(&b.raw) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn single_precision_tracks_double(cfg in small_config()) {
        let Some(net) = net_from(&cfg) else { return Ok(()) };
        let spec = ModelSpec::homophilic(AttributeSet::ALL);
        let single = spec.build::<f32>(&net).unwrap();
        let double = spec.build::<f64>(&net).unwrap();
        for (a, b) in single.c_bar().iter().zip(double.c_bar()) {
            prop_assert!((*a as f64 - b).abs() <= 1e-4 * b.abs().max(1.0));
        }
    }
}
