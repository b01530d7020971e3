use std::fs::{self, File};
use std::path::Path;

use anyhow::{bail, Context as _, Result};
use citebias::corpus::{
    filter_citations, match_records, parse_citations, parse_papers, parse_records, write_citations, write_papers,
    ConferenceRank,
};
use citebias::imbalance::{
    imbalance_reports, spearman, write_reports_csv, BootstrapConfig, ImbalanceReport, PaperFilter,
};
use citebias::ranking::{
    citations_observed, citations_reference, pagerank_observed, pagerank_reference, share_curve, write_ranking_csv,
    write_share_csv, Metric, PageRankConfig, RankingResult,
};
use citebias::refmodels::{structural_report, ExpectedCitations, StructuralReport};
use citebias::synth::{generate_network, SynthConfig};
use citebias::{AttributeSet, CitationNetwork, GenderCategory, ModelKind, ModelSpec, Rational, Scalar};
use log::warn;
use serde::Serialize;

use crate::archive::{archive_digest, load_archive, load_model, ModelInfo, CITATIONS_FILE, C_BAR_FILE, MODEL_FILE, PAPERS_FILE};
use crate::manifest::{OutputDir, RunManifest};
use crate::{
    Context, ImbalanceArgs, IngestArgs, MatchArgs, ModelArgs, RankArgs, ReportArgs, StratifyArg, SynthArgs,
};

fn open(path: &Path) -> Result<File> {
    File::open(path).with_context(|| format!("opening {}", path.display()))
}

fn tables(net: &CitationNetwork) -> Result<(Vec<u8>, Vec<u8>)> {
    let mut papers = Vec::new();
    write_papers(&mut papers, net.papers())?;
    let mut citations = Vec::new();
    write_citations(&mut citations, &net.edge_ids())?;
    Ok((papers, citations))
}

#[derive(Serialize)]
struct CategorySummary {
    gender: GenderCategory,
    papers: usize,
    citations_made: usize,
    citations_received: usize,
}

#[derive(Serialize)]
struct RankSummary {
    rank: ConferenceRank,
    papers: usize,
}

#[derive(Serialize)]
struct NetworkSummary {
    papers: usize,
    citations: usize,
    input_papers: usize,
    input_citations: usize,
    archive_digest: String,
    categories: Vec<CategorySummary>,
    ranks: Vec<RankSummary>,
}

impl NetworkSummary {
    fn new(net: &CitationNetwork, input_papers: usize, input_citations: usize, archive_digest: String) -> Self {
        let categories = GenderCategory::KNOWN
            .iter()
            .chain([&GenderCategory::Unknown])
            .map(|&g| {
                let members = (0..net.len()).filter(|&i| net.paper(i).gender == g);
                let (mut papers, mut made, mut received) = (0, 0, 0);
                for i in members {
                    papers += 1;
                    made += net.out_degree(i);
                    received += net.in_degree(i);
                }
                CategorySummary {
                    gender: g,
                    papers,
                    citations_made: made,
                    citations_received: received,
                }
            })
            .collect();
        let ranks = ConferenceRank::ALL
            .iter()
            .map(|&rank| RankSummary {
                rank,
                papers: net.papers().iter().filter(|p| p.rank == rank).count(),
            })
            .filter(|r| r.papers > 0)
            .collect();
        Self {
            papers: net.len(),
            citations: net.citation_count(),
            input_papers,
            input_citations,
            archive_digest,
            categories,
            ranks,
        }
    }
}

pub fn ingest(ctx: &Context, args: &IngestArgs) -> Result<()> {
    let mut manifest = RunManifest::new(None);
    manifest.input(&args.papers)?;
    manifest.input(&args.citations)?;
    let papers = parse_papers(open(&args.papers)?).with_context(|| format!("in {}", args.papers.display()))?;
    let edges =
        parse_citations(open(&args.citations)?).with_context(|| format!("in {}", args.citations.display()))?;
    let (input_papers, input_citations) = (papers.len(), edges.len());
    let net = filter_citations(papers, &edges)?;
    if net.citation_count() == 0 {
        return Err(citebias::Error::EmptyNetwork.into());
    }

    let (papers_tsv, citations_tsv) = tables(&net)?;
    let summary = NetworkSummary::new(&net, input_papers, input_citations, archive_digest(&papers_tsv, &citations_tsv));
    let mut out = OutputDir::create(ctx.resolve(&args.out))?;
    out.write(PAPERS_FILE, &papers_tsv)?;
    out.write(CITATIONS_FILE, &citations_tsv)?;
    out.write_json("summary.json", &summary)?;
    println!(
        "{} papers, {} citations ({} papers and {} citations dropped)",
        summary.papers,
        summary.citations,
        input_papers - summary.papers,
        input_citations - summary.citations
    );
    out.finish(manifest)
}

fn model_dir_name(kind: ModelKind) -> String {
    format!("model-{}", kind.as_str().to_lowercase())
}

fn weight_repr<T: Scalar>(w: &T) -> String {
    w.exact_repr().unwrap_or_else(|| w.to_f64().to_string())
}

fn write_model<T: Scalar>(
    out: &mut OutputDir,
    net: &CitationNetwork,
    ec: &ExpectedCitations<T>,
    dump_groups: bool,
) -> Result<StructuralReport> {
    let mut c_bar = String::from("paper_id\tc_bar");
    if T::is_exact() {
        c_bar.push_str("\tc_bar_exact");
    }
    c_bar.push('\n');
    for (p, value) in net.papers().iter().zip(ec.c_bar()) {
        c_bar.push_str(&format!("{}\t{}", p.id, value.to_f64()));
        if let Some(exact) = value.exact_repr() {
            c_bar.push('\t');
            c_bar.push_str(&exact);
        }
        c_bar.push('\n');
    }
    out.write(C_BAR_FILE, c_bar.as_bytes())?;
    if dump_groups {
        let mut text = String::from("citing_id\tmultiplicity\tweight\tmember_ids\n");
        for g in ec.groups() {
            let members: Vec<&str> = g.members.iter().map(|&m| net.paper(m as usize).id.as_str()).collect();
            text.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                net.paper(g.citing as usize).id,
                g.multiplicity(),
                weight_repr(&g.weight),
                members.join(",")
            ));
        }
        out.write("groups.tsv", text.as_bytes())?;
    }
    let report = structural_report(net, ec);
    out.write_json("structural.json", &report)?;
    Ok(report)
}

pub fn model(ctx: &Context, args: &ModelArgs) -> Result<()> {
    let mut manifest = RunManifest::new(None);
    let archive = load_archive(&args.archive, &mut manifest)?;
    let kind: ModelKind = args.model.parse()?;
    let attrs = match (kind, &args.attrs) {
        (ModelKind::RandomDraws, Some(_)) => {
            warn!("the rd model ignores --attrs");
            AttributeSet::EMPTY
        }
        (ModelKind::RandomDraws, None) => AttributeSet::EMPTY,
        (_, Some(s)) => s.parse()?,
        (_, None) => AttributeSet::ALL,
    };
    let spec = ModelSpec {
        kind,
        attrs,
        tie_eps: args.tie_eps,
    };
    let info = ModelInfo {
        model: kind,
        attrs: attrs.to_string_or_none(),
        tie_eps: args.tie_eps,
        exact: args.exact,
        archive_digest: archive.digest.clone(),
        papers: archive.net.len(),
        citations: archive.net.citation_count(),
    };
    manifest.model = Some(kind.as_str().into());
    manifest.attrs = Some(info.attrs.clone());

    let out_name = args.out.clone().unwrap_or_else(|| model_dir_name(kind).into());
    let mut out = OutputDir::create(ctx.resolve(&out_name))?;
    let report = if args.exact {
        let ec = spec.build::<Rational>(&archive.net)?;
        write_model(&mut out, &archive.net, &ec, args.dump_groups)?
    } else {
        let ec = spec.build::<f64>(&archive.net)?;
        write_model(&mut out, &archive.net, &ec, args.dump_groups)?
    };
    out.write_json(MODEL_FILE, &info)?;
    println!(
        "{} model on {} papers: max out-degree deviation {:e}, in-degree KS {:.4}",
        kind,
        archive.net.len(),
        report.max_out_degree_deviation,
        report.in_degree_ks
    );
    out.finish(manifest)
}

trait AttrLabel {
    fn to_string_or_none(&self) -> String;
}

impl AttrLabel for AttributeSet {
    fn to_string_or_none(&self) -> String {
        if self.is_empty() {
            "none".into()
        } else {
            self.to_string()
        }
    }
}

#[derive(Serialize)]
struct StratumInfo {
    stratum: String,
    papers: usize,
    ww_fraction: f64,
    ww_over_under: Option<f64>,
}

#[derive(Serialize)]
struct ImbalanceOutput<'a> {
    model: ModelKind,
    attrs: &'a str,
    from: String,
    to: String,
    stratify: &'a str,
    bootstrap: Option<BootstrapConfig>,
    reports: &'a [ImbalanceReport],
    #[serde(skip_serializing_if = "Option::is_none")]
    strata: Option<Vec<StratumInfo>>,
    /// Rank correlation across strata between the fraction of WW papers
    /// and the WW over/under-citation.
    #[serde(skip_serializing_if = "Option::is_none")]
    ww_fraction_spearman: Option<f64>,
}

fn stratum_clauses(net: &CitationNetwork, stratify: StratifyArg) -> Vec<String> {
    match stratify {
        StratifyArg::None => Vec::new(),
        StratifyArg::Rank => ConferenceRank::ALL
            .iter()
            .filter(|r| net.papers().iter().any(|p| p.rank == **r))
            .map(|r| format!("rank={r}"))
            .collect(),
        StratifyArg::Subfield => {
            let mut fields: Vec<&str> = net.papers().iter().map(|p| p.subfield.as_str()).collect();
            fields.sort_unstable();
            fields.dedup();
            fields.into_iter().map(|s| format!("subfield={s}")).collect()
        }
    }
}

pub fn imbalance(ctx: &Context, args: &ImbalanceArgs) -> Result<()> {
    let mut manifest = RunManifest::new(Some(ctx.seed()));
    let archive = load_archive(&args.archive, &mut manifest)?;
    let (info, ec) = load_model(&args.model_dir, &archive, &mut manifest)?;
    manifest.model = Some(info.model.as_str().into());
    manifest.attrs = Some(info.attrs.clone());
    let net = &archive.net;
    let from: PaperFilter = args.from.parse()?;
    let to: PaperFilter = args.to.parse()?;
    for (flag, filter) in [("--from", &from), ("--to", &to)] {
        if !net.papers().iter().any(|p| filter.matches(p)) {
            warn!("{flag} `{filter}` selects no papers; estimates are undefined");
        }
    }
    let bootstrap = (args.bootstrap > 0).then_some(BootstrapConfig {
        resamples: args.bootstrap,
        seed: ctx.seed(),
    });

    let clauses = stratum_clauses(net, args.stratify);
    let mut reports = Vec::new();
    let mut strata = Vec::new();
    if clauses.is_empty() {
        reports = imbalance_reports(net, &ec, &from, &to, bootstrap.as_ref())?;
    } else {
        for clause in &clauses {
            let stratum: PaperFilter = clause.parse()?;
            let scoped = to.clone().and(clause)?;
            let block = imbalance_reports(net, &ec, &from, &scoped, bootstrap.as_ref())?;
            let members: Vec<_> = net.papers().iter().filter(|p| stratum.matches(p)).collect();
            let ww = members.iter().filter(|p| p.gender == GenderCategory::WW).count();
            strata.push(StratumInfo {
                stratum: clause.clone(),
                papers: members.len(),
                ww_fraction: ww as f64 / members.len() as f64,
                ww_over_under: block.iter().find(|r| r.gender == GenderCategory::WW).and_then(|r| r.over_under),
            });
            reports.extend(block);
        }
    }
    for r in reports.iter().filter(|r| r.over_under.is_none()) {
        warn!("no expected citations to {} papers in `{}`; marked undefined", r.gender, r.to);
    }
    let spearman_value = (!strata.is_empty())
        .then(|| {
            let (x, y): (Vec<f64>, Vec<f64>) =
                strata.iter().filter_map(|s| s.ww_over_under.map(|o| (s.ww_fraction, o))).unzip();
            (x.len() >= 2).then(|| spearman(&x, &y)).flatten()
        })
        .flatten();

    let mut out = OutputDir::create(ctx.resolve(&args.out))?;
    let mut csv = Vec::new();
    write_reports_csv(&mut csv, &reports)?;
    out.write("imbalance.csv", &csv)?;
    out.write_json(
        "imbalance.json",
        &ImbalanceOutput {
            model: info.model,
            attrs: &info.attrs,
            from: from.to_string(),
            to: to.to_string(),
            stratify: args.stratify.as_str(),
            bootstrap,
            reports: &reports,
            strata: (!strata.is_empty()).then_some(strata),
            ww_fraction_spearman: spearman_value,
        },
    )?;
    for r in &reports {
        let pct = |v: Option<f64>| v.map(|x| format!("{:+.2}%", 100.0 * x)).unwrap_or_else(|| "undefined".into());
        let ci = match (r.ci_low, r.ci_high) {
            (Some(lo), Some(hi)) => format!(" [{}, {}]", pct(Some(lo)), pct(Some(hi))),
            _ => String::new(),
        };
        println!("{} {} -> {} {}: {}{}", r.model, r.from, r.to, r.gender, pct(r.over_under), ci);
    }
    out.finish(manifest)
}

fn ranking_for(metric: Metric, net: &CitationNetwork, ec: Option<&ExpectedCitations<f64>>, cfg: &PageRankConfig) -> Result<RankingResult> {
    Ok(match (metric, ec) {
        (Metric::Citations, None) => citations_observed(net),
        (Metric::Citations, Some(ec)) => citations_reference(ec, net)?,
        (Metric::PageRank, None) => pagerank_observed(net, cfg)?,
        (Metric::PageRank, Some(ec)) => pagerank_reference(ec, net, cfg)?,
    })
}

#[derive(Serialize)]
struct RankingInfo {
    file: String,
    source: String,
    metric: Metric,
    alpha: Option<f64>,
    iterations_used: usize,
    converged: bool,
}

pub fn rank(ctx: &Context, args: &RankArgs) -> Result<()> {
    let mut manifest = RunManifest::new(None);
    let archive = load_archive(&args.archive, &mut manifest)?;
    let net = &archive.net;
    if net.citation_count() == 0 {
        bail!("network has no citations");
    }
    let metric: Metric = args.metric.parse()?;
    let cfg = PageRankConfig {
        alpha: args.alpha,
        eps: args.eps,
        t_max: args.t_max,
    };
    let mut results = vec![ranking_for(metric, net, None, &cfg)?];
    for dir in &args.model_dir {
        let (_, ec) = load_model(dir, &archive, &mut manifest)?;
        results.push(ranking_for(metric, net, Some(&ec), &cfg)?);
    }
    let rows = share_curve(net, &results, &args.d_grid)?;

    let mut out = OutputDir::create(ctx.resolve(&args.out))?;
    let mut infos = Vec::new();
    for result in &results {
        let base = format!("ranking-{}-{}", result.source.to_string().to_lowercase(), metric);
        let mut file = format!("{base}.csv");
        let mut n = 2;
        while infos.iter().any(|i: &RankingInfo| i.file == file) {
            file = format!("{base}-{n}.csv");
            n += 1;
        }
        if !result.converged {
            warn!("{} pagerank stopped after {} iterations without converging", result.source, result.iterations_used);
        }
        let mut csv = Vec::new();
        write_ranking_csv(&mut csv, result, net)?;
        out.write(&file, &csv)?;
        infos.push(RankingInfo {
            file,
            source: result.source.to_string(),
            metric,
            alpha: result.alpha,
            iterations_used: result.iterations_used,
            converged: result.converged,
        });
    }
    let mut csv = Vec::new();
    write_share_csv(&mut csv, &rows)?;
    out.write("shares.csv", &csv)?;
    out.write_json("ranking.json", &infos)?;
    for row in &rows {
        println!("d={} {} {}: W|W share {:.4}", row.d, row.source, row.metric, row.ww_share);
    }
    out.finish(manifest)
}

pub fn synth(ctx: &Context, args: &SynthArgs) -> Result<()> {
    let text = fs::read_to_string(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    let mut cfg = SynthConfig::parse(&text).with_context(|| format!("in {}", args.config.display()))?;
    if let Some(seed) = ctx.seed {
        cfg.seed = seed;
    }
    let mut manifest = RunManifest::new(Some(cfg.seed));
    manifest.input(&args.config)?;
    let net = generate_network(&cfg)?;
    let (papers, citations) = tables(&net)?;
    let mut out = OutputDir::create(ctx.resolve(&args.out))?;
    out.write(PAPERS_FILE, &papers)?;
    out.write(CITATIONS_FILE, &citations)?;
    out.write("config.txt", cfg.to_config_string().as_bytes())?;
    println!("generated {} papers, {} citations", net.len(), net.citation_count());
    out.finish(manifest)
}

pub fn report(ctx: &Context, args: &ReportArgs) -> Result<()> {
    let mut manifest = RunManifest::new(None);
    let archive = load_archive(&args.archive, &mut manifest)?;
    let (info, ec) = load_model(&args.model_dir, &archive, &mut manifest)?;
    manifest.model = Some(info.model.as_str().into());
    manifest.attrs = Some(info.attrs.clone());
    let report = structural_report(&archive.net, &ec);

    let mut out = OutputDir::create(ctx.resolve(&args.out))?;
    out.write_json("structural.json", &report)?;
    let mut survival = String::from("gender,threshold,observed,expected\n");
    for curve in &report.survival {
        let label = curve.gender.map_or("ALL", GenderCategory::as_str);
        for ((x, o), e) in curve.thresholds.iter().zip(&curve.observed).zip(&curve.expected) {
            survival.push_str(&format!("{label},{x},{o},{e}\n"));
        }
    }
    out.write("survival.csv", survival.as_bytes())?;
    let mut pairs = csv_writer();
    pairs.write_record(["attribute", "from", "to", "observed", "expected"])?;
    for p in &report.pair_counts {
        pairs.write_record([
            p.attribute.as_str().to_string(),
            p.from.clone(),
            p.to.clone(),
            p.observed.to_string(),
            p.expected.to_string(),
        ])?;
    }
    out.write("pairs.csv", &pairs.into_inner().map_err(|e| e.into_error())?)?;
    println!(
        "{} model: max out-degree deviation {:e}, in-degree KS {:.4}, {} attribute pairs",
        info.model,
        report.max_out_degree_deviation,
        report.in_degree_ks,
        report.pair_counts.len()
    );
    out.finish(manifest)
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

pub fn match_cmd(ctx: &Context, args: &MatchArgs) -> Result<()> {
    let mut manifest = RunManifest::new(None);
    manifest.input(&args.left)?;
    manifest.input(&args.right)?;
    let left = parse_records(open(&args.left)?).with_context(|| format!("in {}", args.left.display()))?;
    let right = parse_records(open(&args.right)?).with_context(|| format!("in {}", args.right.display()))?;
    let mut w = csv_writer();
    w.write_record(["left_row", "right_row", "left_title", "right_title", "year"])?;
    let mut count = 0;
    for (a, ra) in left.iter().enumerate() {
        for (b, rb) in right.iter().enumerate() {
            if match_records(ra, rb) {
                count += 1;
                w.write_record([
                    (a + 1).to_string(),
                    (b + 1).to_string(),
                    ra.title.clone(),
                    rb.title.clone(),
                    ra.year.to_string(),
                ])?;
            }
        }
    }
    let mut out = OutputDir::create(ctx.resolve(&args.out))?;
    out.write("matches.csv", &w.into_inner().map_err(|e| e.into_error())?)?;
    println!("{count} matching pairs among {} x {} records", left.len(), right.len());
    out.finish(manifest)
}
