//! On-disk layouts: network archives and model artifacts, both plain
//! directories of TSV/JSON files.

use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use citebias::corpus::{filter_citations, parse_citations, parse_papers};
use citebias::refmodels::{ExpectedCitations, DEFAULT_TIE_EPS};
use citebias::{AttributeSet, CitationNetwork, ModelKind, ModelSpec};
use serde::{Deserialize, Serialize};

use crate::manifest::{sha256_hex, RunManifest};

pub const PAPERS_FILE: &str = "papers.tsv";
pub const CITATIONS_FILE: &str = "citations.tsv";
pub const MODEL_FILE: &str = "model.json";
pub const C_BAR_FILE: &str = "c_bar.tsv";

/// A network archive read back from disk.
pub struct Archive {
    pub net: CitationNetwork,
    pub digest: String,
}

/// Digest over both tables of an archive.
pub fn archive_digest(papers: &[u8], citations: &[u8]) -> String {
    let mut all = Vec::with_capacity(papers.len() + citations.len() + 32);
    all.extend_from_slice(PAPERS_FILE.as_bytes());
    all.push(0);
    all.extend_from_slice(papers);
    all.extend_from_slice(CITATIONS_FILE.as_bytes());
    all.push(0);
    all.extend_from_slice(citations);
    sha256_hex(&all)
}

pub fn load_archive(dir: &Path, manifest: &mut RunManifest) -> Result<Archive> {
    let papers_path = dir.join(PAPERS_FILE);
    let citations_path = dir.join(CITATIONS_FILE);
    let papers = fs::read(&papers_path).with_context(|| format!("reading {}", papers_path.display()))?;
    let citations = fs::read(&citations_path).with_context(|| format!("reading {}", citations_path.display()))?;
    manifest.input(&papers_path)?;
    manifest.input(&citations_path)?;
    let parsed = parse_papers(papers.as_slice()).with_context(|| format!("in {}", papers_path.display()))?;
    let edges = parse_citations(citations.as_slice()).with_context(|| format!("in {}", citations_path.display()))?;
    let net = filter_citations(parsed, &edges)?;
    ensure!(
        net.citation_count() == edges.len(),
        "{} is not a filtered archive; run `citebias ingest` first",
        dir.display()
    );
    Ok(Archive {
        net,
        digest: archive_digest(&papers, &citations),
    })
}

/// Contents of `model.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelInfo {
    pub model: ModelKind,
    pub attrs: String,
    pub tie_eps: f64,
    pub exact: bool,
    pub archive_digest: String,
    pub papers: usize,
    pub citations: usize,
}

impl ModelInfo {
    pub fn spec(&self) -> Result<ModelSpec> {
        let attrs: AttributeSet = self.attrs.parse()?;
        Ok(ModelSpec {
            kind: self.model,
            attrs,
            tie_eps: self.tie_eps,
        })
    }
}

impl Default for ModelInfo {
    fn default() -> Self {
        Self {
            model: ModelKind::RandomDraws,
            attrs: "none".into(),
            tie_eps: DEFAULT_TIE_EPS,
            exact: false,
            archive_digest: String::new(),
            papers: 0,
            citations: 0,
        }
    }
}

/// Loads a model artifact, recomputes the model on `archive` and checks
/// the stored expectations against the recomputation.
pub fn load_model(
    dir: &Path,
    archive: &Archive,
    manifest: &mut RunManifest,
) -> Result<(ModelInfo, ExpectedCitations<f64>)> {
    let info_path = dir.join(MODEL_FILE);
    let c_bar_path = dir.join(C_BAR_FILE);
    let info: ModelInfo = serde_json::from_slice(
        &fs::read(&info_path).with_context(|| format!("reading {}", info_path.display()))?,
    )
    .with_context(|| format!("parsing {}", info_path.display()))?;
    manifest.input(&info_path)?;
    manifest.input(&c_bar_path)?;
    if info.archive_digest != archive.digest {
        bail!(
            "model artifact {} was built from a different archive (digest {} vs {})",
            dir.display(),
            info.archive_digest,
            archive.digest
        );
    }
    let ec = info.spec()?.build::<f64>(&archive.net)?;
    let stored = read_c_bar(&c_bar_path)?;
    ensure!(
        stored.len() == archive.net.len(),
        "{} has {} rows for {} papers",
        c_bar_path.display(),
        stored.len(),
        archive.net.len()
    );
    for (i, (id, value)) in stored.iter().enumerate() {
        let paper = archive.net.paper(i);
        let fresh = ec.c_bar()[i];
        if *id != paper.id || (value - fresh).abs() > 1e-9 * fresh.abs().max(1.0) {
            bail!(
                "{} disagrees with the recomputed model at paper {} ({} vs {})",
                c_bar_path.display(),
                paper.id,
                value,
                fresh
            );
        }
    }
    Ok((info, ec))
}

fn read_c_bar(path: &Path) -> Result<Vec<(String, f64)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.starts_with("paper_id\tc_bar") => {}
        _ => bail!("{}: missing `paper_id\\tc_bar` header", path.display()),
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(n, line)| {
            let mut cols = line.split('\t');
            let id = cols.next().unwrap_or_default().to_string();
            let value = cols
                .next()
                .and_then(|v| v.parse().ok())
                .with_context(|| format!("{} line {}: bad c_bar", path.display(), n + 2))?;
            Ok((id, value))
        })
        .collect()
}
