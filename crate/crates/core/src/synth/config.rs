use std::fmt::Write as _;
use std::str::FromStr;

use chrono::NaiveDate;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::corpus::{parse_date, GenderCategory};
use crate::{Error, Result};

/// Number of citations a generated paper tries to make.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum OutDegree {
    Fixed(usize),
    /// Inclusive range.
    Uniform(usize, usize),
    Poisson(f64),
}

impl OutDegree {
    pub(crate) fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        match *self {
            Self::Fixed(k) => k,
            Self::Uniform(lo, hi) => rng.random_range(lo..=hi),
            Self::Poisson(mean) => Poisson::new(mean).map(|d| d.sample(rng) as usize).unwrap_or(0),
        }
    }

    pub fn min(&self) -> usize {
        match *self {
            Self::Fixed(k) | Self::Uniform(k, _) => k,
            Self::Poisson(_) => 0,
        }
    }
}

impl std::fmt::Display for OutDegree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Fixed(k) => write!(f, "fixed:{k}"),
            Self::Uniform(lo, hi) => write!(f, "uniform:{lo}:{hi}"),
            Self::Poisson(m) => write!(f, "poisson:{m}"),
        }
    }
}

impl FromStr for OutDegree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("invalid out_degree `{s}`"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["fixed", k] => Ok(Self::Fixed(k.parse().map_err(|_| bad())?)),
            ["uniform", lo, hi] => {
                let (lo, hi) = (lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?);
                if lo > hi {
                    return Err(bad());
                }
                Ok(Self::Uniform(lo, hi))
            }
            ["poisson", m] => {
                let m: f64 = m.parse().map_err(|_| bad())?;
                if !(m > 0.0 && m.is_finite()) {
                    return Err(bad());
                }
                Ok(Self::Poisson(m))
            }
            _ => Err(bad()),
        }
    }
}

/// Parameters of the synthetic citation process.
///
/// Each new paper cites earlier eligible papers, drawn without replacement
/// with weight
/// `(1 + pa_strength * c_j) * exp(Σ_a homophily[a] * [attr_a(i) == attr_a(j)]) * bias_j`
/// where `bias_j = gender_bias` for MW/WM/WW papers and 1 otherwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthConfig {
    pub n_papers: usize,
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    /// Weights of MM, MW, WM, WW.
    pub category_weights: [f64; 4],
    /// At most 4 (A*, A, B, C).
    pub n_ranks: usize,
    pub n_countries: usize,
    pub n_topics: usize,
    /// Topic `t` belongs to subfield `t mod n_subfields`.
    pub n_subfields: usize,
    pub out_degree: OutDegree,
    /// Homophily strength for rank, country and topic.
    pub homophily: [f64; 3],
    pub pa_strength: f64,
    pub gender_bias: f64,
    /// Size of the shared author pool; 0 gives every paper its own authors.
    pub author_pool: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_papers: 1000,
            start_date: NaiveDate::from_ymd_opt(2000, 1, 1).unwrap(),
            end_date: NaiveDate::from_ymd_opt(2020, 12, 31).unwrap(),
            category_weights: [0.7, 0.1, 0.13, 0.07],
            n_ranks: 4,
            n_countries: 5,
            n_topics: 10,
            n_subfields: 3,
            out_degree: OutDegree::Uniform(1, 8),
            homophily: [0.0; 3],
            pa_strength: 0.0,
            gender_bias: 1.0,
            author_pool: 0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn window_days(&self) -> i64 {
        (self.end_date - self.start_date).num_days() + 1
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_papers < 2 {
            return fail("n_papers must be at least 2".into());
        }
        if self.window_days() < self.n_papers as i64 {
            return fail(format!(
                "date window has {} days, fewer than n_papers = {}",
                self.window_days(),
                self.n_papers
            ));
        }
        if self.category_weights.iter().any(|w| !(*w >= 0.0 && w.is_finite()))
            || self.category_weights.iter().sum::<f64>() <= 0.0
        {
            return fail("category_weights must be nonnegative with a positive sum".into());
        }
        if !(1..=4).contains(&self.n_ranks) {
            return fail("n_ranks must be between 1 and 4".into());
        }
        if self.n_countries == 0 || self.n_topics == 0 || self.n_subfields == 0 {
            return fail("attribute pools must be nonempty".into());
        }
        if self.homophily.iter().any(|h| !(*h >= 0.0 && h.is_finite())) {
            return fail("homophily strengths must be nonnegative".into());
        }
        if !(self.pa_strength >= 0.0 && self.pa_strength.is_finite()) {
            return fail("pa_strength must be nonnegative".into());
        }
        if !(self.gender_bias > 0.0 && self.gender_bias.is_finite()) {
            return fail("gender_bias must be positive".into());
        }
        if self.author_pool == 1 {
            return fail("author_pool must be 0 or at least 2".into());
        }
        if self.out_degree.min() > self.n_papers - 1 {
            return Err(Error::Generation(format!(
                "out-degree of at least {} exceeds the {} possible earlier papers",
                self.out_degree.min(),
                self.n_papers - 1
            )));
        }
        Ok(())
    }

    /// Parse a flat `key = value` file; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::InvalidConfig(format!("line {}: {msg}", lineno + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| v.parse::<f64>().map_err(|_| bad(&format!("invalid number for {key}")));
            let int = |v: &str| v.parse::<usize>().map_err(|_| bad(&format!("invalid integer for {key}")));
            let date = |v: &str| parse_date(v).ok_or_else(|| bad(&format!("invalid date for {key}")));
            match key {
                "n_papers" => cfg.n_papers = int(value)?,
                "start_date" => cfg.start_date = date(value)?,
                "end_date" => cfg.end_date = date(value)?,
                "category_weights" => {
                    let mut weights = [0.0; 4];
                    for item in value.split(',') {
                        let (name, w) = item.split_once(':').ok_or_else(|| bad("expected CAT:weight"))?;
                        let g: GenderCategory = name.trim().parse().map_err(|_| bad("unknown category"))?;
                        let idx = g.index().ok_or_else(|| bad("UNKNOWN has no weight"))?;
                        weights[idx] = num(w.trim())?;
                    }
                    cfg.category_weights = weights;
                }
                "n_ranks" => cfg.n_ranks = int(value)?,
                "n_countries" => cfg.n_countries = int(value)?,
                "n_topics" => cfg.n_topics = int(value)?,
                "n_subfields" => cfg.n_subfields = int(value)?,
                "out_degree" => cfg.out_degree = value.parse()?,
                "homophily" => cfg.homophily = [num(value)?; 3],
                "homophily_rank" => cfg.homophily[0] = num(value)?,
                "homophily_country" => cfg.homophily[1] = num(value)?,
                "homophily_topic" => cfg.homophily[2] = num(value)?,
                "pa_strength" => cfg.pa_strength = num(value)?,
                "gender_bias" => cfg.gender_bias = num(value)?,
                "author_pool" => cfg.author_pool = int(value)?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad("invalid seed"))?,
                other => return Err(bad(&format!("unknown key `{other}`"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Inverse of [`SynthConfig::parse`].
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let w = self.category_weights;
        let _ = writeln!(s, "n_papers = {}", self.n_papers);
        let _ = writeln!(s, "start_date = {}", self.start_date);
        let _ = writeln!(s, "end_date = {}", self.end_date);
        let _ = writeln!(s, "category_weights = MM:{},MW:{},WM:{},WW:{}", w[0], w[1], w[2], w[3]);
        let _ = writeln!(s, "n_ranks = {}", self.n_ranks);
        let _ = writeln!(s, "n_countries = {}", self.n_countries);
        let _ = writeln!(s, "n_topics = {}", self.n_topics);
        let _ = writeln!(s, "n_subfields = {}", self.n_subfields);
        let _ = writeln!(s, "out_degree = {}", self.out_degree);
        let _ = writeln!(s, "homophily_rank = {}", self.homophily[0]);
        let _ = writeln!(s, "homophily_country = {}", self.homophily[1]);
        let _ = writeln!(s, "homophily_topic = {}", self.homophily[2]);
        let _ = writeln!(s, "pa_strength = {}", self.pa_strength);
        let _ = writeln!(s, "gender_bias = {}", self.gender_bias);
        let _ = writeln!(s, "author_pool = {}", self.author_pool);
        let _ = writeln!(s, "seed = {}", self.seed);
        s
    }
}
