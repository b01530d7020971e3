use std::fmt;
use std::str::FromStr;

use crate::corpus::Paper;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Gender,
    Rank,
    Country,
    Topic,
    Subfield,
    Year,
}

/// Paper selector such as `all`, `gender=WW` or `rank=A*,year=2015`.
///
/// Clauses are comma separated and combined with AND; a clause value may
/// list alternatives with `|` (`gender=MW|WM|WW`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaperFilter {
    clauses: Vec<(Field, Vec<String>)>,
    label: String,
}

impl PaperFilter {
    pub fn all() -> Self {
        Self {
            clauses: Vec::new(),
            label: "all".into(),
        }
    }

    pub fn is_all(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn matches(&self, paper: &Paper) -> bool {
        self.clauses.iter().all(|(field, values)| {
            let year;
            let actual = match field {
                Field::Gender => paper.gender.as_str(),
                Field::Rank => paper.rank.as_str(),
                Field::Country => &paper.country,
                Field::Topic => &paper.topic,
                Field::Subfield => &paper.subfield,
                Field::Year => {
                    year = paper.year().to_string();
                    &year
                }
            };
            values.iter().any(|v| v == actual)
        })
    }

    /// Add one `field=value` clause.
    pub fn and(mut self, clause: &str) -> Result<Self> {
        let extra: PaperFilter = clause.parse()?;
        self.clauses.extend(extra.clauses);
        self.label = if self.label == "all" {
            extra.label
        } else {
            format!("{},{}", self.label, extra.label)
        };
        Ok(self)
    }
}

impl fmt::Display for PaperFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

impl FromStr for PaperFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "all" {
            return Ok(Self::all());
        }
        let mut clauses = Vec::new();
        for clause in s.split(',') {
            let (name, value) = clause
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("expected field=value, got `{clause}`")))?;
            let field = match name.trim() {
                "gender" => Field::Gender,
                "rank" => Field::Rank,
                "country" => Field::Country,
                "topic" => Field::Topic,
                "subfield" => Field::Subfield,
                "year" => Field::Year,
                other => return Err(Error::InvalidArgument(format!("unknown filter field `{other}`"))),
            };
            clauses.push((field, value.split('|').map(|v| v.trim().to_string()).collect()));
        }
        Ok(Self {
            clauses,
            label: s.to_string(),
        })
    }
}
