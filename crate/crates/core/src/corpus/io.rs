//! Tab-delimited table formats.

use std::io::{Read, Write};

use chrono::NaiveDate;

use super::{ConferenceRank, GenderCategory, Paper, PublicationRecord};
use crate::{Error, Result};

pub const PAPER_HEADER: [&str; 9] = [
    "id",
    "pub_date",
    "gender",
    "rank",
    "country",
    "topic",
    "subfield",
    "first_author",
    "last_author",
];
const CITATION_HEADER: [&str; 2] = ["citing_id", "cited_id"];
const RECORD_HEADER: [&str; 3] = ["title", "year", "last_names"];

/// Parse `YYYY-MM-DD`, or a bare `YYYY` which maps to January 1.
pub fn parse_date(s: &str) -> Option<NaiveDate> {
    let s = s.trim();
    if s.len() == 4 && s.bytes().all(|b| b.is_ascii_digit()) {
        return NaiveDate::from_ymd_opt(s.parse().ok()?, 1, 1);
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()
}

fn tsv_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .flexible(true)
        .quoting(false)
        .has_headers(true)
        .from_reader(input)
}

fn tsv_writer<W: Write>(output: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .delimiter(b'\t')
        .quote_style(csv::QuoteStyle::Never)
        .from_writer(output)
}

fn check_header<R: Read>(reader: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let header = reader.headers()?;
    if header.iter().map(str::trim).ne(expected.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`", expected.join("\t")),
        });
    }
    Ok(())
}

fn rows<R: Read>(
    reader: &mut csv::Reader<R>,
    width: usize,
) -> impl Iterator<Item = Result<(u64, csv::StringRecord)>> + '_ {
    reader.records().map(move |rec| {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != width {
            return Err(Error::Parse {
                line,
                message: format!("expected {width} columns, found {}", rec.len()),
            });
        }
        Ok((line, rec))
    })
}

/// Read the paper table. Unknown gender or rank tokens fall back to
/// `UNKNOWN` / `Unranked` with a warning.
pub fn parse_papers<R: Read>(input: R) -> Result<Vec<Paper>> {
    let mut reader = tsv_reader(input);
    check_header(&mut reader, &PAPER_HEADER)?;
    let mut papers = Vec::new();
    for row in rows(&mut reader, PAPER_HEADER.len()) {
        let (line, rec) = row?;
        let field = |i: usize| rec[i].trim().to_string();
        let pub_date = parse_date(&rec[1]).ok_or_else(|| Error::Parse {
            line,
            message: format!("invalid date `{}`", &rec[1]),
        })?;
        let gender = rec[2].trim().parse().unwrap_or_else(|_| {
            log::warn!("line {line}: unknown gender token `{}`, using UNKNOWN", &rec[2]);
            GenderCategory::Unknown
        });
        let rank = rec[3].trim().parse().unwrap_or_else(|_| {
            log::warn!("line {line}: unknown rank token `{}`, using Unranked", &rec[3]);
            ConferenceRank::Unranked
        });
        papers.push(Paper {
            id: field(0),
            pub_date,
            gender,
            rank,
            country: field(4),
            topic: field(5),
            subfield: field(6),
            first_author: field(7),
            last_author: field(8),
        });
    }
    Ok(papers)
}

/// Read the citation table as `(citing_id, cited_id)` pairs.
pub fn parse_citations<R: Read>(input: R) -> Result<Vec<(String, String)>> {
    let mut reader = tsv_reader(input);
    check_header(&mut reader, &CITATION_HEADER)?;
    rows(&mut reader, 2)
        .map(|row| row.map(|(_, rec)| (rec[0].trim().to_string(), rec[1].trim().to_string())))
        .collect()
}

/// Read record-matching input; last names are `;`-joined.
pub fn parse_records<R: Read>(input: R) -> Result<Vec<PublicationRecord>> {
    let mut reader = tsv_reader(input);
    check_header(&mut reader, &RECORD_HEADER)?;
    let mut out = Vec::new();
    for row in rows(&mut reader, 3) {
        let (line, rec) = row?;
        let year = rec[1].trim().parse().map_err(|_| Error::Parse {
            line,
            message: format!("invalid year `{}`", &rec[1]),
        })?;
        let names: Vec<String> = rec[2]
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect();
        if names.is_empty() {
            return Err(Error::Parse {
                line,
                message: "record has no author last names".into(),
            });
        }
        out.push(PublicationRecord::new(&rec[0], year, names));
    }
    Ok(out)
}

pub fn write_papers<W: Write>(output: W, papers: &[Paper]) -> Result<()> {
    let mut w = tsv_writer(output);
    w.write_record(PAPER_HEADER)?;
    for p in papers {
        let date = p.pub_date.format("%Y-%m-%d").to_string();
        w.write_record([
            p.id.as_str(),
            &date,
            p.gender.as_str(),
            p.rank.as_str(),
            &p.country,
            &p.topic,
            &p.subfield,
            &p.first_author,
            &p.last_author,
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_citations<W: Write>(output: W, edges: &[(String, String)]) -> Result<()> {
    let mut w = tsv_writer(output);
    w.write_record(CITATION_HEADER)?;
    for (a, b) in edges {
        w.write_record([a, b])?;
    }
    w.flush()?;
    Ok(())
}
