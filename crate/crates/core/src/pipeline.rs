//! Table ingestion, external crosscap data and the verification report.

use std::collections::{HashMap, HashSet};
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::curvemap::{parse_record, CurveMap, SignedGaussCode};
use crate::error::{Error, Result};
use crate::families::{classify, decompose_prime};
use crate::search::{u_upper_with, DescentSolver, SearchBudget};
use crate::surfaces::ak_min_genus;

/// One named projection from a table file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    pub name: String,
    pub code: SignedGaussCode,
    pub prime: bool,
    pub n: usize,
}

impl TableEntry {
    pub fn map(&self) -> CurveMap {
        CurveMap::build(&self.code).expect("table entries are validated on ingestion")
    }
}

/// Parses table records from text. Every entry must be a realizable knot projection.
pub fn parse_table(text: &str) -> Result<Vec<TableEntry>> {
    let mut out = Vec::new();
    let mut names = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let rec = |e: Error| Error::Record { line: i + 1, msg: e.to_string() };
        let Some((name, code)) = parse_record(line).map_err(rec)? else {
            continue;
        };
        let map = CurveMap::build(&code).map_err(rec)?;
        let comps = map.components();
        if comps != 1 {
            return Err(rec(Error::MultiComponent(comps)));
        }
        if !names.insert(name.clone()) {
            return Err(Error::DuplicateName(name));
        }
        let prime = decompose_prime(&map)?.len() == 1;
        out.push(TableEntry { name, n: map.crossing_count(), code, prime });
    }
    Ok(out)
}

pub fn ingest_table(path: impl AsRef<Path>) -> Result<Vec<TableEntry>> {
    parse_table(&std::fs::read_to_string(path)?)
}

/// Looks up `name` in a table.
pub fn find_entry<'a>(entries: &'a [TableEntry], name: &str) -> Option<&'a TableEntry> {
    entries.iter().find(|e| e.name == name)
}

/// A crosscap number from an external knot table.
#[derive(Debug, Clone, PartialEq, Eq, serde::Deserialize)]
pub struct ExternalCrosscapRow {
    pub name: String,
    pub crosscap: usize,
}

pub fn parse_external(reader: impl std::io::Read) -> Result<Vec<ExternalCrosscapRow>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["name", "crosscap"] {
        return Err(Error::Csv(format!("expected header `name,crosscap`, got `{}`", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut out = Vec::new();
    let mut names = HashSet::new();
    for row in rdr.deserialize() {
        let row: ExternalCrosscapRow = row?;
        if !names.insert(row.name.clone()) {
            return Err(Error::DuplicateName(row.name));
        }
        out.push(row);
    }
    Ok(out)
}

pub fn ingest_external(path: impl AsRef<Path>) -> Result<Vec<ExternalCrosscapRow>> {
    parse_external(std::fs::File::open(path)?)
}

/// One line of the verification report.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct ReportRow {
    pub name: String,
    pub n: usize,
    pub u_minus: usize,
    pub u_upper_value: usize,
    pub u_upper_status: String,
    pub crosscap_alt: usize,
    pub genus: usize,
    pub class_label: String,
    pub external_crosscap: Option<usize>,
    pub all_equal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Summary {
    pub rows: usize,
    /// Rows where u-minus, crosscap and the u bound disagree.
    pub mismatches: usize,
    /// Rows whose external crosscap differs from the computed one.
    pub external_mismatches: usize,
    pub external_matched: usize,
    /// Rows whose class index disagrees with min(u-minus, 3).
    pub class_mismatches: usize,
    /// Rows with crosscap above u-minus.
    pub bound_violations: usize,
}

impl Summary {
    pub fn is_clean(&self) -> bool {
        self.mismatches == 0
            && self.external_mismatches == 0
            && self.class_mismatches == 0
            && self.bound_violations == 0
    }
}

/// Computes one report row.
pub fn report_row(name: &str, map: &CurveMap, external: Option<usize>) -> Result<ReportRow> {
    let mut solver = DescentSolver::new();
    let (u, _) = solver.solve(map)?;
    let budget = SearchBudget::default_for(map.crossing_count(), u);
    let up = u_upper_with(map, budget, &mut solver)?;
    let ak = ak_min_genus(map)?;
    let crosscap = crate::surfaces::crosscap_alt(map)?;
    let class = classify(map)?;
    let upv = up.value.unwrap_or(u);
    Ok(ReportRow {
        name: name.to_string(),
        n: map.crossing_count(),
        u_minus: u,
        u_upper_value: upv,
        u_upper_status: up.status.to_string(),
        crosscap_alt: crosscap,
        genus: ak.genus,
        class_label: class.to_string(),
        external_crosscap: external,
        all_equal: u == crosscap && u == upv,
    })
}

/// Runs the check over every prime entry with at most eight crossings.
///
/// Rows are computed in parallel and returned ordered by `(n, name)`.
pub fn verify_observation(
    entries: &[TableEntry],
    external: &[ExternalCrosscapRow],
) -> Result<(Vec<ReportRow>, Summary)> {
    let ext: HashMap<&str, usize> = external.iter().map(|r| (r.name.as_str(), r.crosscap)).collect();
    let selected: Vec<&TableEntry> = entries.iter().filter(|e| e.prime && e.n <= 8).collect();
    let mut rows = selected
        .par_iter()
        .map(|e| report_row(&e.name, &e.map(), ext.get(e.name.as_str()).copied()))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| (a.n, &a.name).cmp(&(b.n, &b.name)));
    let summary = summarize(&rows);
    Ok((rows, summary))
}

pub fn summarize(rows: &[ReportRow]) -> Summary {
    let mut s = Summary { rows: rows.len(), ..Summary::default() };
    for r in rows {
        if !r.all_equal {
            s.mismatches += 1;
        }
        if let Some(x) = r.external_crosscap {
            s.external_matched += 1;
            if x != r.crosscap_alt {
                s.external_mismatches += 1;
            }
        }
        let idx = match r.class_label.as_str() {
            "U0" => 0,
            l if l.starts_with("U1") => 1,
            l if l.starts_with("U2") => 2,
            _ => 3,
        };
        if idx != r.u_minus.min(3) {
            s.class_mismatches += 1;
        }
        if r.crosscap_alt > r.u_minus {
            s.bound_violations += 1;
        }
    }
    s
}

/// Writes the report as CSV.
pub fn write_report(rows: &[ReportRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record([
            "name",
            "n",
            "u_minus",
            "u_upper_value",
            "u_upper_status",
            "crosscap_alt",
            "genus",
            "class_label",
            "external_crosscap",
            "all_equal",
        ])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_report(rows: &[ReportRow], path: impl AsRef<Path>) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_report(rows, std::io::BufWriter::new(f))
}
