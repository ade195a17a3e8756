//! Input parsing: grouped-sample CSV tables and spectrum files.

use std::io::{BufRead, Read};

use gmmd_core::estimator::GroupedSamples;

use crate::CliError;

/// A parsed input table: the dataset plus the group labels in
/// first-appearance order (group j of the dataset is `group_names[j]`).
#[derive(Debug, Clone)]
pub struct LoadedTable {
    pub data: GroupedSamples,
    pub group_names: Vec<String>,
    pub had_header: bool,
}

/// Reads a CSV table whose columns are `value...(d columns), group-label`.
/// A header row is detected by its value cells failing numeric parsing.
/// Groups are ordered by first appearance.
pub fn read_grouped_csv(reader: impl Read) -> Result<LoadedTable, CliError> {
    // flexible: ragged rows reach the per-row column check below, which
    // reports them with a uniform line-numbered message.
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut records: Vec<(u64, csv::StringRecord)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::input(format!("malformed CSV: {e}")))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() == 1 && rec.get(0).is_some_and(str::is_empty) {
            continue; // blank line
        }
        records.push((line, rec));
    }
    if records.is_empty() {
        return Err(CliError::input("input table is empty"));
    }
    let ncols = records[0].1.len();
    if ncols < 2 {
        return Err(CliError::input(
            "input table needs at least one value column and a group-label column",
        ));
    }
    let dim = ncols - 1;

    // Header iff any value cell of the first row is non-numeric.
    let had_header = records[0]
        .1
        .iter()
        .take(dim)
        .any(|c| c.parse::<f64>().is_err());
    let start = usize::from(had_header);
    if records.len() == start {
        return Err(CliError::input("input table has a header but no data rows"));
    }

    let mut names: Vec<String> = Vec::new();
    let mut groups: Vec<Vec<Vec<f64>>> = Vec::new();
    for (line, rec) in &records[start..] {
        if rec.len() != ncols {
            return Err(CliError::input(format!(
                "line {line}: expected {ncols} columns, found {}",
                rec.len()
            )));
        }
        let mut point = Vec::with_capacity(dim);
        for (c, cell) in rec.iter().take(dim).enumerate() {
            let v: f64 = cell.parse().map_err(|_| {
                CliError::input(format!(
                    "line {line}, column {}: {cell:?} is not a number",
                    c + 1
                ))
            })?;
            point.push(v);
        }
        let label = rec.get(dim).unwrap_or_default().to_string();
        let g = match names.iter().position(|n| *n == label) {
            Some(g) => g,
            None => {
                names.push(label);
                groups.push(Vec::new());
                names.len() - 1
            }
        };
        groups[g].push(point);
    }

    let data = GroupedSamples::new(groups).map_err(|e| match &e {
        gmmd_core::Error::GroupTooSmall { index, size, min } => CliError::input(format!(
            "group {:?} has {size} row(s); each group needs at least {min}",
            names[*index]
        )),
        _ => CliError::from(e),
    })?;
    Ok(LoadedTable {
        data,
        group_names: names,
        had_header,
    })
}

/// Reads a spectrum file: one eigenvalue per line, with `#` comments and
/// blank lines ignored.
pub fn read_spectrum(reader: impl Read) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for (i, line) in std::io::BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v: f64 = t.parse().map_err(|_| {
            CliError::input(format!("line {}: {t:?} is not a number", i + 1))
        })?;
        out.push(v);
    }
    if out.is_empty() {
        return Err(CliError::input("spectrum file contains no eigenvalues"));
    }
    Ok(out)
}
