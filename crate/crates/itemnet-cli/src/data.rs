//! CSV ingestion and emission of response matrices.

use std::path::Path;

use anyhow::{bail, Context, Result};
use itemnet::model::ItemResponseMatrix;

/// Read a 0/1 response matrix. A first row containing anything other than
/// zeros and ones is treated as a header of item names.
pub fn read_matrix_csv(path: &Path) -> Result<(ItemResponseMatrix, Option<Vec<String>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;

    let mut names: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("cannot parse {}", path.display()))?;
        let mut row = Vec::with_capacity(record.len());
        let mut bad_cell: Option<usize> = None;
        for (col, cell) in record.iter().enumerate() {
            match cell {
                "0" => row.push(0),
                "1" => row.push(1),
                _ => {
                    bad_cell = Some(col);
                    break;
                }
            }
        }
        match bad_cell {
            None => rows.push(row),
            Some(col) => {
                if idx == 0 {
                    names = Some(record.iter().map(str::to_owned).collect());
                } else {
                    // 1-based locations, counting the header if present.
                    bail!(
                        "{}: row {}, column {}: {:?} is not 0 or 1",
                        path.display(),
                        idx + 1,
                        col + 1,
                        &record[col]
                    );
                }
            }
        }
    }
    if rows.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    let width = rows[0].len();
    if let Some(names) = &names {
        if names.len() != width {
            bail!(
                "{}: header names {} columns, data rows have {}",
                path.display(),
                names.len(),
                width
            );
        }
    }
    for (idx, row) in rows.iter().enumerate() {
        if row.len() != width {
            bail!(
                "{}: row {} has {} columns, expected {}",
                path.display(),
                idx + 1 + usize::from(names.is_some()),
                row.len(),
                width
            );
        }
    }
    let x = ItemResponseMatrix::from_rows(&rows)?;
    Ok((x, names))
}

/// Write a response matrix with a header of item names (`item1..itemP`
/// unless explicit names are given).
pub fn write_matrix_csv(
    path: &Path,
    x: &ItemResponseMatrix,
    names: Option<&[String]>,
) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    let header: Vec<String> = match names {
        Some(names) => names.to_vec(),
        None => (1..=x.p()).map(|j| format!("item{j}")).collect(),
    };
    writer.write_record(&header)?;
    for r in 0..x.n() {
        let row: Vec<&str> = x
            .row(r)
            .iter()
            .map(|&c| if c == 1 { "1" } else { "0" })
            .collect();
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Default item names for unlabeled data.
pub fn default_names(p: usize) -> Vec<String> {
    (1..=p).map(|j| format!("item{j}")).collect()
}
