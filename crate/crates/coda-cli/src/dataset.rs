//! Dataset files: one header row, one row per firm, compositional columns
//! plus a firm identifier and optional extras. Missing values are "NA" and
//! are legal only outside the compositional columns. The 109-firm winery
//! file ships with the crate.

use std::path::Path;

use coda_core::{CompositionSet, ExtraColumn, ExtraValue, LogRatioMatrix, PartLabel};

use crate::error::{CliError, Result};

/// Bundled winery dataset: 109 Spanish wine producers, 2016 accounts.
/// Columns: Firm, x1 (revenues), x2 (costs), x3 (liabilities), x4 (assets),
/// Brand (own brand, 0/1), Age (years).
pub const WINERY_CSV: &str = include_str!("../data/winery.csv");

/// Marker for missing non-compositional cells.
pub const MISSING: &str = "NA";

#[derive(Debug, Clone)]
pub struct ReadOptions {
    pub delimiter: u8,
    /// Firm identifier column; defaults to the first column.
    pub firm_column: Option<String>,
    /// Compositional columns; defaults to every column named like "x<k>",
    /// ordered by k.
    pub part_columns: Option<Vec<String>>,
}

impl Default for ReadOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            firm_column: None,
            part_columns: None,
        }
    }
}

fn looks_like_part(name: &str) -> Option<u64> {
    let rest = name.strip_prefix('x')?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

/// Reads a dataset from CSV text. Zeros in compositional cells are accepted
/// here and routed to the zero-handling step later.
pub fn read_dataset_str(text: &str, opts: &ReadOptions) -> Result<CompositionSet> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers.is_empty() {
        return Err(CliError::Validation("empty header row".into()));
    }

    let firm_column = match &opts.firm_column {
        Some(name) => name.clone(),
        None => headers[0].clone(),
    };
    let firm_idx = headers
        .iter()
        .position(|h| *h == firm_column)
        .ok_or_else(|| CliError::Validation(format!("firm column '{firm_column}' not found")))?;

    let part_names: Vec<String> = match &opts.part_columns {
        Some(cols) => cols.clone(),
        None => {
            let mut found: Vec<(u64, String)> = headers
                .iter()
                .filter(|h| **h != firm_column)
                .filter_map(|h| looks_like_part(h).map(|k| (k, h.clone())))
                .collect();
            found.sort();
            found.into_iter().map(|(_, name)| name).collect()
        }
    };
    if part_names.len() < 2 {
        return Err(CliError::Validation(format!(
            "found {} compositional columns, need at least 2 (columns named x1, x2, ... or pass an explicit list)",
            part_names.len()
        )));
    }
    let part_idx: Vec<usize> = part_names
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| CliError::Validation(format!("part column '{name}' not found")))
        })
        .collect::<Result<_>>()?;

    let extra_idx: Vec<usize> = (0..headers.len())
        .filter(|i| *i != firm_idx && !part_idx.contains(i))
        .collect();

    let mut firm_ids = Vec::new();
    let mut values: Vec<Vec<f64>> = Vec::new();
    let mut raw_extras: Vec<Vec<String>> = vec![Vec::new(); extra_idx.len()];

    for (row_no, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            CliError::Validation(format!("data row {}: {}", row_no + 1, e))
        })?;
        firm_ids.push(record[firm_idx].trim().to_string());
        let mut row = Vec::with_capacity(part_idx.len());
        for (&ci, name) in part_idx.iter().zip(&part_names) {
            let cell = record[ci].trim();
            let value: f64 = cell.parse().map_err(|_| {
                CliError::Validation(format!(
                    "data row {}, column '{}': non-numeric compositional cell '{}'",
                    row_no + 1,
                    name,
                    cell
                ))
            })?;
            if !value.is_finite() {
                return Err(CliError::Validation(format!(
                    "data row {}, column '{}': non-finite compositional cell '{}'",
                    row_no + 1,
                    name,
                    cell
                )));
            }
            row.push(value);
        }
        values.push(row);
        for (slot, &ci) in raw_extras.iter_mut().zip(&extra_idx) {
            slot.push(record[ci].trim().to_string());
        }
    }

    let extras = raw_extras
        .into_iter()
        .zip(extra_idx.iter())
        .map(|(cells, &ci)| {
            let name = headers[ci].clone();
            let numeric = cells
                .iter()
                .all(|c| c == MISSING || c.parse::<f64>().map_or(false, |v| v.is_finite()));
            let parsed = cells
                .into_iter()
                .map(|c| {
                    if c == MISSING {
                        ExtraValue::Missing
                    } else if numeric {
                        ExtraValue::Number(c.parse().expect("checked numeric"))
                    } else {
                        ExtraValue::Text(c)
                    }
                })
                .collect();
            ExtraColumn {
                name,
                values: parsed,
            }
        })
        .collect();

    let parts = part_names.iter().map(PartLabel::bare).collect();
    CompositionSet::new(parts, firm_ids, values, extras).map_err(CliError::from)
}

pub fn read_dataset(path: &Path, opts: &ReadOptions) -> Result<CompositionSet> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read '{}': {}", path.display(), e)))?;
    read_dataset_str(&text, opts)
}

/// The bundled winery dataset.
pub fn winery() -> CompositionSet {
    read_dataset_str(WINERY_CSV, &ReadOptions::default()).expect("bundled dataset is well-formed")
}

/// Formats a numeric cell so it re-parses to the identical f64.
fn roundtrip_number(v: f64) -> String {
    format!("{v}")
}

/// Writes the set (and any appended log-ratio matrices) back to CSV.
/// Numeric cells use shortest round-trip formatting.
pub fn write_dataset(
    set: &CompositionSet,
    appended: &[&LogRatioMatrix],
    path: &Path,
) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().from_path(path)?;
    let mut header = vec!["Firm".to_string()];
    header.extend(set.parts().iter().map(|p| p.name.clone()));
    header.extend(set.extras().iter().map(|c| c.name.clone()));
    for m in appended {
        header.extend(m.columns.iter().cloned());
    }
    writer.write_record(&header)?;
    for i in 0..set.n() {
        let mut record = vec![set.firm_ids()[i].clone()];
        record.extend(set.row(i).iter().map(|v| roundtrip_number(*v)));
        for col in set.extras() {
            record.push(match &col.values[i] {
                ExtraValue::Missing => MISSING.to_string(),
                ExtraValue::Number(v) => roundtrip_number(*v),
                ExtraValue::Text(s) => s.clone(),
            });
        }
        for m in appended {
            record.extend(m.row(i).iter().map(|v| roundtrip_number(*v)));
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_winery_shape() {
        let set = winery();
        assert_eq!(set.n(), 109);
        assert_eq!(set.part_count(), 4);
        assert_eq!(set.part_names(), vec!["x1", "x2", "x3", "x4"]);
        let extra_names: Vec<&str> = set.extras().iter().map(|c| c.name.as_str()).collect();
        assert_eq!(extra_names, vec!["Brand", "Age"]);
        assert!(set.validate().is_empty());
        // Spot values from the source listing.
        assert_eq!(set.row(0), &[10386.0, 12987.0, 34048.0, 41456.0]);
        assert_eq!(set.row(108), &[9316.0, 8720.0, 16050.0, 21057.0]);
        assert_eq!(set.firm_ids()[75], "76");
        assert_eq!(set.value(75, 3), 865845.0);
    }

    #[test]
    fn brand_groups_have_expected_sizes() {
        let set = winery();
        let groups = set.group_indices("Brand").unwrap();
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].0, "0");
        assert_eq!(groups[0].1.len(), 24);
        assert_eq!(groups[1].1.len(), 85);
    }

    #[test]
    fn na_in_compositional_cell_is_rejected() {
        let text = "Firm,x1,x2\n1,NA,2\n";
        let err = read_dataset_str(text, &ReadOptions::default()).unwrap_err();
        assert!(err.to_string().contains("non-numeric"));
        assert!(err.to_string().contains("x1"));
    }

    #[test]
    fn na_in_extras_becomes_missing() {
        let text = "Firm,x1,x2,Age\n1,1,2,NA\n2,3,4,7\n";
        let set = read_dataset_str(text, &ReadOptions::default()).unwrap();
        let age = set.extra("Age").unwrap();
        assert!(age.values[0].is_missing());
        assert_eq!(age.values[1].as_number(), Some(7.0));
    }

    #[test]
    fn mixed_extra_column_is_categorical() {
        let text = "Firm,x1,x2,Region\n1,1,2,north\n2,3,4,7\n";
        let set = read_dataset_str(text, &ReadOptions::default()).unwrap();
        let region = set.extra("Region").unwrap();
        assert_eq!(region.values[0], ExtraValue::Text("north".into()));
        assert_eq!(region.values[1], ExtraValue::Text("7".into()));
    }

    #[test]
    fn ragged_row_is_rejected_with_location() {
        let text = "Firm,x1,x2\n1,1,2\n2,3\n";
        let err = read_dataset_str(text, &ReadOptions::default()).unwrap_err();
        assert!(err.to_string().contains("row 2"));
    }

    #[test]
    fn duplicate_firm_ids_rejected() {
        let text = "Firm,x1,x2\n1,1,2\n1,3,4\n";
        let err = read_dataset_str(text, &ReadOptions::default()).unwrap_err();
        assert!(err.to_string().contains("duplicate firm"));
    }

    #[test]
    fn custom_delimiter_and_explicit_parts() {
        let text = "id;rev;cost;note\nA;10;20;x\nB;30;40;y\n";
        let opts = ReadOptions {
            delimiter: b';',
            firm_column: Some("id".into()),
            part_columns: Some(vec!["rev".into(), "cost".into()]),
        };
        let set = read_dataset_str(text, &opts).unwrap();
        assert_eq!(set.part_names(), vec!["rev", "cost"]);
        assert_eq!(set.extras().len(), 1);
    }

    #[test]
    fn roundtrip_preserves_values_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        let set = winery();
        let clr = set.clr().unwrap();
        write_dataset(&set, &[&clr], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let back = read_dataset_str(&text, &ReadOptions::default()).unwrap();
        assert_eq!(back.n(), set.n());
        for i in 0..set.n() {
            assert_eq!(back.row(i), set.row(i));
        }
        // Appended clr columns re-parse to identical values.
        let clr_col = back.extra("clr_x1").unwrap();
        for (i, v) in clr_col.values.iter().enumerate() {
            assert_eq!(v.as_number().unwrap(), clr.row(i)[0]);
        }
    }

    #[test]
    fn zeros_are_accepted_at_read_time() {
        let text = "Firm,x1,x2\n1,0,2\n2,3,4\n";
        let set = read_dataset_str(text, &ReadOptions::default()).unwrap();
        assert_eq!(set.validate().len(), 1);
    }
}
