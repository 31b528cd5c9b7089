use std::path::Path;

use crate::error::{Error, Result};
use crate::models::ChoiceDataset;

/// Which columns of a one-row-per-observation file feed the model.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChoiceSchema {
    pub choice_col: String,
    /// All columns other than the choice column when `None`.
    pub covariates: Option<Vec<String>>,
    /// Label of alternative `j` at position `j − 1`; labels are numbered in
    /// order of first appearance when `None`.
    pub label_order: Option<Vec<String>>,
}

impl ChoiceSchema {
    pub fn new(choice_col: impl Into<String>) -> Self {
        ChoiceSchema {
            choice_col: choice_col.into(),
            ..Default::default()
        }
    }
}

fn column_index(headers: &csv::StringRecord, name: &str, path: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::MissingColumn {
            path: path.to_string(),
            column: name.to_string(),
        })
}

fn parse_cell(raw: &str, path: &str, row: u64, column: &str) -> Result<f64> {
    let cell = raw.trim();
    let bad = |problem: String| Error::BadCell {
        path: path.to_string(),
        row,
        column: column.to_string(),
        problem,
    };
    if cell.is_empty() {
        return Err(bad("blank cell".into()));
    }
    let v: f64 = cell
        .parse()
        .map_err(|_| bad(format!("`{cell}` is not a number")))?;
    if !v.is_finite() {
        return Err(bad(format!("`{cell}` is not finite")));
    }
    Ok(v)
}

/// Reads a choice dataset. Rows are numbered from 1, excluding the header.
pub fn load_csv(path: &Path, schema: &ChoiceSchema) -> Result<ChoiceDataset> {
    let shown = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers = reader.headers()?.clone();
    let choice_idx = column_index(&headers, &schema.choice_col, &shown)?;
    let covariate_names: Vec<String> = match &schema.covariates {
        Some(cols) => cols.clone(),
        None => headers
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != choice_idx)
            .map(|(_, h)| h.trim().to_string())
            .collect(),
    };
    let covariate_idx = covariate_names
        .iter()
        .map(|c| column_index(&headers, c, &shown))
        .collect::<Result<Vec<_>>>()?;

    let mut labels: Vec<String> = schema.label_order.clone().unwrap_or_default();
    let fixed_labels = schema.label_order.is_some();
    let mut x = Vec::new();
    let mut chosen = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i as u64 + 1;
        let label = record.get(choice_idx).unwrap_or("").trim().to_string();
        if label.is_empty() {
            return Err(Error::BadCell {
                path: shown,
                row,
                column: schema.choice_col.clone(),
                problem: "blank choice label".into(),
            });
        }
        let index = match labels.iter().position(|l| *l == label) {
            Some(j) => j + 1,
            None if fixed_labels => {
                return Err(Error::BadCell {
                    path: shown,
                    row,
                    column: schema.choice_col.clone(),
                    problem: format!("label `{label}` is not in the configured label order"),
                })
            }
            None => {
                labels.push(label);
                labels.len()
            }
        };
        chosen.push(index);
        for (&c, name) in covariate_idx.iter().zip(&covariate_names) {
            x.push(parse_cell(record.get(c).unwrap_or(""), &shown, row, name)?);
        }
    }
    if chosen.is_empty() {
        return Err(Error::EmptyFile(shown));
    }
    if labels.len() < 2 {
        return Err(Error::TooFewAlternatives {
            path: shown,
            found: labels.len(),
        });
    }
    ChoiceDataset::new(labels.len(), covariate_names.len(), x, chosen)?
        .with_labels(labels)?
        .with_covariate_names(covariate_names)
}

/// Writes `choice` followed by one column per covariate, full precision.
pub fn write_csv(data: &ChoiceDataset, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec!["choice".to_string()];
    header.extend(data.covariate_names().iter().cloned());
    writer.write_record(&header)?;
    for i in 0..data.n_obs() {
        let mut rec = vec![data.labels()[data.chosen()[i] - 1].clone()];
        rec.extend(data.row(i).iter().map(|v| format!("{v:?}")));
        writer.write_record(&rec)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes a single numeric column.
pub fn write_values(values: &[f64], column: &str, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record([column])?;
    for v in values {
        writer.write_record([format!("{v:?}")])?;
    }
    writer.flush()?;
    Ok(())
}

/// One numeric column, for the Gaussian mean model.
pub fn load_values(path: &Path, column: &str) -> Result<Vec<f64>> {
    let shown = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let idx = column_index(reader.headers()?, column, &shown)?;
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        values.push(parse_cell(record.get(idx).unwrap_or(""), &shown, i as u64 + 1, column)?);
    }
    if values.is_empty() {
        return Err(Error::EmptyFile(shown));
    }
    Ok(values)
}
