//! Compositions and composition sets.
//!
//! A composition is a vector of strictly positive accounting figures whose
//! ratios carry the information; a composition set is a firm-by-part matrix
//! of them together with non-compositional extras (brand, age, ...).
//! Everything here is immutable after construction and safe to share across
//! threads.

use crate::error::{CoreError, Result};

/// Tolerance for "values sum to one" checks on closed compositions.
pub const CLOSURE_TOL: f64 = 1e-12;

/// Name and free-text description of one part (account category).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartLabel {
    pub name: String,
    pub description: String,
}

impl PartLabel {
    pub fn new(name: impl Into<String>, description: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            description: description.into(),
        }
    }

    /// Label with an empty description.
    pub fn bare(name: impl Into<String>) -> Self {
        Self::new(name, "")
    }
}

/// One firm's strictly positive accounting figures.
#[derive(Debug, Clone, PartialEq)]
pub struct Composition {
    values: Vec<f64>,
}

impl Composition {
    /// Builds a composition, rejecting fewer than two parts and any value
    /// that is not strictly positive and finite.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(CoreError::TooFewParts(values.len()));
        }
        for (j, &v) in values.iter().enumerate() {
            if !v.is_finite() || v <= 0.0 {
                return Err(CoreError::NonPositiveCell {
                    firm: String::new(),
                    part: format!("#{}", j + 1),
                    value: v,
                });
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn part_count(&self) -> usize {
        self.values.len()
    }

    /// Rescales to unit sum. Idempotent.
    pub fn closure(&self) -> Composition {
        let total: f64 = self.values.iter().sum();
        Composition {
            values: self.values.iter().map(|v| v / total).collect(),
        }
    }

    /// Geometric mean of all parts of this firm, computed in log space.
    pub fn geometric_mean(&self) -> f64 {
        let mean_log =
            self.values.iter().map(|v| v.ln()).sum::<f64>() / self.values.len() as f64;
        mean_log.exp()
    }
}

/// A non-compositional cell: numeric, categorical, or missing ("NA").
#[derive(Debug, Clone, PartialEq)]
pub enum ExtraValue {
    Missing,
    Number(f64),
    Text(String),
}

impl ExtraValue {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            ExtraValue::Number(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, ExtraValue::Missing)
    }

    /// Stable string key used for grouping and display; missing renders "NA".
    pub fn key(&self) -> String {
        match self {
            ExtraValue::Missing => "NA".to_string(),
            // Integral numerics print without a trailing ".0" so that group
            // keys read like the source file ("0", "1", ...).
            ExtraValue::Number(v) if v.fract() == 0.0 && v.abs() < 1e15 => {
                format!("{}", *v as i64)
            }
            ExtraValue::Number(v) => format!("{v}"),
            ExtraValue::Text(s) => s.clone(),
        }
    }
}

/// Named column of per-firm non-compositional data.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtraColumn {
    pub name: String,
    pub values: Vec<ExtraValue>,
}

impl ExtraColumn {
    pub fn numeric(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            values: values.into_iter().map(ExtraValue::Number).collect(),
        }
    }

    pub fn categorical(name: impl Into<String>, values: Vec<String>) -> Self {
        Self {
            name: name.into(),
            values: values.into_iter().map(ExtraValue::Text).collect(),
        }
    }
}

/// A violation found by [`CompositionSet::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub firm: String,
    pub part: String,
    pub value: f64,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Zero,
    Negative,
    NonFinite,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let what = match self.kind {
            ViolationKind::Zero => "zero",
            ViolationKind::Negative => "negative",
            ViolationKind::NonFinite => "non-finite",
        };
        write!(
            f,
            "firm '{}', part '{}': {} value {}",
            self.firm, self.part, what, self.value
        )
    }
}

/// An n-firm, D-part data matrix with labels and extras.
///
/// Construction checks structure only (shapes, unique names); cell values may
/// contain zeros or negatives so that diagnostics and zero replacement can
/// run. [`CompositionSet::validate`] reports every cell that is not strictly
/// positive; operations that need positivity fail on the first bad cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionSet {
    parts: Vec<PartLabel>,
    firm_ids: Vec<String>,
    values: Vec<Vec<f64>>,
    extras: Vec<ExtraColumn>,
}

impl CompositionSet {
    pub fn new(
        parts: Vec<PartLabel>,
        firm_ids: Vec<String>,
        values: Vec<Vec<f64>>,
        extras: Vec<ExtraColumn>,
    ) -> Result<Self> {
        let d = parts.len();
        if d < 2 {
            return Err(CoreError::TooFewParts(d));
        }
        for (i, p) in parts.iter().enumerate() {
            if parts[..i].iter().any(|q| q.name == p.name) {
                return Err(CoreError::DuplicatePart(p.name.clone()));
            }
        }
        let n = firm_ids.len();
        if values.len() != n {
            return Err(CoreError::Shape(format!(
                "{} firm ids but {} value rows",
                n,
                values.len()
            )));
        }
        for (i, id) in firm_ids.iter().enumerate() {
            if firm_ids[..i].iter().any(|other| other == id) {
                return Err(CoreError::DuplicateFirm(id.clone()));
            }
        }
        for (i, row) in values.iter().enumerate() {
            if row.len() != d {
                return Err(CoreError::Shape(format!(
                    "row for firm '{}' has {} cells, expected {}",
                    firm_ids[i],
                    row.len(),
                    d
                )));
            }
            for (j, v) in row.iter().enumerate() {
                if v.is_nan() {
                    return Err(CoreError::Shape(format!(
                        "NaN cell in part '{}' of firm '{}'",
                        parts[j].name, firm_ids[i]
                    )));
                }
            }
        }
        for col in &extras {
            if col.values.len() != n {
                return Err(CoreError::Shape(format!(
                    "extra column '{}' has {} cells, expected {}",
                    col.name,
                    col.values.len(),
                    n
                )));
            }
        }
        Ok(Self {
            parts,
            firm_ids,
            values,
            extras,
        })
    }

    pub fn n(&self) -> usize {
        self.firm_ids.len()
    }

    pub fn part_count(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[PartLabel] {
        &self.parts
    }

    pub fn part_names(&self) -> Vec<String> {
        self.parts.iter().map(|p| p.name.clone()).collect()
    }

    pub fn firm_ids(&self) -> &[String] {
        &self.firm_ids
    }

    pub fn part_index(&self, name: &str) -> Result<usize> {
        self.parts
            .iter()
            .position(|p| p.name == name)
            .ok_or_else(|| CoreError::UnknownPart(name.to_string()))
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row][col]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// The i-th firm as a validated composition.
    pub fn row_composition(&self, i: usize) -> Result<Composition> {
        self.ensure_row_positive(i)?;
        Composition::new(self.values[i].clone())
    }

    pub fn extras(&self) -> &[ExtraColumn] {
        &self.extras
    }

    pub fn extra(&self, name: &str) -> Option<&ExtraColumn> {
        self.extras.iter().find(|c| c.name == name)
    }

    /// Returns a copy with one extra column appended (replacing any with the
    /// same name).
    pub fn with_extra(&self, column: ExtraColumn) -> Result<CompositionSet> {
        if column.values.len() != self.n() {
            return Err(CoreError::Shape(format!(
                "extra column '{}' has {} cells, expected {}",
                column.name,
                column.values.len(),
                self.n()
            )));
        }
        let mut extras: Vec<ExtraColumn> = self
            .extras
            .iter()
            .filter(|c| c.name != column.name)
            .cloned()
            .collect();
        extras.push(column);
        Ok(CompositionSet {
            parts: self.parts.clone(),
            firm_ids: self.firm_ids.clone(),
            values: self.values.clone(),
            extras,
        })
    }

    /// Returns a copy with the value matrix replaced (same shape and labels).
    pub(crate) fn with_values(&self, values: Vec<Vec<f64>>) -> Result<CompositionSet> {
        CompositionSet::new(
            self.parts.clone(),
            self.firm_ids.clone(),
            values,
            self.extras.clone(),
        )
    }

    /// Reports every compositional cell that is not finite and strictly
    /// positive. An empty report means the set is fully valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, row) in self.values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let kind = if !v.is_finite() {
                    ViolationKind::NonFinite
                } else if v == 0.0 {
                    ViolationKind::Zero
                } else if v < 0.0 {
                    ViolationKind::Negative
                } else {
                    continue;
                };
                out.push(Violation {
                    firm: self.firm_ids[i].clone(),
                    part: self.parts[j].name.clone(),
                    value: v,
                    kind,
                });
            }
        }
        out
    }

    fn ensure_row_positive(&self, i: usize) -> Result<()> {
        for (j, &v) in self.values[i].iter().enumerate() {
            if !v.is_finite() || v <= 0.0 {
                return Err(CoreError::NonPositiveCell {
                    firm: self.firm_ids[i].clone(),
                    part: self.parts[j].name.clone(),
                    value: v,
                });
            }
        }
        Ok(())
    }

    pub(crate) fn ensure_positive(&self, rows: &[usize]) -> Result<()> {
        for &i in rows {
            self.ensure_row_positive(i)?;
        }
        Ok(())
    }

    /// Resolves an optional row filter into concrete indices.
    /// `None` selects every row; an empty selection is an error.
    pub(crate) fn resolve_rows(&self, rows: Option<&[usize]>) -> Result<Vec<usize>> {
        let idx: Vec<usize> = match rows {
            None => (0..self.n()).collect(),
            Some(r) => r.to_vec(),
        };
        if idx.is_empty() {
            return Err(CoreError::EmptyGroup);
        }
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.n()) {
            return Err(CoreError::Shape(format!(
                "row index {} out of range for {} firms",
                bad,
                self.n()
            )));
        }
        Ok(idx)
    }

    /// Per-part geometric means over the selected rows, in log space.
    pub fn geometric_mean_by_part(&self, rows: Option<&[usize]>) -> Result<Vec<f64>> {
        let idx = self.resolve_rows(rows)?;
        self.ensure_positive(&idx)?;
        let d = self.part_count();
        let mut mean_logs = vec![0.0; d];
        for &i in &idx {
            for j in 0..d {
                mean_logs[j] += self.values[i][j].ln();
            }
        }
        let n = idx.len() as f64;
        Ok(mean_logs.into_iter().map(|s| (s / n).exp()).collect())
    }

    /// Closed vector of per-part geometric means over the selected rows.
    pub fn compositional_centre(&self, rows: Option<&[usize]>) -> Result<CompositionalCentre> {
        let means = self.geometric_mean_by_part(rows)?;
        CompositionalCentre::from_positive(self.parts.clone(), means)
    }

    /// Row indices grouped by the distinct values of an extra column, keyed
    /// by the cell's string form and sorted by key for determinism.
    pub fn group_indices(&self, column: &str) -> Result<Vec<(String, Vec<usize>)>> {
        let col = self
            .extra(column)
            .ok_or_else(|| CoreError::UnknownColumn(column.to_string()))?;
        let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
        for (i, v) in col.values.iter().enumerate() {
            let key = v.key();
            match groups.iter_mut().find(|(k, _)| *k == key) {
                Some((_, idx)) => idx.push(i),
                None => groups.push((key, vec![i])),
            }
        }
        groups.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(groups)
    }
}

/// Closed compositional centre: per-part geometric means normalised to unit
/// sum, each entry in (0,1).
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionalCentre {
    parts: Vec<PartLabel>,
    values: Vec<f64>,
}

impl CompositionalCentre {
    /// Closes a vector of strictly positive per-part means.
    pub fn from_positive(parts: Vec<PartLabel>, means: Vec<f64>) -> Result<Self> {
        if parts.len() != means.len() {
            return Err(CoreError::Shape(format!(
                "{} parts but {} mean values",
                parts.len(),
                means.len()
            )));
        }
        let comp = Composition::new(means)?.closure();
        let values = comp.values().to_vec();
        debug_assert!((values.iter().sum::<f64>() - 1.0).abs() <= CLOSURE_TOL);
        Ok(Self { parts, values })
    }

    pub fn parts(&self) -> &[PartLabel] {
        &self.parts
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn as_composition(&self) -> Composition {
        Composition::new(self.values.clone()).expect("centre entries are positive")
    }
}
