//! Log-ratio transforms: pairwise, centred (clr), and isometric (ilr)
//! coordinates built from a sequential binary partition.
//!
//! Natural logarithms throughout. A clr row always sums to zero; ilr
//! coordinates from a valid partition are an orthonormal re-expression of
//! the clr values, so row norms agree between the two.

use crate::composition::{CompositionSet, PartLabel};
use crate::error::{CoreError, Result};

/// A named pairwise log-ratio between two parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogRatioSpec {
    pub name: String,
    pub numerator: String,
    pub denominator: String,
}

impl LogRatioSpec {
    pub fn new(
        name: impl Into<String>,
        numerator: impl Into<String>,
        denominator: impl Into<String>,
    ) -> Result<Self> {
        let numerator = numerator.into();
        let denominator = denominator.into();
        if numerator == denominator {
            return Err(CoreError::DegenerateRatio(numerator));
        }
        Ok(Self {
            name: name.into(),
            numerator,
            denominator,
        })
    }

    /// Same ratio with numerator and denominator swapped.
    pub fn reversed(&self) -> LogRatioSpec {
        LogRatioSpec {
            name: format!("-{}", self.name),
            numerator: self.denominator.clone(),
            denominator: self.numerator.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogRatioKind {
    Pairwise,
    Clr,
    Ilr,
}

/// n x m matrix of named log-ratio variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRatioMatrix {
    pub kind: LogRatioKind,
    pub columns: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl LogRatioMatrix {
    pub fn new(kind: LogRatioKind, columns: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        for row in &values {
            if row.len() != columns.len() {
                return Err(CoreError::Shape(format!(
                    "log-ratio row has {} cells, expected {}",
                    row.len(),
                    columns.len()
                )));
            }
        }
        Ok(Self {
            kind,
            columns,
            values,
        })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.values.iter().map(|r| r[j]).collect())
    }

    pub fn column_at(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[j]).collect()
    }
}

/// Scaling constant sqrt(r*s/(r+s)) for a partition row with `r` numerator
/// parts and `s` denominator parts.
pub fn scaling_constant(r: usize, s: usize) -> f64 {
    let (r, s) = (r as f64, s as f64);
    (r * s / (r + s)).sqrt()
}

/// Sign matrix encoding a sequential binary partition: D-1 rows over D
/// parts, entries in {+1, -1, 0}, positive signs marking numerator parts.
#[derive(Debug, Clone, PartialEq)]
pub struct SbpMatrix {
    parts: Vec<PartLabel>,
    signs: Vec<Vec<i8>>,
}

/// One broken partition rule, reported per row.
#[derive(Debug, Clone, PartialEq)]
pub struct SbpViolation {
    /// 1-based row number in the sign matrix.
    pub row: usize,
    pub rule: String,
}

impl std::fmt::Display for SbpViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "row {}: {}", self.row, self.rule)
    }
}

impl SbpMatrix {
    /// Builds a sign matrix, checking shape and entry range only; use
    /// [`SbpMatrix::validate`] for the partition rules.
    pub fn new(parts: Vec<PartLabel>, signs: Vec<Vec<i8>>) -> Result<Self> {
        let d = parts.len();
        if d < 2 {
            return Err(CoreError::TooFewParts(d));
        }
        if signs.len() != d - 1 {
            return Err(CoreError::InvalidSbp(format!(
                "{} rows for {} parts, expected {}",
                signs.len(),
                d,
                d - 1
            )));
        }
        for (k, row) in signs.iter().enumerate() {
            if row.len() != d {
                return Err(CoreError::InvalidSbp(format!(
                    "row {} has {} entries, expected {}",
                    k + 1,
                    row.len(),
                    d
                )));
            }
            if row.iter().any(|&s| !(-1..=1).contains(&s)) {
                return Err(CoreError::InvalidSbp(format!(
                    "row {} contains an entry outside {{-1, 0, +1}}",
                    k + 1
                )));
            }
        }
        Ok(Self { parts, signs })
    }

    /// The 4-part scheme splitting {revenues, costs | liabilities, assets},
    /// then revenues|costs, then liabilities|assets.
    pub fn dupont4(parts: &[PartLabel]) -> Result<Self> {
        if parts.len() != 4 {
            return Err(CoreError::InvalidSbp(format!(
                "dupont4 needs exactly 4 parts, got {}",
                parts.len()
            )));
        }
        SbpMatrix::new(
            parts.to_vec(),
            vec![
                vec![1, 1, -1, -1],
                vec![1, -1, 0, 0],
                vec![0, 0, 1, -1],
            ],
        )
    }

    /// The 6-part balance scheme: {revenues, costs} against the four balance
    /// sheet categories, then successive splits of each side.
    pub fn balance6(parts: &[PartLabel]) -> Result<Self> {
        if parts.len() != 6 {
            return Err(CoreError::InvalidSbp(format!(
                "balance6 needs exactly 6 parts, got {}",
                parts.len()
            )));
        }
        SbpMatrix::new(
            parts.to_vec(),
            vec![
                vec![-1, -1, -1, -1, 1, 1],
                vec![0, 0, 0, 0, 1, -1],
                vec![-1, -1, 1, 1, 0, 0],
                vec![1, -1, 0, 0, 0, 0],
                vec![0, 0, 1, -1, 0, 0],
            ],
        )
    }

    /// Looks up a built-in partition by name ("dupont4" or "balance6").
    pub fn builtin(name: &str, parts: &[PartLabel]) -> Result<Self> {
        match name {
            "dupont4" => Self::dupont4(parts),
            "balance6" => Self::balance6(parts),
            other => Err(CoreError::InvalidSbp(format!(
                "unknown built-in partition '{other}' (expected 'dupont4' or 'balance6')"
            ))),
        }
    }

    pub fn parts(&self) -> &[PartLabel] {
        &self.parts
    }

    pub fn signs(&self) -> &[Vec<i8>] {
        &self.signs
    }

    pub fn row_count(&self) -> usize {
        self.signs.len()
    }

    /// Part indices in the numerator (+) and denominator (-) of row `k`.
    pub fn row_groups(&self, k: usize) -> (Vec<usize>, Vec<usize>) {
        let plus = (0..self.parts.len())
            .filter(|&j| self.signs[k][j] > 0)
            .collect();
        let minus = (0..self.parts.len())
            .filter(|&j| self.signs[k][j] < 0)
            .collect();
        (plus, minus)
    }

    /// Auto-generated coordinate name: "ilr_k:+a,b|-c,d".
    pub fn coordinate_name(&self, k: usize) -> String {
        let (plus, minus) = self.row_groups(k);
        let names = |idx: &[usize]| {
            idx.iter()
                .map(|&j| self.parts[j].name.as_str())
                .collect::<Vec<_>>()
                .join(",")
        };
        format!("ilr_{}:+{}|-{}", k + 1, names(&plus), names(&minus))
    }

    /// Checks the sequential-binary-partition rules and reports every broken
    /// one. An empty list means the matrix encodes a full binary hierarchy.
    pub fn validate(&self) -> Vec<SbpViolation> {
        let d = self.parts.len();
        let mut violations = Vec::new();

        // Groups still open for splitting; starts with the full part set.
        let mut open: Vec<Vec<usize>> = vec![(0..d).collect()];

        for (k, row) in self.signs.iter().enumerate() {
            let support: Vec<usize> = (0..d).filter(|&j| row[j] != 0).collect();
            let plus = row.iter().filter(|&&s| s > 0).count();
            let minus = row.iter().filter(|&&s| s < 0).count();

            if k == 0 && support.len() != d {
                violations.push(SbpViolation {
                    row: 1,
                    rule: "first row must involve every part (no zero entries)".into(),
                });
            }
            if plus == 0 {
                violations.push(SbpViolation {
                    row: k + 1,
                    rule: "row lacks a numerator group (no + entries)".into(),
                });
            }
            if minus == 0 {
                violations.push(SbpViolation {
                    row: k + 1,
                    rule: "row lacks a denominator group (no - entries)".into(),
                });
            }
            if plus == 0 || minus == 0 {
                continue;
            }

            match open.iter().position(|g| *g == support) {
                Some(pos) => {
                    let group = open.remove(pos);
                    let (p, m): (Vec<usize>, Vec<usize>) =
                        group.into_iter().partition(|&j| row[j] > 0);
                    if p.len() > 1 {
                        open.push(p);
                    }
                    if m.len() > 1 {
                        open.push(m);
                    }
                }
                None => {
                    if k > 0 {
                        violations.push(SbpViolation {
                            row: k + 1,
                            rule: "support is not an unsplit sign-group of an earlier row".into(),
                        });
                    }
                }
            }
        }
        violations
    }
}

impl CompositionSet {
    /// log(numerator) - log(denominator), one value per firm.
    pub fn pairwise_logratio(&self, spec: &LogRatioSpec) -> Result<Vec<f64>> {
        let num = self.part_index(&spec.numerator)?;
        let den = self.part_index(&spec.denominator)?;
        let all: Vec<usize> = (0..self.n()).collect();
        self.ensure_positive(&all)?;
        Ok((0..self.n())
            .map(|i| self.value(i, num).ln() - self.value(i, den).ln())
            .collect())
    }

    /// Several pairwise log-ratios as one named matrix.
    pub fn pairwise_matrix(&self, specs: &[LogRatioSpec]) -> Result<LogRatioMatrix> {
        let mut cols = Vec::with_capacity(specs.len());
        for spec in specs {
            cols.push(self.pairwise_logratio(spec)?);
        }
        let values = (0..self.n())
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect();
        LogRatioMatrix::new(
            LogRatioKind::Pairwise,
            specs.iter().map(|s| s.name.clone()).collect(),
            values,
        )
    }

    /// Centred log-ratios: each part against the firm's geometric mean.
    pub fn clr(&self) -> Result<LogRatioMatrix> {
        let all: Vec<usize> = (0..self.n()).collect();
        self.ensure_positive(&all)?;
        let d = self.part_count();
        let values = (0..self.n())
            .map(|i| {
                let logs: Vec<f64> = self.row(i).iter().map(|v| v.ln()).collect();
                let mean = logs.iter().sum::<f64>() / d as f64;
                logs.into_iter().map(|l| l - mean).collect()
            })
            .collect();
        let columns = self
            .parts()
            .iter()
            .map(|p| format!("clr_{}", p.name))
            .collect();
        LogRatioMatrix::new(LogRatioKind::Clr, columns, values)
    }

    /// Isometric log-ratio coordinates from a sequential binary partition.
    pub fn ilr(&self, sbp: &SbpMatrix) -> Result<LogRatioMatrix> {
        let violations = sbp.validate();
        if !violations.is_empty() {
            let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            return Err(CoreError::InvalidSbp(msgs.join("; ")));
        }
        let own = self.part_names();
        let theirs: Vec<String> = sbp.parts().iter().map(|p| p.name.clone()).collect();
        if own != theirs {
            return Err(CoreError::Shape(format!(
                "partition parts {:?} do not match set parts {:?}",
                theirs, own
            )));
        }
        let all: Vec<usize> = (0..self.n()).collect();
        self.ensure_positive(&all)?;

        let m = sbp.row_count();
        let mut columns = Vec::with_capacity(m);
        let mut groups = Vec::with_capacity(m);
        for k in 0..m {
            columns.push(sbp.coordinate_name(k));
            groups.push(sbp.row_groups(k));
        }

        let values = (0..self.n())
            .map(|i| {
                let logs: Vec<f64> = self.row(i).iter().map(|v| v.ln()).collect();
                groups
                    .iter()
                    .map(|(plus, minus)| {
                        let mean = |idx: &[usize]| {
                            idx.iter().map(|&j| logs[j]).sum::<f64>() / idx.len() as f64
                        };
                        scaling_constant(plus.len(), minus.len()) * (mean(plus) - mean(minus))
                    })
                    .collect()
            })
            .collect();
        LogRatioMatrix::new(LogRatioKind::Ilr, columns, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::PartLabel;
    use approx::assert_relative_eq;

    fn labels(names: &[&str]) -> Vec<PartLabel> {
        names.iter().map(|n| PartLabel::bare(*n)).collect()
    }

    fn toy_two_part() -> CompositionSet {
        let x1 = [1e6, 1e5, 1e4, 1e3, 1e2, 1e1, 1e0];
        let x2 = [1e0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6];
        CompositionSet::new(
            labels(&["x1", "x2"]),
            (1..=7).map(|i| i.to_string()).collect(),
            x1.iter().zip(x2.iter()).map(|(&a, &b)| vec![a, b]).collect(),
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn pairwise_logratio_on_toy_data() {
        let set = toy_two_part();
        let spec = LogRatioSpec::new("y", "x1", "x2").unwrap();
        let y = set.pairwise_logratio(&spec).unwrap();
        // Base-10 view of the first firm: log10(1e6 / 1) = 6.
        assert_relative_eq!(y[0] / std::f64::consts::LN_10, 6.0, max_relative = 1e-14);
        // Firm 4 holds equal values, so the ratio is exactly log(1) = 0.
        assert_eq!(y[3], 0.0);
    }

    #[test]
    fn pairwise_is_antisymmetric_bitwise() {
        let set = toy_two_part();
        let spec = LogRatioSpec::new("y", "x1", "x2").unwrap();
        let fwd = set.pairwise_logratio(&spec).unwrap();
        let rev = set.pairwise_logratio(&spec.reversed()).unwrap();
        for (a, b) in fwd.iter().zip(rev.iter()) {
            assert_eq!(*a, -(*b));
            if *a != 0.0 {
                assert_eq!(a.to_bits(), (-b).to_bits());
            }
        }
    }

    #[test]
    fn unknown_part_is_an_error() {
        let set = toy_two_part();
        let spec = LogRatioSpec::new("y", "x1", "nope").unwrap();
        assert!(matches!(
            set.pairwise_logratio(&spec),
            Err(CoreError::UnknownPart(_))
        ));
    }

    #[test]
    fn clr_of_equal_parts_is_zero() {
        let set = CompositionSet::new(
            labels(&["a", "b", "c", "d"]),
            vec!["1".into()],
            vec![vec![1.0, 1.0, 1.0, 1.0]],
            vec![],
        )
        .unwrap();
        let clr = set.clr().unwrap();
        assert_eq!(clr.row(0), &[0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn clr_hand_value_two_parts() {
        // (e, 1): logs are (1, 0), mean 1/2, so clr = (1/2, -1/2).
        let set = CompositionSet::new(
            labels(&["a", "b"]),
            vec!["1".into()],
            vec![vec![std::f64::consts::E, 1.0]],
            vec![],
        )
        .unwrap();
        let clr = set.clr().unwrap();
        assert_relative_eq!(clr.row(0)[0], 0.5, max_relative = 1e-14);
        assert_relative_eq!(clr.row(0)[1], -0.5, max_relative = 1e-14);
    }

    #[test]
    fn clr_rows_sum_to_zero() {
        let set = toy_two_part();
        let clr = set.clr().unwrap();
        for row in clr.rows() {
            assert!(row.iter().sum::<f64>().abs() < 1e-10);
        }
    }

    #[test]
    fn scaling_constants_match_hand_values() {
        assert_relative_eq!(scaling_constant(2, 2), 1.0, max_relative = 1e-15);
        assert_relative_eq!(
            scaling_constant(1, 1),
            (0.5f64).sqrt(),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            scaling_constant(2, 4),
            (8.0f64 / 6.0).sqrt(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn builtin_sbps_validate_cleanly() {
        let sbp4 = SbpMatrix::dupont4(&labels(&["x1", "x2", "x3", "x4"])).unwrap();
        assert!(sbp4.validate().is_empty());

        let sbp6 =
            SbpMatrix::balance6(&labels(&["x1", "x2", "x3", "x4", "x5", "x6"])).unwrap();
        assert!(sbp6.validate().is_empty());
    }

    #[test]
    fn sbp_missing_denominator_group_is_reported() {
        let sbp = SbpMatrix::new(
            labels(&["a", "b", "c"]),
            vec![vec![1, 1, 1], vec![1, -1, 0]],
        )
        .unwrap();
        let v = sbp.validate();
        assert!(v
            .iter()
            .any(|x| x.row == 1 && x.rule.contains("denominator")));
    }

    #[test]
    fn sbp_rejects_reused_group() {
        // Row 3 tries to split {a, b} again.
        let sbp = SbpMatrix::new(
            labels(&["a", "b", "c", "d"]),
            vec![
                vec![1, 1, -1, -1],
                vec![1, -1, 0, 0],
                vec![1, -1, 0, 0],
            ],
        )
        .unwrap();
        let v = sbp.validate();
        assert!(v.iter().any(|x| x.row == 3));
    }

    #[test]
    fn ilr_reduces_to_scaled_pairwise_for_singleton_rows() {
        let parts = labels(&["x1", "x2", "x3", "x4"]);
        let set = CompositionSet::new(
            parts.clone(),
            vec!["1".into(), "2".into()],
            vec![vec![2.0, 3.0, 5.0, 7.0], vec![11.0, 13.0, 17.0, 19.0]],
            vec![],
        )
        .unwrap();
        let sbp = SbpMatrix::dupont4(&parts).unwrap();
        let ilr = set.ilr(&sbp).unwrap();
        let y2 = set
            .pairwise_logratio(&LogRatioSpec::new("y2", "x1", "x2").unwrap())
            .unwrap();
        let c = scaling_constant(1, 1);
        for i in 0..set.n() {
            assert_relative_eq!(ilr.row(i)[1], c * y2[i], max_relative = 1e-14);
        }
    }

    #[test]
    fn ilr_first_coordinate_splits_in_half() {
        // Row 1 of the 4-part scheme equals (1/2)log(x1/x4) + (1/2)log(x2/x3).
        let parts = labels(&["x1", "x2", "x3", "x4"]);
        let set = CompositionSet::new(
            parts.clone(),
            vec!["1".into()],
            vec![vec![2.0, 3.0, 5.0, 7.0]],
            vec![],
        )
        .unwrap();
        let sbp = SbpMatrix::dupont4(&parts).unwrap();
        let ilr = set.ilr(&sbp).unwrap();
        let expected = 0.5 * (2.0f64 / 7.0).ln() + 0.5 * (3.0f64 / 5.0).ln();
        assert_relative_eq!(ilr.row(0)[0], expected, max_relative = 1e-14);
    }

    #[test]
    fn ilr_rejects_invalid_sbp() {
        let parts = labels(&["a", "b", "c"]);
        let set = CompositionSet::new(
            parts.clone(),
            vec!["1".into()],
            vec![vec![1.0, 2.0, 3.0]],
            vec![],
        )
        .unwrap();
        let bad = SbpMatrix::new(parts, vec![vec![1, 1, 1], vec![1, -1, 0]]).unwrap();
        assert!(matches!(set.ilr(&bad), Err(CoreError::InvalidSbp(_))));
    }

    #[test]
    fn ilr_column_names_are_traceable() {
        let parts = labels(&["x1", "x2", "x3", "x4"]);
        let sbp = SbpMatrix::dupont4(&parts).unwrap();
        assert_eq!(sbp.coordinate_name(0), "ilr_1:+x1,x2|-x3,x4");
        assert_eq!(sbp.coordinate_name(1), "ilr_2:+x1|-x2");
        assert_eq!(sbp.coordinate_name(2), "ilr_3:+x3|-x4");
    }
}
