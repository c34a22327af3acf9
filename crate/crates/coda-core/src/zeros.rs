//! Zero diagnostics and replacement.
//!
//! Raw accounting figures may legitimately contain zeros, but log-ratios
//! need strictly positive cells. This module reports zero patterns and
//! replaces zeros with a fixed fraction of each part's detection limit (the
//! smallest positive value observed in that part). Parts where more than
//! 20% of firms are zero are flagged and replacement refuses to run on them
//! unless explicitly overridden. Nonzero cells are never rescaled: the raw
//! figures are not closed to a constant sum, so the classical
//! closure-preserving correction does not apply here.

use crate::composition::CompositionSet;
use crate::error::{CoreError, Result};

/// Fraction of zero cells above which a part is flagged.
pub const ZERO_FLAG_THRESHOLD: f64 = 0.20;

/// Default replacement as a fraction of the detection limit.
pub const DEFAULT_ZERO_FRACTION: f64 = 0.65;

/// Zero-pattern summary for one composition set.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroReport {
    pub part_names: Vec<String>,
    pub per_part_zero_fraction: Vec<f64>,
    pub overall_zero_fraction: f64,
    /// Fraction of rows where both parts are zero; diagonal equals the
    /// per-part fractions.
    pub cooccurrence: Vec<Vec<f64>>,
    pub flagged_parts: Vec<String>,
}

impl ZeroReport {
    pub fn has_zeros(&self) -> bool {
        self.overall_zero_fraction > 0.0
    }
}

/// Per-part replacement ceilings: the smallest positive observation.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionLimits {
    pub part_names: Vec<String>,
    pub per_part_limit: Vec<f64>,
}

impl CompositionSet {
    /// Counts zeros per part, overall, and pairwise co-occurrence.
    /// Cells must be finite and non-negative.
    pub fn zero_report(&self) -> Result<ZeroReport> {
        let (n, d) = (self.n(), self.part_count());
        for (i, row) in self.rows().iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(CoreError::NegativeCell {
                        firm: self.firm_ids()[i].clone(),
                        part: self.parts()[j].name.clone(),
                        value: v,
                    });
                }
            }
        }
        let mut per_part = vec![0usize; d];
        let mut cooc = vec![vec![0usize; d]; d];
        for row in self.rows() {
            let zero: Vec<bool> = row.iter().map(|&v| v == 0.0).collect();
            for j in 0..d {
                if zero[j] {
                    per_part[j] += 1;
                    for k in 0..d {
                        if zero[k] {
                            cooc[j][k] += 1;
                        }
                    }
                }
            }
        }
        let nf = n as f64;
        let per_part_zero_fraction: Vec<f64> = per_part.iter().map(|&c| c as f64 / nf).collect();
        let overall = per_part.iter().sum::<usize>() as f64 / (nf * d as f64);
        let cooccurrence = cooc
            .into_iter()
            .map(|row| row.into_iter().map(|c| c as f64 / nf).collect())
            .collect();
        let flagged_parts = self
            .parts()
            .iter()
            .zip(per_part_zero_fraction.iter())
            .filter(|(_, &f)| f > ZERO_FLAG_THRESHOLD)
            .map(|(p, _)| p.name.clone())
            .collect();
        Ok(ZeroReport {
            part_names: self.part_names(),
            per_part_zero_fraction,
            overall_zero_fraction: overall,
            cooccurrence,
            flagged_parts,
        })
    }

    /// Smallest strictly positive value per part.
    pub fn detection_limits(&self) -> Result<DetectionLimits> {
        let d = self.part_count();
        let mut limits = vec![f64::INFINITY; d];
        for row in self.rows() {
            for (j, &v) in row.iter().enumerate() {
                if v > 0.0 && v < limits[j] {
                    limits[j] = v;
                }
            }
        }
        for (j, &l) in limits.iter().enumerate() {
            if !l.is_finite() {
                return Err(CoreError::AllZeroPart {
                    part: self.parts()[j].name.clone(),
                });
            }
        }
        Ok(DetectionLimits {
            part_names: self.part_names(),
            per_part_limit: limits,
        })
    }

    /// Replaces every zero in part j with `fraction * limit_j`, leaving all
    /// nonzero cells untouched. Refuses to run while any part is flagged
    /// unless `allow_flagged` is set.
    pub fn replace_zeros(
        &self,
        limits: &DetectionLimits,
        fraction: f64,
        allow_flagged: bool,
    ) -> Result<CompositionSet> {
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(CoreError::BadFraction(fraction));
        }
        if limits.per_part_limit.len() != self.part_count() {
            return Err(CoreError::Shape(format!(
                "{} detection limits for {} parts",
                limits.per_part_limit.len(),
                self.part_count()
            )));
        }
        let report = self.zero_report()?;
        if !allow_flagged && !report.flagged_parts.is_empty() {
            return Err(CoreError::FlaggedZeros(report.flagged_parts.join(", ")));
        }
        if !report.has_zeros() {
            return Ok(self.clone());
        }
        let values = self
            .rows()
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        if v == 0.0 {
                            fraction * limits.per_part_limit[j]
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect();
        self.with_values(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::PartLabel;

    fn set_with(values: Vec<Vec<f64>>) -> CompositionSet {
        let d = values[0].len();
        let parts = (1..=d)
            .map(|j| PartLabel::bare(format!("x{j}")))
            .collect();
        let ids = (1..=values.len()).map(|i| i.to_string()).collect();
        CompositionSet::new(parts, ids, values, vec![]).unwrap()
    }

    #[test]
    fn clean_set_reports_no_zeros() {
        let set = set_with(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        let report = set.zero_report().unwrap();
        assert_eq!(report.per_part_zero_fraction, vec![0.0, 0.0]);
        assert_eq!(report.overall_zero_fraction, 0.0);
        assert!(report.flagged_parts.is_empty());
        assert!(!report.has_zeros());
    }

    #[test]
    fn fractions_and_flags_counted() {
        // 10 rows, 3 zeros in part 1 -> 0.3 > 0.2, flagged.
        let mut values = vec![vec![5.0, 7.0]; 10];
        values[0][0] = 0.0;
        values[3][0] = 0.0;
        values[7][0] = 0.0;
        let set = set_with(values);
        let report = set.zero_report().unwrap();
        assert!((report.per_part_zero_fraction[0] - 0.3).abs() < 1e-15);
        assert_eq!(report.flagged_parts, vec!["x1".to_string()]);
    }

    #[test]
    fn cooccurrence_counts_joint_zeros() {
        let mut values = vec![vec![5.0, 7.0]; 10];
        values[2] = vec![0.0, 0.0];
        let set = set_with(values);
        let report = set.zero_report().unwrap();
        assert!((report.cooccurrence[0][1] - 0.1).abs() < 1e-15);
        assert_eq!(report.cooccurrence[0][1], report.cooccurrence[1][0]);
        assert_eq!(report.cooccurrence[0][0], report.per_part_zero_fraction[0]);
    }

    #[test]
    fn negative_cell_is_an_error() {
        let set = set_with(vec![vec![1.0, -2.0]]);
        assert!(set.zero_report().is_err());
    }

    #[test]
    fn detection_limits_ignore_zeros() {
        let set = set_with(vec![vec![0.0, 7.0], vec![5.0, 8.0], vec![3.0, 9.0]]);
        let limits = set.detection_limits().unwrap();
        assert_eq!(limits.per_part_limit, vec![3.0, 7.0]);
    }

    #[test]
    fn all_zero_part_is_an_error() {
        let set = set_with(vec![vec![0.0, 1.0], vec![0.0, 2.0]]);
        assert!(matches!(
            set.detection_limits(),
            Err(CoreError::AllZeroPart { .. })
        ));
    }

    #[test]
    fn replacement_uses_fraction_of_limit() {
        // One zero in ten rows keeps the part under the 20% flag threshold.
        let mut values = vec![vec![110.0, 8.0]; 10];
        values[0] = vec![0.0, 7.0];
        values[1] = vec![100.0, 8.0];
        values[2] = vec![120.0, 9.0];
        let set = set_with(values);
        let limits = set.detection_limits().unwrap();
        let replaced = set.replace_zeros(&limits, 0.65, false).unwrap();
        assert!((replaced.value(0, 0) - 65.0).abs() < 1e-12);
        // Nonzero cells untouched.
        assert_eq!(replaced.value(0, 1), 7.0);
        assert_eq!(replaced.value(1, 0), 100.0);
        // Replacement is strictly below the column minimum.
        assert!(replaced.value(0, 0) < limits.per_part_limit[0]);
        assert!(replaced.validate().is_empty());
    }

    #[test]
    fn zero_free_set_is_returned_unchanged() {
        let set = set_with(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        let limits = set.detection_limits().unwrap();
        let replaced = set.replace_zeros(&limits, 0.65, false).unwrap();
        assert_eq!(replaced, set);
    }

    #[test]
    fn flagged_parts_require_override() {
        let mut values = vec![vec![5.0, 7.0]; 10];
        values[0][0] = 0.0;
        values[3][0] = 0.0;
        values[7][0] = 0.0;
        let set = set_with(values);
        let limits = set.detection_limits().unwrap();
        let err = set.replace_zeros(&limits, 0.65, false);
        assert!(matches!(err, Err(CoreError::FlaggedZeros(_))));
        let ok = set.replace_zeros(&limits, 0.65, true).unwrap();
        assert!(ok.validate().is_empty());
    }

    #[test]
    fn bad_fraction_rejected() {
        let set = set_with(vec![vec![1.0, 2.0]]);
        let limits = set.detection_limits().unwrap();
        assert!(set.replace_zeros(&limits, 0.0, false).is_err());
        assert!(set.replace_zeros(&limits, 1.0, false).is_err());
    }
}
