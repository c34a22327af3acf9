//! Covariance biplot of the column-centred clr matrix.
//!
//! With Z = U S V' the form biplot puts firms at sqrt(n-1) * U[:, 0..2] and
//! part rays at V[:, 0..2] * S[0..2] / sqrt(n-1), so the rays carry the
//! variance. Projections of firm points onto the link between two ray
//! vertices approximate the ordering of the corresponding pairwise
//! log-ratio; the quality of that approximation is summarised by a Spearman
//! rank correlation against the exact log-ratio.

use crate::composition::CompositionSet;
use crate::error::{CoreError, Result};
use crate::multivariate::svd::thin_svd;

/// Minimum link length accepted by [`BiplotModel::link_projection`].
pub const MIN_LINK_LENGTH: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BiplotModel {
    pub part_names: Vec<String>,
    /// One (dim1, dim2) score per firm.
    pub firm_scores: Vec<[f64; 2]>,
    /// One (dim1, dim2) vertex per clr variable.
    pub ray_coords: Vec<[f64; 2]>,
    /// Share of total clr variance carried by the first two dimensions.
    pub explained_variance_fraction: f64,
    /// Per-dimension variance fractions; they sum to one.
    pub explained_fractions: Vec<f64>,
    pub singular_values: Vec<f64>,
}

/// Projections of all firms along one ray link.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkProjection {
    pub numerator: String,
    pub denominator: String,
    pub projections: Vec<f64>,
    /// Spearman rank correlation against the exact pairwise log-ratio.
    pub rank_correlation: f64,
}

impl CompositionSet {
    /// Covariance biplot of this set's centred log-ratios.
    pub fn biplot(&self) -> Result<BiplotModel> {
        let (n, d) = (self.n(), self.part_count());
        if n <= d {
            return Err(CoreError::NotEnoughRows { n, p: d });
        }
        let clr = self.clr()?;

        // Column-centre the clr matrix.
        let mut col_means = vec![0.0; d];
        for row in clr.rows() {
            for (j, &v) in row.iter().enumerate() {
                col_means[j] += v;
            }
        }
        for m in &mut col_means {
            *m /= n as f64;
        }
        let centred: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..d).map(|j| clr.row(i)[j] - col_means[j]).collect())
            .collect();

        let total_ss: f64 = centred.iter().flatten().map(|v| v * v).sum();
        if total_ss <= 1e-12 {
            return Err(CoreError::Degenerate(
                "zero variance: all firms share one composition up to scale".into(),
            ));
        }

        let svd = thin_svd(&centred);
        let sigma = &svd.singular_values;
        let m = sigma.len();

        // Sign convention: flip each dimension so its largest-magnitude ray
        // coordinate is positive.
        let mut flip = vec![1.0; m];
        for k in 0..m.min(2) {
            let mut best = 0.0f64;
            let mut best_val = 0.0f64;
            for j in 0..d {
                let coord = svd.v[k][j] * sigma[k];
                if coord.abs() > best {
                    best = coord.abs();
                    best_val = coord;
                }
            }
            if best_val < 0.0 {
                flip[k] = -1.0;
            }
        }

        let scale = ((n - 1) as f64).sqrt();
        let firm_scores = (0..n)
            .map(|i| [scale * flip[0] * svd.u[0][i], scale * flip[1] * svd.u[1][i]])
            .collect();
        let ray_coords = (0..d)
            .map(|j| {
                [
                    flip[0] * svd.v[0][j] * sigma[0] / scale,
                    flip[1] * svd.v[1][j] * sigma[1] / scale,
                ]
            })
            .collect();

        let total: f64 = sigma.iter().map(|s| s * s).sum();
        let explained_fractions: Vec<f64> = sigma.iter().map(|s| s * s / total).collect();
        let explained_variance_fraction = explained_fractions.iter().take(2).sum();

        Ok(BiplotModel {
            part_names: self.part_names(),
            firm_scores,
            ray_coords,
            explained_variance_fraction,
            explained_fractions,
            singular_values: sigma.clone(),
        })
    }
}

impl BiplotModel {
    fn part_index(&self, name: &str) -> Result<usize> {
        self.part_names
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| CoreError::UnknownPart(name.to_string()))
    }

    /// Projects every firm score onto the unit vector from the denominator
    /// ray vertex to the numerator ray vertex and reports how well the
    /// ordering tracks the exact pairwise log-ratio.
    pub fn link_projection(
        &self,
        numerator: &str,
        denominator: &str,
        set: &CompositionSet,
    ) -> Result<LinkProjection> {
        if numerator == denominator {
            return Err(CoreError::DegenerateRatio(numerator.to_string()));
        }
        let i = self.part_index(numerator)?;
        let j = self.part_index(denominator)?;
        let dx = self.ray_coords[i][0] - self.ray_coords[j][0];
        let dy = self.ray_coords[i][1] - self.ray_coords[j][1];
        let len = (dx * dx + dy * dy).sqrt();
        if len < MIN_LINK_LENGTH {
            return Err(CoreError::LinkTooShort(
                numerator.to_string(),
                denominator.to_string(),
            ));
        }
        let (ux, uy) = (dx / len, dy / len);
        let projections: Vec<f64> = self
            .firm_scores
            .iter()
            .map(|s| s[0] * ux + s[1] * uy)
            .collect();

        let spec = crate::transforms::LogRatioSpec::new("link", numerator, denominator)?;
        let exact = set.pairwise_logratio(&spec)?;
        let rank_correlation = spearman(&projections, &exact);
        Ok(LinkProjection {
            numerator: numerator.to_string(),
            denominator: denominator.to_string(),
            projections,
            rank_correlation,
        })
    }
}

/// Average ranks, with ties sharing their mean rank.
fn ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut out = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let mean_rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = mean_rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation (Pearson correlation of average ranks).
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let mut num = 0.0;
    let mut da = 0.0;
    let mut db = 0.0;
    for (x, y) in ra.iter().zip(rb.iter()) {
        num += (x - mean) * (y - mean);
        da += (x - mean) * (x - mean);
        db += (y - mean) * (y - mean);
    }
    if da == 0.0 || db == 0.0 {
        return 0.0;
    }
    num / (da * db).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::{CompositionSet, PartLabel};

    fn labels(names: &[&str]) -> Vec<PartLabel> {
        names.iter().map(|n| PartLabel::bare(*n)).collect()
    }

    #[test]
    fn degenerate_set_errors() {
        // Every firm is a scalar multiple of the same composition, so all
        // clr rows coincide and the centred matrix is zero.
        let base = [2.0, 3.0, 5.0];
        let values = (1..=5)
            .map(|i| base.iter().map(|v| v * i as f64).collect())
            .collect();
        let set = CompositionSet::new(
            labels(&["a", "b", "c"]),
            (1..=5).map(|i| i.to_string()).collect(),
            values,
            vec![],
        )
        .unwrap();
        assert!(matches!(set.biplot(), Err(CoreError::Degenerate(_))));
    }

    #[test]
    fn too_few_rows_errors() {
        let set = CompositionSet::new(
            labels(&["a", "b", "c"]),
            vec!["1".into(), "2".into()],
            vec![vec![1.0, 2.0, 3.0], vec![2.0, 1.0, 4.0]],
            vec![],
        )
        .unwrap();
        assert!(matches!(set.biplot(), Err(CoreError::NotEnoughRows { .. })));
    }

    #[test]
    fn planar_three_part_data_is_fully_explained() {
        // Compositions varying in only two log-ratio directions leave the
        // third clr dimension empty, so two dimensions explain everything.
        let mut values = Vec::new();
        for i in 0..8 {
            let t = i as f64 * 0.31;
            // log x = (t, -t, 0.5 t) lies in a 2-D subspace.
            values.push(vec![t.exp(), (-t).exp(), (0.5 * t + 0.1 * (i % 3) as f64).exp()]);
        }
        let set = CompositionSet::new(
            labels(&["a", "b", "c"]),
            (1..=8).map(|i| i.to_string()).collect(),
            values,
            vec![],
        )
        .unwrap();
        let model = set.biplot().unwrap();
        assert!((model.explained_variance_fraction - 1.0).abs() < 1e-10);
        let total: f64 = model.explained_fractions.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_part_link_projection_is_exact() {
        let values = vec![
            vec![1.0, 9.0],
            vec![2.0, 7.0],
            vec![5.0, 5.0],
            vec![7.0, 2.0],
            vec![9.0, 1.0],
        ];
        let set = CompositionSet::new(
            labels(&["a", "b"]),
            (1..=5).map(|i| i.to_string()).collect(),
            values,
            vec![],
        )
        .unwrap();
        let model = set.biplot().unwrap();
        let link = model.link_projection("a", "b", &set).unwrap();
        assert!((link.rank_correlation - 1.0).abs() < 1e-12);
    }

    #[test]
    fn self_link_is_rejected() {
        let values = vec![
            vec![1.0, 9.0, 2.0],
            vec![2.0, 7.0, 3.0],
            vec![5.0, 5.0, 1.0],
            vec![7.0, 2.0, 8.0],
        ];
        let set = CompositionSet::new(
            labels(&["a", "b", "c"]),
            (1..=4).map(|i| i.to_string()).collect(),
            values,
            vec![],
        )
        .unwrap();
        let model = set.biplot().unwrap();
        assert!(model.link_projection("a", "a", &set).is_err());
    }

    #[test]
    fn spearman_handles_perfect_and_reversed_orderings() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [10.0, 20.0, 30.0, 40.0];
        assert!((spearman(&a, &b) - 1.0).abs() < 1e-15);
        let c = [4.0, 3.0, 2.0, 1.0];
        assert!((spearman(&a, &c) + 1.0).abs() < 1e-15);
    }
}
