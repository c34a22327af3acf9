//! Thin SVD by one-sided Jacobi rotations.
//!
//! Intended for tall skinny matrices (n firms by D parts, D small). Columns
//! of a working copy are rotated in pairs until mutually orthogonal; the
//! singular values are then the column norms. One-sided Jacobi converges to
//! high relative accuracy, which the variance-fraction invariants here rely
//! on.

/// Thin SVD `A = U diag(s) V^T` with `U` n x d, `s` and `V` d x d.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    /// Column-major left singular vectors (n x d); columns with zero
    /// singular value are zero.
    pub u: Vec<Vec<f64>>,
    pub singular_values: Vec<f64>,
    /// Column-major right singular vectors (d x d).
    pub v: Vec<Vec<f64>>,
}

const MAX_SWEEPS: usize = 60;
const ORTH_TOL: f64 = 1e-15;

/// Computes the thin SVD of a row-major n x d matrix, singular values
/// sorted descending.
pub fn thin_svd(rows: &[Vec<f64>]) -> ThinSvd {
    let n = rows.len();
    let d = if n == 0 { 0 } else { rows[0].len() };

    // Column-major working copy.
    let mut a: Vec<Vec<f64>> = (0..d).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..d)
        .map(|j| (0..d).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..d {
            for q in (p + 1)..d {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for i in 0..n {
                    app += a[p][i] * a[p][i];
                    aqq += a[q][i] * a[q][i];
                    apq += a[p][i] * a[q][i];
                }
                if apq.abs() <= ORTH_TOL * (app * aqq).sqrt() || apq == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (aqq - app) / (2.0 * apq);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let (x, y) = (a[p][i], a[q][i]);
                    a[p][i] = c * x - s * y;
                    a[q][i] = s * x + c * y;
                }
                for i in 0..d {
                    let (x, y) = (v[p][i], v[q][i]);
                    v[p][i] = c * x - s * y;
                    v[q][i] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    let norms: Vec<f64> = a
        .iter()
        .map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite norms"));

    let mut u = Vec::with_capacity(d);
    let mut singular_values = Vec::with_capacity(d);
    let mut v_sorted = Vec::with_capacity(d);
    for &j in &order {
        let sigma = norms[j];
        singular_values.push(sigma);
        if sigma > 0.0 {
            u.push(a[j].iter().map(|x| x / sigma).collect());
        } else {
            u.push(vec![0.0; n]);
        }
        v_sorted.push(v[j].clone());
    }

    ThinSvd {
        u,
        singular_values,
        v: v_sorted,
    }
}
