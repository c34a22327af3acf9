//! k-means on centred log-ratios.
//!
//! Euclidean distance between clr rows equals the Aitchison distance between
//! the underlying compositions, so Lloyd's iteration on the clr matrix is a
//! compositional clustering. Each run restarts from k distinct firms drawn
//! with a seeded generator; the restart with the smallest within-cluster sum
//! of squares wins, ties breaking toward the earlier restart. Results are
//! fully determined by (seed, restarts, data order).

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::composition::{CompositionalCentre, CompositionSet};
use crate::error::{CoreError, Result};

const MAX_ITER: usize = 500;

/// Winning clustering plus its quality indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    pub k: usize,
    /// Cluster index per firm, relabelled by first appearance.
    pub assignment: Vec<usize>,
    pub sizes: Vec<usize>,
    /// Arithmetic means of the clr rows per cluster.
    pub clr_centroids: Vec<Vec<f64>>,
    /// Compositional centre per cluster; equals closure(exp(centroid)).
    pub centres: Vec<CompositionalCentre>,
    pub within_ss: f64,
    pub silhouette: f64,
    pub calinski_harabasz: f64,
    pub restarts: usize,
    pub seed: u64,
}

/// One row of a k sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub k: usize,
    pub within_ss: f64,
    pub silhouette: f64,
    pub calinski_harabasz: f64,
}

/// Index table over a range of cluster counts.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub best_silhouette_k: usize,
    pub best_calinski_harabasz_k: usize,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn cluster_means(rows: &[Vec<f64>], assignment: &[usize], k: usize) -> Vec<Vec<f64>> {
    let d = rows[0].len();
    let mut sums = vec![vec![0.0; d]; k];
    let mut counts = vec![0usize; k];
    for (row, &c) in rows.iter().zip(assignment) {
        counts[c] += 1;
        for (s, v) in sums[c].iter_mut().zip(row) {
            *s += v;
        }
    }
    for (sum, &count) in sums.iter_mut().zip(&counts) {
        if count > 0 {
            for s in sum.iter_mut() {
                *s /= count as f64;
            }
        }
    }
    sums
}

fn within_ss_of(rows: &[Vec<f64>], assignment: &[usize], k: usize) -> f64 {
    let means = cluster_means(rows, assignment, k);
    rows.iter()
        .zip(assignment)
        .map(|(row, &c)| squared_distance(row, &means[c]))
        .sum()
}

/// Lloyd's iteration from the given initial centroids. Ties in the
/// assignment step break toward the lowest cluster index; a cluster that
/// empties is reseeded to the point farthest from its assigned centroid.
fn lloyd(rows: &[Vec<f64>], mut centroids: Vec<Vec<f64>>) -> Vec<usize> {
    let k = centroids.len();
    let n = rows.len();
    let mut assignment = vec![usize::MAX; n];
    for _ in 0..MAX_ITER {
        let mut next = vec![0usize; n];
        for (i, row) in rows.iter().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = squared_distance(row, centroid);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            next[i] = best;
        }

        // Reseed any emptied cluster to the farthest point. Only points
        // from clusters with at least two members are candidates, so the
        // donor cluster never empties in turn (n >= k + 1 guarantees one).
        loop {
            let mut counts = vec![0usize; k];
            for &c in &next {
                counts[c] += 1;
            }
            let Some(empty) = counts.iter().position(|&c| c == 0) else {
                break;
            };
            let farthest = (0..n)
                .filter(|&i| counts[next[i]] >= 2)
                .max_by(|&a, &b| {
                    let da = squared_distance(&rows[a], &centroids[next[a]]);
                    let db = squared_distance(&rows[b], &centroids[next[b]]);
                    da.partial_cmp(&db).expect("finite distances")
                })
                .expect("some cluster has two members when one is empty");
            next[farthest] = empty;
        }

        if next == assignment {
            break;
        }
        assignment = next;
        centroids = cluster_means(rows, &assignment, k);
    }
    assignment
}

/// Relabels clusters by first appearance so output is stable across
/// label permutations of the same partition.
fn canonical_labels(assignment: &[usize], k: usize) -> Vec<usize> {
    let mut map = vec![usize::MAX; k];
    let mut next = 0;
    let mut out = Vec::with_capacity(assignment.len());
    for &c in assignment {
        if map[c] == usize::MAX {
            map[c] = next;
            next += 1;
        }
        out.push(map[c]);
    }
    out
}

/// Mean silhouette width over all points, Euclidean distances.
/// Points in singleton clusters score zero.
pub fn silhouette(rows: &[Vec<f64>], assignment: &[usize]) -> Result<f64> {
    let n = rows.len();
    let k = assignment.iter().copied().max().map_or(0, |m| m + 1);
    if k < 2 {
        return Err(CoreError::ClusterCountOutOfRange { k, n });
    }
    let mut counts = vec![0usize; k];
    for &c in assignment {
        counts[c] += 1;
    }
    if counts.iter().any(|&c| c == 0) {
        return Err(CoreError::EmptyGroup);
    }

    let mut total = 0.0;
    for i in 0..n {
        let own = assignment[i];
        if counts[own] == 1 {
            continue; // singleton scores 0
        }
        let mut sums = vec![0.0; k];
        for j in 0..n {
            if j != i {
                sums[assignment[j]] += squared_distance(&rows[i], &rows[j]).sqrt();
            }
        }
        let a = sums[own] / (counts[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own)
            .map(|c| sums[c] / counts[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / n as f64)
}

/// Between/within variance ratio index; +infinity when within is zero.
pub fn calinski_harabasz(rows: &[Vec<f64>], assignment: &[usize]) -> Result<f64> {
    let n = rows.len();
    let k = assignment.iter().copied().max().map_or(0, |m| m + 1);
    if k < 2 || k > n.saturating_sub(1) {
        return Err(CoreError::ClusterCountOutOfRange { k, n });
    }
    let d = rows[0].len();
    let mut grand = vec![0.0; d];
    for row in rows {
        for (g, v) in grand.iter_mut().zip(row) {
            *g += v;
        }
    }
    for g in &mut grand {
        *g /= n as f64;
    }
    let means = cluster_means(rows, assignment, k);
    let mut counts = vec![0usize; k];
    for &c in assignment {
        counts[c] += 1;
    }
    if counts.iter().any(|&c| c == 0) {
        return Err(CoreError::EmptyGroup);
    }
    let between: f64 = (0..k)
        .map(|c| counts[c] as f64 * squared_distance(&means[c], &grand))
        .sum();
    let within = within_ss_of(rows, assignment, k);
    if within == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((between / (k - 1) as f64) / (within / (n - k) as f64))
}

impl CompositionSet {
    /// Best-of-`restarts` k-means on this set's clr rows.
    pub fn kmeans_clr(&self, k: usize, restarts: usize, seed: u64) -> Result<ClusterModel> {
        let n = self.n();
        if k < 2 || k + 1 > n {
            return Err(CoreError::ClusterCountOutOfRange { k, n });
        }
        let restarts = restarts.max(1);
        let clr = self.clr()?;
        let rows = clr.rows();

        // Pre-draw one sub-seed per restart so restarts are independent.
        let mut master = ChaCha8Rng::seed_from_u64(seed);
        let sub_seeds: Vec<u64> = (0..restarts).map(|_| rand::Rng::random(&mut master)).collect();

        let mut best: Option<(f64, Vec<usize>)> = None;
        for sub in sub_seeds {
            let mut rng = ChaCha8Rng::seed_from_u64(sub);
            let chosen = sample(&mut rng, n, k);
            let centroids: Vec<Vec<f64>> = chosen.iter().map(|i| rows[i].clone()).collect();
            let assignment = lloyd(rows, centroids);
            let wss = within_ss_of(rows, &assignment, k);
            let better = match &best {
                None => true,
                Some((best_wss, _)) => wss < *best_wss,
            };
            if better {
                best = Some((wss, assignment));
            }
        }
        let (within_ss, raw_assignment) = best.expect("at least one restart");
        let assignment = canonical_labels(&raw_assignment, k);

        let mut sizes = vec![0usize; k];
        for &c in &assignment {
            sizes[c] += 1;
        }
        debug_assert!(sizes.iter().all(|&s| s > 0));

        let clr_centroids = cluster_means(rows, &assignment, k);
        let mut centres = Vec::with_capacity(k);
        for c in 0..k {
            let members: Vec<usize> = (0..n).filter(|&i| assignment[i] == c).collect();
            centres.push(self.compositional_centre(Some(&members))?);
        }
        let silhouette = silhouette(rows, &assignment)?;
        let calinski_harabasz = calinski_harabasz(rows, &assignment)?;

        Ok(ClusterModel {
            k,
            assignment,
            sizes,
            clr_centroids,
            centres,
            within_ss,
            silhouette,
            calinski_harabasz,
            restarts,
            seed,
        })
    }

    /// Runs `kmeans_clr` for every k in `k_min..=k_max` with a shared seed.
    pub fn sweep_k(
        &self,
        k_min: usize,
        k_max: usize,
        restarts: usize,
        seed: u64,
    ) -> Result<SweepTable> {
        if k_min < 2 || k_max < k_min || k_max + 1 > self.n() {
            return Err(CoreError::ClusterCountOutOfRange {
                k: k_max,
                n: self.n(),
            });
        }
        let mut rows = Vec::new();
        for k in k_min..=k_max {
            let model = self.kmeans_clr(k, restarts, seed)?;
            rows.push(SweepRow {
                k,
                within_ss: model.within_ss,
                silhouette: model.silhouette,
                calinski_harabasz: model.calinski_harabasz,
            });
        }
        let argmax = |f: fn(&SweepRow) -> f64| {
            rows.iter()
                .max_by(|a, b| f(a).partial_cmp(&f(b)).expect("finite index"))
                .expect("nonempty sweep")
                .k
        };
        Ok(SweepTable {
            best_silhouette_k: argmax(|r| r.silhouette),
            best_calinski_harabasz_k: argmax(|r| r.calinski_harabasz),
            rows,
        })
    }
}
