//! Multivariate views of a composition set: the covariance biplot of the
//! centred log-ratios and k-means clustering on the same coordinates.

mod biplot;
mod kmeans;
mod svd;

pub use biplot::{spearman, BiplotModel, LinkProjection, MIN_LINK_LENGTH};
pub use kmeans::{
    calinski_harabasz, silhouette, ClusterModel, SweepRow, SweepTable,
};
