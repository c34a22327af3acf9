//! Compositional analysis of financial statements.
//!
//! Accounting figures enter as strictly positive parts of a composition;
//! every analysis works on ratios of parts, so results are invariant to firm
//! size. The toolkit covers log-ratio transforms (pairwise, clr, ilr),
//! geometric-mean industry centres and the standard ratios derived from
//! them, covariance biplots, k-means profiling with internal validity
//! indices, and least-squares regression of log-ratios on external firm
//! indicators.
//!
//! All types are immutable after construction and all operations are pure;
//! everything is safe to share across threads.

pub mod composition;
pub mod graph;
pub mod multivariate;
pub mod ratios;
pub mod regress;
pub mod transforms;
pub mod zeros;

mod error;

pub use composition::{
    Composition, CompositionSet, CompositionalCentre, ExtraColumn, ExtraValue, PartLabel,
    Violation, ViolationKind, CLOSURE_TOL,
};
pub use error::{CoreError, Result};
pub use graph::{
    DerivationPath, DerivationTerm, GraphDiagnosis, GraphValidation, LogRatioGraph,
};
pub use multivariate::{
    calinski_harabasz, silhouette, spearman, BiplotModel, ClusterModel, LinkProjection,
    SweepRow, SweepTable,
};
pub use ratios::{
    GroupRatioRow, GroupRatioTable, RatioMeanDiagnostic, RatioScheme, SchemeKind, StandardRatios,
};
pub use regress::{
    hypothesis_table, ols, ols_matrix, student_t_p_two_sided, student_t_sf, DesignMatrix,
    HypothesisRow, RegressionFit, SIGNIFICANCE_LEVEL,
};
pub use transforms::{
    scaling_constant, LogRatioKind, LogRatioMatrix, LogRatioSpec, SbpMatrix, SbpViolation,
};
pub use zeros::{DetectionLimits, ZeroReport, DEFAULT_ZERO_FRACTION, ZERO_FLAG_THRESHOLD};
