//! Quantizer design: cell pmfs under both hypotheses, information measures,
//! design objectives and the threshold search.

mod cache;
mod info;
mod kth_root;
mod objective;
mod optimize;
mod pmf;

pub use cache::{CacheKey, CacheRecord, ThresholdCache};
pub use info::{entropy, j_divergence, jd_decomposition, kl_divergence, JdDecomposition};
pub use kth_root::{kth_root_from_mass, kth_root_quantizer};
pub use objective::{
    average_entropy_objective, histogram_objective, jd_objective, objective_value, ObjectiveKind,
    OBJECTIVE_QUADRATURE_TOL,
};
pub use optimize::{optimize_thresholds, OptimizedThresholds, OptimizerSettings};
pub use pmf::{averaged_pmf_h1, cell_pmf_given_mean, pmf_h0};
