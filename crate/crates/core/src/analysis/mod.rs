//! Hamming metrics, the GH test, kernel, rank, and the per-signature report.

pub mod kernel;
pub mod metrics;
mod report;
mod sampled;

pub use kernel::{
    canonical_basis, is_linear, is_linear_by_kernel, kernel, kernel_basis, kernel_basis_brute,
    kernel_capped, rank, scaled_generator_images, subspace_digest, DEFAULT_KERNEL_CAP,
};
pub use metrics::{
    hamming_distance, hamming_weight, is_gh_code, min_distance, word_string, GhFailure, GhVerdict,
};
pub use report::{
    analyze_matrix, checks, max_size_from_env, verify_theorems, AnalysisOptions, AnalysisReport,
    Check, CheckStatus, KernelMode, KernelSource, Tier, MAX_SIZE_ENV,
};
