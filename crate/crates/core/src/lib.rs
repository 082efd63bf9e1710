//! Algebraic curvature tensors, Jacobi operator spectra and the factorization
//! of two-root tensors with a simple root.
//!
//! Indices are 0-based throughout the library. Tensor files use 1-based
//! indices (see [`tensor_io`]).

pub mod admissibility;
pub mod cli;
pub mod curvature;
pub mod error;
pub mod factorize;
pub mod linalg;
pub mod probes;
pub mod report;
pub mod spectral;
pub mod tensor_io;

pub use admissibility::{admissible, dimension_screen, rho, Admissibility, DimensionScreen, MultiplicityPattern, ScreenVerdict};
pub use curvature::{
    build_act, build_r0, build_rp, build_two_root_model, project_curvature, sectional_curvature, shift,
    two_root_tensor, validate_symmetries, AlgebraicCurvatureTensor, Sign, SkewEndomorphism, SymmetryReport,
    TwoRootModelParams,
};
pub use error::{Error, Result};
pub use factorize::{
    canonical_frame, classify_two_root_simple, estimate_mu, extract_p, factor_family, quadratic_form_family,
    reconstruct, CanonicalFrame, MuEstimate, PipelineConfig, PipelineOutcome, PipelineReport, QuadraticFormFamily,
    SkewStructure, Stage,
};
pub use probes::{
    duality_check, eigenvalue_bounds_at, eigenvalue_bounds_check, emex_check, extrema_probe, rotation_lemma_check,
    rotation_lemma_on_pairs, CheckOutcome, DualPair, DualityMode, DualityOutcome, ExtremaReport, ViolationRecord,
};
pub use spectral::{
    classify_k_root, eigenspaces, jacobi_matrix, k_stein_invariants, osserman_test, reduced_jacobi, spectral_profile,
    EigenspacePair, KRootReport, KRootVerdict, OssermanReport, RootPair, SpectralProfile, SteinReport,
};
