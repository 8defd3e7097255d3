//! Numerical invariants of Hilbert modules of holomorphic functions on the
//! polydisc: joint-kernel dimensions of adjoint multiplication tuples,
//! canonical holomorphic frames, normalized metric jets and curvature,
//! monomial-ideal stalk combinatorics, and boundary-rank privilege checks.

pub mod curvature;
pub mod error;
pub mod frame;
pub mod ideal;
pub mod kernel;
pub mod linop;
pub mod module;
pub mod multiindex;
pub mod poly;
pub mod privilege;
pub mod stalk;

pub use curvature::{
    compare_curvature, curvature_at, nk_curvature_closed, nk_curvature_numeric, nk_module,
    section_limit, ComparisonVerdict, CurvatureConvention, CurvatureTensor, NKSection,
};
pub use error::{Error, Result};
pub use frame::{
    frame_annihilation_residual, frame_series, metric_jet, normalize_jet, polar_parts,
    FrameSeries, MetricJet, PolarParts,
};
pub use ideal::{IdealSpec, MonomialIdeal};
pub use kernel::{kernel_weight, DiagonalKernelSpec};
pub use linop::{
    adjoint_at, eigenvector_residual, joint_kernel, mult_adjoint, mult_operator, null_space_qr,
    JointKernel, OperatorMatrix, StackedOperator, DEFAULT_RANK_EPS,
};
pub use module::{build_truncated_module, KernelVector, TruncatedModule};
pub use multiindex::MultiIndex;
pub use poly::Poly;
pub use privilege::{
    boundary_samples, privilege_verdict, Domain, PolyMatrix, PrivilegeReport, PrivilegeVerdict,
};
pub use stalk::{
    characteristic_space, gleason_report, minimal_generators, tilde_space, CharacteristicSpace,
    GeneratorInput, GleasonReport, StalkGenerators,
};
