//! Exact and asymptotic counting of lattice walks confined to the type-B Weyl
//! chamber `0 < x_1 < … < x_k`, plus exact and numeric checks of the
//! determinant, character and Selberg-integral identities behind the asymptotics.

pub mod asym;
pub mod detlab;
pub mod error;
pub mod exact;
pub mod presets;
pub mod rational;
pub mod stepmodel;
pub mod verify;

pub use asym::{asym_fixed, asym_free, compare_series, fit_decay, support_positive, AsymptoticEstimate, ConvergenceReport, Endpoint};
pub use detlab::{IdentityReport, Residual};
pub use error::{ChamberError, Result};
pub use exact::{
    count_confined, count_confined_free, count_reflection, count_reflection_free, count_reflection_naive,
    count_unconstrained, CountValue, Counter, FrontierDistribution,
};
pub use presets::{preset_asym, preset_spec, EndpointOverride, PresetId, PresetInstance};
pub use stepmodel::{
    composite_gf_value, gaussian_expansion, in_chamber, lattice_contains, maximal_points, s_one, AtomicKind,
    ChamberPoint, CompositeSpec, GaussianExpansion, LatticePoint, MaximalPointSet,
};
pub use verify::{run_suite, Suite, SuiteReport};
