//! Word metrics, visual metrics and Lipschitz/Hölder audits for endomorphisms
//! of finitely generated free groups.

pub mod audit;
pub mod casebook;
pub mod error;
pub mod lipschitz;
pub mod metric;
pub mod morphism;
pub mod word;

pub use audit::{
    estimate_seminorm, frontier, metric_equiv_audit, pseudometric_dbar, q_min, qie_frontier,
    AuditConfig, HolderFrontier, SeminormEstimate, SeminormValue,
};
pub use casebook::{run_casebook, CaseReport, CasebookOptions};
pub use error::{Error, Result};
pub use lipschitz::{classify_per_inn, Classification, Obstruction};
pub use metric::{
    dist_basis, dist_genset, four_point_deficiency, gromov_product, mutual_bound_n,
    quasigeodesic_constants, rho, sigma, Gamma, GeneratingSet, QuasiGeodesicConstants, Rational,
    Sigma, VisualMetricSpec, VisualValue,
};
pub use morphism::{Endomorphism, SignedPermutation, StallingsGraph};
pub use word::{ball, sphere, Basis, Generator, Letter, Word};
