//! Exact symbolic and numeric machinery for polarized Poisson structures,
//! k-symplectic geometry and Nambu dynamics on canonical adapted charts.
//!
//! Functions are polynomials with exact rational coefficients, so every
//! algebraic identity is decided by structural equality. Flows are
//! integrated numerically in [`dynamics`].

pub mod chart;
pub mod dynamics;
pub mod geometry;
pub mod hamiltonian;
pub mod matrix;
pub mod nambu;
pub mod parse;
pub mod poly;
pub mod properties;
pub mod random;
pub mod rational;

pub use chart::{Chart, ChartError};
pub use dynamics::{
    compare_flows, conservation_report, rk4_integrate, ConservationReport, DynamicsError, FlowComparison, Trajectory,
};
pub use geometry::{
    check_ksymplectic, differential, exterior_derivative_one_form, interior_product, is_basic, xi_pairing,
    GeometryError, KSymplecticReport, KSymplecticStructure, OneForm, OneFormRk, RkMap, VectorField,
};
pub use hamiltonian::{
    apply_poisson, bracket, bracket_maps, bracket_via_theta, canonical_poisson_tensor, classical_bracket,
    classical_jacobi_residual, coupled_poisson_tensor, decompose_polarized, hamiltonian_field, jacobi_residual,
    lie_bracket, zeta, zeta_inverse, GeneralPoissonTensor, HamiltonianError, NotPolarizedReason, PolarizedForm, WIndex,
};
pub use matrix::RationalMatrix;
pub use nambu::{
    jacobian_det, levi_civita, nambu_bracket_r3n, nambu_field_r3n, nambu_field_rk1, verify_relation_r3n,
    verify_relation_rk1, NambuError, NambuSpaceR3n, NambuSpaceRk1, RelationReport,
};
pub use parse::{parse_poly, print_poly, ParseError, ParseErrorKind};
pub use poly::{PolyError, Polynomial};
pub use random::{PolyGenerator, DEFAULT_SEED};
pub use rational::Rational;
