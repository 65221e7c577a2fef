//! Numerical toolkit for Schrödinger operators `Δ + V` on flat cylinders
//! `N × [t0, t1]`.
//!
//! The library evolves truncated Fourier-mode Cauchy data, machine-checks the
//! energy identities and log-convexity (three circles) inequalities that
//! govern slice norms of solutions, computes per-mode Poincaré maps in
//! SL(2,ℝ) with their trace trichotomy, and carries the catenoid potential
//! `V(t) = 2 sech²(t)` as closed-form ground truth for all of it.
//!
//! Layout:
//! - [`basis`]: cross-section eigenvalue bookkeeping (circle, cluster model)
//! - [`potential`]: potentials as θ-Fourier stacks of t-profiles
//! - [`product`]: spectral projection of products `[Vu]_j` by convolution
//! - [`mode`]: single-mode ODE integration `w'' = (λ - V) w` and comparison
//! - [`field`]: coupled Galerkin evolution, slice energies, frequency, ω
//! - [`verify`]: toleranced checks of every identity/inequality, with an
//!   explicit constant ledger
//! - [`poincare`]: per-mode Poincaré maps, perturbation derivative,
//!   hyperbolization, periodic decay
//! - [`catenoid`]: closed forms, explicit Poincaré matrix, spectrum scan
//! - [`config`] / [`report`]: text config and CSV table parsing, deterministic
//!   JSON/CSV emission
//!
//! All values are immutable after construction and all operations are pure,
//! so everything here is safe to share across threads.

pub mod basis;
pub mod battery;
pub mod catenoid;
pub mod config;
pub mod field;
pub mod grid;
pub mod mode;
pub mod num;
pub mod poincare;
pub mod potential;
pub mod product;
pub mod report;
pub mod runner;
pub mod verify;

pub use basis::{choose_alpha_bar, cluster_value, CrossSection, SpectralBasis};
pub use field::{energy_profile, evolve_field, frequency_profile, symplectic_form, EnergyProfile, FieldTrajectory};
pub use grid::Grid;
pub use mode::{classify_growth, comparison_check, dim_bound, integrate_mode, GrowthClass, ModeTrajectory};
pub use poincare::{classify_matrix, compute_map, hyperbolize, periodic_mode_decay, perturbation_derivative, MapClass, PoincareMap};
pub use potential::{Potential, Profile};
pub use verify::{CheckOptions, CheckReport, ConstantLedger};

/// Errors shared by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate basis request: k_max = 0 (use circle_constants_only for the constants-only basis)")]
    DegenerateBasis,
    #[error("gap not found at truncation {truncation}: no eigenvalue gap exceeds {kappa}")]
    GapNotFound { truncation: usize, kappa: f64 },
    #[error("alpha-bar search exceeded the cluster cap {cap}")]
    AlphaBarSearchCap { cap: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("preset `{preset}` requires parameter `{param}`")]
    MissingParam { preset: String, param: String },
    #[error("non-finite potential value at t = {t}")]
    NonFinitePotential { t: f64 },
    #[error("radial decay bound violated: sup |e^{{2t}} V(e^t θ)| = {sup} exceeds C0 = {c0}")]
    DecayBoundViolated { sup: f64, c0: f64 },
    #[error("potential is not rotationally symmetric (θ-order {0})")]
    NotRotationallySymmetric(usize),
    #[error("span [{a}, {b}] is outside the potential domain [{t0}, {t1}]")]
    SpanOutsideDomain { a: f64, b: f64, t0: f64, t1: f64 },
    #[error("dynamic range exceeded at t = {t:.6}")]
    DynamicRange { t: f64 },
    #[error("incompatible truncations: coefficient length {got}, basis length {expected}")]
    IncompatibleTruncation { got: usize, expected: usize },
    #[error("comparison hypothesis w'' >= K^2 w violated at t = {t:.6}")]
    HypothesisViolated { t: f64 },
    #[error("trivial solution: trajectory is identically zero")]
    TrivialSolution,
    #[error("growth dichotomy violated: fitted rate {rate:.4} lies inside the forbidden band (+-{bound:.4})")]
    DichotomyViolated { rate: f64, bound: f64 },
    #[error("truncation too small: largest eigenvalue {lambda_max} does not exceed sup V = {sup_v}")]
    TruncationTooSmall { lambda_max: f64, sup_v: f64 },
    #[error("nodal slice: J(t) vanishes at t = {t:.6}")]
    NodalSlice { t: f64 },
    #[error("mismatched fields: {0}")]
    MismatchedFields(String),
    #[error("slice energy I(0) vanishes; cannot normalize")]
    ZeroInitialEnergy,
    #[error("no cut m satisfies the three circles conditions within truncation: {0}")]
    NoAdmissibleCut(String),
    #[error("alpha-bar constraint violated at m = {m}: {constraint}")]
    AlphaBarConstraint { m: usize, constraint: String },
    #[error("matrix is not symplectic: |det - 1| = {residual:.3e}")]
    NotSymplectic { residual: f64 },
    #[error("perturbation profile must vanish at the interval endpoints (got f(0) = {at_start:.3e}, f(l) = {at_end:.3e})")]
    EndpointCondition { at_start: f64, at_end: f64 },
    #[error("quadrature inconsistency: h and h/2 integrals disagree by {disagreement:.3e}")]
    QuadratureInconsistent { disagreement: f64 },
    #[error("hyperbolization sweep cap reached; |trace| stayed at {trace:.6}")]
    SweepCapReached { trace: f64 },
    #[error("empty report list")]
    EmptyReports,
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
