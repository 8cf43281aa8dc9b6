//! Exact invariants of Klein surfaces.
//!
//! A Klein surface is a Riemann surface together with an anti-holomorphic
//! involution; its topological type is a triple `(g, n, a)` recording the
//! genus, the number of fixed circles, and whether the quotient surface is
//! orientable.  This crate computes, entirely in exact arithmetic:
//!
//! * standard integer models of the induced involution on first cohomology
//!   ([`klein`]),
//! * theta characteristics encoded as quadratic forms over GF(2) satisfying
//!   the Riemann-Mumford relation, with Arf invariants and the translation
//!   torsor structure ([`theta_form`]),
//! * Appell-Humbert data (alternating forms plus semi-characters) for
//!   holomorphic line bundles on the Picard torus ([`appell_humbert`]),
//! * the component group of the real Picard torus and the first
//!   Stiefel-Whitney class of the fixed-point bundle of a symmetric theta
//!   bundle on each component ([`stiefel_whitney`]).
//!
//! A floating-point layer ([`analytic`]) cross-checks the exact results
//! against Riemann theta series, Chern-connection holonomy, and curvature
//! normalization.  [`verify`] bundles all consistency suites behind a single
//! entry point used by the command-line tool and the acceptance tests.

pub mod analytic;
pub mod appell_humbert;
pub mod klein;
pub mod lattice;
pub(crate) mod rng;
pub mod stiefel_whitney;
pub mod theta_form;
pub mod verify;

pub use analytic::{PeriodData, ThetaSeriesParams};
pub use appell_humbert::{AHDatum, SemiCharacter};
pub use klein::{RealCurveModel, TopologicalType};
pub use lattice::{AntiSymplecticInvolution, FiniteQuotient, IntegerMatrix, SymplecticLattice};
pub use stiefel_whitney::{RealComponent, SWTable};
pub use theta_form::{QuadraticFormZ2, Z2Vector};
