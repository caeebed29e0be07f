//! Tautological relations on moduli of stable curves from r-torsion line
//! bundles, generated and verified with exact rational arithmetic.
//!
//! The pipeline runs bottom-up:
//! [`exactnum`] (rationals, Bernoulli data) → [`graphs`] (stable graphs) →
//! [`wkint`] (ψ/κ intersection numbers) → [`strata`] (the strata algebra) →
//! [`chiodo`] (Chern character of the root) → [`relgen`] (relations and their
//! pushforward) → [`verify`] (pairings against complementary monomials).

pub mod chiodo;
pub mod error;
pub mod exactnum;
pub mod graphs;
pub mod relgen;
pub mod strata;
pub mod verify;
pub mod wkint;

pub use chiodo::{chiodo_chern_char, validate_spec, ChernCharExpr, RelationSpec, SpecError};
pub use error::{Error, Result};
pub use exactnum::{bernoulli_number, bernoulli_poly, Rational};
pub use graphs::{enumerate_stable_graphs, StableGraph, Vertex};
pub use relgen::{exp_series_relation, pushforward_relation, relation_bzr, BZrRelation, MultiplicityModel};
pub use strata::{Ambient, Limits, TautExpr};
pub use verify::{complementary_monomials, verify, VerificationReport};
pub use wkint::{kappa_psi_integral, psi_integral};
