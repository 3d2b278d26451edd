//! Exact construction and verification of Ulrich bundles on nonsingular
//! cubic surfaces in `P^3`, represented as matrix factorizations over a
//! large prime field.
//!
//! Layers, bottom up:
//! - [`field`], [`poly`], [`ring`], [`linalg`]: arithmetic of forms and dense
//!   matrices over `F_p`, graded rings `R = k[x0..x3]` and `R_X = R/(f)`.
//! - [`graded`], [`resolution`], [`points`]: graded maps, degree slices,
//!   syzygies, minimal resolutions, Hilbert functions, ideals of points.
//! - [`mf`]: matrix factorizations `(phi, psi)` with `phi psi = f Id`.
//! - [`modules`]: Hom and Ext in degree zero, extensions, isomorphism tests,
//!   hyperplane restriction.
//! - [`pipeline`]: the end-to-end constructions and verification reports.
//! - [`json`]: the canonical JSON encodings.

pub mod context;
pub mod error;
pub mod field;
pub mod graded;
pub mod json;
pub mod linalg;
pub mod mf;
pub mod modules;
pub mod pipeline;
pub mod points;
pub mod poly;
pub mod resolution;
pub mod ring;
pub mod rng;

pub use context::SurfaceContext;
pub use error::{Error, Result};
pub use field::{FieldElem, PrimeField, DEFAULT_PRIME};
pub use graded::{GradedFree, GradedMap, GradedModulePresentation};
pub use linalg::Exec;
pub use mf::MatrixFactorization;
pub use poly::{Form, Monomial};
pub use resolution::BettiTable;
pub use ring::Ring;
