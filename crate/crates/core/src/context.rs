use std::sync::Arc;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::IncrementalBasis;
use crate::poly::{monomial_basis, Form};
use crate::ring::Ring;
use crate::rng::seeded;

/// Degree of the surface.
pub const CUBIC_DEGREE: i32 = 3;
/// `ω_X = O_X(-1)`.
pub const CANONICAL_TWIST: i32 = -1;

/// A nonsingular cubic surface `X = V(f) ⊂ P^3` over `F_p`, with its
/// polynomial ring `R` and coordinate ring `R_X = R/(f)`.
#[derive(Clone, Debug)]
pub struct SurfaceContext {
    pub field: PrimeField,
    pub f: Form,
    pub poly: Arc<Ring>,
    pub surface: Arc<Ring>,
}

impl PartialEq for SurfaceContext {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.f == other.f
    }
}

impl SurfaceContext {
    /// Validates `f` (cubic, nonsingular) and builds the rings.
    pub fn new(field: PrimeField, f: Form) -> Result<Self> {
        if f.deg() != CUBIC_DEGREE || f.is_zero() {
            return Err(Error::BadCubic(format!("expected a nonzero cubic, got degree {}", f.deg())));
        }
        if field.p() == 3 {
            return Err(Error::BadCubic("characteristic 3 is not supported".into()));
        }
        let poly = Ring::polynomial(field, 4);
        if !is_nonsingular(&poly, &f) {
            return Err(Error::BadCubic("the partial derivatives have a common zero".into()));
        }
        let surface = Ring::hypersurface(poly.clone(), f.clone())?;
        Ok(SurfaceContext {
            field,
            f,
            poly,
            surface,
        })
    }

    /// A random nonsingular cubic determined by `seed`.
    pub fn random(field: PrimeField, seed: u64) -> Result<Self> {
        let mut rng = seeded(seed, "cubic");
        let basis = monomial_basis(3);
        for _ in 0..20 {
            let f = Form::from_terms(
                field,
                3,
                basis.iter().map(|m| (*m, rng.gen_range(0..field.p()))),
            )?;
            match Self::new(field, f) {
                Ok(ctx) => return Ok(ctx),
                Err(Error::BadCubic(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::BudgetExhausted {
            what: "random nonsingular cubic".into(),
            attempts: 20,
        })
    }

    pub fn degree(&self) -> i32 {
        CUBIC_DEGREE
    }

    pub fn canonical_twist(&self) -> i32 {
        CANONICAL_TWIST
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }
}

/// Exact smoothness test for a cubic surface in characteristic `p ∤ 3`.
///
/// By Euler's relation `X` is singular iff the four partials have a common
/// projective zero. Four quadrics without common zeros form a regular
/// sequence, whose quotient has Hilbert function `1, 4, 6, 4, 1, 0`; so `X`
/// is nonsingular iff the Jacobian ideal fills all of `R_5`. This also rules
/// out reducible cubics, which are always singular.
pub fn is_nonsingular(poly: &Ring, f: &Form) -> bool {
    let k = poly.field();
    let partials: Vec<Form> = (0..4).map(|i| f.derivative(k, i)).collect();
    let cubics = monomial_basis(3);
    let mut inc = IncrementalBasis::new(k, poly.dim(5));
    for q in partials.iter().filter(|q| !q.is_zero()) {
        for m in &cubics {
            let prod = Form::monomial(k, *m, 1).mul(k, q);
            inc.insert(&poly.form_to_vec(&prod));
            if inc.is_full() {
                return true;
            }
        }
    }
    inc.is_full()
}
