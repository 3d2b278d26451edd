//! Matrix factorizations `(phi, psi)` of the cubic.
//!
//! Convention: `phi: F -> G` and `psi: G(-3) -> F` over `R`, with
//! `phi ∘ psi = f·Id_G` and `psi ∘ phi(-3) = f·Id_F`. The module presented is
//! `coker(phi)` over `R_X`. A normalized Ulrich bundle of rank `r` has
//! `phi: R(-1)^{3r} -> R^{3r}`.

use rand::Rng as _;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::context::{SurfaceContext, CUBIC_DEGREE};
use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::graded::{GradedFree, GradedMap, GradedModulePresentation};
use crate::linalg::Matrix;
use crate::poly::Form;
use crate::resolution::{image_generators, min_free_resolution, minimalize, DEFAULT_SLACK};
use crate::ring::Ring;

/// Default number of evaluation points for [`MatrixFactorization::rank_check`].
pub const RANK_CHECK_TRIALS: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFactorization {
    pub ctx: SurfaceContext,
    pub phi: GradedMap,
    pub psi: GradedMap,
}

/// First entry where a product differs from `f·Id`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MfFailure {
    /// `"phi*psi"` or `"psi*phi"`.
    pub product: String,
    pub row: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MfCheck {
    pub valid: bool,
    pub failure: Option<MfFailure>,
}

/// Outcome of the numeric determinant test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RankCheck {
    pub passed: bool,
    /// `det phi = unit · f^r` with this unit, read off the first usable point.
    pub unit: Option<FieldElem>,
    pub failing_point: Option<[FieldElem; 4]>,
    pub trials: usize,
}

impl MatrixFactorization {
    /// Builds the pair after checking shapes; call [`Self::verify`] for the identity.
    pub fn new(ctx: SurfaceContext, phi: GradedMap, psi: GradedMap) -> Result<Self> {
        if psi.source != phi.target.twist(-CUBIC_DEGREE) || psi.target != phi.source {
            return Err(Error::Shape(format!(
                "psi must map G(-3) -> F; got {:?} -> {:?} for phi {:?} -> {:?}",
                psi.source.twists, psi.target.twists, phi.source.twists, phi.target.twists
            )));
        }
        if phi.rows() != phi.cols() {
            return Err(Error::Shape(format!("phi is {}x{}, not square", phi.rows(), phi.cols())));
        }
        phi.check_homogeneous()?;
        psi.check_homogeneous()?;
        Ok(MatrixFactorization { ctx, phi, psi })
    }

    fn ring(&self) -> &Ring {
        &self.ctx.poly
    }

    pub fn size(&self) -> usize {
        self.phi.rows()
    }

    /// `phi ∘ psi = f·Id_G` and `psi ∘ phi(-3) = f·Id_F`, entry by entry.
    pub fn verify(&self) -> MfCheck {
        let ring = self.ring();
        let f = &self.ctx.f;
        let checks = [
            ("phi*psi", self.phi.compose(ring, &self.psi)),
            ("psi*phi", self.psi.compose(ring, &self.phi.twist(-CUBIC_DEGREE))),
        ];
        for (name, prod) in checks {
            let prod = match prod {
                Ok(p) => p,
                Err(_) => {
                    return MfCheck {
                        valid: false,
                        failure: Some(MfFailure {
                            product: name.into(),
                            row: 0,
                            col: 0,
                        }),
                    }
                }
            };
            for i in 0..prod.rows() {
                for j in 0..prod.cols() {
                    let e = prod.entry(i, j);
                    let ok = if i == j { e == f } else { e.is_zero() };
                    if !ok {
                        return MfCheck {
                            valid: false,
                            failure: Some(MfFailure {
                                product: name.into(),
                                row: i,
                                col: j,
                            }),
                        };
                    }
                }
            }
        }
        MfCheck {
            valid: true,
            failure: None,
        }
    }

    /// No nonzero constant entry in `phi` or `psi`.
    pub fn is_reduced(&self) -> bool {
        !self.phi.has_unit_entry() && !self.psi.has_unit_entry()
    }

    pub fn is_linear(&self) -> bool {
        self.phi.is_linear()
    }

    /// `deg det phi / 3`, the rank of `coker phi` on `X`.
    pub fn rank(&self) -> Option<usize> {
        let d = self.det_degree();
        (d >= 0 && d % CUBIC_DEGREE == 0).then_some((d / CUBIC_DEGREE) as usize)
    }

    fn det_degree(&self) -> i32 {
        self.phi.target.twists.iter().sum::<i32>() - self.phi.source.twists.iter().sum::<i32>()
    }

    /// Tests `det phi(P) = c · f(P)^r` at `trials` random points of `P^3` for
    /// one nonzero constant `c`. By Schwartz-Zippel a false pass has
    /// probability at most `(3r·3/p)^trials`.
    pub fn rank_check(&self, r: usize, trials: usize, rng: &mut ChaCha8Rng) -> RankCheck {
        let k = self.ctx.field;
        let mut out = RankCheck {
            passed: false,
            unit: None,
            failing_point: None,
            trials,
        };
        if self.det_degree() != CUBIC_DEGREE * r as i32 {
            return out;
        }
        let n = self.size();
        for _ in 0..trials {
            let p: [FieldElem; 4] = std::array::from_fn(|_| rng.gen_range(0..k.p()));
            let mut m = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    m.set(i, j, self.phi.entry(i, j).evaluate(k, &p));
                }
            }
            let det = m.det(k);
            let fr = k.pow(self.ctx.f.evaluate(k, &p), r as u64);
            let ok = match (out.unit, fr) {
                (_, 0) => det == 0,
                (None, _) => {
                    let c = k.mul(det, k.inv(fr));
                    out.unit = Some(c);
                    c != 0
                }
                (Some(c), _) => det == k.mul(c, fr),
            };
            if !ok {
                out.failing_point = Some(p);
                return out;
            }
        }
        out.passed = out.unit.is_some();
        out
    }

    /// `(phi^T(-3), psi^T(-6))`, presenting `Hom(E, R_X)`.
    pub fn dual(&self) -> MatrixFactorization {
        MatrixFactorization {
            ctx: self.ctx.clone(),
            phi: self.phi.transpose().twist(-CUBIC_DEGREE),
            psi: self.psi.transpose().twist(-2 * CUBIC_DEGREE),
        }
    }

    /// `(psi, phi(-3))`, presenting the first syzygy module over `R_X`.
    pub fn syzygy(&self) -> MatrixFactorization {
        MatrixFactorization {
            ctx: self.ctx.clone(),
            phi: self.psi.clone(),
            psi: self.phi.twist(-CUBIC_DEGREE),
        }
    }

    pub fn direct_sum(&self, other: &MatrixFactorization) -> Result<MatrixFactorization> {
        if self.ctx != other.ctx {
            return Err(Error::RingMismatch);
        }
        Ok(MatrixFactorization {
            ctx: self.ctx.clone(),
            phi: self.phi.direct_sum(&other.phi),
            psi: self.psi.direct_sum(&other.psi),
        })
    }

    pub fn twist(&self, k: i32) -> MatrixFactorization {
        MatrixFactorization {
            ctx: self.ctx.clone(),
            phi: self.phi.twist(k),
            psi: self.psi.twist(k),
        }
    }

    /// `coker(phi)` over `R_X`.
    pub fn module(&self) -> GradedModulePresentation {
        GradedModulePresentation::new(self.ctx.surface.clone(), self.phi.clone())
    }

    /// Number of minimal generators of `coker(phi)`, valid when reduced.
    pub fn mu(&self) -> usize {
        self.phi.rows()
    }
}

/// Solves `phi ∘ psi = f·Id` column by column in the degree slices of `R`.
pub fn solve_psi(ring: &Ring, f: &Form, phi: &GradedMap) -> Result<GradedMap> {
    let k = ring.field();
    let g = &phi.target;
    let mut cols = Vec::with_capacity(g.rank());
    for j in 0..g.rank() {
        let t = -g.twists[j] + CUBIC_DEGREE;
        let slice = phi.degree_slice(ring, t);
        let mut rhs = vec![Form::zero(0); g.rank()];
        for (i, e) in rhs.iter_mut().enumerate() {
            *e = if i == j { f.clone() } else { Form::zero(t + g.twists[i]) };
        }
        let b = g.element_to_vec(ring, t, &rhs);
        let x = slice
            .solve(k, &b)
            .ok_or_else(|| Error::NotMcm(format!("f·e_{j} is not in the image of phi")))?;
        cols.push(phi.source.vec_to_element(ring, t, &x));
    }
    GradedMap::from_columns(g.twist(-CUBIC_DEGREE), phi.source.clone(), &cols)
}

/// The factorization of an MCM module over `R_X`: `phi` is its minimal
/// presentation over `R`, which must be injective (projective dimension 1).
pub fn mf_from_presentation(ctx: &SurfaceContext, pres: &GradedModulePresentation) -> Result<MatrixFactorization> {
    if *pres.ring != *ctx.surface {
        return Err(Error::RingMismatch);
    }
    let over = minimalize(&pres.over_ambient());
    let phi = image_generators(&ctx.poly, &over.presentation);
    let square_injective = phi.rows() == phi.cols() && {
        let mut rng = crate::rng::seeded(0, "mf-injective");
        let k = ctx.field;
        let n = phi.rows();
        let p: [FieldElem; 4] = std::array::from_fn(|_| rng.gen_range(1..k.p()));
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, phi.entry(i, j).evaluate(k, &p));
            }
        }
        n == 0 || m.det(k) != 0
    };
    if !square_injective {
        let res = min_free_resolution(&over, 2, DEFAULT_SLACK);
        let betti = res.betti.steps.iter().map(Vec::len).collect::<Vec<_>>();
        return Err(Error::NotMcm(format!("resolution over R has ranks {betti:?}")));
    }
    let psi = solve_psi(&ctx.poly, &ctx.f, &phi)?;
    MatrixFactorization::new(ctx.clone(), phi, psi)
}

fn minor2(ring: &Ring, m: &GradedMap, r: [usize; 2], c: [usize; 2]) -> Form {
    let k = ring.field();
    let a = m.entry(r[0], c[0]).mul(k, m.entry(r[1], c[1]));
    let b = m.entry(r[0], c[1]).mul(k, m.entry(r[1], c[0]));
    let deg = m.entry_degree(r[0], c[0]) + m.entry_degree(r[1], c[1]);
    Form::zero(deg).add(k, &a).and_then(|s| s.sub(k, &b)).expect("minor degrees agree")
}

fn others(i: usize) -> [usize; 2] {
    match i {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    }
}

/// Determinant of a 3x3 homogeneous map, by cofactor expansion along row 0.
pub fn det3(ring: &Ring, phi: &GradedMap) -> Form {
    assert_eq!((phi.rows(), phi.cols()), (3, 3), "det3 needs a 3x3 map");
    let k = ring.field();
    let deg = phi.target.twists.iter().sum::<i32>() - phi.source.twists.iter().sum::<i32>();
    let mut acc = Form::zero(deg);
    for j in 0..3 {
        let term = phi.entry(0, j).mul(k, &minor2(ring, phi, [1, 2], others(j)));
        let term = if term.is_zero() { Form::zero(deg) } else { term };
        acc = if j % 2 == 0 { acc.add(k, &term) } else { acc.sub(k, &term) }.expect("cofactor degrees agree");
    }
    ring.reduce(&acc)
}

/// Adjugate of a 3x3 map `phi: F -> G`, as a map `G(-D) -> F` with `D = deg det phi`.
pub fn adjugate3(ring: &Ring, phi: &GradedMap) -> Result<GradedMap> {
    if (phi.rows(), phi.cols()) != (3, 3) {
        return Err(Error::Shape("adjugate3 needs a 3x3 map".into()));
    }
    let k = ring.field();
    let deg = phi.target.twists.iter().sum::<i32>() - phi.source.twists.iter().sum::<i32>();
    let mut out = GradedMap::zero(phi.target.twist(-deg), phi.source.clone());
    for i in 0..3 {
        for j in 0..3 {
            // adj(i, j) = (-1)^{i+j} · minor with row j and column i removed
            let m = minor2(ring, phi, others(j), others(i));
            let m = if (i + j) % 2 == 0 { m } else { m.neg(k) };
            out.set_entry(i, j, ring.reduce(&m))?;
        }
    }
    Ok(out)
}

/// Ulrich twists `R(-1)^n -> R^n`.
pub fn linear_frees(n: usize) -> (GradedFree, GradedFree) {
    (GradedFree::repeated(-1, n), GradedFree::repeated(0, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::poly::monomial_basis;
    use crate::rng::seeded;

    /// A random 3x3 linear map whose determinant is a nonsingular cubic.
    pub(crate) fn determinantal(seed: u64) -> MatrixFactorization {
        let k = PrimeField::new(32003).unwrap();
        let poly = Ring::polynomial(k, 4);
        let b1 = monomial_basis(1);
        for attempt in 0.. {
            let mut rng = seeded(seed, &format!("det{attempt}"));
            let entries = (0..9)
                .map(|_| Form::from_terms(k, 1, b1.iter().map(|m| (*m, rng.gen_range(0..k.p())))).unwrap())
                .collect();
            let (src, tgt) = linear_frees(3);
            let phi = GradedMap::new(src, tgt, entries).unwrap();
            let f = det3(&poly, &phi);
            let Ok(ctx) = SurfaceContext::new(k, f) else { continue };
            let psi = adjugate3(&poly, &phi).unwrap();
            return MatrixFactorization::new(ctx, phi, psi).unwrap();
        }
        unreachable!()
    }

    #[test]
    fn determinantal_factorization_is_valid_and_reduced() {
        let mf = determinantal(1);
        assert!(mf.verify().valid);
        assert!(mf.is_reduced());
        assert!(mf.is_linear());
        assert_eq!(mf.rank(), Some(1));
        let mut rng = seeded(2, "rank");
        let rc = mf.rank_check(1, RANK_CHECK_TRIALS, &mut rng);
        assert!(rc.passed);
        assert_eq!(rc.unit, Some(1));
    }

    #[test]
    fn trivial_factorization_is_not_reduced() {
        let mf = determinantal(1);
        let ctx = mf.ctx.clone();
        let phi = GradedMap::new(GradedFree::new(vec![-3]), GradedFree::new(vec![0]), vec![ctx.f.clone()]).unwrap();
        let psi = GradedMap::new(GradedFree::new(vec![-3]), GradedFree::new(vec![-3]), vec![Form::constant(ctx.field, 1)]).unwrap();
        let triv = MatrixFactorization::new(ctx, phi, psi).unwrap();
        assert!(triv.verify().valid);
        assert!(!triv.is_reduced());
        assert!(!mf.direct_sum(&triv).unwrap().is_reduced());
    }

    #[test]
    fn corrupted_psi_is_located() {
        let mf = determinantal(3);
        let mut bad = mf.clone();
        let k = mf.ctx.field;
        let e = bad.psi.entry(1, 2).clone();
        let (m, _) = e.leading().unwrap();
        let bumped = e.add(k, &Form::monomial(k, m, 1)).unwrap();
        bad.psi.set_entry(1, 2, bumped).unwrap();
        let check = bad.verify();
        assert!(!check.valid);
        let fail = check.failure.unwrap();
        assert_eq!(fail.product, "phi*psi");
        assert_eq!(fail.col, 2);
    }

    #[test]
    fn dual_syzygy_sum_twist() {
        let mf = determinantal(4);
        let d = mf.dual();
        assert!(d.verify().valid);
        assert_eq!(d.dual(), mf);
        let s = mf.syzygy();
        assert!(s.verify().valid);
        assert_eq!(s.syzygy(), mf.twist(-3));
        let sum = mf.direct_sum(&determinantal(4)).unwrap();
        assert!(sum.verify().valid && sum.is_reduced());
        assert_eq!(sum.rank(), Some(2));
        let mut rng = seeded(5, "rank");
        assert!(sum.rank_check(2, RANK_CHECK_TRIALS, &mut rng).passed);
        assert!(!sum.rank_check(1, RANK_CHECK_TRIALS, &mut rng).passed);
        assert!(mf.twist(2).verify().valid);
    }

    #[test]
    fn rank_one_hilbert_function_and_recovery() {
        let mf = determinantal(6);
        let m = mf.module();
        let hf: Vec<usize> = (-1..3).map(|t| m.hilbert_function(t)).collect();
        assert_eq!(hf, vec![0, 3, 9, 18]);
        let back = mf_from_presentation(&mf.ctx, &m).unwrap();
        assert!(back.verify().valid);
        assert_eq!(back.size(), 3);
        assert!(back.is_linear());
    }

    #[test]
    fn structure_sheaf_factorization() {
        let mf = determinantal(7);
        let ox = GradedModulePresentation::free(mf.ctx.surface.clone(), GradedFree::new(vec![0]));
        let triv = mf_from_presentation(&mf.ctx, &ox).unwrap();
        assert!(triv.verify().valid);
        assert_eq!(triv.size(), 1);
    }
}
