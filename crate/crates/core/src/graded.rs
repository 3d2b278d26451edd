//! Graded free modules, homogeneous maps between them, and module presentations.
//!
//! Twist convention: `GradedFree { twists: [a_0, ..] }` is `⊕ S(a_j)`, so the
//! j-th basis element sits in degree `-a_j`. An entry of a map
//! `⊕ S(a_j) -> ⊕ S(b_i)` in position `(i, j)` is a form of degree `b_i - a_j`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::linalg::Matrix;
use crate::poly::Form;
use crate::ring::Ring;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GradedFree {
    pub twists: Vec<i32>,
}

impl GradedFree {
    pub fn new(twists: Vec<i32>) -> Self {
        GradedFree { twists }
    }

    /// `S(twist)^n`
    pub fn repeated(twist: i32, n: usize) -> Self {
        GradedFree {
            twists: vec![twist; n],
        }
    }

    pub fn rank(&self) -> usize {
        self.twists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.twists.is_empty()
    }

    /// Degrees of the basis elements.
    pub fn generator_degrees(&self) -> Vec<i32> {
        self.twists.iter().map(|a| -a).collect()
    }

    pub fn twist(&self, k: i32) -> GradedFree {
        GradedFree {
            twists: self.twists.iter().map(|a| a + k).collect(),
        }
    }

    pub fn dual(&self) -> GradedFree {
        GradedFree {
            twists: self.twists.iter().map(|a| -a).collect(),
        }
    }

    pub fn sum(&self, other: &GradedFree) -> GradedFree {
        let mut twists = self.twists.clone();
        twists.extend_from_slice(&other.twists);
        GradedFree { twists }
    }

    /// Column offsets of each summand inside the degree-`t` slice.
    pub fn slice_offsets(&self, ring: &Ring, t: i32) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.twists.len() + 1);
        let mut acc = 0;
        off.push(0);
        for a in &self.twists {
            acc += ring.dim(t + a);
            off.push(acc);
        }
        off
    }

    pub fn slice_dim(&self, ring: &Ring, t: i32) -> usize {
        self.twists.iter().map(|a| ring.dim(t + a)).sum()
    }

    /// Splits a degree-`t` slice vector into one form per summand.
    pub fn vec_to_element(&self, ring: &Ring, t: i32, v: &[FieldElem]) -> Vec<Form> {
        let off = self.slice_offsets(ring, t);
        self.twists
            .iter()
            .enumerate()
            .map(|(j, a)| ring.vec_to_form(t + a, &v[off[j]..off[j + 1]]))
            .collect()
    }

    pub fn element_to_vec(&self, ring: &Ring, t: i32, elem: &[Form]) -> Vec<FieldElem> {
        let mut v = Vec::with_capacity(self.slice_dim(ring, t));
        for (g, a) in elem.iter().zip(&self.twists) {
            let d = t + a;
            if g.is_zero() {
                v.extend(std::iter::repeat_n(0, ring.dim(d)));
            } else {
                debug_assert_eq!(g.deg(), d);
                v.extend(ring.form_to_vec(g));
            }
        }
        v
    }
}

/// A homogeneous matrix of forms `source -> target`, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradedMap {
    pub source: GradedFree,
    pub target: GradedFree,
    entries: Vec<Form>,
}

impl GradedMap {
    pub fn new(source: GradedFree, target: GradedFree, entries: Vec<Form>) -> Result<Self> {
        let (r, c) = (target.rank(), source.rank());
        if entries.len() != r * c {
            return Err(Error::Shape(format!(
                "{} entries for a {r}x{c} map",
                entries.len()
            )));
        }
        let mut m = GradedMap {
            source,
            target,
            entries,
        };
        for i in 0..r {
            for j in 0..c {
                let expected = m.entry_degree(i, j);
                let e = &mut m.entries[i * c + j];
                if e.is_zero() {
                    *e = Form::zero(expected);
                } else if e.deg() != expected {
                    return Err(Error::NotHomogeneous {
                        row: i,
                        col: j,
                        expected,
                        found: e.deg(),
                    });
                }
            }
        }
        Ok(m)
    }

    /// Builds a map from its columns, each an element of `target`.
    pub fn from_columns(source: GradedFree, target: GradedFree, cols: &[Vec<Form>]) -> Result<Self> {
        let (r, c) = (target.rank(), source.rank());
        if cols.len() != c || cols.iter().any(|col| col.len() != r) {
            return Err(Error::Shape("column data does not match source/target".into()));
        }
        let mut entries = Vec::with_capacity(r * c);
        for i in 0..r {
            for col in cols {
                entries.push(col[i].clone());
            }
        }
        Self::new(source, target, entries)
    }

    pub fn zero(source: GradedFree, target: GradedFree) -> Self {
        let entries = (0..target.rank())
            .flat_map(|i| {
                let t = target.twists[i];
                source.twists.iter().map(move |a| Form::zero(t - a))
            })
            .collect();
        GradedMap {
            source,
            target,
            entries,
        }
    }

    pub fn identity(ring: &Ring, f: &GradedFree) -> Self {
        Self::scalar(ring, f, &crate::poly::Form::constant(ring.field(), 1))
    }

    /// `g * Id` on `f(-deg g) -> f`.
    pub fn scalar(ring: &Ring, f: &GradedFree, g: &Form) -> Self {
        let n = f.rank();
        let mut m = GradedMap::zero(f.twist(-g.deg()), f.clone());
        let g = ring.reduce(g);
        for i in 0..n {
            m.entries[i * n + i] = g.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.target.rank()
    }

    pub fn cols(&self) -> usize {
        self.source.rank()
    }

    pub fn entry_degree(&self, i: usize, j: usize) -> i32 {
        self.target.twists[i] - self.source.twists[j]
    }

    pub fn entry(&self, i: usize, j: usize) -> &Form {
        &self.entries[i * self.cols() + j]
    }

    pub fn entries(&self) -> &[Form] {
        &self.entries
    }

    pub fn set_entry(&mut self, i: usize, j: usize, g: Form) -> Result<()> {
        let expected = self.entry_degree(i, j);
        let g = if g.is_zero() { Form::zero(expected) } else { g };
        if g.deg() != expected {
            return Err(Error::NotHomogeneous {
                row: i,
                col: j,
                expected,
                found: g.deg(),
            });
        }
        let c = self.cols();
        self.entries[i * c + j] = g;
        Ok(())
    }

    pub fn column(&self, j: usize) -> Vec<Form> {
        (0..self.rows()).map(|i| self.entry(i, j).clone()).collect()
    }

    /// Every entry has the degree its position demands.
    pub fn check_homogeneous(&self) -> Result<()> {
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                let e = self.entry(i, j);
                if !e.is_zero() && e.deg() != self.entry_degree(i, j) {
                    return Err(Error::NotHomogeneous {
                        row: i,
                        col: j,
                        expected: self.entry_degree(i, j),
                        found: e.deg(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Form::is_zero)
    }

    /// Any nonzero constant entry.
    pub fn has_unit_entry(&self) -> bool {
        self.entries.iter().any(Form::is_unit)
    }

    /// All nonzero entries are linear.
    pub fn is_linear(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero() || e.deg() == 1)
    }

    pub fn twist(&self, k: i32) -> GradedMap {
        GradedMap {
            source: self.source.twist(k),
            target: self.target.twist(k),
            entries: self.entries.clone(),
        }
    }

    /// Transpose as a map of duals `target^* -> source^*`.
    pub fn transpose(&self) -> GradedMap {
        let (r, c) = (self.rows(), self.cols());
        let mut entries = Vec::with_capacity(r * c);
        for j in 0..c {
            for i in 0..r {
                entries.push(self.entry(i, j).clone());
            }
        }
        GradedMap {
            source: self.target.dual(),
            target: self.source.dual(),
            entries,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, ring: &Ring, other: &GradedMap) -> Result<GradedMap> {
        if self.source != other.target {
            return Err(Error::Shape(format!(
                "cannot compose: source {:?} vs target {:?}",
                self.source.twists, other.target.twists
            )));
        }
        let k = ring.field();
        let (r, n, c) = (self.rows(), self.cols(), other.cols());
        let mut out = GradedMap::zero(other.source.clone(), self.target.clone());
        for i in 0..r {
            for j in 0..c {
                let mut acc = Form::zero(out.entry_degree(i, j));
                for l in 0..n {
                    let (a, b) = (self.entry(i, l), other.entry(l, j));
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.add(k, &a.mul(k, b))?;
                }
                out.entries[i * c + j] = ring.reduce(&acc);
            }
        }
        Ok(out)
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &GradedMap) -> GradedMap {
        let mut out = GradedMap::zero(self.source.sum(&other.source), self.target.sum(&other.target));
        let c = out.cols();
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.entries[i * c + j] = self.entry(i, j).clone();
            }
        }
        for i in 0..other.rows() {
            for j in 0..other.cols() {
                out.entries[(i + self.rows()) * c + j + self.cols()] = other.entry(i, j).clone();
            }
        }
        out
    }

    /// `[self | other]` over the same target.
    pub fn hstack(&self, other: &GradedMap) -> Result<GradedMap> {
        if self.target != other.target {
            return Err(Error::Shape("hstack needs equal targets".into()));
        }
        let cols: Vec<Vec<Form>> = (0..self.cols())
            .map(|j| self.column(j))
            .chain((0..other.cols()).map(|j| other.column(j)))
            .collect();
        GradedMap::from_columns(self.source.sum(&other.source), self.target.clone(), &cols)
    }

    /// `[self ; other]` over the same source.
    pub fn vstack(&self, other: &GradedMap) -> Result<GradedMap> {
        if self.source != other.source {
            return Err(Error::Shape("vstack needs equal sources".into()));
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        GradedMap::new(self.source.clone(), self.target.sum(&other.target), entries)
    }

    pub fn select_columns(&self, keep: &[usize]) -> GradedMap {
        let cols: Vec<Vec<Form>> = keep.iter().map(|&j| self.column(j)).collect();
        let source = GradedFree::new(keep.iter().map(|&j| self.source.twists[j]).collect());
        GradedMap::from_columns(source, self.target.clone(), &cols).expect("columns keep their degrees")
    }

    /// Reduces every entry into `ring`.
    pub fn reduced_in(&self, ring: &Ring) -> GradedMap {
        GradedMap {
            source: self.source.clone(),
            target: self.target.clone(),
            entries: self.entries.iter().map(|e| ring.reduce(e)).collect(),
        }
    }

    /// Degree-`t` component as a matrix on the standard monomial bases.
    pub fn degree_slice(&self, ring: &Ring, t: i32) -> Matrix {
        let row_off = self.target.slice_offsets(ring, t);
        let col_off = self.source.slice_offsets(ring, t);
        let mut m = Matrix::zeros(*row_off.last().unwrap(), *col_off.last().unwrap());
        for j in 0..self.cols() {
            let s = t + self.source.twists[j];
            let Some(src) = ring.table(s) else { continue };
            for i in 0..self.rows() {
                let e = self.entry(i, j);
                if e.is_zero() {
                    continue;
                }
                let Some(dst) = ring.table(s + e.deg()) else {
                    continue;
                };
                ring.accumulate_mult(e, &src, &dst, &mut m, row_off[i], col_off[j]);
            }
        }
        m
    }

    /// Applies the map to an element of the source given as forms.
    pub fn apply(&self, ring: &Ring, elem: &[Form]) -> Result<Vec<Form>> {
        let k = ring.field();
        let mut out = Vec::with_capacity(self.rows());
        for i in 0..self.rows() {
            let mut acc: Option<Form> = None;
            for (j, x) in elem.iter().enumerate() {
                let e = self.entry(i, j);
                if e.is_zero() || x.is_zero() {
                    continue;
                }
                let prod = e.mul(k, x);
                acc = Some(match acc {
                    None => prod,
                    Some(a) => a.add(k, &prod)?,
                });
            }
            out.push(acc.map_or(Form::zero(0), |a| ring.reduce(&a)));
        }
        Ok(out)
    }
}

/// Which ring a module lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingKind {
    Polynomial,
    Surface,
}

/// `coker(presentation)` over `ring`.
#[derive(Clone, Debug)]
pub struct GradedModulePresentation {
    pub ring: Arc<Ring>,
    pub presentation: GradedMap,
}

impl PartialEq for GradedModulePresentation {
    fn eq(&self, other: &Self) -> bool {
        *self.ring == *other.ring && self.presentation == other.presentation
    }
}

impl GradedModulePresentation {
    pub fn new(ring: Arc<Ring>, presentation: GradedMap) -> Self {
        let presentation = presentation.reduced_in(&ring);
        GradedModulePresentation { ring, presentation }
    }

    /// The free module `S(twist)^n`.
    pub fn free(ring: Arc<Ring>, generators: GradedFree) -> Self {
        let pres = GradedMap::zero(GradedFree::default(), generators);
        GradedModulePresentation::new(ring, pres)
    }

    pub fn kind(&self) -> RingKind {
        if self.ring.is_quotient() {
            RingKind::Surface
        } else {
            RingKind::Polynomial
        }
    }

    pub fn generators(&self) -> &GradedFree {
        &self.presentation.target
    }

    pub fn relations(&self) -> &GradedFree {
        &self.presentation.source
    }

    pub fn twist(&self, k: i32) -> Self {
        GradedModulePresentation {
            ring: self.ring.clone(),
            presentation: self.presentation.twist(k),
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if *self.ring != *other.ring {
            return Err(Error::RingMismatch);
        }
        Ok(GradedModulePresentation {
            ring: self.ring.clone(),
            presentation: self.presentation.direct_sum(&other.presentation),
        })
    }

    /// `dim M_t = dim F0_t - rank(A_t)`.
    pub fn hilbert_function(&self, t: i32) -> usize {
        let total = self.generators().slice_dim(&self.ring, t);
        if total == 0 || self.presentation.cols() == 0 {
            return total;
        }
        let a = self.presentation.degree_slice(&self.ring, t);
        total - a.rank(self.ring.field(), crate::linalg::Exec::default())
    }

    /// The same module seen over the ambient polynomial ring: the lifted
    /// relations plus `f` times every generator.
    pub fn over_ambient(&self) -> GradedModulePresentation {
        let Some(f) = self.ring.modulus() else {
            return self.clone();
        };
        let ambient = self.ring.ambient().clone();
        let g = self.generators().clone();
        let fid = GradedMap::scalar(&ambient, &g, f);
        let pres = self.presentation.hstack(&fid).expect("same target");
        GradedModulePresentation::new(ambient, pres)
    }

    /// Reinterprets a module over the ambient ring as a module over `ring`
    /// (i.e. tensors with the quotient).
    pub fn base_change(&self, ring: Arc<Ring>) -> GradedModulePresentation {
        GradedModulePresentation::new(ring, self.presentation.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::poly::monomial_basis;

    fn setup() -> (PrimeField, Arc<Ring>) {
        let k = PrimeField::new(7).unwrap();
        (k, Ring::polynomial(k, 4))
    }

    #[test]
    fn rejects_inhomogeneous_entries() {
        let (_, _) = setup();
        let bad = GradedMap::new(
            GradedFree::new(vec![-1]),
            GradedFree::new(vec![0]),
            vec![Form::var(0).mul(PrimeField::new(7).unwrap(), &Form::var(1))],
        );
        assert!(matches!(bad, Err(Error::NotHomogeneous { .. })));
    }

    #[test]
    fn slice_of_multiplication_by_x0() {
        let (_, r) = setup();
        let m = GradedMap::new(GradedFree::new(vec![-1]), GradedFree::new(vec![0]), vec![Form::var(0)]).unwrap();
        let s = m.degree_slice(&r, 1);
        assert_eq!((s.rows(), s.cols()), (4, 1));
        assert_eq!(s.rank(r.field(), crate::linalg::Exec::Sequential), 1);
        // x0 is the first basis monomial of degree 1
        assert_eq!(s.col(0), vec![1, 0, 0, 0]);
        let z = GradedMap::zero(GradedFree::new(vec![-1, -2]), GradedFree::new(vec![0]));
        let zs = z.degree_slice(&r, 2);
        assert_eq!((zs.rows(), zs.cols()), (10, 4 + 1));
        assert!(zs.is_zero());
    }

    #[test]
    fn identity_composition_and_adjugate() {
        let (k, r) = setup();
        let x: Vec<Form> = (0..4).map(Form::var).collect();
        // phi = [[x0, x1, 0], [0, x2, x3], [x1, 0, x0]]
        let z = Form::zero(1);
        let phi = GradedMap::new(
            GradedFree::repeated(-1, 3),
            GradedFree::repeated(0, 3),
            vec![
                x[0].clone(), x[1].clone(), z.clone(),
                z.clone(), x[2].clone(), x[3].clone(),
                x[1].clone(), z.clone(), x[0].clone(),
            ],
        )
        .unwrap();
        let id = GradedMap::identity(&r, &phi.target);
        assert_eq!(id.compose(&r, &phi).unwrap(), phi);
        let adj = crate::mf::adjugate3(&r, &phi).unwrap();
        let det = crate::mf::det3(&r, &phi);
        let prod = phi.compose(&r, &adj).unwrap();
        assert_eq!(prod, GradedMap::scalar(&r, &phi.target, &det));
        let _ = k;
    }

    #[test]
    fn compose_matches_entrywise_oracle() {
        let (k, r) = setup();
        let b1 = monomial_basis(1);
        let mut seed = 3u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((seed >> 33) % 7) as u32
        };
        let mut lin = || Form::from_terms(k, 1, b1.iter().map(|m| (*m, next()))).unwrap();
        let g = GradedMap::new(
            GradedFree::repeated(-1, 3),
            GradedFree::repeated(0, 2),
            (0..6).map(|_| lin()).collect(),
        )
        .unwrap();
        let h = GradedMap::new(
            GradedFree::repeated(-2, 2),
            GradedFree::repeated(-1, 3),
            (0..6).map(|_| lin()).collect(),
        )
        .unwrap();
        let gh = g.compose(&r, &h).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Form::zero(2);
                for l in 0..3 {
                    acc = acc.add(k, &g.entry(i, l).mul(k, h.entry(l, j))).unwrap();
                }
                assert_eq!(gh.entry(i, j), &acc);
            }
        }
        // slice of a composition is the product of slices
        for t in 2..4 {
            let lhs = gh.degree_slice(&r, t);
            let rhs = g.degree_slice(&r, t).mul(k, &h.degree_slice(&r, t));
            assert_eq!(lhs, rhs);
        }
    }
}
