//! Graded coordinate rings: `k[x0..x_{n-1}]` and its quotient by one form.
//!
//! Elements of the quotient are kept as normal forms with respect to the
//! graded-lex leading monomial of the modulus. `{f}` is a Groebner basis of
//! the principal ideal `(f)`, so the standard monomials (those not divisible
//! by `LM(f)`) give a canonical basis of every graded piece.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::field::{FieldElem, PrimeField};
use crate::linalg::Matrix;
use crate::poly::{monomial_basis_in, Form, Monomial};

const MAX_DEGREE: usize = 96;

/// Monomial data and normal forms for one graded piece.
#[derive(Debug)]
pub struct DegreeTable {
    pub monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    /// Standard monomials (indices into `monomials`), descending.
    pub standard: Vec<usize>,
    /// Normal form of every monomial as sparse coordinates on `standard`.
    nf: Vec<Vec<(u32, FieldElem)>>,
}

impl DegreeTable {
    pub fn dim(&self) -> usize {
        self.standard.len()
    }

    pub fn index_of(&self, m: &Monomial) -> usize {
        self.index[m]
    }

    pub fn normal_form(&self, monomial_index: usize) -> &[(u32, FieldElem)] {
        &self.nf[monomial_index]
    }

    pub fn basis_monomial(&self, k: usize) -> Monomial {
        self.monomials[self.standard[k]]
    }
}

pub struct Ring {
    field: PrimeField,
    nvars: usize,
    modulus: Option<Form>,
    ambient: Option<Arc<Ring>>,
    tables: Vec<OnceLock<Arc<DegreeTable>>>,
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.modulus {
            None => write!(f, "Ring(F_{}[{} vars])", self.field.p(), self.nvars),
            Some(m) => write!(f, "Ring(F_{}[{} vars]/({}))", self.field.p(), self.nvars, m),
        }
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.nvars == other.nvars && self.modulus == other.modulus
    }
}

impl Ring {
    pub fn polynomial(field: PrimeField, nvars: usize) -> Arc<Ring> {
        Arc::new(Ring {
            field,
            nvars,
            modulus: None,
            ambient: None,
            tables: (0..MAX_DEGREE).map(|_| OnceLock::new()).collect(),
        })
    }

    /// `ambient / (f)`; `f` must be a nonzero form of positive degree in the
    /// ambient variables.
    pub fn hypersurface(ambient: Arc<Ring>, f: Form) -> Result<Arc<Ring>> {
        if ambient.modulus.is_some() {
            return Err(Error::Invalid("nested quotient rings are not supported".into()));
        }
        if f.is_zero() || f.deg() <= 0 {
            return Err(Error::Invalid("modulus must be a nonzero form of positive degree".into()));
        }
        if f.support_vars() > ambient.nvars {
            return Err(Error::Invalid("modulus uses variables outside the ring".into()));
        }
        // make the modulus monic so reduction never needs an inverse
        let (_, lc) = f.leading().unwrap();
        let f = f.scale(ambient.field, ambient.field.inv(lc));
        Ok(Arc::new(Ring {
            field: ambient.field,
            nvars: ambient.nvars,
            modulus: Some(f),
            ambient: Some(ambient.clone()),
            tables: (0..MAX_DEGREE).map(|_| OnceLock::new()).collect(),
        }))
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn modulus(&self) -> Option<&Form> {
        self.modulus.as_ref()
    }

    pub fn is_quotient(&self) -> bool {
        self.modulus.is_some()
    }

    /// The polynomial ring this ring is a quotient of (itself if none).
    pub fn ambient(self: &Arc<Self>) -> &Arc<Ring> {
        self.ambient.as_ref().unwrap_or(self)
    }

    pub fn table(&self, t: i32) -> Option<Arc<DegreeTable>> {
        if t < 0 {
            return None;
        }
        let t = t as usize;
        assert!(t < MAX_DEGREE, "degree {t} beyond supported range");
        Some(self.tables[t].get_or_init(|| Arc::new(self.build_table(t as u32))).clone())
    }

    pub fn dim(&self, t: i32) -> usize {
        self.table(t).map_or(0, |tb| tb.dim())
    }

    fn build_table(&self, t: u32) -> DegreeTable {
        let monomials = monomial_basis_in(t, self.nvars);
        let index: HashMap<Monomial, usize> =
            monomials.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let k = self.field;
        let Some(f) = &self.modulus else {
            let nf = (0..monomials.len()).map(|i| vec![(i as u32, 1)]).collect();
            return DegreeTable {
                standard: (0..monomials.len()).collect(),
                monomials,
                index,
                nf,
            };
        };
        let (lm, _) = f.leading().unwrap();
        let tail: Vec<(Monomial, FieldElem)> = f
            .terms()
            .filter(|(m, _)| **m != lm)
            .map(|(m, c)| (*m, k.neg(*c)))
            .collect();
        let standard: Vec<usize> = monomials
            .iter()
            .enumerate()
            .filter(|(_, m)| !lm.divides(m))
            .map(|(i, _)| i)
            .collect();
        let mut pos = vec![u32::MAX; monomials.len()];
        for (s, &i) in standard.iter().enumerate() {
            pos[i] = s as u32;
        }
        let mut nf: Vec<Vec<(u32, FieldElem)>> = vec![Vec::new(); monomials.len()];
        let mut dense = vec![0u32; standard.len()];
        // ascending order: every reduction step only refers to smaller monomials
        for i in (0..monomials.len()).rev() {
            let m = monomials[i];
            if pos[i] != u32::MAX {
                nf[i] = vec![(pos[i], 1)];
                continue;
            }
            let u = lm.quotient_of(&m);
            dense.iter_mut().for_each(|x| *x = 0);
            for (tm, c) in &tail {
                let j = index[&u.mul(tm)];
                for &(s, v) in &nf[j] {
                    dense[s as usize] = k.add(dense[s as usize], k.mul(*c, v));
                }
            }
            nf[i] = dense
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0)
                .map(|(s, &v)| (s as u32, v))
                .collect();
        }
        DegreeTable {
            monomials,
            index,
            standard,
            nf,
        }
    }

    /// Canonical representative of `g` in this ring.
    pub fn reduce(&self, g: &Form) -> Form {
        if self.modulus.is_none() || g.is_zero() {
            return g.clone();
        }
        let v = self.form_to_vec(g);
        self.vec_to_form(g.deg(), &v)
    }

    pub fn mul(&self, a: &Form, b: &Form) -> Form {
        self.reduce(&a.mul(self.field, b))
    }

    pub fn add(&self, a: &Form, b: &Form) -> Result<Form> {
        a.add(self.field, b)
    }

    /// Coordinates of `g` on the standard basis of its degree.
    pub fn form_to_vec(&self, g: &Form) -> Vec<FieldElem> {
        let Some(tb) = self.table(g.deg()) else {
            return Vec::new();
        };
        let k = self.field;
        let mut v = vec![0; tb.dim()];
        for (m, c) in g.terms() {
            for &(s, x) in tb.normal_form(tb.index_of(m)) {
                v[s as usize] = k.add(v[s as usize], k.mul(*c, x));
            }
        }
        v
    }

    pub fn vec_to_form(&self, deg: i32, v: &[FieldElem]) -> Form {
        let mut g = Form::zero(deg);
        let Some(tb) = self.table(deg) else {
            return g;
        };
        for (s, &c) in v.iter().enumerate() {
            if c != 0 {
                g.add_term(self.field, tb.basis_monomial(s), c);
            }
        }
        g
    }

    /// Matrix of multiplication by `g` from degree `s` to degree `s + deg g`.
    pub fn mult_matrix(&self, g: &Form, s: i32) -> Matrix {
        let d = g.deg();
        let (src, dst) = (self.table(s), self.table(s + d));
        let (Some(src), Some(dst)) = (src, dst) else {
            return Matrix::zeros(self.dim(s + d), self.dim(s));
        };
        let mut m = Matrix::zeros(dst.dim(), src.dim());
        self.accumulate_mult(g, &src, &dst, &mut m, 0, 0);
        m
    }

    /// Adds the multiplication-by-`g` block into `out` at `(r0, c0)`.
    pub(crate) fn accumulate_mult(
        &self,
        g: &Form,
        src: &DegreeTable,
        dst: &DegreeTable,
        out: &mut Matrix,
        r0: usize,
        c0: usize,
    ) {
        let k = self.field;
        for (col, &mi) in src.standard.iter().enumerate() {
            let m = src.monomials[mi];
            for (u, c) in g.terms() {
                let j = dst.index_of(&m.mul(u));
                for &(s, x) in dst.normal_form(j) {
                    out.add_at(k, r0 + s as usize, c0 + col, k.mul(*c, x));
                }
            }
        }
    }

    /// `x_var * v` for `v` in degree `s`.
    pub fn mul_var_vec(&self, var: usize, s: i32, v: &[FieldElem]) -> Vec<FieldElem> {
        let (Some(src), Some(dst)) = (self.table(s), self.table(s + 1)) else {
            return vec![0; self.dim(s + 1)];
        };
        let k = self.field;
        let x = Monomial::var(var);
        let mut out = vec![0; dst.dim()];
        for (col, &c) in v.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let j = dst.index_of(&src.basis_monomial(col).mul(&x));
            for &(s, y) in dst.normal_form(j) {
                out[s as usize] = k.add(out[s as usize], k.mul(c, y));
            }
        }
        out
    }

    /// Evaluation functional of degree `t` at a point, as a row over the standard basis.
    pub fn eval_row(&self, t: i32, point: &[FieldElem]) -> Vec<FieldElem> {
        let Some(tb) = self.table(t) else {
            return Vec::new();
        };
        (0..tb.dim())
            .map(|s| tb.basis_monomial(s).eval(self.field, point))
            .collect()
    }
}
