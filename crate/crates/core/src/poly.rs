//! Homogeneous forms in (at most) four variables over `F_p`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldElem, PrimeField};

pub const NVARS: usize = 4;

/// Exponent vector `(e0, e1, e2, e3)`.
///
/// Ordered graded-lexicographically with `x0 > x1 > x2 > x3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub [u8; NVARS]);

impl Monomial {
    pub fn one() -> Self {
        Monomial([0; NVARS])
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0; NVARS];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0) {
            *a += b;
        }
        Monomial(e)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0).all(|(&a, b)| a <= b)
    }

    /// `other / self`, assuming divisibility.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        let mut e = other.0;
        for (a, b) in e.iter_mut().zip(self.0) {
            *a -= b;
        }
        Monomial(e)
    }

    pub fn eval(&self, k: PrimeField, point: &[FieldElem]) -> FieldElem {
        let mut acc = 1;
        for (i, &e) in self.0.iter().enumerate() {
            if e > 0 {
                acc = k.mul(acc, k.pow(point[i], e as u64));
            }
        }
        acc
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials of degree `t` in the first `nvars` variables, largest first.
pub fn monomial_basis_in(t: u32, nvars: usize) -> Vec<Monomial> {
    fn rec(t: u32, i: usize, nvars: usize, cur: &mut [u8; NVARS], out: &mut Vec<Monomial>) {
        if i + 1 == nvars {
            cur[i] = t as u8;
            out.push(Monomial(*cur));
            cur[i] = 0;
            return;
        }
        for e in (0..=t).rev() {
            cur[i] = e as u8;
            rec(t - e, i + 1, nvars, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    let mut cur = [0u8; NVARS];
    if nvars == 0 {
        if t == 0 {
            out.push(Monomial::one());
        }
        return out;
    }
    rec(t, 0, nvars, &mut cur, &mut out);
    out
}

/// All `C(t+3, 3)` monomials of degree `t` in four variables, graded-lex descending.
pub fn monomial_basis(t: u32) -> Vec<Monomial> {
    monomial_basis_in(t, NVARS)
}

/// A homogeneous form. The zero form keeps its degree tag, which may be negative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Form {
    deg: i32,
    terms: BTreeMap<Monomial, FieldElem>,
}

impl Form {
    pub fn zero(deg: i32) -> Self {
        Form {
            deg,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(k: PrimeField, c: FieldElem) -> Self {
        Self::monomial(k, Monomial::one(), c)
    }

    pub fn var(i: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(i), 1);
        Form { deg: 1, terms }
    }

    pub fn monomial(k: PrimeField, m: Monomial, c: FieldElem) -> Self {
        let mut f = Form::zero(m.degree() as i32);
        let c = c % k.p();
        if c != 0 {
            f.terms.insert(m, c);
        }
        f
    }

    /// Builds a form from `(monomial, coefficient)` pairs, combining repeats.
    pub fn from_terms(
        k: PrimeField,
        deg: i32,
        terms: impl IntoIterator<Item = (Monomial, FieldElem)>,
    ) -> Result<Self> {
        let mut f = Form::zero(deg);
        for (m, c) in terms {
            if m.degree() as i32 != deg {
                return Err(Error::DegreeMismatch {
                    left: deg,
                    right: m.degree() as i32,
                });
            }
            f.add_term(k, m, c % k.p());
        }
        Ok(f)
    }

    /// Linear form `sum c_i x_i`.
    pub fn linear(k: PrimeField, coeffs: &[FieldElem]) -> Self {
        let mut f = Form::zero(1);
        for (i, &c) in coeffs.iter().enumerate() {
            f.add_term(k, Monomial::var(i), c % k.p());
        }
        f
    }

    pub fn deg(&self) -> i32 {
        self.deg
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero constant, i.e. a unit of the graded ring.
    pub fn is_unit(&self) -> bool {
        self.deg == 0 && !self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &FieldElem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> FieldElem {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<(Monomial, FieldElem)> {
        self.terms.iter().next_back().map(|(m, c)| (*m, *c))
    }

    /// Constant value of a degree-0 form.
    pub fn constant_value(&self) -> FieldElem {
        self.coeff(&Monomial::one())
    }

    pub(crate) fn add_term(&mut self, k: PrimeField, m: Monomial, c: FieldElem) {
        if c == 0 {
            return;
        }
        let e = self.terms.entry(m).or_insert(0);
        *e = k.add(*e, c);
        if *e == 0 {
            self.terms.remove(&m);
        }
    }

    /// Retags a zero form with a new degree; nonzero forms must already match.
    pub fn with_degree(mut self, deg: i32) -> Result<Self> {
        if !self.is_zero() && self.deg != deg {
            return Err(Error::DegreeMismatch {
                left: self.deg,
                right: deg,
            });
        }
        self.deg = deg;
        Ok(self)
    }

    pub fn add(&self, k: PrimeField, other: &Form) -> Result<Form> {
        let deg = self.common_degree(other)?;
        let mut out = self.clone();
        out.deg = deg;
        for (m, c) in &other.terms {
            out.add_term(k, *m, *c);
        }
        Ok(out)
    }

    pub fn sub(&self, k: PrimeField, other: &Form) -> Result<Form> {
        self.add(k, &other.neg(k))
    }

    fn common_degree(&self, other: &Form) -> Result<i32> {
        if self.deg == other.deg {
            Ok(self.deg)
        } else if self.is_zero() {
            Ok(other.deg)
        } else if other.is_zero() {
            Ok(self.deg)
        } else {
            Err(Error::DegreeMismatch {
                left: self.deg,
                right: other.deg,
            })
        }
    }

    pub fn neg(&self, k: PrimeField) -> Form {
        self.scale(k, k.neg(1))
    }

    pub fn scale(&self, k: PrimeField, c: FieldElem) -> Form {
        let mut out = Form::zero(self.deg);
        if c == 0 {
            return out;
        }
        for (m, v) in &self.terms {
            out.terms.insert(*m, k.mul(*v, c));
        }
        out
    }

    /// Schoolbook product.
    pub fn mul(&self, k: PrimeField, other: &Form) -> Form {
        let mut out = Form::zero(self.deg + other.deg);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(k, ma.mul(mb), k.mul(*ca, *cb));
            }
        }
        out
    }

    pub fn pow(&self, k: PrimeField, e: u32) -> Form {
        let mut acc = Form::constant(k, 1);
        for _ in 0..e {
            acc = acc.mul(k, self);
        }
        acc
    }

    pub fn evaluate(&self, k: PrimeField, point: &[FieldElem]) -> FieldElem {
        self.terms
            .iter()
            .fold(0, |acc, (m, c)| k.add(acc, k.mul(*c, m.eval(k, point))))
    }

    pub fn derivative(&self, k: PrimeField, var: usize) -> Form {
        let mut out = Form::zero(self.deg - 1);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut n = *m;
            n.0[var] -= 1;
            out.add_term(k, n, k.mul(*c, e as u32 % k.p()));
        }
        out
    }

    /// Substitutes `x_i -> images[i]` where every image is a linear form.
    pub fn substitute_linear(&self, k: PrimeField, images: &[Form; NVARS]) -> Form {
        let mut out = Form::zero(self.deg);
        let mut powers: Vec<Vec<Form>> = images
            .iter()
            .map(|l| vec![Form::constant(k, 1), l.clone()])
            .collect();
        for (m, c) in &self.terms {
            let mut term = Form::constant(k, *c);
            for (i, &e) in m.0.iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(k, &images[i]);
                    powers[i].push(next);
                }
                term = term.mul(k, &powers[i][e as usize]);
            }
            for (mm, cc) in term.terms {
                out.add_term(k, mm, cc);
            }
        }
        out
    }

    /// Largest variable index with a nonzero exponent anywhere, plus one.
    pub fn support_vars(&self) -> usize {
        self.terms
            .keys()
            .map(|m| m.0.iter().rposition(|&e| e > 0).map_or(0, |i| i + 1))
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("x{i}")
                    } else {
                        format!("x{i}^{e}")
                    }
                })
                .collect();
            match (vars.is_empty(), *c == 1) {
                (true, _) => write!(f, "{c}")?,
                (false, true) => write!(f, "{}", vars.join("*"))?,
                (false, false) => write!(f, "{c}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}
