//! Degree-by-degree module algebra: minimal generators of graded subspaces,
//! syzygies, minimal presentations, minimal free resolutions and Hilbert data.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::graded::{GradedFree, GradedMap, GradedModulePresentation};
use crate::linalg::{Exec, IncrementalBasis};
use crate::poly::Form;
use crate::ring::Ring;

/// Extra degrees searched past the largest known generator when looking for syzygies.
pub const DEFAULT_SLACK: i32 = 6;

/// Minimal generators found inside a degree window.
#[derive(Clone, Debug)]
pub struct Generators {
    /// Columns are the generators, as elements of the ambient free module.
    pub map: GradedMap,
    /// `(degree, index into span(degree))` of every chosen spanning vector.
    pub chosen: Vec<(i32, usize)>,
    /// Set when the last degree of the window still produced generators.
    pub window_exhausted: bool,
}

/// `x_var * v` for `v` a degree-`t` element of `free`.
pub(crate) fn mul_var_element(
    ring: &Ring,
    free: &GradedFree,
    t: i32,
    var: usize,
    v: &[FieldElem],
) -> Vec<FieldElem> {
    let mut out = Vec::with_capacity(free.slice_dim(ring, t + 1));
    let mut off = 0;
    for a in &free.twists {
        let d = ring.dim(t + a);
        out.extend(ring.mul_var_vec(var, t + a, &v[off..off + d]));
        off += d;
    }
    out
}

/// Minimal generators of the graded submodule `V ⊆ free` whose degree-`t`
/// piece is spanned by `span(t)`, for `t` in `lo..=hi`.
///
/// In each degree the part generated from below (`R_1 · V_{t-1}`) is built
/// first; spanning vectors that enlarge it become new generators, taken in
/// the order `span` returns them.
pub fn extract_generators(
    ring: &Ring,
    free: &GradedFree,
    lo: i32,
    hi: i32,
    mut span: impl FnMut(i32) -> Vec<Vec<FieldElem>>,
) -> Generators {
    let k = ring.field();
    let mut prev: Vec<Vec<FieldElem>> = Vec::new();
    let mut cols: Vec<Vec<Form>> = Vec::new();
    let mut twists = Vec::new();
    let mut chosen = Vec::new();
    let mut last_hit = false;
    for t in lo..=hi {
        let dim = free.slice_dim(ring, t);
        let mut inc = IncrementalBasis::new(k, dim);
        let mut kept = Vec::new();
        'outer: for v in &prev {
            for var in 0..ring.nvars() {
                if inc.is_full() {
                    break 'outer;
                }
                let w = mul_var_element(ring, free, t - 1, var, v);
                if inc.insert(&w) {
                    kept.push(w);
                }
            }
        }
        last_hit = false;
        for (idx, v) in span(t).into_iter().enumerate() {
            if inc.is_full() {
                break;
            }
            if inc.insert(&v) {
                cols.push(free.vec_to_element(ring, t, &v));
                twists.push(-t);
                chosen.push((t, idx));
                kept.push(v);
                last_hit = true;
            }
        }
        prev = kept;
    }
    let map = GradedMap::from_columns(GradedFree::new(twists), free.clone(), &cols)
        .expect("generators are homogeneous by construction");
    Generators {
        map,
        chosen,
        window_exhausted: last_hit,
    }
}

fn min_degree(free: &GradedFree) -> Option<i32> {
    free.generator_degrees().into_iter().min()
}

fn max_degree(free: &GradedFree) -> Option<i32> {
    free.generator_degrees().into_iter().max()
}

/// Minimal generators of `ker(m)` in degrees up to `t_max`, as a map into `m.source`.
pub fn kernel_module_generators(ring: &Ring, m: &GradedMap, t_max: i32) -> Generators {
    let Some(lo) = min_degree(&m.source) else {
        return Generators {
            map: GradedMap::zero(GradedFree::default(), m.source.clone()),
            chosen: Vec::new(),
            window_exhausted: false,
        };
    };
    let k = ring.field();
    let g = extract_generators(ring, &m.source, lo, t_max, |t| {
        let a = m.degree_slice(ring, t);
        a.kernel(k, Exec::default())
    });
    if g.window_exhausted {
        log::debug!("syzygies still appear at the window edge t = {t_max}");
    }
    g
}

/// A minimal generating subset of the columns of `m` (columns keep their forms).
pub fn image_generators(ring: &Ring, m: &GradedMap) -> GradedMap {
    let (Some(lo), Some(hi)) = (min_degree(&m.source), max_degree(&m.source)) else {
        return m.clone();
    };
    let mut by_degree: std::collections::BTreeMap<i32, Vec<usize>> = Default::default();
    for j in 0..m.cols() {
        by_degree.entry(-m.source.twists[j]).or_default().push(j);
    }
    let g = extract_generators(ring, &m.target, lo, hi, |t| {
        by_degree
            .get(&t)
            .map(|js| {
                js.iter()
                    .map(|&j| m.target.element_to_vec(ring, t, &m.column(j)))
                    .collect()
            })
            .unwrap_or_default()
    });
    let keep: Vec<usize> = g.chosen.iter().map(|(t, i)| by_degree[t][*i]).collect();
    m.select_columns(&keep)
}

/// Removes unit entries by pivoting (and drops zero relations). The cokernel
/// is unchanged up to isomorphism and the generators become minimal.
pub fn minimalize(pres: &GradedModulePresentation) -> GradedModulePresentation {
    let ring = &pres.ring;
    let k = ring.field();
    let mut m = pres.presentation.clone();
    loop {
        let mut pivot = None;
        'find: for j in 0..m.cols() {
            for i in 0..m.rows() {
                if m.entry(i, j).is_unit() {
                    pivot = Some((i, j));
                    break 'find;
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        let cinv = k.inv(m.entry(pi, pj).constant_value());
        let rows: Vec<usize> = (0..m.rows()).filter(|&i| i != pi).collect();
        let cols: Vec<usize> = (0..m.cols()).filter(|&j| j != pj).collect();
        let target = GradedFree::new(rows.iter().map(|&i| m.target.twists[i]).collect());
        let source = GradedFree::new(cols.iter().map(|&j| m.source.twists[j]).collect());
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for &l in &rows {
            for &c in &cols {
                // A_lc - A_ic * c^-1 * A_lj
                let corr = m.entry(pi, c).mul(k, m.entry(l, pj)).scale(k, cinv);
                let e = m.entry(l, c).sub(k, &corr).expect("degrees agree");
                entries.push(ring.reduce(&e));
            }
        }
        m = GradedMap::new(source, target, entries).expect("pivoting preserves homogeneity");
    }
    let nonzero: Vec<usize> = (0..m.cols())
        .filter(|&j| (0..m.rows()).any(|i| !m.entry(i, j).is_zero()))
        .collect();
    let m = m.select_columns(&nonzero);
    GradedModulePresentation::new(ring.clone(), m)
}

/// Twists of the free modules in a minimal resolution, step by step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BettiTable {
    pub steps: Vec<Vec<i32>>,
}

impl BettiTable {
    pub fn from_free(steps: &[GradedFree]) -> Self {
        BettiTable {
            steps: steps
                .iter()
                .map(|f| {
                    let mut t = f.twists.clone();
                    t.sort_unstable_by(|a, b| b.cmp(a));
                    t
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Multiplicity of `S(twist)` at `step`.
    pub fn count(&self, step: usize, twist: i32) -> usize {
        self.steps
            .get(step)
            .map_or(0, |s| s.iter().filter(|&&a| a == twist).count())
    }

    /// `[(twist, multiplicity)]` at `step`, twists descending.
    pub fn shape(&self, step: usize) -> Vec<(i32, usize)> {
        let mut out: Vec<(i32, usize)> = Vec::new();
        for &a in self.steps.get(step).map(Vec::as_slice).unwrap_or(&[]) {
            match out.last_mut() {
                Some((b, n)) if *b == a => *n += 1,
                _ => out.push((a, 1)),
            }
        }
        out
    }
}

impl fmt::Display for BettiTable {
    /// Macaulay-style diagram: column = step, row = degree - step.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<i32> = self
            .steps
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.iter().map(move |a| -a - i as i32))
            .collect();
        let (Some(&lo), Some(&hi)) = (rows.iter().min(), rows.iter().max()) else {
            return writeln!(f, "       0\ntotal: 0");
        };
        let width = self
            .steps
            .iter()
            .map(|s| s.len().to_string().len())
            .max()
            .unwrap_or(1)
            .max(self.steps.len().to_string().len());
        write!(f, "{:>7}", "")?;
        for i in 0..self.steps.len() {
            write!(f, " {:>width$}", i)?;
        }
        writeln!(f)?;
        write!(f, "{:>7}", "total:")?;
        for s in &self.steps {
            write!(f, " {:>width$}", s.len())?;
        }
        writeln!(f)?;
        for row in lo..=hi {
            write!(f, "{:>6}:", row)?;
            for (i, _) in self.steps.iter().enumerate() {
                let n = self.count(i, -(row + i as i32));
                if n == 0 {
                    write!(f, " {:>width$}", ".")?;
                } else {
                    write!(f, " {:>width$}", n)?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A minimal free resolution `F0 <- F1 <- F2 <- ...`.
#[derive(Clone, Debug)]
pub struct Resolution {
    /// `maps[i]: F_{i+1} -> F_i`.
    pub maps: Vec<GradedMap>,
    pub betti: BettiTable,
    /// True when a kernel came out empty, i.e. the resolution is finished.
    pub complete: bool,
    /// True when some step hit the edge of its degree window.
    pub window_exhausted: bool,
}

impl Resolution {
    pub fn length(&self) -> usize {
        self.maps.iter().filter(|m| m.cols() > 0).count()
    }
}

/// Minimal free resolution of `coker(pres)` computed to at most `steps`
/// maps. Each syzygy search runs up to `slack` degrees past the largest
/// generator of the step it starts from.
pub fn min_free_resolution(pres: &GradedModulePresentation, steps: usize, slack: i32) -> Resolution {
    let ring = &pres.ring;
    let m0 = minimalize(pres).presentation;
    let d1 = image_generators(ring, &m0);
    let mut frees = vec![d1.target.clone()];
    let mut maps = Vec::new();
    let mut exhausted = false;
    let mut complete = d1.cols() == 0;
    if !complete && steps >= 1 {
        frees.push(d1.source.clone());
        maps.push(d1);
        while maps.len() < steps {
            let last = maps.last().unwrap();
            let t_max = max_degree(&last.source).unwrap() + slack;
            let g = kernel_module_generators(ring, last, t_max);
            exhausted |= g.window_exhausted;
            if g.map.cols() == 0 {
                complete = true;
                break;
            }
            frees.push(g.map.source.clone());
            maps.push(g.map);
        }
    }
    Resolution {
        betti: BettiTable::from_free(&frees),
        maps,
        complete,
        window_exhausted: exhausted,
    }
}

/// Quadratic `c0 + c1 t + c2 t^2` with rational coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HilbertPolynomial {
    pub coeffs: [Ratio<i64>; 3],
    /// First degree the fit was taken from.
    pub start: i32,
}

impl HilbertPolynomial {
    /// Interpolates through `(t0, v0), (t0+1, v1), (t0+2, v2)`.
    pub fn interpolate(t0: i32, values: [i64; 3]) -> Self {
        let [v0, v1, v2] = values.map(Ratio::from_integer);
        // Newton form around t0: v0 + d1 (t - t0) + d2 (t - t0)(t - t0 - 1) / 2
        let d1 = v1 - v0;
        let d2 = v2 - v1 * 2 + v0;
        let two = Ratio::from_integer(2);
        let s = Ratio::from_integer(t0 as i64);
        let c2 = d2 / two;
        // expand in t
        let c1 = d1 - d2 * (s * 2 + 1) / two;
        let c0 = v0 - d1 * s + d2 * s * (s + 1) / two;
        HilbertPolynomial {
            coeffs: [c0, c1, c2],
            start: t0,
        }
    }

    pub fn eval(&self, t: i32) -> Ratio<i64> {
        let t = Ratio::from_integer(t as i64);
        self.coeffs[0] + self.coeffs[1] * t + self.coeffs[2] * t * t
    }

    pub fn leading(&self) -> Ratio<i64> {
        self.coeffs[2]
    }
}

impl fmt::Display for HilbertPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})t^2 + ({})t + ({})", self.coeffs[2], self.coeffs[1], self.coeffs[0])
    }
}

/// Fits `t -> value(t)` on `t0..t0+3` and checks the fit at `t0 + 3`.
pub fn fit_quadratic(t0: i32, mut value: impl FnMut(i32) -> i64) -> Result<HilbertPolynomial> {
    let vals = [value(t0), value(t0 + 1), value(t0 + 2)];
    let hp = HilbertPolynomial::interpolate(t0, vals);
    let check = value(t0 + 3);
    if hp.eval(t0 + 3) != Ratio::from_integer(check) {
        return Err(Error::FitFailed(format!(
            "value {check} at t = {} disagrees with {hp}",
            t0 + 3
        )));
    }
    Ok(hp)
}

/// Hilbert polynomial of `coker(pres)`, sampled past the regularity read
/// off its resolution over the ambient polynomial ring.
pub fn hilbert_polynomial(pres: &GradedModulePresentation) -> Result<HilbertPolynomial> {
    let over = pres.over_ambient();
    let nvars = over.ring.nvars() as i32;
    let res = min_free_resolution(&over, nvars as usize + 1, DEFAULT_SLACK);
    let top = res
        .betti
        .steps
        .iter()
        .flatten()
        .map(|a| -a)
        .max()
        .unwrap_or(0);
    let t0 = top - nvars + 2;
    fit_quadratic(t0, |t| pres.hilbert_function(t) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::poly::monomial_basis;
    use crate::ring::Ring;
    use std::sync::Arc;

    fn k() -> PrimeField {
        PrimeField::new(32003).unwrap()
    }

    fn fermat(k: PrimeField) -> Form {
        (0..4)
            .map(|i| Form::var(i).pow(k, 3))
            .reduce(|a, b| a.add(k, &b).unwrap())
            .unwrap()
    }

    #[test]
    fn koszul_syzygy_of_two_variables() {
        let r = Ring::polynomial(k(), 4);
        let m = GradedMap::new(
            GradedFree::repeated(-1, 2),
            GradedFree::new(vec![0]),
            vec![Form::var(0), Form::var(1)],
        )
        .unwrap();
        let g = kernel_module_generators(&r, &m, 5);
        assert_eq!(g.map.source.twists, vec![-2]);
        assert!(!g.window_exhausted);
        let col = g.map.column(0);
        // (x1, -x0) up to scalar
        let kk = k();
        let c = col[0].coeff(&crate::poly::Monomial::var(1));
        assert_ne!(c, 0);
        assert_eq!(col[1], Form::var(0).scale(kk, kk.neg(c)));
    }

    #[test]
    fn free_module_has_trivial_resolution() {
        let r = Ring::polynomial(k(), 4);
        let pres = GradedModulePresentation::free(r, GradedFree::new(vec![0]));
        let res = min_free_resolution(&pres, 4, 4);
        assert_eq!(res.betti.steps, vec![vec![0]]);
        assert!(res.complete);
        assert_eq!(pres.hilbert_function(3), 20);
    }

    #[test]
    fn minimalize_strips_identity_block() {
        let kk = k();
        let r = Ring::polynomial(kk, 4);
        // generators e0 (deg 0), e1 (deg 1); relation e1 = x0 e0 and x1 e0
        let m = GradedMap::new(
            GradedFree::new(vec![-1, -1]),
            GradedFree::new(vec![0, -1]),
            vec![
                Form::var(0).neg(kk), Form::var(1),
                Form::constant(kk, 1), Form::zero(0),
            ],
        )
        .unwrap();
        let pres = GradedModulePresentation::new(r.clone(), m);
        let min = minimalize(&pres);
        assert_eq!(min.generators().twists, vec![0]);
        assert_eq!(min.relations().twists, vec![-1]);
        for t in 0..5 {
            assert_eq!(pres.hilbert_function(t), min.hilbert_function(t));
        }
        let again = minimalize(&min);
        assert_eq!(again, min);
    }

    #[test]
    fn structure_ring_of_cubic() {
        let kk = k();
        let r = Ring::polynomial(kk, 4);
        let rx = Ring::hypersurface(r, fermat(kk)).unwrap();
        let o = GradedModulePresentation::free(rx, GradedFree::new(vec![0]));
        let hp = hilbert_polynomial(&o).unwrap();
        assert_eq!(hp.coeffs, [Ratio::new(1, 1), Ratio::new(3, 2), Ratio::new(3, 2)]);
        assert_eq!(hp.eval(0), Ratio::from_integer(1));
    }

    #[test]
    fn interpolation_recovers_quadratics() {
        let hp = HilbertPolynomial::interpolate(3, [3 * 10, 3 * 15, 3 * 21]);
        // 3/2 (t+1)(t+2)
        assert_eq!(hp.coeffs, [Ratio::new(3, 1), Ratio::new(9, 2), Ratio::new(3, 2)]);
        assert!(fit_quadratic(0, |t| (t as i64).pow(3)).is_err());
    }

    #[test]
    fn betti_diagram_text() {
        let b = BettiTable {
            steps: vec![vec![-2; 5], vec![-3; 6], vec![-5]],
        };
        let s = b.to_string();
        assert!(s.contains("total: 5 6 1"), "{s}");
        assert!(s.contains("     2: 5 6 ."), "{s}");
        assert!(s.contains("     3: . . 1"), "{s}");
        assert_eq!(serde_json::to_string(&b).unwrap(), "[[-2,-2,-2,-2,-2],[-3,-3,-3,-3,-3,-3],[-5]]");
    }

    #[test]
    fn twisted_cubic_resolution_is_exact() {
        let kk = k();
        let r = Ring::polynomial(kk, 4);
        let x: Vec<Form> = (0..4).map(Form::var).collect();
        // 2x2 minors of [[x0, x1, x2], [x1, x2, x3]]
        let q = |a: usize, b: usize, c: usize, d: usize| {
            x[a].mul(kk, &x[b]).sub(kk, &x[c].mul(kk, &x[d])).unwrap()
        };
        let gens = vec![q(0, 2, 1, 1), q(0, 3, 1, 2), q(1, 3, 2, 2)];
        let row = GradedMap::new(GradedFree::repeated(-2, 3), GradedFree::new(vec![0]), gens).unwrap();
        let syz = kernel_module_generators(&r, &row, 6);
        assert_eq!(BettiTable::from_free(std::slice::from_ref(&syz.map.source)).steps[0], vec![-3, -3]);
        let pres = GradedModulePresentation::new(r.clone(), syz.map.clone());
        let res = min_free_resolution(&pres, 4, 4);
        assert_eq!(res.betti.steps, vec![vec![-2, -2, -2], vec![-3, -3]]);
        assert!(res.complete);
        // consecutive maps compose to zero; no constants
        assert!(row.compose(&r, &res.maps[0]).unwrap().is_zero());
        assert!(!res.maps[0].has_unit_entry());
        let _ = Arc::clone(&r);
        let _ = monomial_basis(0);
    }
}
