//! Degree-zero Hom and Ext¹ between finitely presented graded modules,
//! extensions from cocycles, isomorphism witnesses and hyperplane sections.
//!
//! A degree-0 map `coker(A: F1 -> F0) -> N` is a choice of `n_j ∈ N_{d_j}`
//! for each generator of `F0` such that every relation of `A` maps to zero
//! in `N`. Each `N_t` is handled as the quotient `(G0)_t / im(B_t)` in
//! coordinates on the non-pivot columns of a reduced echelon form of `im(B_t)`.

use std::collections::HashMap;

use rand::Rng as _;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{FieldElem, PrimeField};
use crate::graded::{GradedFree, GradedMap, GradedModulePresentation};
use crate::linalg::{row_echelon, Exec, IncrementalBasis, Matrix};
use crate::poly::Form;
use crate::resolution::{fit_quadratic, min_free_resolution, minimalize, HilbertPolynomial, DEFAULT_SLACK};
use crate::ring::Ring;

/// `N_t` as a quotient of `(G0)_t`.
#[derive(Clone, Debug)]
pub struct QuotientSlice {
    /// Dimension of `(G0)_t`.
    pub ambient_dim: usize,
    /// Non-pivot coordinates; they index a basis of `N_t`.
    pub free: Vec<usize>,
    /// Position in `free` of each coordinate, `usize::MAX` for pivots.
    pos: Vec<usize>,
    /// For each pivot coordinate, `-row[free]` of its echelon row.
    pivot_part: HashMap<usize, Vec<FieldElem>>,
}

impl QuotientSlice {
    pub fn new(n: &GradedModulePresentation, t: i32) -> Self {
        let ring = &n.ring;
        let k = ring.field();
        let ambient_dim = n.generators().slice_dim(ring, t);
        let b = &n.presentation;
        let echelon = (b.cols() > 0 && ambient_dim > 0).then(|| {
            let rows = b.degree_slice(ring, t).transpose().into_rows();
            row_echelon(k, rows, ambient_dim, true, Exec::default())
        });
        let free = match &echelon {
            Some(e) => e.free_columns(),
            None => (0..ambient_dim).collect(),
        };
        let mut pos = vec![usize::MAX; ambient_dim];
        for (i, &c) in free.iter().enumerate() {
            pos[c] = i;
        }
        let mut pivot_part = HashMap::new();
        if let Some(e) = &echelon {
            for (row, &pc) in e.rows.iter().zip(&e.pivots) {
                pivot_part.insert(pc, free.iter().map(|&c| k.neg(row[c])).collect());
            }
        }
        QuotientSlice {
            ambient_dim,
            free,
            pos,
            pivot_part,
        }
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// Adds `x · [e_c]` into `out` (coordinates of `N_t`).
    fn accumulate(&self, k: PrimeField, c: usize, x: FieldElem, out: &mut [FieldElem]) {
        if x == 0 {
            return;
        }
        let p = self.pos[c];
        if p != usize::MAX {
            out[p] = k.add(out[p], x);
        } else if let Some(part) = self.pivot_part.get(&c) {
            for (o, &y) in out.iter_mut().zip(part) {
                if y != 0 {
                    *o = k.add(*o, k.mul(x, y));
                }
            }
        }
    }

    /// Class of a vector of `(G0)_t` in `N_t`.
    pub fn project(&self, k: PrimeField, v: &[FieldElem]) -> Vec<FieldElem> {
        let mut out = vec![0; self.dim()];
        for (c, &x) in v.iter().enumerate() {
            self.accumulate(k, c, x, &mut out);
        }
        out
    }

    /// The representative supported on the free coordinates.
    pub fn lift(&self, q: &[FieldElem]) -> Vec<FieldElem> {
        let mut v = vec![0; self.ambient_dim];
        for (&c, &x) in self.free.iter().zip(q) {
            v[c] = x;
        }
        v
    }
}

/// Quotient slices of one module, built on demand.
struct SliceCache<'a> {
    module: &'a GradedModulePresentation,
    slices: HashMap<i32, QuotientSlice>,
}

impl<'a> SliceCache<'a> {
    fn new(module: &'a GradedModulePresentation) -> Self {
        SliceCache {
            module,
            slices: HashMap::new(),
        }
    }

    fn get(&mut self, t: i32) -> &QuotientSlice {
        let m = self.module;
        self.slices.entry(t).or_insert_with(|| QuotientSlice::new(m, t))
    }
}

/// The linear map `⊕_j N_{deg e_j} -> ⊕_k N_{deg f_k}` induced by `a: ⊕R(-f_k) -> ⊕R(-e_j)`,
/// i.e. `Hom(a, N)` in degree zero.
struct HomSystem {
    matrix: Matrix,
    /// Offsets of each target summand of `a` inside the domain.
    dom_off: Vec<usize>,
    dom_degrees: Vec<i32>,
}

fn hom_system(a: &GradedMap, cache: &mut SliceCache) -> HomSystem {
    let ring = cache.module.ring.clone();
    let k = ring.field();
    let g0 = cache.module.generators().clone();
    let dom_degrees = a.target.generator_degrees();
    let cod_degrees = a.source.generator_degrees();
    let offsets = |degs: &[i32], cache: &mut SliceCache| {
        let mut off = vec![0];
        for &d in degs {
            let last = *off.last().unwrap();
            off.push(last + cache.get(d).dim());
        }
        off
    };
    let dom_off = offsets(&dom_degrees, cache);
    let cod_off = offsets(&cod_degrees, cache);
    let mut matrix = Matrix::zeros(*cod_off.last().unwrap(), *dom_off.last().unwrap());
    let mut col_buf = Vec::new();
    for (j, &d) in dom_degrees.iter().enumerate() {
        let dom = cache.get(d).clone();
        if dom.dim() == 0 {
            continue;
        }
        let src_off = g0.slice_offsets(&ring, d);
        for (kk, &e) in cod_degrees.iter().enumerate() {
            let entry = a.entry(j, kk);
            if entry.is_zero() {
                continue;
            }
            let dst_off = g0.slice_offsets(&ring, e);
            let cod = cache.get(e);
            for (i, tw) in g0.twists.iter().enumerate() {
                let mm = ring.mult_matrix(entry, d + tw);
                for s in 0..mm.cols() {
                    let p = dom.pos[src_off[i] + s];
                    if p == usize::MAX {
                        continue;
                    }
                    col_buf.clear();
                    col_buf.resize(cod.dim(), 0);
                    for u in 0..mm.rows() {
                        cod.accumulate(k, dst_off[i] + u, mm.get(u, s), &mut col_buf);
                    }
                    for (q, &x) in col_buf.iter().enumerate() {
                        if x != 0 {
                            matrix.add_at(k, cod_off[kk] + q, dom_off[j] + p, x);
                        }
                    }
                }
            }
        }
    }
    HomSystem {
        matrix,
        dom_off,
        dom_degrees,
    }
}

/// Forms of the map `F -> G0` whose column `j` lifts the `N_{d_j}` coordinates in `v`.
fn lift_columns(
    v: &[FieldElem],
    offsets: &[usize],
    degrees: &[i32],
    source: &GradedFree,
    cache: &mut SliceCache,
) -> GradedMap {
    let ring = cache.module.ring.clone();
    let g0 = cache.module.generators().clone();
    let cols: Vec<Vec<Form>> = degrees
        .iter()
        .enumerate()
        .map(|(j, &d)| {
            let q = cache.get(d);
            let w = q.lift(&v[offsets[j]..offsets[j + 1]]);
            if w.is_empty() {
                g0.twists.iter().map(|tw| Form::zero(d + tw)).collect()
            } else {
                g0.vec_to_element(&ring, d, &w)
            }
        })
        .collect();
    GradedMap::from_columns(source.clone(), g0, &cols).expect("lifted columns are homogeneous")
}

/// A degree-0 homomorphism `coker(A) -> coker(B)`: `alpha ∘ A = B ∘ beta`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomMap {
    pub alpha: GradedMap,
    pub beta: GradedMap,
}

#[derive(Clone, Debug)]
pub struct HomBasis {
    pub source: GradedModulePresentation,
    pub target: GradedModulePresentation,
    pub maps: Vec<HomMap>,
}

impl HomBasis {
    pub fn dim(&self) -> usize {
        self.maps.len()
    }
}

fn check_same_ring(m: &GradedModulePresentation, n: &GradedModulePresentation) -> Result<()> {
    if *m.ring != *n.ring {
        return Err(Error::RingMismatch);
    }
    Ok(())
}

/// `beta` with `alpha ∘ A = B ∘ beta`, solved relation by relation.
pub fn lift_to_relations(
    alpha: &GradedMap,
    m: &GradedModulePresentation,
    n: &GradedModulePresentation,
) -> Result<GradedMap> {
    let ring = &m.ring;
    let k = ring.field();
    let a = &m.presentation;
    let b = &n.presentation;
    let img = alpha.compose(ring, a)?;
    let mut cols = Vec::with_capacity(a.cols());
    for kk in 0..a.cols() {
        let e = -a.source.twists[kk];
        let rhs = img.target.element_to_vec(ring, e, &img.column(kk));
        let x = if rhs.iter().all(|&c| c == 0) {
            vec![0; b.source.slice_dim(ring, e)]
        } else {
            b.degree_slice(ring, e)
                .solve(k, &rhs)
                .ok_or_else(|| Error::Invalid(format!("relation {kk} is not sent into the relations of the target")))?
        };
        cols.push(if x.is_empty() {
            b.source.twists.iter().map(|tw| Form::zero(e + tw)).collect()
        } else {
            b.source.vec_to_element(ring, e, &x)
        });
    }
    GradedMap::from_columns(a.source.clone(), b.source.clone(), &cols)
}

fn hom_alphas(m: &GradedModulePresentation, n: &GradedModulePresentation) -> Vec<GradedMap> {
    let k = m.ring.field();
    let mut cache = SliceCache::new(n);
    let sys = hom_system(&m.presentation, &mut cache);
    let kernel = if sys.matrix.rows() == 0 {
        (0..sys.matrix.cols())
            .map(|i| {
                let mut v = vec![0; sys.matrix.cols()];
                v[i] = 1;
                v
            })
            .collect()
    } else {
        sys.matrix.kernel(k, Exec::default())
    };
    kernel
        .iter()
        .map(|v| lift_columns(v, &sys.dom_off, &sys.dom_degrees, m.generators(), &mut cache))
        .collect()
}

/// A basis of `Hom(M, N)_0`.
pub fn hom_degree_zero(m: &GradedModulePresentation, n: &GradedModulePresentation) -> Result<HomBasis> {
    check_same_ring(m, n)?;
    let maps = hom_alphas(m, n)
        .into_iter()
        .map(|alpha| {
            let beta = lift_to_relations(&alpha, m, n)?;
            Ok(HomMap { alpha, beta })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HomBasis {
        source: m.clone(),
        target: n.clone(),
        maps,
    })
}

/// `dim Hom(M, N)_0` from a rank computation alone.
pub fn hom_dimension(m: &GradedModulePresentation, n: &GradedModulePresentation) -> Result<usize> {
    check_same_ring(m, n)?;
    let mut cache = SliceCache::new(n);
    let sys = hom_system(&m.presentation, &mut cache);
    let rank = if sys.matrix.rows() == 0 {
        0
    } else {
        sys.matrix.rank(m.ring.field(), Exec::default())
    };
    Ok(sys.matrix.cols() - rank)
}

/// `dim Hom(M, N(t))_0` for each `t` in `range`.
pub fn hom_hilbert(
    m: &GradedModulePresentation,
    n: &GradedModulePresentation,
    range: std::ops::RangeInclusive<i32>,
) -> Result<Vec<usize>> {
    range.map(|t| hom_dimension(m, &n.twist(t))).collect()
}

/// First degree of the fit window for [`hom_polynomial`].
pub const HOM_FIT_START: i32 = 2;
/// Degree at which the fitted Hom polynomial is checked once more.
pub const HOM_FIT_CHECK: i32 = 6;

/// Hilbert polynomial of `Hom(M, N)`, fitted on `t = 2, 3, 4` and checked at
/// `t = 5` and `t = 6`. For bundles on `X`, `P(0) = χ(Hom(M, N))`.
pub fn hom_polynomial(m: &GradedModulePresentation, n: &GradedModulePresentation) -> Result<HilbertPolynomial> {
    let mut err = None;
    let hp = fit_quadratic(HOM_FIT_START, |t| match hom_dimension(m, &n.twist(t)) {
        Ok(d) => d as i64,
        Err(e) => {
            err = Some(e);
            0
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    let check = hom_dimension(m, &n.twist(HOM_FIT_CHECK))? as i64;
    if hp.eval(HOM_FIT_CHECK) != num_rational::Ratio::from_integer(check) {
        return Err(Error::FitFailed(format!("value {check} at t = {HOM_FIT_CHECK} disagrees with {hp}")));
    }
    Ok(hp)
}

/// A class in `Ext¹(M, N)_0`, represented by `beta: F1 -> G0` whose
/// composite with the second syzygies lands in the relations of `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtClass {
    pub representative: GradedMap,
}

/// `Ext¹(M, N)_0` computed from a resolution `F2 -> F1 -> F0` of `M`.
#[derive(Clone, Debug)]
pub struct Ext1Space {
    pub source: GradedModulePresentation,
    pub target: GradedModulePresentation,
    /// `F1 -> F0`, the minimal presentation the classes refer to.
    pub presentation: GradedMap,
    /// `F2 -> F1`.
    pub syzygies: GradedMap,
    pub classes: Vec<ExtClass>,
    pub cocycle_dim: usize,
    pub coboundary_dim: usize,
}

impl Ext1Space {
    pub fn dim(&self) -> usize {
        self.classes.len()
    }

    /// `Σ c_i · class_i`.
    pub fn combine(&self, coeffs: &[FieldElem]) -> Result<ExtClass> {
        if coeffs.len() != self.classes.len() {
            return Err(Error::Shape(format!(
                "{} coefficients for {} classes",
                coeffs.len(),
                self.classes.len()
            )));
        }
        let k = self.source.ring.field();
        let first = &self.classes[0].representative;
        let mut entries: Vec<Form> = first.entries().iter().map(|e| Form::zero(e.deg())).collect();
        for (cls, &c) in self.classes.iter().zip(coeffs) {
            for (acc, e) in entries.iter_mut().zip(cls.representative.entries()) {
                *acc = acc.add(k, &e.scale(k, c))?;
            }
        }
        Ok(ExtClass {
            representative: GradedMap::new(first.source.clone(), first.target.clone(), entries)?,
        })
    }

    /// A uniformly random class.
    pub fn random_class(&self, rng: &mut ChaCha8Rng) -> Result<ExtClass> {
        let p = self.source.ring.field().p();
        let coeffs: Vec<FieldElem> = (0..self.dim()).map(|_| rng.gen_range(0..p)).collect();
        self.combine(&coeffs)
    }
}

/// `Ext¹(M, N)_0 = ker(Hom(F1, N)_0 -> Hom(F2, N)_0) / im(Hom(F0, N)_0)`.
pub fn ext1_degree_zero(m: &GradedModulePresentation, n: &GradedModulePresentation) -> Result<Ext1Space> {
    check_same_ring(m, n)?;
    let ring = &m.ring;
    let k = ring.field();
    let res = min_free_resolution(m, 2, DEFAULT_SLACK);
    if res.window_exhausted {
        let top = res
            .maps
            .last()
            .and_then(|d| d.source.generator_degrees().into_iter().max())
            .unwrap_or(0);
        return Err(Error::WindowTooSmall(top));
    }
    let d1 = res
        .maps
        .first()
        .cloned()
        .unwrap_or_else(|| GradedMap::zero(GradedFree::default(), minimalize(m).presentation.target.clone()));
    let d2 = res
        .maps
        .get(1)
        .cloned()
        .unwrap_or_else(|| GradedMap::zero(GradedFree::default(), d1.source.clone()));
    let mut cache = SliceCache::new(n);
    let delta0 = hom_system(&d1, &mut cache);
    let delta1 = hom_system(&d2, &mut cache);
    let nd = delta1.matrix.cols();
    let cocycles: Vec<Vec<FieldElem>> = if delta1.matrix.rows() == 0 {
        (0..nd)
            .map(|i| {
                let mut v = vec![0; nd];
                v[i] = 1;
                v
            })
            .collect()
    } else {
        delta1.matrix.kernel(k, Exec::default())
    };
    let mut span = IncrementalBasis::new(k, nd);
    for c in 0..delta0.matrix.cols() {
        span.insert(&delta0.matrix.col(c));
    }
    let coboundary_dim = span.len();
    let mut classes = Vec::new();
    for z in &cocycles {
        if span.insert(z) {
            let representative = lift_columns(z, &delta1.dom_off, &delta1.dom_degrees, &d1.source, &mut cache);
            classes.push(ExtClass { representative });
        }
    }
    Ok(Ext1Space {
        source: m.clone(),
        target: n.clone(),
        presentation: d1,
        syzygies: d2,
        classes,
        cocycle_dim: cocycles.len(),
        coboundary_dim,
    })
}

/// The extension `0 -> N^c -> E -> M -> 0` given by `c` classes of `ext`:
/// `E = coker [[B^c, beta], [0, A]]`, minimalized.
pub fn extension(ext: &Ext1Space, classes: &[ExtClass]) -> Result<GradedModulePresentation> {
    let ring = &ext.source.ring;
    let k = ring.field();
    let n = &ext.target;
    let a = &ext.presentation;
    // each class must kill the second syzygies modulo the relations of N
    for cls in classes {
        let beta = &cls.representative;
        if beta.source != a.source || beta.target != *n.generators() {
            return Err(Error::Shape("extension class does not match the presentation".into()));
        }
        let comp = beta.compose(ring, &ext.syzygies)?;
        let mut cache = SliceCache::new(n);
        for l in 0..comp.cols() {
            let e = -comp.source.twists[l];
            let v = comp.target.element_to_vec(ring, e, &comp.column(l));
            if cache.get(e).project(k, &v).iter().any(|&x| x != 0) {
                return Err(Error::NotCocycle);
            }
        }
    }
    if classes.is_empty() {
        return Ok(minimalize(&ext.source));
    }
    let mut b_sum = n.presentation.clone();
    let mut beta = classes[0].representative.clone();
    for cls in &classes[1..] {
        b_sum = b_sum.direct_sum(&n.presentation);
        beta = beta.vstack(&cls.representative)?;
    }
    let top = b_sum.hstack(&beta)?;
    let bottom = GradedMap::zero(b_sum.source.clone(), a.target.clone()).hstack(a)?;
    let big = top.vstack(&bottom)?;
    Ok(minimalize(&GradedModulePresentation::new(ring.clone(), big)))
}

/// First syzygy module over the module's own ring: `coker(F2 -> F1)` for a
/// minimal resolution `F2 -> F1 -> F0`.
pub fn syzygy_module(m: &GradedModulePresentation) -> Result<GradedModulePresentation> {
    let res = min_free_resolution(m, 2, DEFAULT_SLACK);
    if res.window_exhausted {
        return Err(Error::WindowTooSmall(
            res.maps
                .last()
                .and_then(|d| d.source.generator_degrees().into_iter().max())
                .unwrap_or(0),
        ));
    }
    let ring = m.ring.clone();
    Ok(match res.maps.as_slice() {
        [] => GradedModulePresentation::free(ring, GradedFree::default()),
        [d1] => GradedModulePresentation::free(ring, d1.source.clone()),
        [_, d2, ..] => GradedModulePresentation::new(ring, d2.clone()),
    })
}

/// A degree-0 isomorphism found by [`is_isomorphic`].
#[derive(Clone, Debug)]
pub struct IsoWitness {
    pub map: HomMap,
    /// Degrees on which the induced slice maps were checked to be bijective.
    pub window: (i32, i32),
    pub attempts: usize,
}

/// Number of random Hom combinations tried by [`is_isomorphic`].
pub const ISO_TRIES: usize = 5;

/// Default window: from the lowest generator degree of either module to
/// three past the highest.
pub fn default_window(m: &GradedModulePresentation, n: &GradedModulePresentation) -> (i32, i32) {
    let degs: Vec<i32> = m
        .generators()
        .generator_degrees()
        .into_iter()
        .chain(n.generators().generator_degrees())
        .collect();
    let lo = degs.iter().copied().min().unwrap_or(0);
    let hi = degs.iter().copied().max().unwrap_or(0);
    (lo, hi + 3)
}

/// Matrix of `M_t -> N_t` induced by `alpha`.
pub fn induced_slice(
    alpha: &GradedMap,
    m: &GradedModulePresentation,
    n: &GradedModulePresentation,
    t: i32,
) -> Matrix {
    let ring = &m.ring;
    let k = ring.field();
    let qm = QuotientSlice::new(m, t);
    let qn = QuotientSlice::new(n, t);
    let a = alpha.degree_slice(ring, t);
    let mut out = Matrix::zeros(qn.dim(), qm.dim());
    for (col, &c) in qm.free.iter().enumerate() {
        let img = qn.project(k, &a.col(c));
        for (row, x) in img.into_iter().enumerate() {
            out.set(row, col, x);
        }
    }
    out
}

/// Whether `alpha` induces bijections `M_t -> N_t` on `window`.
pub fn is_bijective_on(
    alpha: &GradedMap,
    m: &GradedModulePresentation,
    n: &GradedModulePresentation,
    window: (i32, i32),
) -> bool {
    let k = m.ring.field();
    (window.0..=window.1).all(|t| {
        let s = induced_slice(alpha, m, n, t);
        s.rows() == s.cols() && (s.rows() == 0 || s.rank(k, Exec::default()) == s.rows())
    })
}

/// Searches for a degree-0 isomorphism `M -> N`.
///
/// Hilbert functions are compared on the window first. Then up to
/// [`ISO_TRIES`] random elements of `Hom(M, N)_0` are tested for bijective
/// slices on the window. A returned witness is an actual homomorphism; a
/// `None` may be a false negative with probability about `(window dims / p)^tries`.
pub fn is_isomorphic(
    m: &GradedModulePresentation,
    n: &GradedModulePresentation,
    window: Option<(i32, i32)>,
    rng: &mut ChaCha8Rng,
) -> Result<Option<IsoWitness>> {
    check_same_ring(m, n)?;
    let window = window.unwrap_or_else(|| default_window(m, n));
    for t in window.0..=window.1 {
        if m.hilbert_function(t) != n.hilbert_function(t) {
            return Ok(None);
        }
    }
    let basis = hom_alphas(m, n);
    if basis.is_empty() {
        return Ok(None);
    }
    let k = m.ring.field();
    for attempt in 1..=ISO_TRIES {
        let coeffs: Vec<FieldElem> = (0..basis.len()).map(|_| rng.gen_range(0..k.p())).collect();
        let mut entries: Vec<Form> = basis[0].entries().iter().map(|e| Form::zero(e.deg())).collect();
        for (b, &c) in basis.iter().zip(&coeffs) {
            for (acc, e) in entries.iter_mut().zip(b.entries()) {
                *acc = acc.add(k, &e.scale(k, c))?;
            }
        }
        let alpha = GradedMap::new(basis[0].source.clone(), basis[0].target.clone(), entries)?;
        if is_bijective_on(&alpha, m, n, window) {
            let beta = lift_to_relations(&alpha, m, n)?;
            return Ok(Some(IsoWitness {
                map: HomMap { alpha, beta },
                window,
                attempts: attempt,
            }));
        }
    }
    Ok(None)
}

/// The substitution sending `h` to zero: one variable with a nonzero
/// coefficient in `h` is eliminated, the other three become `y0, y1, y2`.
fn hyperplane_substitution(k: PrimeField, h: &Form) -> Result<[Form; 4]> {
    if h.deg() != 1 || h.is_zero() {
        return Err(Error::DegenerateHyperplane("h must be a nonzero linear form".into()));
    }
    let coeffs: Vec<FieldElem> = (0..4).map(|i| h.coeff(&crate::poly::Monomial::var(i))).collect();
    let pos = (0..4).rev().find(|&i| coeffs[i] != 0).unwrap();
    let mut rename = [0usize; 4];
    let mut next = 0;
    for (i, slot) in rename.iter_mut().enumerate() {
        if i != pos {
            *slot = next;
            next += 1;
        }
    }
    let inv = k.inv(coeffs[pos]);
    let mut solved = vec![0; 4];
    for i in (0..4).filter(|&i| i != pos) {
        solved[rename[i]] = k.neg(k.mul(coeffs[i], inv));
    }
    Ok(std::array::from_fn(|i| {
        if i == pos {
            Form::linear(k, &solved)
        } else {
            Form::var(rename[i])
        }
    }))
}

/// `M ⊗ R_X / (h)` as a module over `k[y0, y1, y2] / (f|_H)`.
pub fn restrict_to_hyperplane(m: &GradedModulePresentation, h: &Form) -> Result<GradedModulePresentation> {
    let ring = &m.ring;
    let k = ring.field();
    let f = ring
        .modulus()
        .ok_or_else(|| Error::Invalid("restriction needs a module over the surface ring".into()))?;
    if ring.nvars() != 4 {
        return Err(Error::Invalid("restriction expects four variables".into()));
    }
    let images = hyperplane_substitution(k, h)?;
    let fbar = f.substitute_linear(k, &images);
    if fbar.is_zero() {
        return Err(Error::DegenerateHyperplane("h divides f".into()));
    }
    let plane = Ring::polynomial(k, 3);
    let curve = Ring::hypersurface(plane, fbar)?;
    let pres = &m.presentation;
    let entries: Vec<Form> = pres
        .entries()
        .iter()
        .map(|e| {
            if e.is_zero() {
                e.clone()
            } else {
                e.substitute_linear(k, &images)
            }
        })
        .collect();
    let map = GradedMap::new(pres.source.clone(), pres.target.clone(), entries)?;
    Ok(GradedModulePresentation::new(curve, map))
}

/// Linear Hilbert polynomial `c0 + c1 t` of a module over a curve ring,
/// fitted at `t0, t0 + 1` and checked at `t0 + 2`.
pub fn linear_hilbert_polynomial(m: &GradedModulePresentation, t0: i32) -> Result<(i64, i64)> {
    let v: Vec<i64> = (t0..t0 + 3).map(|t| m.hilbert_function(t) as i64).collect();
    let c1 = v[1] - v[0];
    let c0 = v[0] - c1 * t0 as i64;
    if v[2] != c0 + c1 * (t0 as i64 + 2) {
        return Err(Error::FitFailed(format!("values {v:?} are not linear from t = {t0}")));
    }
    Ok((c0, c1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::SurfaceContext;
    use crate::field::PrimeField;
    use crate::points::{ideal_of_points, random_points, sample_general_points};
    use crate::rng::seeded;

    fn ctx() -> SurfaceContext {
        SurfaceContext::random(PrimeField::new(32003).unwrap(), 21).unwrap()
    }

    fn ox(c: &SurfaceContext) -> GradedModulePresentation {
        GradedModulePresentation::free(c.surface.clone(), GradedFree::new(vec![0]))
    }

    #[test]
    fn hom_of_structure_sheaf() {
        let c = ctx();
        let o = ox(&c);
        // Hom(O, O(t))_0 = (R_X)_t
        assert_eq!(hom_hilbert(&o, &o, 0..=3).unwrap(), vec![1, 4, 10, 19]);
        let hp = hom_polynomial(&o, &o).unwrap();
        assert_eq!(hp.eval(0), 1.into());
        let b = hom_degree_zero(&o, &o).unwrap();
        assert_eq!(b.dim(), 1);
    }

    #[test]
    fn hom_from_point_ideal() {
        let c = ctx();
        let z = random_points(&c, 1, 3).unwrap();
        let id = ideal_of_points(&z, &c, None).unwrap();
        // Hom(I_P, O_X)_0 ⊇ the inclusion; I_P has depth 2 so it is rank one
        let h = hom_degree_zero(&id.module, &ox(&c)).unwrap();
        assert_eq!(h.dim(), 1);
        for hm in &h.maps {
            let lhs = hm.alpha.compose(&c.surface, &id.module.presentation).unwrap();
            let rhs = ox(&c).presentation.compose(&c.surface, &hm.beta).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn ext_vanishes_for_free_source() {
        let c = ctx();
        let o = ox(&c);
        let e = ext1_degree_zero(&o, &o).unwrap();
        assert_eq!(e.dim(), 0);
        let split = extension(&e, &[]).unwrap();
        assert_eq!(split.hilbert_function(2), 10);
    }

    #[test]
    fn ext_of_general_points_has_r_minus_one_classes() {
        let c = ctx();
        let g = sample_general_points(&c, 2, 1, 10).unwrap();
        let m = g.ideal.module.twist(2);
        let e = ext1_degree_zero(&m, &ox(&c)).unwrap();
        assert_eq!(e.dim(), 1);
        let ext = extension(&e, &e.classes).unwrap();
        for t in 0..5 {
            assert_eq!(ext.hilbert_function(t), m.hilbert_function(t) + ox(&c).hilbert_function(t));
        }
        // a coboundary-shifted class is rejected only if it stops being a cocycle
        let mut bad = e.classes[0].clone();
        let r = &mut bad.representative;
        let e0 = r.entry(0, 0).clone();
        r.set_entry(0, 0, e0.add(c.field, &Form::var(0)).unwrap()).unwrap();
        assert!(matches!(extension(&e, &[bad]), Err(Error::NotCocycle)));
    }

    #[test]
    fn isomorphism_self_and_twist() {
        let c = ctx();
        let z = random_points(&c, 2, 8).unwrap();
        let id = ideal_of_points(&z, &c, None).unwrap().module;
        let mut rng = seeded(1, "iso");
        let w = is_isomorphic(&id, &id, None, &mut rng).unwrap();
        assert!(w.is_some());
        assert!(is_isomorphic(&id, &id.twist(1), None, &mut rng).unwrap().is_none());
    }

    #[test]
    fn restriction_of_structure_sheaf_is_elliptic() {
        let c = ctx();
        let h = Form::linear(c.field, &[3, 1, 4, 1]);
        let r = restrict_to_hyperplane(&ox(&c), &h).unwrap();
        let (c0, c1) = linear_hilbert_polynomial(&r, 1).unwrap();
        assert_eq!((c0, c1), (0, 3));
        assert_eq!(r.hilbert_function(0), 1);
    }
}
