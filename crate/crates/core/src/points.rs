//! Rational points on the cubic and their vanishing ideals.

use rand::Rng as _;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::context::SurfaceContext;
use crate::error::{Error, Result};
use crate::field::{FieldElem, PrimeField};
use crate::graded::{GradedFree, GradedMap, GradedModulePresentation};
use crate::linalg::{Exec, Matrix};
use crate::resolution::{extract_generators, kernel_module_generators, min_free_resolution, BettiTable, Resolution};
use crate::rng::{attempt_seed, seeded};

pub type Point = [FieldElem; 4];

/// Scales a nonzero point so that its first nonzero coordinate is 1.
pub fn normalize(k: PrimeField, p: Point) -> Point {
    let Some(&lead) = p.iter().find(|&&c| c != 0) else {
        return p;
    };
    let inv = k.inv(lead);
    p.map(|c| k.mul(c, inv))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSet {
    pub points: Vec<Point>,
    pub seed: u64,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Every point lies on `X`, is normalized, and no two coincide.
    pub fn validate(&self, ctx: &SurfaceContext) -> Result<()> {
        let k = ctx.field;
        let mut seen = std::collections::HashSet::new();
        for (i, p) in self.points.iter().enumerate() {
            if p.iter().all(|&c| c == 0) || ctx.f.evaluate(k, p) != 0 {
                return Err(Error::PointOffSurface(i));
            }
            if !seen.insert(normalize(k, *p)) {
                return Err(Error::DuplicatePoint(i));
            }
        }
        Ok(())
    }
}

// ---- univariate polynomials over F_p, coefficients low to high ----

fn trim(a: &mut Vec<FieldElem>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(k: PrimeField, a: &[FieldElem], m: &[FieldElem]) -> Vec<FieldElem> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let inv = k.inv(m[dm]);
    while r.len() > dm {
        let top = r.len() - 1;
        let c = k.mul(r[top], inv);
        for i in 0..=dm {
            let idx = top - dm + i;
            r[idx] = k.sub(r[idx], k.mul(c, m[i]));
        }
        trim(&mut r);
    }
    r
}

fn poly_mulmod(k: PrimeField, a: &[FieldElem], b: &[FieldElem], m: &[FieldElem]) -> Vec<FieldElem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = k.add(out[i + j], k.mul(x, y));
        }
    }
    poly_rem(k, &out, m)
}

fn poly_powmod(k: PrimeField, base: &[FieldElem], mut e: u64, m: &[FieldElem]) -> Vec<FieldElem> {
    let mut acc = vec![1];
    let mut b = poly_rem(k, base, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(k, &acc, &b, m);
        }
        b = poly_mulmod(k, &b, &b, m);
        e >>= 1;
    }
    acc
}

fn poly_gcd(k: PrimeField, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(k, &a, &b);
        a = b;
        b = r;
    }
    if let Some(&lead) = a.last() {
        let inv = k.inv(lead);
        a.iter_mut().for_each(|c| *c = k.mul(*c, inv));
    }
    a
}

fn poly_sub(k: PrimeField, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    let n = a.len().max(b.len());
    let mut out: Vec<FieldElem> = (0..n)
        .map(|i| k.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
        .collect();
    trim(&mut out);
    out
}

/// Distinct roots in `F_p` of a nonzero polynomial, ascending.
///
/// The split part is `gcd(x^p - x, g)` (Frobenius computed by repeated
/// squaring modulo `g`), then separated by random `gcd((x + d)^((p-1)/2) - 1, .)`.
pub fn univariate_roots(k: PrimeField, g: &[FieldElem], rng: &mut ChaCha8Rng) -> Vec<FieldElem> {
    let mut g = g.to_vec();
    trim(&mut g);
    if g.len() <= 1 {
        return Vec::new();
    }
    let frob = poly_powmod(k, &[0, 1], k.p() as u64, &g);
    let split = poly_gcd(k, &g, &poly_sub(k, &frob, &[0, 1]));
    let mut roots = Vec::new();
    split_roots(k, split, rng, &mut roots);
    roots.sort_unstable();
    roots
}

fn split_roots(k: PrimeField, h: Vec<FieldElem>, rng: &mut ChaCha8Rng, out: &mut Vec<FieldElem>) {
    match h.len() {
        0 | 1 => {}
        2 => out.push(k.neg(k.mul(h[0], k.inv(h[1])))),
        _ => loop {
            let d = rng.gen_range(0..k.p());
            let w = poly_powmod(k, &[d, 1], (k.p() as u64 - 1) / 2, &h);
            let g = poly_gcd(k, &h, &poly_sub(k, &w, &[1]));
            if g.len() > 1 && g.len() < h.len() {
                let rest = poly_div_exact(k, &h, &g);
                split_roots(k, g, rng, out);
                split_roots(k, rest, rng, out);
                return;
            }
        },
    }
}

fn poly_div_exact(k: PrimeField, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let inv = k.inv(b[db]);
    let mut q = vec![0; a.len() - db];
    while r.len() > db {
        let top = r.len() - 1;
        let c = k.mul(r[top], inv);
        q[top - db] = c;
        for i in 0..=db {
            let idx = top - db + i;
            r[idx] = k.sub(r[idx], k.mul(c, b[i]));
        }
        trim(&mut r);
        if r.len() <= db {
            break;
        }
    }
    q
}

/// The cubic restricted to `(1, a, b, s)`, as a polynomial in `s`.
fn restrict_to_fibre(ctx: &SurfaceContext, a: FieldElem, b: FieldElem) -> Vec<FieldElem> {
    let k = ctx.field;
    let mut c = vec![0; 4];
    for (m, v) in ctx.f.terms() {
        let e = m.0;
        let w = k.mul(*v, k.mul(k.pow(a, e[1] as u64), k.pow(b, e[2] as u64)));
        c[e[3] as usize] = k.add(c[e[3] as usize], w);
    }
    c
}

/// Budget of fibres tried by [`random_point_on_cubic`].
pub const POINT_RETRIES: usize = 64;

/// A random point of `X(F_p)` with `x0 = 1`: fixes `x1, x2` at random and
/// solves the cubic in `x3`, picking one of its roots at random.
pub fn random_point_on_cubic(ctx: &SurfaceContext, rng: &mut ChaCha8Rng) -> Result<(Point, usize)> {
    let k = ctx.field;
    for attempt in 1..=POINT_RETRIES {
        let a = rng.gen_range(0..k.p());
        let b = rng.gen_range(0..k.p());
        let g = restrict_to_fibre(ctx, a, b);
        if g.iter().all(|&c| c == 0) {
            // the whole fibre lies on X
            let s = rng.gen_range(0..k.p());
            return Ok(([1, a, b, s], attempt));
        }
        let roots = univariate_roots(k, &g, rng);
        if roots.is_empty() {
            continue;
        }
        let s = roots[rng.gen_range(0..roots.len())];
        return Ok(([1, a, b, s], attempt));
    }
    Err(Error::BudgetExhausted {
        what: "point on cubic".into(),
        attempts: POINT_RETRIES,
    })
}

/// `n` distinct random points of `X`.
pub fn random_points(ctx: &SurfaceContext, n: usize, seed: u64) -> Result<PointSet> {
    let mut rng = seeded(seed, "points");
    let mut points: Vec<Point> = Vec::with_capacity(n);
    let mut guard = 0;
    while points.len() < n {
        let (p, _) = random_point_on_cubic(ctx, &mut rng)?;
        if !points.contains(&p) {
            points.push(p);
        }
        guard += 1;
        if guard > 10 * n + 10 {
            return Err(Error::BudgetExhausted {
                what: "distinct points".into(),
                attempts: guard,
            });
        }
    }
    Ok(PointSet { points, seed })
}

/// The saturated ideal `I_{Z,X} ⊂ R_X`.
#[derive(Clone, Debug)]
pub struct PointIdeal {
    /// `⊕ R_X(-d_i) -> R_X`, the minimal generators.
    pub generators: GradedMap,
    /// `I_{Z,X}` as an `R_X`-module, presented on those generators.
    pub module: GradedModulePresentation,
    /// Least degree in which the points impose independent conditions.
    pub independence_degree: i32,
}

/// Vanishing ideal of `Z` on `X`: in each degree the forms of `R_X` killed
/// by evaluation at every point; minimal generators are extracted degree by
/// degree and presented by their syzygies over `R_X` up to `t_max`.
pub fn ideal_of_points(z: &PointSet, ctx: &SurfaceContext, t_max: Option<i32>) -> Result<PointIdeal> {
    z.validate(ctx)?;
    let ring = &ctx.surface;
    let k = ctx.field;
    let n = z.len();
    let eval = |t: i32| {
        let rows: Vec<Vec<FieldElem>> = z.points.iter().map(|p| ring.eval_row(t, p)).collect();
        Matrix::from_rows(&rows, ring.dim(t))
    };
    let mut t_ind = 0;
    while eval(t_ind).rank(k, Exec::default()) < n {
        t_ind += 1;
    }
    let free = GradedFree::new(vec![0]);
    let gens = extract_generators(ring, &free, 1.min(t_ind), t_ind + 1, |t| {
        eval(t).kernel(k, Exec::default())
    });
    let row = gens.map.transpose_row();
    let t_max = t_max.unwrap_or(t_ind + 5);
    let syz = kernel_module_generators(ring, &row, t_max);
    if syz.window_exhausted {
        return Err(Error::WindowTooSmall(t_max));
    }
    Ok(PointIdeal {
        module: GradedModulePresentation::new(ring.clone(), syz.map),
        generators: row,
        independence_degree: t_ind,
    })
}

/// Expected minimal resolution over `R` of `I_{Z,X}` for `½(3r²-r)` general points:
/// `R(-r-3)^{r-1} -> R(-r-1)^{3r} -> R(-r)^{2r+1}`.
pub fn expected_point_betti(r: usize) -> BettiTable {
    let ri = r as i32;
    BettiTable {
        steps: vec![vec![-ri; 2 * r + 1], vec![-ri - 1; 3 * r], vec![-ri - 3; r - 1]],
    }
}

pub fn point_count(r: usize) -> usize {
    (3 * r * r - r) / 2
}

/// A point set that passed the general-position check.
#[derive(Clone, Debug)]
pub struct GeneralPoints {
    pub points: PointSet,
    pub ideal: PointIdeal,
    pub resolution: Resolution,
    /// Number of point sets rejected before this one.
    pub resamples: usize,
}

/// Resolution over `R` of the ideal of a point set, in the window `r + 5`.
pub fn point_ideal_resolution(ideal: &PointIdeal) -> Resolution {
    min_free_resolution(&ideal.module.over_ambient(), 4, 2)
}

/// Samples `½(3r²-r)` points until the ideal has the general-position Betti
/// table, trying at most `budget` point sets.
pub fn sample_general_points(ctx: &SurfaceContext, r: usize, seed: u64, budget: usize) -> Result<GeneralPoints> {
    if r < 2 {
        return Err(Error::Invalid("general point sets need rank r >= 2".into()));
    }
    let expected = expected_point_betti(r);
    let n = point_count(r);
    for attempt in 0..budget {
        let points = random_points(ctx, n, attempt_seed(seed, "general-points", attempt))?;
        let ideal = match ideal_of_points(&points, ctx, Some(r as i32 + 5)) {
            Ok(i) => i,
            Err(Error::WindowTooSmall(_)) => continue,
            Err(e) => return Err(e),
        };
        let resolution = point_ideal_resolution(&ideal);
        if resolution.complete && resolution.betti == expected {
            return Ok(GeneralPoints {
                points,
                ideal,
                resolution,
                resamples: attempt,
            });
        }
        log::info!("point set {attempt} not in general position: {:?}", resolution.betti.steps);
    }
    Err(Error::BudgetExhausted {
        what: format!("general position for {n} points"),
        attempts: budget,
    })
}

impl GradedMap {
    /// A column of generators `⊕ S(-d_i)` as the row map `⊕ S(-d_i) -> S`.
    pub fn transpose_row(&self) -> GradedMap {
        assert_eq!(self.rows(), 1, "expected a single target summand");
        let target_twist = self.target.twists[0];
        let source = GradedFree::new(self.source.twists.clone());
        let entries = (0..self.cols()).map(|j| self.entry(0, j).clone()).collect();
        GradedMap::new(source, GradedFree::new(vec![target_twist]), entries).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Form;

    fn ctx() -> SurfaceContext {
        SurfaceContext::random(PrimeField::new(32003).unwrap(), 5).unwrap()
    }

    #[test]
    fn roots_of_split_cubic() {
        let k = PrimeField::new(32003).unwrap();
        let mut rng = seeded(1, "t");
        // (s - 2)(s - 5)(s - 7)
        let g = [k.neg(70), 59, k.neg(14), 1];
        assert_eq!(univariate_roots(k, &g, &mut rng), vec![2, 5, 7]);
        // s^2 + 1 has no roots since 32003 ≡ 3 mod 4
        assert!(univariate_roots(k, &[1, 0, 1], &mut rng).is_empty());
    }

    #[test]
    fn sampled_points_lie_on_x() {
        let c = ctx();
        let z = random_points(&c, 200, 9).unwrap();
        z.validate(&c).unwrap();
        let mut rng = seeded(3, "retries");
        let total: usize = (0..300).map(|_| random_point_on_cubic(&c, &mut rng).unwrap().1).sum();
        // a random cubic over F_p has a root with probability about 2/3
        assert!((total as f64) / 300.0 < 3.0, "mean attempts {}", total as f64 / 300.0);
    }

    #[test]
    fn fermat_point() {
        let k = PrimeField::new(32003).unwrap();
        let f = (0..4)
            .map(|i| Form::var(i).pow(k, 3))
            .reduce(|a, b| a.add(k, &b).unwrap())
            .unwrap();
        let c = SurfaceContext::new(k, f).unwrap();
        let z = PointSet {
            points: vec![[1, k.neg(1), 0, 0]],
            seed: 0,
        };
        z.validate(&c).unwrap();
        let dup = PointSet {
            points: vec![[1, k.neg(1), 0, 0], [2, k.neg(2), 0, 0]],
            seed: 0,
        };
        assert!(matches!(dup.validate(&c), Err(Error::DuplicatePoint(1))));
        let off = PointSet {
            points: vec![[1, 1, 0, 0]],
            seed: 0,
        };
        assert!(matches!(off.validate(&c), Err(Error::PointOffSurface(0))));
    }

    #[test]
    fn ideal_of_one_point() {
        let c = ctx();
        let z = random_points(&c, 1, 4).unwrap();
        let id = ideal_of_points(&z, &c, None).unwrap();
        assert_eq!(id.generators.source.twists, vec![-1, -1, -1]);
        for j in 0..3 {
            assert_eq!(id.generators.entry(0, j).evaluate(c.field, &z.points[0]), 0);
        }
    }

    #[test]
    fn five_general_points() {
        let c = ctx();
        let g = sample_general_points(&c, 2, 1, 10).unwrap();
        assert_eq!(g.ideal.generators.source.twists, vec![-2; 5]);
        assert_eq!(g.resolution.betti, expected_point_betti(2));
        for j in 0..5 {
            for p in &g.points.points {
                assert_eq!(g.ideal.generators.entry(0, j).evaluate(c.field, p), 0);
            }
        }
        // R_X / I has Hilbert function |Z| from the regularity on
        let quotient = GradedModulePresentation::new(c.surface.clone(), g.ideal.generators.clone());
        for t in 3..6 {
            assert_eq!(quotient.hilbert_function(t), 5);
        }
        assert_eq!(g.ideal.module.hilbert_function(2), 5);
    }
}
