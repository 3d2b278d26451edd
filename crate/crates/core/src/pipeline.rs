//! End-to-end constructions and the verification battery.

use num_rational::Ratio;
use rand::Rng as _;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::context::SurfaceContext;
use crate::error::{Error, Result};
use crate::field::{FieldElem, PrimeField};
use crate::graded::{GradedFree, GradedMap, GradedModulePresentation};
use crate::mf::{adjugate3, det3, linear_frees, mf_from_presentation, MatrixFactorization, RankCheck, RANK_CHECK_TRIALS};
use crate::modules::{
    ext1_degree_zero, extension, hom_dimension, hom_polynomial, is_isomorphic, syzygy_module, IsoWitness,
};
use crate::points::{
    ideal_of_points, normalize, point_count, random_point_on_cubic, sample_general_points, Point, PointSet,
};
use crate::poly::{monomial_basis, Form};
use crate::resolution::{hilbert_polynomial, min_free_resolution, minimalize, BettiTable, DEFAULT_SLACK};
use crate::ring::Ring;
use crate::rng::{attempt_seed, derive_seed, seeded};

/// Resample budget for constructions that depend on general position.
pub const RESAMPLE_BUDGET: usize = 10;
/// Budget of lines through a point tried when looking for a split residual quadratic.
pub const LINE_BUDGET: usize = 20;
/// `χ(End)` needs Hom dimensions up to twist 6; above this rank it is skipped.
pub const CHI_END_MAX_RANK: usize = 3;

/// One labelled seed of a construction, in the order the seeds were drawn.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedStep {
    pub label: String,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Flags {
    #[serde(rename = "isMCM")]
    pub is_mcm: bool,
    pub is_reduced: bool,
    pub is_linear: bool,
    pub is_ulrich: bool,
    pub is_normalized: bool,
    pub is_simple: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub rank: usize,
    /// Size of the matrix factorization, when the module is MCM.
    pub size: Option<usize>,
    pub mu: usize,
    pub h0: usize,
    pub h0_minus_one: usize,
    /// `dim M_t` for `t = 0..=4`.
    pub hilbert: Vec<usize>,
    /// Hilbert polynomial coefficients `[c0, c1, c2]` as reduced fractions.
    pub hilbert_polynomial: Option<[String; 3]>,
    pub chi: Option<i64>,
    /// `c1 · H`, read off the Hilbert polynomial.
    pub degree: Option<i64>,
    pub slope: Option<String>,
    /// From Riemann-Roch with `c1 = rH`.
    pub c2: Option<String>,
    pub dim_end0: usize,
    pub dim_hom_minus_one: usize,
    pub chi_end: Option<i64>,
    pub h1_end: Option<i64>,
    pub rank_check: Option<RankCheck>,
    pub flags: Flags,
    pub seeds: Vec<SeedStep>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn all_flags(&self) -> bool {
        let f = &self.flags;
        f.is_mcm && f.is_reduced && f.is_linear && f.is_ulrich && f.is_normalized && f.is_simple
    }
}

#[derive(Clone, Debug)]
pub struct BatteryOptions {
    pub rank_check_trials: usize,
    pub chi_end: bool,
}

impl BatteryOptions {
    pub fn for_rank(r: usize) -> Self {
        BatteryOptions {
            rank_check_trials: RANK_CHECK_TRIALS,
            chi_end: r <= CHI_END_MAX_RANK,
        }
    }
}

fn ratio_string(x: Ratio<i64>) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Runs every check on `module` (over `R_X`) against rank `r`.
pub fn verify_battery(
    ctx: &SurfaceContext,
    module: &GradedModulePresentation,
    r: usize,
    seed: u64,
    opts: &BatteryOptions,
) -> (VerificationReport, Option<MatrixFactorization>) {
    let mut notes = Vec::new();
    let mut seeds = Vec::new();
    let mf = match mf_from_presentation(ctx, module) {
        Ok(mf) if mf.verify().valid => Some(mf),
        Ok(_) => {
            notes.push("recovered factorization failed verification".into());
            None
        }
        Err(e) => {
            notes.push(format!("not MCM: {e}"));
            None
        }
    };
    let minimal = minimalize(module);
    let mu = minimal.generators().rank();
    let h0 = module.hilbert_function(0);
    let h0_minus_one = module.hilbert_function(-1);
    let hilbert = (0..=4).map(|t| module.hilbert_function(t)).collect();

    let rank_check = mf.as_ref().map(|mf| {
        let s = derive_seed(seed, "rank-check");
        seeds.push(SeedStep {
            label: "rank-check".into(),
            seed: s,
        });
        let mut rng = seeded(s, "points");
        let rc = mf.rank_check(r, opts.rank_check_trials, &mut rng);
        notes.push(format!(
            "rank check: false-pass probability at most ({}/{})^{}",
            9 * r,
            ctx.p(),
            opts.rank_check_trials
        ));
        rc
    });

    let hp = match hilbert_polynomial(module) {
        Ok(hp) => Some(hp),
        Err(e) => {
            notes.push(format!("hilbert polynomial: {e}"));
            None
        }
    };
    let chi = hp.and_then(|hp| hp.eval(0).is_integer().then(|| hp.eval(0).to_integer()));
    let degree_ratio = hp.map(|hp| hp.coeffs[1] - hp.coeffs[2]);
    let degree = degree_ratio.and_then(|d| d.is_integer().then(|| d.to_integer()));
    let slope = degree_ratio.filter(|_| r > 0).map(|d| ratio_string(d / r as i64));
    let c2 = chi.map(|chi| {
        let ri = r as i64;
        // χ = r + c1·H/2 + (c1² - 2 c2)/2 with c1·H = 3r, c1² = 3r²
        ratio_string(Ratio::new(2 * ri + 3 * ri + 3 * ri * ri - 2 * chi, 2))
    });
    notes.push("c2 solved from Riemann-Roch assuming c1 = rH".into());

    let dim_end0 = hom_dimension(module, module).unwrap_or(0);
    let dim_hom_minus_one = hom_dimension(module, &module.twist(-1)).unwrap_or(0);
    let chi_end = if opts.chi_end && mf.is_some() {
        match hom_polynomial(module, module) {
            Ok(p) if p.eval(0).is_integer() => Some(p.eval(0).to_integer()),
            Ok(p) => {
                notes.push(format!("End polynomial {p} is not integral at 0"));
                None
            }
            Err(e) => {
                notes.push(format!("End polynomial: {e}"));
                None
            }
        }
    } else {
        None
    };
    let h1_end = chi_end.map(|c| dim_end0 as i64 + dim_hom_minus_one as i64 - c);

    let ri = r as i64;
    let size = mf.as_ref().map(MatrixFactorization::size);
    let is_mcm = mf.is_some();
    let is_reduced = mf.as_ref().is_some_and(MatrixFactorization::is_reduced);
    let is_linear = mf
        .as_ref()
        .is_some_and(|m| m.is_linear() && m.phi.target.twists.iter().all(|&a| a == 0));
    let is_normalized = h0_minus_one == 0 && h0 > 0;
    let is_ulrich = is_mcm
        && is_linear
        && mu == 3 * r
        && size == Some(3 * r)
        && h0 == 3 * r
        && h0_minus_one == 0
        && degree == Some(3 * ri)
        && c2.as_deref() == Some(((3 * ri * ri - ri) / 2).to_string().as_str())
        && rank_check.as_ref().is_some_and(|rc| rc.passed);
    let report = VerificationReport {
        rank: r,
        size,
        mu,
        h0,
        h0_minus_one,
        hilbert,
        hilbert_polynomial: hp.map(|hp| hp.coeffs.map(ratio_string)),
        chi,
        degree,
        slope,
        c2,
        dim_end0,
        dim_hom_minus_one,
        chi_end,
        h1_end,
        rank_check,
        flags: Flags {
            is_mcm,
            is_reduced,
            is_linear,
            is_ulrich,
            is_normalized,
            is_simple: dim_end0 == 1,
        },
        seeds,
        notes,
    };
    (report, mf)
}

#[derive(Clone, Debug)]
pub struct UlrichBundle {
    pub ctx: SurfaceContext,
    pub point_seed: u64,
    pub points: Option<PointSet>,
    pub module: GradedModulePresentation,
    pub mf: MatrixFactorization,
    pub report: VerificationReport,
}

/// Rank-`r` Ulrich bundle as an extension `0 -> R_X^{r-1} -> E -> I_Z(r) -> 0`
/// over `½(3r²-r)` general points, using the full basis of `Ext¹(I_Z(r), R_X)_0`.
/// Resamples the points until every report flag holds.
pub fn build_ulrich(ctx: &SurfaceContext, r: usize, seed: u64) -> Result<UlrichBundle> {
    if r < 2 {
        return Err(Error::Invalid("the point construction needs r >= 2; see rank1_ulrich".into()));
    }
    let opts = BatteryOptions::for_rank(r);
    let mut last_failure = String::new();
    for attempt in 0..RESAMPLE_BUDGET {
        let s = attempt_seed(seed, "ulrich", attempt);
        let general = sample_general_points(ctx, r, s, RESAMPLE_BUDGET)?;
        let m = general.ideal.module.twist(r as i32);
        if m.hilbert_function(-1) != 0 {
            last_failure = "h0(I_Z(r-1)) != 0".into();
            continue;
        }
        let ext = ext1_degree_zero(&m, &GradedModulePresentation::free(ctx.surface.clone(), GradedFree::new(vec![0])))?;
        if ext.dim() != r - 1 {
            last_failure = format!("Ext¹ has dimension {} instead of {}", ext.dim(), r - 1);
            continue;
        }
        let e = extension(&ext, &ext.classes)?;
        let (mut report, mf) = verify_battery(ctx, &e, r, s, &opts);
        report.seeds.insert(
            0,
            SeedStep {
                label: format!("ulrich#{attempt}"),
                seed: s,
            },
        );
        report.seeds.insert(
            0,
            SeedStep {
                label: "run".into(),
                seed,
            },
        );
        if general.resamples > 0 {
            report.notes.push(format!("{} point sets rejected for general position", general.resamples));
        }
        let ok = report.all_flags() && (r > CHI_END_MAX_RANK || report.chi_end == Some(-((r * r) as i64)));
        match mf {
            Some(mf) if ok => {
                return Ok(UlrichBundle {
                    ctx: ctx.clone(),
                    point_seed: general.points.seed,
                    points: Some(general.points),
                    module: e,
                    mf,
                    report,
                })
            }
            _ => last_failure = format!("report flags {:?}", report.flags),
        }
        log::info!("ulrich attempt {attempt} rejected: {last_failure}");
    }
    Err(Error::BudgetExhausted {
        what: format!("rank {r} Ulrich bundle ({last_failure})"),
        attempts: RESAMPLE_BUDGET,
    })
}

fn random_linear_map(k: PrimeField, n: usize, rng: &mut ChaCha8Rng) -> GradedMap {
    let b1 = monomial_basis(1);
    let entries = (0..n * n)
        .map(|_| Form::from_terms(k, 1, b1.iter().map(|m| (*m, rng.gen_range(0..k.p())))).unwrap())
        .collect();
    let (src, tgt) = linear_frees(n);
    GradedMap::new(src, tgt, entries).unwrap()
}

/// A random 3x3 linear `phi` whose determinant is a nonsingular cubic, with
/// the cubic it defines.
pub fn random_determinantal(k: PrimeField, seed: u64) -> Result<MatrixFactorization> {
    let poly = Ring::polynomial(k, 4);
    for attempt in 0..RESAMPLE_BUDGET {
        let mut rng = seeded(attempt_seed(seed, "determinantal", attempt), "phi");
        let phi = random_linear_map(k, 3, &mut rng);
        let f = det3(&poly, &phi);
        let Ok(ctx) = SurfaceContext::new(k, f) else { continue };
        let psi = adjugate3(&ctx.poly, &phi)?;
        return MatrixFactorization::new(ctx, phi, psi);
    }
    Err(Error::BudgetExhausted {
        what: "nonsingular determinantal cubic".into(),
        attempts: RESAMPLE_BUDGET,
    })
}

fn bundle_from_mf(mf: MatrixFactorization, r: usize, seed: u64) -> UlrichBundle {
    let module = mf.module();
    let (mut report, _) = verify_battery(&mf.ctx, &module, r, seed, &BatteryOptions::for_rank(r));
    report.seeds.insert(
        0,
        SeedStep {
            label: "run".into(),
            seed,
        },
    );
    UlrichBundle {
        ctx: mf.ctx.clone(),
        point_seed: seed,
        points: None,
        module,
        mf,
        report,
    }
}

/// Rank-1 Ulrich module `coker(phi)` of a random 3x3 linear `phi`, on the
/// cubic `f = det phi` (the module of a twisted cubic on `X`, twisted).
pub fn rank1_ulrich(k: PrimeField, seed: u64) -> Result<UlrichBundle> {
    Ok(bundle_from_mf(random_determinantal(k, seed)?, 1, seed))
}

/// The companion rank-1 module `coker(phi^T(-1))` on the same cubic.
pub fn rank1_transpose(u: &UlrichBundle, seed: u64) -> Result<UlrichBundle> {
    let phi = u.mf.phi.transpose().twist(-1);
    let psi = u.mf.psi.transpose().twist(-4);
    let mf = MatrixFactorization::new(u.ctx.clone(), phi, psi)?;
    Ok(bundle_from_mf(mf, 1, seed))
}

#[derive(Clone, Debug)]
pub struct ExtensionBundle {
    pub module: GradedModulePresentation,
    pub mf: Option<MatrixFactorization>,
    pub report: VerificationReport,
    /// No nonzero class was available; the module is the direct sum.
    pub split: bool,
    pub ext_dim: usize,
}

/// `0 -> U1 -> E -> U2 -> 0` for a random class of `Ext¹(U2, U1)_0`, or the
/// direct sum when that space vanishes.
pub fn build_ulrich_by_extension(u1: &UlrichBundle, u2: &UlrichBundle, seed: u64) -> Result<ExtensionBundle> {
    if u1.ctx != u2.ctx {
        return Err(Error::RingMismatch);
    }
    let r = u1.report.rank + u2.report.rank;
    let ext = ext1_degree_zero(&u2.module, &u1.module)?;
    let mut rng = seeded(seed, "extension-class");
    let (module, split) = if ext.dim() == 0 {
        (u1.module.direct_sum(&u2.module)?, true)
    } else {
        let mut class = ext.random_class(&mut rng)?;
        while class.representative.is_zero() {
            class = ext.random_class(&mut rng)?;
        }
        (extension(&ext, &[class])?, false)
    };
    let (mut report, mf) = verify_battery(&u1.ctx, &module, r, seed, &BatteryOptions::for_rank(r));
    if split {
        report.notes.push("Ext¹ vanished; direct sum used".into());
    }
    Ok(ExtensionBundle {
        module,
        mf,
        report,
        split,
        ext_dim: ext.dim(),
    })
}

/// Betti table of a module over `R_X` computed over `R`.
pub fn ambient_betti(m: &GradedModulePresentation) -> BettiTable {
    min_free_resolution(&m.over_ambient(), 4, DEFAULT_SLACK).betti
}

/// First `steps` twists of the minimal resolution over `R_X`.
pub fn surface_betti(m: &GradedModulePresentation, steps: usize) -> BettiTable {
    min_free_resolution(m, steps, DEFAULT_SLACK).betti
}

/// From step 1 on, each step is the one two before it twisted by `-3`.
pub fn is_two_periodic(b: &BettiTable) -> bool {
    b.steps.len() >= 3
        && (3..b.steps.len()).all(|i| {
            let mut shifted: Vec<i32> = b.steps[i - 2].iter().map(|a| a - 3).collect();
            shifted.sort_unstable_by(|a, b| b.cmp(a));
            shifted == b.steps[i]
        })
        && {
            let mut shifted: Vec<i32> = b.steps[0].iter().map(|a| a - 3).collect();
            shifted.sort_unstable_by(|a, b| b.cmp(a));
            shifted == b.steps[2]
        }
}

fn table(steps: &[&[i32]]) -> BettiTable {
    BettiTable {
        steps: steps.iter().map(|s| s.to_vec()).collect(),
    }
}

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn betti(name: &str, got: &BettiTable, expected: &BettiTable) -> Check {
        Check {
            name: name.into(),
            passed: got == expected,
            detail: format!("got {:?}, expected {:?}", got.steps, expected.steps),
        }
    }

    fn iso(name: &str, w: &Option<IsoWitness>) -> Check {
        Check {
            name: name.into(),
            passed: w.is_some(),
            detail: match w {
                Some(w) => format!("witness found on attempt {} over degrees {:?}", w.attempts, w.window),
                None => "no isomorphism found".into(),
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct LineConicExamples {
    pub ctx: SurfaceContext,
    pub j_line: GradedModulePresentation,
    pub j_conic: GradedModulePresentation,
    pub j_cubic: GradedModulePresentation,
    pub checks: Vec<Check>,
}

/// Ideal of `X` generated by `gens` (forms of `R`), as an `R_X`-module.
fn ideal_module(ctx: &SurfaceContext, gens: &[Form]) -> Result<GradedModulePresentation> {
    let source = GradedFree::new(gens.iter().map(|g| -g.deg()).collect());
    let row = GradedMap::new(source, GradedFree::new(vec![0]), gens.iter().map(|g| ctx.surface.reduce(g)).collect())?;
    let t_max = gens.iter().map(Form::deg).max().unwrap_or(0) + DEFAULT_SLACK;
    let syz = crate::resolution::kernel_module_generators(&ctx.surface, &row, t_max);
    Ok(GradedModulePresentation::new(ctx.surface.clone(), syz.map))
}

/// A cubic containing the line `L = {x0 = x1 = 0}`, the residual conic `C`
/// in the plane `x0 = 0` and a twisted cubic `Γ`, with the ideal sheaves'
/// resolutions and syzygy relations.
///
/// The cubic is `det phi` for a random linear `phi` with first row
/// `(x0, x1, 0)`, so `f = x0·a + x1·b`; `Γ` is cut out by the 2x2 minors of
/// the first two columns.
pub fn line_conic_examples(k: PrimeField, seed: u64) -> Result<LineConicExamples> {
    let poly = Ring::polynomial(k, 4);
    for attempt in 0..RESAMPLE_BUDGET {
        let mut rng = seeded(attempt_seed(seed, "line-conic", attempt), "phi");
        let mut phi = random_linear_map(k, 3, &mut rng);
        phi.set_entry(0, 0, Form::var(0))?;
        phi.set_entry(0, 1, Form::var(1))?;
        phi.set_entry(0, 2, Form::zero(1))?;
        let f = det3(&poly, &phi);
        let Ok(ctx) = SurfaceContext::new(k, f) else { continue };
        let adj = adjugate3(&poly, &phi)?;
        // f = x0 * adj(0,0) + x1 * adj(1,0)
        let b = adj.entry(1, 0).clone();
        if b.is_zero() {
            continue;
        }
        let j_line = ideal_module(&ctx, &[Form::var(0), Form::var(1)])?;
        let j_conic = ideal_module(&ctx, &[Form::var(0), b])?;
        let minors: Vec<Form> = (0..3).map(|i| adj.entry(2, i).clone()).collect();
        let j_cubic = ideal_module(&ctx, &minors)?;

        let mut checks = vec![
            Check::betti("J_L resolution", &ambient_betti(&j_line), &table(&[&[-1, -1], &[-2, -3]])),
            Check::betti("J_C resolution", &ambient_betti(&j_conic), &table(&[&[-1, -2], &[-3, -3]])),
            Check::betti("J_Gamma resolution", &ambient_betti(&j_cubic), &table(&[&[-2, -2, -2], &[-3, -3, -3]])),
        ];
        let mut rng = seeded(seed, "line-conic-iso");
        let sl = syzygy_module(&j_line)?;
        let w = is_isomorphic(&sl, &j_conic.twist(-1), None, &mut rng)?;
        checks.push(Check::iso("J_L syzygy ≅ J_C(-1)", &w));
        let sc = syzygy_module(&j_conic)?;
        let w = is_isomorphic(&sc, &j_line.twist(-2), None, &mut rng)?;
        checks.push(Check::iso("J_C syzygy ≅ J_L(-2)", &w));
        let ext = ext1_degree_zero(&j_line, &j_conic)?;
        checks.push(Check {
            name: "Ext¹(J_L, J_C)_0 nonzero".into(),
            passed: ext.dim() >= 1,
            detail: format!("dimension {}", ext.dim()),
        });
        return Ok(LineConicExamples {
            ctx,
            j_line,
            j_conic,
            j_cubic,
            checks,
        });
    }
    Err(Error::BudgetExhausted {
        what: "cubic through a line".into(),
        attempts: RESAMPLE_BUDGET,
    })
}

/// Three collinear points `P, Q, R` of `X`: a random line through `P` whose
/// residual quadratic splits into distinct roots.
pub fn collinear_triple(ctx: &SurfaceContext, p: Point, rng: &mut ChaCha8Rng) -> Result<(Point, Point)> {
    let k = ctx.field;
    for _ in 0..LINE_BUDGET {
        let d: Point = std::array::from_fn(|_| rng.gen_range(0..k.p()));
        // f(P + sD) = s (c1 + c2 s + c3 s^2); recover c1..c3 by evaluation at s = 1, 2, 3
        let at = |s: FieldElem| {
            let q: Point = std::array::from_fn(|i| k.add(p[i], k.mul(s, d[i])));
            k.mul(ctx.f.evaluate(k, &q), k.inv(s))
        };
        let (g1, g2, g3) = (at(1), at(2), at(3));
        // quadratic through (1, g1), (2, g2), (3, g3)
        let inv2 = k.inv(2);
        let c3 = k.mul(k.add(k.sub(g3, k.mul(2, g2)), g1), inv2);
        let c2 = k.sub(k.sub(g2, g1), k.mul(3, c3));
        let c1 = k.sub(k.sub(g1, c2), c3);
        if c3 == 0 || c1 == 0 {
            continue;
        }
        let disc = k.sub(k.mul(c2, c2), k.mul(4, k.mul(c1, c3)));
        if disc == 0 || !k.is_square(disc) {
            continue;
        }
        let roots = crate::points::univariate_roots(k, &[c1, c2, c3], rng);
        if roots.len() != 2 {
            continue;
        }
        let pt = |s: FieldElem| normalize(k, std::array::from_fn(|i| k.add(p[i], k.mul(s, d[i]))));
        return Ok((pt(roots[0]), pt(roots[1])));
    }
    Err(Error::BudgetExhausted {
        what: "line through P meeting X in three rational points".into(),
        attempts: LINE_BUDGET,
    })
}

#[derive(Clone, Debug)]
pub struct PointBundleExamples {
    pub p: Point,
    pub q: Point,
    pub r: Point,
    pub n_p: GradedModulePresentation,
    pub n_qr: GradedModulePresentation,
    pub checks: Vec<Check>,
}

/// `0 -> R_X -> N_P -> I_P -> 0` and `0 -> R_X(-1) -> N_{Q+R} -> I_{Q+R} -> 0`
/// for collinear `P, Q, R` on `X`, with their periodic resolutions and
/// `N_P^σ ≅ N_{Q+R}(-1)`.
pub fn point_bundle_examples(ctx: &SurfaceContext, seed: u64) -> Result<PointBundleExamples> {
    let mut rng = seeded(seed, "point-bundles");
    let (p, _) = random_point_on_cubic(ctx, &mut rng)?;
    let (q, r) = collinear_triple(ctx, p, &mut rng)?;
    let ox = GradedModulePresentation::free(ctx.surface.clone(), GradedFree::new(vec![0]));
    let one = PointSet {
        points: vec![p],
        seed,
    };
    let two = PointSet {
        points: vec![q, r],
        seed,
    };
    let i_p = ideal_of_points(&one, ctx, None)?.module;
    let i_qr = ideal_of_points(&two, ctx, None)?.module;

    let ext_p = ext1_degree_zero(&i_p, &ox)?;
    let ext_qr = ext1_degree_zero(&i_qr.twist(1), &ox)?;
    if ext_p.dim() == 0 || ext_qr.dim() == 0 {
        return Err(Error::Invalid(format!(
            "extension spaces have dimensions {} and {}",
            ext_p.dim(),
            ext_qr.dim()
        )));
    }
    let n_p = extension(&ext_p, &[ext_p.random_class(&mut rng)?])?;
    let n_qr = extension(&ext_qr, &[ext_qr.random_class(&mut rng)?])?.twist(-1);

    let bp = surface_betti(&n_p, 4);
    let bqr = surface_betti(&n_qr, 4);
    let mut checks = vec![
        Check::betti(
            "N_P period",
            &BettiTable {
                steps: bp.steps.iter().take(2).cloned().collect(),
            },
            &table(&[&[0, -1, -1, -1], &[-2, -2, -2, -3]]),
        ),
        Check {
            name: "N_P 2-periodic".into(),
            passed: is_two_periodic(&bp),
            detail: format!("{:?}", bp.steps),
        },
        Check::betti(
            "N_Q+R period",
            &BettiTable {
                steps: bqr.steps.iter().take(2).cloned().collect(),
            },
            &table(&[&[-1, -1, -1, -2], &[-2, -3, -3, -3]]),
        ),
        Check {
            name: "N_Q+R 2-periodic".into(),
            passed: is_two_periodic(&bqr),
            detail: format!("{:?}", bqr.steps),
        },
    ];
    let sigma = syzygy_module(&n_p)?;
    let mut iso_rng = seeded(seed, "point-bundles-iso");
    let w = is_isomorphic(&sigma, &n_qr.twist(-1), None, &mut iso_rng)?;
    checks.push(Check::iso("N_P syzygy ≅ N_Q+R(-1)", &w));
    Ok(PointBundleExamples {
        p,
        q,
        r,
        n_p,
        n_qr,
        checks,
    })
}

/// A labelled MCM module of the test corpus with its rank.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub label: String,
    pub mf: MatrixFactorization,
    pub rank: usize,
}

/// Random direct sums, twists, duals and syzygies of the given factorizations.
pub fn mcm_corpus(bases: &[(String, MatrixFactorization, usize)], count: usize, seed: u64) -> Vec<CorpusEntry> {
    let mut rng = seeded(seed, "corpus");
    let mut out: Vec<CorpusEntry> = bases
        .iter()
        .map(|(l, mf, r)| CorpusEntry {
            label: l.clone(),
            mf: mf.clone(),
            rank: *r,
        })
        .collect();
    while out.len() < count {
        let a = out[rng.gen_range(0..out.len())].clone();
        let entry = match rng.gen_range(0..4) {
            0 => {
                let b = &out[rng.gen_range(0..out.len())];
                if a.mf.size() + b.mf.size() > 12 {
                    continue;
                }
                let Ok(mf) = a.mf.direct_sum(&b.mf) else { continue };
                CorpusEntry {
                    label: format!("({})+({})", a.label, b.label),
                    mf,
                    rank: a.rank + b.rank,
                }
            }
            1 => {
                let t = rng.gen_range(-2..=2);
                CorpusEntry {
                    label: format!("({})({t})", a.label),
                    mf: a.mf.twist(t),
                    rank: a.rank,
                }
            }
            2 => CorpusEntry {
                label: format!("dual({})", a.label),
                mf: a.mf.dual(),
                rank: a.rank,
            },
            // the syzygy of a module with `mu` generators has rank `mu - rank`
            _ => CorpusEntry {
                label: format!("syz({})", a.label),
                rank: a.mf.size() - a.rank,
                mf: a.mf.syzygy(),
            },
        };
        out.push(entry);
    }
    out
}

/// Number of points used for rank `r`.
pub fn points_for_rank(r: usize) -> usize {
    point_count(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k() -> PrimeField {
        PrimeField::new(32003).unwrap()
    }

    #[test]
    fn rank_two_bundle() {
        let ctx = SurfaceContext::random(k(), 1).unwrap();
        let b = build_ulrich(&ctx, 2, 7).unwrap();
        let rep = &b.report;
        assert!(rep.all_flags(), "{rep:?}");
        assert_eq!(rep.mu, 6);
        assert_eq!(rep.h0, 6);
        assert_eq!(rep.chi, Some(6));
        assert_eq!(rep.c2.as_deref(), Some("5"));
        assert_eq!(rep.slope.as_deref(), Some("3"));
        assert_eq!(rep.chi_end, Some(-4));
        assert_eq!(rep.h1_end, Some(5));
        assert_eq!(rep.hilbert, vec![6, 18, 36, 60, 90]);
        assert_eq!(b.mf.size(), 6);
    }

    #[test]
    fn rank_one_and_its_transpose() {
        let u = rank1_ulrich(k(), 3).unwrap();
        assert!(u.report.flags.is_ulrich, "{:?}", u.report);
        assert_eq!(u.report.hilbert[..3], [3, 9, 18]);
        let v = rank1_transpose(&u, 4).unwrap();
        assert!(v.report.flags.is_ulrich, "{:?}", v.report);
    }

    #[test]
    fn free_module_is_mcm_not_ulrich() {
        let ctx = SurfaceContext::random(k(), 2).unwrap();
        let ox = GradedModulePresentation::free(ctx.surface.clone(), GradedFree::new(vec![0]));
        let (rep, _) = verify_battery(&ctx, &ox, 1, 0, &BatteryOptions::for_rank(1));
        assert!(rep.flags.is_mcm);
        assert!(!rep.flags.is_ulrich);
        assert_eq!(rep.mu, 1);
        assert_eq!(rep.chi, Some(1));
    }

    #[test]
    fn point_ideal_is_not_mcm() {
        let ctx = SurfaceContext::random(k(), 2).unwrap();
        let g = sample_general_points(&ctx, 2, 3, RESAMPLE_BUDGET).unwrap();
        let (rep, mf) = verify_battery(&ctx, &g.ideal.module.twist(2), 2, 0, &BatteryOptions::for_rank(2));
        assert!(mf.is_none());
        assert!(!rep.flags.is_mcm);
    }

    #[test]
    fn periodicity_helper() {
        let b = table(&[&[0, 0, 0], &[-1, -1, -1], &[-3, -3, -3], &[-4, -4, -4]]);
        assert!(is_two_periodic(&b));
        let c = table(&[&[0, 0, 0], &[-1, -1, -1], &[-3, -3, -4]]);
        assert!(!is_two_periodic(&c));
    }
}
