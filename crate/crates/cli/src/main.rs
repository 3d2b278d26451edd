//! `ulrich`: build and verify Ulrich bundles on cubic surfaces.
//!
//! Exit codes: 0 when every requested check passes, 1 when a verification
//! fails or a construction runs out of budget, 2 on usage, IO or parse errors.

mod input;
mod text;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use ulrich_core::json::{
    bundle_to_json, form_to_json, hom_basis_to_json, mf_to_json, module_to_json, report_to_json, to_pretty,
};
use ulrich_core::mf::RANK_CHECK_TRIALS;
use ulrich_core::modules::{
    ext1_degree_zero, extension, hom_degree_zero, is_isomorphic, linear_hilbert_polynomial, restrict_to_hyperplane,
    HomBasis,
};
use ulrich_core::pipeline::{
    build_ulrich, line_conic_examples, point_bundle_examples, rank1_ulrich, surface_betti, verify_battery,
    BatteryOptions, UlrichBundle, VerificationReport, CHI_END_MAX_RANK, RESAMPLE_BUDGET,
};
use ulrich_core::points::sample_general_points;
use ulrich_core::resolution::{min_free_resolution, DEFAULT_SLACK};
use ulrich_core::rng::seeded;
use ulrich_core::{Form, PrimeField, SurfaceContext, DEFAULT_PRIME};

use input::{load_cubic, load_module, load_pair, Artifact, UsageError};

#[derive(Parser)]
#[command(name = "ulrich", version, about = "Ulrich bundles on cubic surfaces via matrix factorizations")]
struct Cli {
    /// Odd prime above 1000 for the coefficient field.
    #[arg(long, global = true, env = "ULRICH_PRIME", default_value_t = DEFAULT_PRIME)]
    prime: u32,
    /// Write the JSON artifact to this file.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    /// Print the JSON artifact on stdout instead of the text report.
    #[arg(long, global = true)]
    json: bool,
    /// Log verbosity; repeat for more.
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a rank-r Ulrich bundle.
    Build {
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cubic as Form JSON or an object with "f"; random from the seed otherwise.
        #[arg(long)]
        cubic: Option<PathBuf>,
        /// Points used by the determinant test.
        #[arg(long, default_value_t = RANK_CHECK_TRIALS)]
        trials: usize,
    },
    /// Re-verify a bundle or matrix factorization file.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = RANK_CHECK_TRIALS)]
        trials: usize,
    },
    /// Minimal free resolution of a module, as a Betti diagram.
    Resolve {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        steps: usize,
        /// Resolve over the polynomial ring instead of the surface ring.
        #[arg(long)]
        ambient: bool,
    },
    /// Matrix factorization operations.
    Mf {
        #[command(subcommand)]
        op: MfOp,
    },
    /// Basis of Hom(A, B)_0.
    Hom { a: PathBuf, b: PathBuf },
    /// Dimension of Ext¹(A, B)_0.
    Ext1 { a: PathBuf, b: PathBuf },
    /// Extension 0 -> B -> E -> A -> 0 by a random nonzero class.
    Extend {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Search for a degree-0 isomorphism A -> B.
    Iso {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Restrict a module to a hyperplane section.
    Restrict {
        file: PathBuf,
        /// Coefficients c0,c1,c2,c3 of the hyperplane; random from the seed otherwise.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        hyperplane: Option<Vec<i64>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Worked examples with a line, conic, twisted cubic and points.
    Examples {
        #[arg(long)]
        section: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Sample points in general position for rank r.
    Points {
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        cubic: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MfOp {
    /// Check phi*psi = psi*phi = f*Id.
    Verify { file: PathBuf },
    Dual { file: PathBuf },
    Syzygy { file: PathBuf },
    Sum { a: PathBuf, b: PathBuf },
}

/// Result of one command: the artifact, the text report and whether every check passed.
struct Outcome {
    artifact: Value,
    report: String,
    passed: bool,
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn field(p: u32) -> anyhow::Result<PrimeField> {
    if p <= 1000 {
        return Err(usage(format!("prime {p} must exceed 1000")));
    }
    PrimeField::new(p).map_err(|e| usage(e.to_string()))
}

fn cubic(k: PrimeField, path: Option<&Path>, seed: u64) -> anyhow::Result<SurfaceContext> {
    match path {
        Some(p) => load_cubic(p, k),
        None => Ok(SurfaceContext::random(k, seed)?),
    }
}

fn bundle_outcome(b: &UlrichBundle) -> Outcome {
    let report = format!(
        "rank {} Ulrich bundle on a cubic over F_{} (point seed {})\n{}{}",
        b.report.rank,
        b.ctx.p(),
        b.point_seed,
        text::mf_check(&b.mf.verify()),
        text::report(&b.report)
    );
    Outcome {
        artifact: bundle_to_json(b),
        passed: b.report.all_flags(),
        report,
    }
}

fn build(k: PrimeField, rank: usize, seed: u64, cubic_path: Option<&Path>, trials: usize) -> anyhow::Result<Outcome> {
    if rank == 0 {
        return Err(usage("rank must be at least 1"));
    }
    let mut b = if rank == 1 {
        if cubic_path.is_some() {
            return Err(usage("rank 1 bundles choose their own determinantal cubic; drop --cubic"));
        }
        rank1_ulrich(k, seed)?
    } else {
        build_ulrich(&cubic(k, cubic_path, seed)?, rank, seed)?
    };
    if trials != RANK_CHECK_TRIALS {
        let opts = BatteryOptions {
            rank_check_trials: trials,
            chi_end: rank <= CHI_END_MAX_RANK,
        };
        let (mut report, _) = verify_battery(&b.ctx, &b.module, rank, seed, &opts);
        report.seeds.splice(0..0, b.report.seeds.iter().take(2).cloned());
        b.report = report;
    }
    Ok(bundle_outcome(&b))
}

/// Report fields that do not depend on the seed chain.
fn invariant_part(r: &VerificationReport) -> VerificationReport {
    let mut r = r.clone();
    r.seeds.clear();
    r.notes.clear();
    r
}

fn verify(file: &Path, trials: usize) -> anyhow::Result<Outcome> {
    match Artifact::load(file)? {
        Artifact::Bundle(b) => {
            let check = b.mf.verify();
            let rank = b.report.rank;
            let seed = b.report.seeds.iter().find(|s| s.label.starts_with("ulrich#")).map_or(0, |s| s.seed);
            let opts = BatteryOptions {
                rank_check_trials: trials,
                chi_end: rank <= CHI_END_MAX_RANK,
            };
            let (fresh, _) = verify_battery(&b.ctx, &b.module, rank, seed, &opts);
            let matches = invariant_part(&fresh) == invariant_part(&b.report);
            let mut report = text::mf_check(&check);
            report.push_str(&text::report(&fresh));
            if !matches {
                report.push_str("stored report differs from the recomputed one\n");
            }
            Ok(Outcome {
                artifact: json!({"verified": check.valid, "matchesStored": matches, "report": report_to_json(&fresh)}),
                passed: check.valid && matches && fresh.all_flags(),
                report,
            })
        }
        Artifact::Factorization(mf) => Ok(mf_verify(&mf)),
        Artifact::Module(..) => Err(usage(format!("{}: expected a bundle or matrix factorization", file.display()))),
    }
}

fn mf_verify(mf: &ulrich_core::MatrixFactorization) -> Outcome {
    let check = mf.verify();
    let mut report = format!("{}x{} factorization over F_{}\n", mf.size(), mf.size(), mf.ctx.p());
    report.push_str(&text::mf_check(&check));
    if check.valid {
        report.push_str(&format!(
            "rank {}  reduced {}  linear {}  mu {}\n",
            mf.rank().map_or_else(|| "-".into(), |r| r.to_string()),
            mf.is_reduced(),
            mf.is_linear(),
            mf.mu()
        ));
    }
    Outcome {
        artifact: serde_json::to_value(&check).expect("checks serialize"),
        passed: check.valid,
        report,
    }
}

fn mf_op(op: &MfOp) -> anyhow::Result<Outcome> {
    let load = |p: &Path| Artifact::load(p)?.factorization(p);
    let mf = match op {
        MfOp::Verify { file } => return Ok(mf_verify(&load(file)?)),
        MfOp::Dual { file } => load(file)?.dual(),
        MfOp::Syzygy { file } => load(file)?.syzygy(),
        MfOp::Sum { a, b } => load(a)?.direct_sum(&load(b)?).map_err(|e| usage(e.to_string()))?,
    };
    let check = mf_verify(&mf);
    Ok(Outcome {
        artifact: mf_to_json(&mf),
        ..check
    })
}

fn resolve(file: &Path, steps: usize, ambient: bool) -> anyhow::Result<Outcome> {
    let (_, m) = load_module(file)?;
    let res = if ambient {
        min_free_resolution(&m.over_ambient(), steps, DEFAULT_SLACK)
    } else {
        min_free_resolution(&m, steps, DEFAULT_SLACK)
    };
    let mut report = res.betti.to_string();
    if res.window_exhausted {
        report.push_str("warning: degree window exhausted; later steps may be incomplete\n");
    }
    Ok(Outcome {
        artifact: serde_json::to_value(&res.betti)?,
        passed: !res.window_exhausted,
        report,
    })
}

fn hom(a: &Path, b: &Path) -> anyhow::Result<Outcome> {
    let (ctx, ma, mb) = load_pair(a, b)?;
    let basis = hom_degree_zero(&ma, &mb)?;
    Ok(Outcome {
        report: format!("dim Hom(A, B)_0 = {}\n", basis.dim()),
        artifact: hom_basis_to_json(&ctx, &basis),
        passed: true,
    })
}

fn ext1(a: &Path, b: &Path) -> anyhow::Result<Outcome> {
    let (_, ma, mb) = load_pair(a, b)?;
    let ext = ext1_degree_zero(&ma, &mb)?;
    Ok(Outcome {
        report: format!(
            "dim Ext¹(A, B)_0 = {} (cocycles {}, coboundaries {})\n",
            ext.dim(),
            ext.cocycle_dim,
            ext.coboundary_dim
        ),
        artifact: json!({"dim": ext.dim(), "cocycleDim": ext.cocycle_dim, "coboundaryDim": ext.coboundary_dim}),
        passed: true,
    })
}

fn extend(a: &Path, b: &Path, seed: u64) -> anyhow::Result<Outcome> {
    let (ctx, ma, mb) = load_pair(a, b)?;
    let ext = ext1_degree_zero(&ma, &mb)?;
    if ext.dim() == 0 {
        return Ok(Outcome {
            artifact: Value::Null,
            report: "Ext¹(A, B)_0 = 0: every extension splits\n".into(),
            passed: false,
        });
    }
    let mut rng = seeded(seed, "extension-class");
    let mut class = ext.random_class(&mut rng)?;
    while class.representative.is_zero() {
        class = ext.random_class(&mut rng)?;
    }
    let e = extension(&ext, &[class])?;
    let hf: Vec<String> = (0..=4).map(|t| e.hilbert_function(t).to_string()).collect();
    Ok(Outcome {
        report: format!(
            "extension with {} generators; hilbert function (t = 0..4): {}\n",
            e.generators().rank(),
            hf.join(" ")
        ),
        artifact: module_to_json(&ctx, &e),
        passed: true,
    })
}

fn iso(a: &Path, b: &Path, seed: u64) -> anyhow::Result<Outcome> {
    let (ctx, ma, mb) = load_pair(a, b)?;
    let mut rng = seeded(seed, "iso");
    Ok(match is_isomorphic(&ma, &mb, None, &mut rng)? {
        Some(w) => Outcome {
            report: format!(
                "isomorphic: witness on attempt {}, bijective in degrees {}..={}\n",
                w.attempts, w.window.0, w.window.1
            ),
            artifact: json!({
                "isomorphic": true,
                "window": [w.window.0, w.window.1],
                "witness": hom_basis_to_json(&ctx, &HomBasis { source: ma, target: mb, maps: vec![w.map] }),
            }),
            passed: true,
        },
        None => Outcome {
            report: "no isomorphism found\n".into(),
            artifact: json!({"isomorphic": false}),
            passed: false,
        },
    })
}

fn restrict(file: &Path, hyperplane: Option<&[i64]>, seed: u64) -> anyhow::Result<Outcome> {
    let (ctx, m) = load_module(file)?;
    let k = ctx.field;
    let coeffs: Vec<u32> = match hyperplane {
        Some(c) if c.len() != 4 => return Err(usage(format!("a hyperplane needs 4 coefficients, got {}", c.len()))),
        Some(c) => c.iter().map(|&x| k.from_i64(x)).collect(),
        None => {
            use rand::Rng;
            let mut rng = seeded(seed, "hyperplane");
            (0..4).map(|_| rng.gen_range(0..k.p())).collect()
        }
    };
    let h = Form::linear(k, &coeffs);
    let eh = match restrict_to_hyperplane(&m, &h) {
        Ok(eh) => eh,
        Err(e @ ulrich_core::Error::DegenerateHyperplane(_)) => return Err(usage(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let hf: Vec<usize> = (0..=4).map(|t| eh.hilbert_function(t)).collect();
    let lin = linear_hilbert_polynomial(&eh, 1);
    let mut report = format!(
        "hyperplane {:?}\nh0(E_H) = {}\nhilbert function (t = 0..4): {:?}\n",
        coeffs, hf[0], hf
    );
    let poly = match &lin {
        Ok((c0, c1)) => {
            report.push_str(&format!("hilbert polynomial: {c1} t + {c0}\n"));
            json!([c0, c1])
        }
        Err(e) => {
            report.push_str(&format!("hilbert polynomial: {e}\n"));
            Value::Null
        }
    };
    Ok(Outcome {
        artifact: json!({"hyperplane": form_to_json(&h), "h0": hf[0], "hilbert": hf, "hilbertPolynomial": poly}),
        passed: lin.is_ok(),
        report,
    })
}

fn examples(k: PrimeField, section: u32, seed: u64) -> anyhow::Result<Outcome> {
    if section != 6 {
        return Err(usage(format!("no worked examples for section {section}; only 6 is available")));
    }
    let lc = line_conic_examples(k, seed)?;
    let pb = point_bundle_examples(&lc.ctx, seed)?;
    let mut report = String::from("line L, residual conic C and twisted cubic on a cubic through L\n");
    report.push_str(&text::checks(&lc.checks));
    report.push_str(&format!("collinear points P = {:?}, Q = {:?}, R = {:?}\n", pb.p, pb.q, pb.r));
    report.push_str(&text::checks(&pb.checks));
    for (name, m) in [("N_P", &pb.n_p), ("N_Q+R", &pb.n_qr)] {
        report.push_str(&format!("{name} over R_X:\n{}", surface_betti(m, 4)));
    }
    let all: Vec<_> = lc.checks.iter().chain(&pb.checks).collect();
    Ok(Outcome {
        passed: all.iter().all(|c| c.passed),
        artifact: json!({
            "p": lc.ctx.p(),
            "f": form_to_json(&lc.ctx.f),
            "checks": serde_json::to_value(&all)?,
            "points": [pb.p, pb.q, pb.r],
        }),
        report,
    })
}

fn points(k: PrimeField, rank: usize, seed: u64, cubic_path: Option<&Path>) -> anyhow::Result<Outcome> {
    if rank < 2 {
        return Err(usage("points are needed for rank >= 2"));
    }
    let ctx = cubic(k, cubic_path, seed)?;
    let g = sample_general_points(&ctx, rank, seed, RESAMPLE_BUDGET)?;
    let report = format!(
        "{} points in general position for rank {rank} ({} resamples)\nideal over R:\n{}",
        g.points.len(),
        g.resamples,
        g.resolution.betti
    );
    Ok(Outcome {
        artifact: json!({
            "p": ctx.p(),
            "f": form_to_json(&ctx.f),
            "rank": rank,
            "seed": g.points.seed,
            "points": g.points.points,
            "resamples": g.resamples,
            "betti": serde_json::to_value(&g.resolution.betti)?,
        }),
        passed: true,
        report,
    })
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let k = || field(cli.prime);
    match &cli.command {
        Command::Build { rank, seed, cubic, trials } => build(k()?, *rank, *seed, cubic.as_deref(), *trials),
        Command::Verify { file, trials } => verify(file, *trials),
        Command::Resolve { file, steps, ambient } => resolve(file, *steps, *ambient),
        Command::Mf { op } => mf_op(op),
        Command::Hom { a, b } => hom(a, b),
        Command::Ext1 { a, b } => ext1(a, b),
        Command::Extend { a, b, seed } => extend(a, b, *seed),
        Command::Iso { a, b, seed } => iso(a, b, *seed),
        Command::Restrict { file, hyperplane, seed } => restrict(file, hyperplane.as_deref(), *seed),
        Command::Examples { section, seed } => examples(k()?, *section, *seed),
        Command::Points { rank, seed, cubic } => points(k()?, *rank, *seed, cubic.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.downcast_ref::<UsageError>().is_some()
                || matches!(
                    e.downcast_ref::<ulrich_core::Error>(),
                    Some(ulrich_core::Error::Schema { .. } | ulrich_core::Error::InvalidPrime(_))
                );
            return ExitCode::from(if usage { 2 } else { 1 });
        }
    };
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, to_pretty(&outcome.artifact)) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if cli.json {
        print!("{}", to_pretty(&outcome.artifact));
    } else {
        print!("{}", outcome.report);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
