//! Human-readable reports.

use std::fmt::Write;

use ulrich_core::mf::MfCheck;
use ulrich_core::pipeline::{Check, VerificationReport};

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map_or_else(|| "-".into(), T::to_string)
}

pub fn report(r: &VerificationReport) -> String {
    let mut s = String::new();
    let size = r.size.map_or_else(|| "-".into(), |n| format!("{n}x{n}"));
    writeln!(s, "rank {}  size {size}  mu {}  h0 {}  h0(-1) {}", r.rank, r.mu, r.h0, r.h0_minus_one).unwrap();
    let hf: Vec<String> = r.hilbert.iter().map(usize::to_string).collect();
    writeln!(s, "hilbert function (t = 0..4): {}", hf.join(" ")).unwrap();
    if let Some([c0, c1, c2]) = &r.hilbert_polynomial {
        writeln!(s, "hilbert polynomial: {c2} t^2 + {c1} t + {c0}").unwrap();
    }
    writeln!(
        s,
        "chi {}  degree {}  slope {}  c2 {}",
        opt(&r.chi),
        opt(&r.degree),
        opt(&r.slope),
        opt(&r.c2)
    )
    .unwrap();
    writeln!(
        s,
        "dim End_0 {}  dim Hom(E, E(-1))_0 {}  chi(End) {}  h1(End) {}",
        r.dim_end0,
        r.dim_hom_minus_one,
        opt(&r.chi_end),
        opt(&r.h1_end)
    )
    .unwrap();
    match &r.rank_check {
        Some(c) if c.passed => writeln!(s, "rank check: det phi = {} f^{} at {} points", opt(&c.unit), r.rank, c.trials),
        Some(c) => writeln!(s, "rank check: FAILED at {:?}", c.failing_point),
        None => writeln!(s, "rank check: not run"),
    }
    .unwrap();
    let f = &r.flags;
    writeln!(
        s,
        "isMCM {}  isReduced {}  isLinear {}  isUlrich {}  isNormalized {}  isSimple {}",
        yes(f.is_mcm),
        yes(f.is_reduced),
        yes(f.is_linear),
        yes(f.is_ulrich),
        yes(f.is_normalized),
        yes(f.is_simple)
    )
    .unwrap();
    let seeds: Vec<String> = r.seeds.iter().map(|st| format!("{}={}", st.label, st.seed)).collect();
    writeln!(s, "seeds: {}", seeds.join(" ")).unwrap();
    for n in &r.notes {
        writeln!(s, "note: {n}").unwrap();
    }
    s
}

pub fn mf_check(c: &MfCheck) -> String {
    match &c.failure {
        None => "matrix factorization: phi*psi = f*Id and psi*phi = f*Id\n".into(),
        Some(fl) => format!(
            "matrix factorization: FAILED, {} differs from f*Id at entry ({}, {})\n",
            fl.product, fl.row, fl.col
        ),
    }
}

pub fn checks(cs: &[Check]) -> String {
    let mut s = String::new();
    for c in cs {
        writeln!(s, "[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail).unwrap();
    }
    s
}
