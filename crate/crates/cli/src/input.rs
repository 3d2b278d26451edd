//! Reading artifacts from disk.

use std::fmt;
use std::path::Path;

use serde_json::Value;
use ulrich_core::json::{bundle_from_json, context_from_json, form_from_json, mf_from_json, module_from_json, parse};
use ulrich_core::pipeline::UlrichBundle;
use ulrich_core::{GradedModulePresentation, MatrixFactorization, PrimeField, SurfaceContext};

/// Bad input: unreadable file, malformed JSON, or an invalid argument. Maps to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(path: &Path, e: impl fmt::Display) -> anyhow::Error {
    UsageError(format!("{}: {e}", path.display())).into()
}

pub fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(path, e))?;
    parse(&text).map_err(|e| usage(path, e))
}

/// What a JSON file holds, told apart by its keys.
pub enum Artifact {
    Bundle(Box<UlrichBundle>),
    Factorization(MatrixFactorization),
    Module(SurfaceContext, GradedModulePresentation),
}

impl Artifact {
    pub fn load(path: &Path) -> anyhow::Result<Artifact> {
        let v = read_json(path)?;
        let has = |k: &str| v.get(k).is_some();
        let out = if has("report") {
            bundle_from_json(&v).map(|b| Artifact::Bundle(Box::new(b)))
        } else if has("phi") {
            mf_from_json(&v, "").map(Artifact::Factorization)
        } else if has("presentation") {
            module_from_json(&v, "").map(|(c, m)| Artifact::Module(c, m))
        } else {
            return Err(usage(path, "not a bundle, matrix factorization or module"));
        };
        out.map_err(|e| usage(path, e))
    }

    /// The module the artifact describes, over `R_X`.
    pub fn module(self) -> (SurfaceContext, GradedModulePresentation) {
        match self {
            Artifact::Bundle(b) => (b.ctx, b.module),
            Artifact::Factorization(mf) => (mf.ctx.clone(), mf.module()),
            Artifact::Module(c, m) => (c, m),
        }
    }

    pub fn factorization(self, path: &Path) -> anyhow::Result<MatrixFactorization> {
        match self {
            Artifact::Bundle(b) => Ok(b.mf),
            Artifact::Factorization(mf) => Ok(mf),
            Artifact::Module(..) => Err(usage(path, "expected a matrix factorization")),
        }
    }
}

pub fn load_module(path: &Path) -> anyhow::Result<(SurfaceContext, GradedModulePresentation)> {
    Ok(Artifact::load(path)?.module())
}

/// Two modules on the same cubic.
pub fn load_pair(a: &Path, b: &Path) -> anyhow::Result<(SurfaceContext, GradedModulePresentation, GradedModulePresentation)> {
    let (ca, ma) = load_module(a)?;
    let (cb, mb) = load_module(b)?;
    if ca != cb {
        return Err(UsageError(format!("{} and {} live on different cubics", a.display(), b.display())).into());
    }
    Ok((ca, ma, mb))
}

/// A cubic file: either a bare Form or an object with `"f"` (and optionally `"p"`).
pub fn load_cubic(path: &Path, k: PrimeField) -> anyhow::Result<SurfaceContext> {
    let v = read_json(path)?;
    let ctx = if v.get("f").is_some() && v.get("p").is_some() {
        context_from_json(&v, "")
    } else if let Some(f) = v.get("f") {
        form_from_json(k, f, "/f").and_then(|f| SurfaceContext::new(k, f))
    } else {
        form_from_json(k, &v, "").and_then(|f| SurfaceContext::new(k, f))
    };
    ctx.map_err(|e| usage(path, e))
}
