//! Canonical JSON encodings.
//!
//! - Form: `{"deg": t, "terms": [{"e": [e0, e1, e2, e3], "c": c}, ...]}`, terms
//!   in descending graded-lex order.
//! - GradedMap: `{"rowTwists": [..], "colTwists": [..], "entries": [[Form, ..], ..]}`, row-major.
//! - MatrixFactorization: `{"p", "f", "phi", "psi", "verified"}`.
//! - Module: `{"ring": "R" | "R_X", "p", "f", "presentation"}`.
//! - UlrichBundle: `{"p", "f", "rank", "pointSeed", "points", "module", "mf", "report"}`.
//! - HomBasis: `{"source", "target", "maps": [{"alpha", "beta"}, ..]}`.
//!
//! Object keys are emitted in sorted order, so output is byte-stable.
//! Decoding errors carry the JSON pointer of the offending value.

use serde_json::{json, Map, Value};

use crate::context::SurfaceContext;
use crate::error::{Error, Result};
use crate::field::{FieldElem, PrimeField};
use crate::graded::{GradedFree, GradedMap, GradedModulePresentation, RingKind};
use crate::mf::MatrixFactorization;
use crate::modules::{HomBasis, HomMap};
use crate::pipeline::{UlrichBundle, VerificationReport};
use crate::points::{Point, PointSet};
use crate::poly::{Monomial, Form, NVARS};

fn schema(pointer: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        pointer: if pointer.is_empty() { "/".into() } else { pointer.into() },
        message: message.into(),
    }
}

/// Parses text, reporting syntax errors by line and column.
pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        schema(
            &format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

fn field<'a>(v: &'a Value, ptr: &str, key: &str) -> Result<(&'a Value, String)> {
    let obj = v.as_object().ok_or_else(|| schema(ptr, "expected an object"))?;
    let child = format!("{ptr}/{key}");
    obj.get(key).map(|x| (x, child.clone())).ok_or_else(|| schema(&child, "missing"))
}

fn as_i64(v: &Value, ptr: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| schema(ptr, "expected an integer"))
}

fn as_u64(v: &Value, ptr: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| schema(ptr, "expected a non-negative integer"))
}

fn as_array<'a>(v: &'a Value, ptr: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(ptr, "expected an array"))
}

fn as_i32(v: &Value, ptr: &str) -> Result<i32> {
    i32::try_from(as_i64(v, ptr)?).map_err(|_| schema(ptr, "out of range"))
}

fn twists(v: &Value, ptr: &str) -> Result<GradedFree> {
    let arr = as_array(v, ptr)?;
    let t = arr
        .iter()
        .enumerate()
        .map(|(i, x)| as_i32(x, &format!("{ptr}/{i}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(GradedFree::new(t))
}

pub fn form_to_json(g: &Form) -> Value {
    let terms: Vec<Value> = g
        .terms()
        .rev()
        .map(|(m, c)| json!({"e": m.0, "c": c}))
        .collect();
    json!({"deg": g.deg(), "terms": terms})
}

pub fn form_from_json(k: PrimeField, v: &Value, ptr: &str) -> Result<Form> {
    let (d, dp) = field(v, ptr, "deg")?;
    let deg = as_i32(d, &dp)?;
    let (terms, tp) = field(v, ptr, "terms")?;
    let mut g = Form::zero(deg);
    for (i, t) in as_array(terms, &tp)?.iter().enumerate() {
        let p = format!("{tp}/{i}");
        let (e, ep) = field(t, &p, "e")?;
        let e = as_array(e, &ep)?;
        if e.len() != NVARS {
            return Err(schema(&ep, format!("expected {NVARS} exponents")));
        }
        let mut exps = [0u8; NVARS];
        for (j, x) in e.iter().enumerate() {
            let x = as_u64(x, &format!("{ep}/{j}"))?;
            exps[j] = u8::try_from(x).map_err(|_| schema(&format!("{ep}/{j}"), "exponent too large"))?;
        }
        let m = Monomial(exps);
        if m.degree() as i32 != deg {
            return Err(schema(&ep, format!("monomial of degree {} in a form of degree {deg}", m.degree())));
        }
        let (c, cp) = field(t, &p, "c")?;
        let c = as_i64(c, &cp)?;
        let c = k.from_i64(c);
        if c != 0 {
            g.add_term(k, m, c);
        }
    }
    Ok(g)
}

pub fn map_to_json(m: &GradedMap) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| Value::Array((0..m.cols()).map(|j| form_to_json(m.entry(i, j))).collect()))
        .collect();
    json!({"rowTwists": m.target.twists, "colTwists": m.source.twists, "entries": rows})
}

pub fn map_from_json(k: PrimeField, v: &Value, ptr: &str) -> Result<GradedMap> {
    let (rt, rtp) = field(v, ptr, "rowTwists")?;
    let target = twists(rt, &rtp)?;
    let (ct, ctp) = field(v, ptr, "colTwists")?;
    let source = twists(ct, &ctp)?;
    let (rows, rp) = field(v, ptr, "entries")?;
    let rows = as_array(rows, &rp)?;
    if rows.len() != target.rank() {
        return Err(schema(&rp, format!("{} rows for {} row twists", rows.len(), target.rank())));
    }
    let mut entries = Vec::with_capacity(target.rank() * source.rank());
    for (i, row) in rows.iter().enumerate() {
        let p = format!("{rp}/{i}");
        let row = as_array(row, &p)?;
        if row.len() != source.rank() {
            return Err(schema(&p, format!("{} entries for {} column twists", row.len(), source.rank())));
        }
        for (j, e) in row.iter().enumerate() {
            let ep = format!("{p}/{j}");
            let g = form_from_json(k, e, &ep)?;
            let expected = target.twists[i] - source.twists[j];
            if !g.is_zero() && g.deg() != expected {
                return Err(schema(&ep, format!("degree {} where {expected} is required", g.deg())));
            }
            entries.push(g);
        }
    }
    GradedMap::new(source, target, entries)
}

fn prime_from_json(v: &Value, ptr: &str) -> Result<PrimeField> {
    let (p, pp) = field(v, ptr, "p")?;
    let p = u32::try_from(as_u64(p, &pp)?).map_err(|_| schema(&pp, "prime out of range"))?;
    PrimeField::new(p).map_err(|e| schema(&pp, e.to_string()))
}

/// The cubic of an object carrying `"p"` and `"f"`.
pub fn context_from_json(v: &Value, ptr: &str) -> Result<SurfaceContext> {
    let k = prime_from_json(v, ptr)?;
    let (f, fp) = field(v, ptr, "f")?;
    let f = form_from_json(k, f, &fp)?;
    SurfaceContext::new(k, f).map_err(|e| schema(&fp, e.to_string()))
}

pub fn mf_to_json(mf: &MatrixFactorization) -> Value {
    json!({
        "p": mf.ctx.p(),
        "f": form_to_json(&mf.ctx.f),
        "phi": map_to_json(&mf.phi),
        "psi": map_to_json(&mf.psi),
        "verified": mf.verify().valid,
    })
}

pub fn mf_from_json(v: &Value, ptr: &str) -> Result<MatrixFactorization> {
    let ctx = context_from_json(v, ptr)?;
    let (phi, pp) = field(v, ptr, "phi")?;
    let phi = map_from_json(ctx.field, phi, &pp)?;
    let (psi, sp) = field(v, ptr, "psi")?;
    let psi = map_from_json(ctx.field, psi, &sp)?;
    MatrixFactorization::new(ctx, phi, psi).map_err(|e| schema(ptr, e.to_string()))
}

pub fn module_to_json(ctx: &SurfaceContext, m: &GradedModulePresentation) -> Value {
    json!({
        "ring": match m.kind() { RingKind::Polynomial => "R", RingKind::Surface => "R_X" },
        "p": ctx.p(),
        "f": form_to_json(&ctx.f),
        "presentation": map_to_json(&m.presentation),
    })
}

/// A module together with the surface it lives on.
pub fn module_from_json(v: &Value, ptr: &str) -> Result<(SurfaceContext, GradedModulePresentation)> {
    let ctx = context_from_json(v, ptr)?;
    let (ring, rp) = field(v, ptr, "ring")?;
    let ring = match ring.as_str() {
        Some("R") => ctx.poly.clone(),
        Some("R_X") => ctx.surface.clone(),
        _ => return Err(schema(&rp, "expected \"R\" or \"R_X\"")),
    };
    let (pres, pp) = field(v, ptr, "presentation")?;
    let pres = map_from_json(ctx.field, pres, &pp)?;
    Ok((ctx, GradedModulePresentation::new(ring, pres)))
}

fn points_to_json(z: &PointSet) -> Value {
    json!({"seed": z.seed, "points": z.points})
}

fn points_from_json(k: PrimeField, v: &Value, ptr: &str) -> Result<PointSet> {
    let (seed, sp) = field(v, ptr, "seed")?;
    let seed = as_u64(seed, &sp)?;
    let (pts, pp) = field(v, ptr, "points")?;
    let points = as_array(pts, &pp)?
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let ip = format!("{pp}/{i}");
            let c = as_array(p, &ip)?;
            if c.len() != 4 {
                return Err(schema(&ip, "expected 4 coordinates"));
            }
            let mut pt: Point = [0; 4];
            for (j, x) in c.iter().enumerate() {
                let x = as_u64(x, &format!("{ip}/{j}"))?;
                if x >= k.p() as u64 {
                    return Err(schema(&format!("{ip}/{j}"), "coordinate not reduced mod p"));
                }
                pt[j] = x as FieldElem;
            }
            Ok(pt)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PointSet { points, seed })
}

pub fn report_to_json(r: &VerificationReport) -> Value {
    serde_json::to_value(r).expect("reports always serialize")
}

pub fn bundle_to_json(b: &UlrichBundle) -> Value {
    let mut obj = Map::new();
    obj.insert("p".into(), json!(b.ctx.p()));
    obj.insert("f".into(), form_to_json(&b.ctx.f));
    obj.insert("rank".into(), json!(b.report.rank));
    obj.insert("pointSeed".into(), json!(b.point_seed));
    obj.insert("points".into(), b.points.as_ref().map_or(Value::Null, points_to_json));
    obj.insert("module".into(), module_to_json(&b.ctx, &b.module));
    obj.insert("mf".into(), mf_to_json(&b.mf));
    obj.insert("report".into(), report_to_json(&b.report));
    Value::Object(obj)
}

pub fn bundle_from_json(v: &Value) -> Result<UlrichBundle> {
    let ctx = context_from_json(v, "")?;
    let (ps, pp) = field(v, "", "pointSeed")?;
    let point_seed = as_u64(ps, &pp)?;
    let (pts, ptp) = field(v, "", "points")?;
    let points = if pts.is_null() {
        None
    } else {
        Some(points_from_json(ctx.field, pts, &ptp)?)
    };
    let (m, mp) = field(v, "", "module")?;
    let (mctx, module) = module_from_json(m, &mp)?;
    if mctx != ctx {
        return Err(schema(&mp, "module lives on a different cubic"));
    }
    let (mf, fp) = field(v, "", "mf")?;
    let mf = mf_from_json(mf, &fp)?;
    if mf.ctx != ctx {
        return Err(schema(&fp, "factorization lives on a different cubic"));
    }
    let (rep, rp) = field(v, "", "report")?;
    let report: VerificationReport = serde_json::from_value(rep.clone()).map_err(|e| schema(&rp, e.to_string()))?;
    Ok(UlrichBundle {
        ctx,
        point_seed,
        points,
        module,
        mf,
        report,
    })
}

pub fn hom_basis_to_json(ctx: &SurfaceContext, h: &HomBasis) -> Value {
    json!({
        "source": module_to_json(ctx, &h.source),
        "target": module_to_json(ctx, &h.target),
        "maps": h.maps.iter().map(|m| json!({"alpha": map_to_json(&m.alpha), "beta": map_to_json(&m.beta)})).collect::<Vec<_>>(),
    })
}

pub fn hom_basis_from_json(v: &Value) -> Result<HomBasis> {
    let (s, sp) = field(v, "", "source")?;
    let (ctx, source) = module_from_json(s, &sp)?;
    let (t, tp) = field(v, "", "target")?;
    let (_, target) = module_from_json(t, &tp)?;
    let (maps, mp) = field(v, "", "maps")?;
    let maps = as_array(maps, &mp)?
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let p = format!("{mp}/{i}");
            let (a, ap) = field(m, &p, "alpha")?;
            let (b, bp) = field(m, &p, "beta")?;
            Ok(HomMap {
                alpha: map_from_json(ctx.field, a, &ap)?,
                beta: map_from_json(ctx.field, b, &bp)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HomBasis { source, target, maps })
}
