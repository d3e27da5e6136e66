//! JSON encoding of the domain types. Complex numbers serialize as
//! two-element arrays `[re, im]`; vectors and matrices nest accordingly.

use crate::error::{Error, Result};
use crate::moduli::{ModuliInvariant, Sl2};
use crate::numeric::{MatC, ProjVec, C64};
use crate::pencil::{BinaryForm, Pencil};
use crate::poised::RefinedSample;
use crate::reconstruct::SigmaVector;
use crate::variety::{DiagonalIntersection, RegularityReport, SurfacePoint};
use serde_json::{json, Value};

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub fn complex_to_value(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn complex_from_value(v: &Value) -> Result<C64> {
    let arr = v
        .as_array()
        .ok_or_else(|| bad("complex number must be a 2-element array"))?;
    if arr.len() != 2 {
        return Err(bad("complex number must be a 2-element array"));
    }
    let re = arr[0]
        .as_f64()
        .ok_or_else(|| bad("complex component must be a number"))?;
    let im = arr[1]
        .as_f64()
        .ok_or_else(|| bad("complex component must be a number"))?;
    Ok(C64::new(re, im))
}

pub fn cvec_to_value(v: &[C64]) -> Value {
    Value::Array(v.iter().map(|z| complex_to_value(*z)).collect())
}

pub fn cvec_from_value(v: &Value) -> Result<Vec<C64>> {
    v.as_array()
        .ok_or_else(|| bad("expected an array of complex numbers"))?
        .iter()
        .map(complex_from_value)
        .collect()
}

pub fn matrix_to_value(m: &MatC) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| cvec_to_value(m.row(i)))
            .collect(),
    )
}

pub fn matrix_from_value(v: &Value) -> Result<MatC> {
    let rows = v
        .as_array()
        .ok_or_else(|| bad("matrix must be an array of rows"))?
        .iter()
        .map(cvec_from_value)
        .collect::<Result<Vec<_>>>()?;
    MatC::from_rows(rows)
}

pub fn pencil_to_value(p: &Pencil) -> Value {
    json!({
        "n": p.dim(),
        "phi1": matrix_to_value(p.phi1.matrix()),
        "phi2": matrix_to_value(p.phi2.matrix()),
    })
}

pub fn pencil_from_value(v: &Value) -> Result<Pencil> {
    let obj = v.as_object().ok_or_else(|| bad("pencil must be an object"))?;
    let n = obj
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| bad("pencil needs an integer field \"n\""))? as usize;
    let phi1 = matrix_from_value(obj.get("phi1").ok_or_else(|| bad("pencil needs \"phi1\""))?)?;
    let phi2 = matrix_from_value(obj.get("phi2").ok_or_else(|| bad("pencil needs \"phi2\""))?)?;
    if phi1.rows() != n || phi2.rows() != n {
        return Err(bad("pencil matrices do not match \"n\""));
    }
    Pencil::from_matrices(phi1, phi2)
}

pub fn binary_form_to_value(f: &BinaryForm) -> Value {
    json!({
        "degree": f.degree(),
        "coeffs": cvec_to_value(f.coeffs()),
    })
}

pub fn binary_form_from_value(v: &Value) -> Result<BinaryForm> {
    let obj = v
        .as_object()
        .ok_or_else(|| bad("binary form must be an object"))?;
    let coeffs = cvec_from_value(
        obj.get("coeffs")
            .ok_or_else(|| bad("binary form needs \"coeffs\""))?,
    )?;
    if let Some(d) = obj.get("degree").and_then(Value::as_u64) {
        if coeffs.len() != d as usize + 1 {
            return Err(bad("binary form degree does not match coefficient count"));
        }
    }
    BinaryForm::new(coeffs)
}

pub fn variety_to_value(x: &DiagonalIntersection) -> Value {
    json!({
        "n": x.n(),
        "lambdas": cvec_to_value(x.lambdas()),
    })
}

pub fn variety_from_value(v: &Value) -> Result<DiagonalIntersection> {
    let obj = v
        .as_object()
        .ok_or_else(|| bad("variety must be an object"))?;
    let lambdas = cvec_from_value(
        obj.get("lambdas")
            .ok_or_else(|| bad("variety needs \"lambdas\""))?,
    )?;
    if let Some(n) = obj.get("n").and_then(Value::as_u64) {
        if lambdas.len() != n as usize + 3 {
            return Err(bad("variety dimension does not match the parameter count"));
        }
    }
    DiagonalIntersection::new(lambdas)
}

pub fn point_to_value(p: &SurfacePoint) -> Value {
    json!({ "coords": cvec_to_value(p.coords()) })
}

pub fn point_from_value(x: &DiagonalIntersection, v: &Value) -> Result<SurfacePoint> {
    let obj = v.as_object().ok_or_else(|| bad("point must be an object"))?;
    let coords = cvec_from_value(
        obj.get("coords")
            .ok_or_else(|| bad("point needs \"coords\""))?,
    )?;
    SurfacePoint::new(x, coords)
}

pub fn refined_sample_to_value(s: &RefinedSample) -> Value {
    json!({
        "alphas": cvec_to_value(&s.alphas),
        "v": cvec_to_value(s.v.coords()),
    })
}

pub fn refined_sample_from_value(v: &Value) -> Result<RefinedSample> {
    let obj = v
        .as_object()
        .ok_or_else(|| bad("refined sample must be an object"))?;
    let alphas = cvec_from_value(
        obj.get("alphas")
            .ok_or_else(|| bad("refined sample needs \"alphas\""))?,
    )?;
    let coords = cvec_from_value(
        obj.get("v")
            .ok_or_else(|| bad("refined sample needs \"v\""))?,
    )?;
    if alphas.len() != coords.len() {
        return Err(bad("refined sample arrays must have equal length"));
    }
    Ok(RefinedSample {
        alphas,
        v: ProjVec::new(coords)?,
    })
}

pub fn invariant_to_value(inv: &ModuliInvariant) -> Value {
    json!({
        "n": inv.n,
        "canon": cvec_to_value(&inv.canon),
    })
}

pub fn sigma_to_value(s: &SigmaVector) -> Value {
    cvec_to_value(s.coeffs.coords())
}

pub fn regularity_to_value(r: &RegularityReport) -> Value {
    json!({
        "phiGeneral": r.phi_general,
        "sffNonsingular": r.sff_nonsingular,
        "sffGeneric": r.sff_generic,
        "restrictionsNondegenerate": r.restrictions_nondegenerate,
        "regular": r.is_regular(),
        "alphaRoots": cvec_to_value(&r.alpha_roots),
    })
}

/// Parses `a,b,c,d` (real) or a JSON 2x2 complex matrix into an SL(2,C)
/// element; the entries are checked for unimodularity by the consumer.
pub fn sl2_from_value(v: &Value) -> Result<Sl2> {
    let arr = v
        .as_array()
        .ok_or_else(|| bad("sl2 element must be [[a,b],[c,d]]"))?;
    if arr.len() != 2 {
        return Err(bad("sl2 element must be [[a,b],[c,d]]"));
    }
    let row0 = cvec_from_value(&arr[0])?;
    let row1 = cvec_from_value(&arr[1])?;
    if row0.len() != 2 || row1.len() != 2 {
        return Err(bad("sl2 element must be [[a,b],[c,d]]"));
    }
    Ok(Sl2::new(row0[0], row0[1], row1[0], row1[1]))
}
