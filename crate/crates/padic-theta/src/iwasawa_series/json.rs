use std::sync::Arc;

use serde_json::{json, Value};

use super::{Series, Shape};
use crate::error::{Error, Result};
use crate::padic_core::{CoeffRing, ExtElem, ExtKind, ExtRing, PadicElem};

/// Canonical JSON encoding of scalar coefficients.
pub trait JsonCoeff: CoeffRing {
    fn ring_tag(&self) -> String;
    fn to_json(&self) -> Value;
    fn from_json(v: &Value, p: u32, prec: u32, tag: &str) -> Result<Self>;
    fn zero_for(p: u32, prec: u32, tag: &str) -> Result<Self>;
}

fn pair(v: &Value, loc: &str) -> Result<(i128, i128)> {
    let arr = v.as_array().ok_or_else(|| Error::parse(loc, "expected [c0, c1]"))?;
    if arr.len() != 2 {
        return Err(Error::parse(loc, "expected exactly two digits"));
    }
    let get = |x: &Value| -> Result<i128> {
        x.as_u64()
            .map(|u| u as i128)
            .or_else(|| x.as_str().and_then(|s| s.parse().ok()))
            .ok_or_else(|| Error::parse(loc, "coefficient is not a non-negative integer"))
    };
    Ok((get(&arr[0])?, get(&arr[1])?))
}

impl JsonCoeff for PadicElem {
    fn ring_tag(&self) -> String {
        "Zp2".into()
    }
    fn to_json(&self) -> Value {
        json!([self.a() as u64, self.b() as u64])
    }
    fn from_json(v: &Value, p: u32, prec: u32, _tag: &str) -> Result<Self> {
        let (a, b) = pair(v, "coefficient")?;
        Ok(PadicElem::new(p, prec, a, b))
    }
    fn zero_for(p: u32, prec: u32, _tag: &str) -> Result<Self> {
        Ok(PadicElem::zero(p, prec))
    }
}

fn ring_from_tag(p: u32, prec: u32, tag: &str) -> Result<Arc<ExtRing>> {
    if tag == "ramped" {
        return Ok(ExtRing::ramped(p, prec));
    }
    if let Some(m) = tag.strip_prefix("cyclotomic:") {
        let m: u32 = m.parse().map_err(|_| Error::parse("ring", "bad cyclotomic level"))?;
        return Ok(ExtRing::cyclotomic(p, m, prec));
    }
    Err(Error::parse("ring", format!("unknown ring tag {tag}")))
}

impl JsonCoeff for ExtElem {
    fn ring_tag(&self) -> String {
        match self.ring().kind {
            ExtKind::Ramped => "ramped".into(),
            ExtKind::Cyclotomic { m } => format!("cyclotomic:{m}"),
        }
    }
    fn to_json(&self) -> Value {
        Value::Array(self.coeffs().iter().map(|c| c.to_json()).collect())
    }
    fn from_json(v: &Value, p: u32, prec: u32, tag: &str) -> Result<Self> {
        let ring = ring_from_tag(p, prec, tag)?;
        let arr = v.as_array().ok_or_else(|| Error::parse("coefficient", "expected a list"))?;
        if arr.len() != ring.degree() {
            return Err(Error::parse("coefficient", "wrong extension degree"));
        }
        let cs = arr.iter().map(|x| PadicElem::from_json(x, p, prec, "Zp2")).collect::<Result<Vec<_>>>()?;
        Ok(ExtElem::from_coeffs(&ring, cs))
    }
    fn zero_for(p: u32, prec: u32, tag: &str) -> Result<Self> {
        let ring = ring_from_tag(p, prec, tag)?;
        Ok(ExtElem::from_coeffs(&ring, vec![]))
    }
}

/// Serialize: nonzero monomials in graded lexicographic order.
pub fn series_to_json<C: JsonCoeff>(s: &Series<C>) -> Value {
    let sh = s.shape();
    let probe = s.constant_term().base_scalar();
    let terms: Vec<Value> = sh
        .graded_lex()
        .into_iter()
        .filter(|&i| !s.coeffs()[i].is_zero())
        .map(|i| json!({"exp": sh.exponents(i), "c": s.coeffs()[i].to_json()}))
        .collect();
    json!({
        "variables": sh.vars,
        "caps": sh.caps,
        "prime": probe.p(),
        "precision": probe.prec(),
        "ring": s.constant_term().ring_tag(),
        "terms": terms,
    })
}

pub fn series_from_json<C: JsonCoeff>(v: &Value) -> Result<Series<C>> {
    let field = |k: &str| v.get(k).ok_or_else(|| Error::parse(k, "missing field"));
    let vars: Vec<String> = serde_json::from_value(field("variables")?.clone())
        .map_err(|e| Error::parse("variables", e.to_string()))?;
    let caps: Vec<usize> =
        serde_json::from_value(field("caps")?.clone()).map_err(|e| Error::parse("caps", e.to_string()))?;
    if vars.len() != caps.len() {
        return Err(Error::parse("caps", "length differs from variables"));
    }
    let p = field("prime")?.as_u64().ok_or_else(|| Error::parse("prime", "not an integer"))? as u32;
    let prec = field("precision")?.as_u64().ok_or_else(|| Error::parse("precision", "not an integer"))? as u32;
    let tag = field("ring")?.as_str().ok_or_else(|| Error::parse("ring", "not a string"))?.to_string();
    let shape = Arc::new(Shape { vars, caps });
    let mut out = Series::zero(&shape, &C::zero_for(p, prec, &tag)?);
    let terms = field("terms")?.as_array().ok_or_else(|| Error::parse("terms", "not a list"))?;
    let mut dense = out.coeffs().to_vec();
    for (n, t) in terms.iter().enumerate() {
        let loc = format!("terms[{n}]");
        let exp: Vec<usize> = serde_json::from_value(t.get("exp").cloned().unwrap_or(Value::Null))
            .map_err(|e| Error::parse(&loc, e.to_string()))?;
        if exp.len() != shape.nvars() {
            return Err(Error::parse(&loc, "exponent length"));
        }
        let idx = shape.index(&exp).ok_or_else(|| Error::parse(&loc, "exponent exceeds caps"))?;
        let c = t.get("c").ok_or_else(|| Error::parse(&loc, "missing c"))?;
        dense[idx] = C::from_json(c, p, prec, &tag)?;
    }
    out = Series::from_dense(&shape, dense);
    Ok(out)
}
