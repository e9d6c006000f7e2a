use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{HeegnerPointData, Qp2Elem, TateCurve};
use crate::error::{Error, Result};
use crate::padic_core::PadicElem;

/// A u-coordinate p^valuation · (a + bδ), with a and b as little-endian
/// base-p digit lists (their common length is the precision).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UCoord {
    pub valuation: i64,
    pub a: Vec<u32>,
    pub b: Vec<u32>,
}

fn digits(mut x: i128, p: u32, n: u32) -> Vec<u32> {
    (0..n)
        .map(|_| {
            let d = x.rem_euclid(p as i128) as u32;
            x = x.div_euclid(p as i128);
            d
        })
        .collect()
}

fn undigits(d: &[u32], p: u32) -> Result<i128> {
    d.iter().rev().try_fold(0i128, |acc, &x| {
        if x >= p {
            return Err(Error::parse("digits", format!("digit {x} is not below p = {p}")));
        }
        acc.checked_mul(p as i128)
            .map(|v| v + x as i128)
            .ok_or_else(|| Error::parse("digits", "too many digits"))
    })
}

impl UCoord {
    pub fn from_elem(x: &Qp2Elem) -> Self {
        let u = x.unit();
        UCoord { valuation: x.val(), a: digits(u.a(), u.p(), u.prec()), b: digits(u.b(), u.p(), u.prec()) }
    }

    pub fn to_elem(&self, p: u32) -> Result<Qp2Elem> {
        if self.a.len() != self.b.len() || self.a.is_empty() {
            return Err(Error::parse("u", "a and b need the same nonzero number of digits"));
        }
        let prec = self.a.len() as u32;
        let unit = PadicElem::new(p, prec, undigits(&self.a, p)?, undigits(&self.b, p)?);
        Qp2Elem::new(self.valuation, unit).map_err(|_| Error::parse("u", "the unit part is divisible by p"))
    }
}

/// A curve given by j (as "num/den") or by a-invariants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub p: u32,
    pub precision: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_invariants: Option<[i64; 5]>,
    /// a_p(E); required with `j`, derived from c6 with `a_invariants`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<i64>,
}

impl CurveSpec {
    pub fn build(&self) -> Result<TateCurve> {
        match (&self.j, &self.a_invariants) {
            (Some(j), None) => {
                let j = BigRational::from_str(j).map_err(|e| Error::parse("curve.j", e.to_string()))?;
                let alpha = self.alpha.ok_or_else(|| Error::parse("curve.alpha", "required when j is given"))?;
                TateCurve::from_j(self.p, self.precision, j, alpha)
            }
            (None, Some(a)) => {
                let c = TateCurve::from_a_invariants(self.p, self.precision, a)?;
                match self.alpha {
                    Some(al) if al != c.alpha => Err(Error::InconsistencyFound(format!(
                        "alpha = {al} but the model has a_p = {}",
                        c.alpha
                    ))),
                    _ => Ok(c),
                }
            }
            _ => Err(Error::parse("curve", "exactly one of j and a_invariants is required")),
        }
    }
}

/// The character φ attached to a Heegner point.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiMeta {
    pub label: String,
    #[serde(default)]
    pub quadratic: bool,
    /// φ₁(p) for the genus decomposition φ = (φ₁, φ₂) of a quadratic φ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi1_p: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d1: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d2: Option<i64>,
    /// Assert P^{Frob} = φ₁(p)·P on load.
    #[serde(default)]
    pub check_frobenius: bool,
}

/// {curve, u, u_frob, phi}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointFile {
    pub curve: CurveSpec,
    pub u: UCoord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_frob: Option<UCoord>,
    pub phi: PhiMeta,
}

impl PointFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("point files serialize")
    }

    /// The curve and the validated point.
    pub fn load(&self) -> Result<(TateCurve, HeegnerPointData)> {
        let curve = self.curve.build()?;
        let p = curve.p;
        let pt = HeegnerPointData {
            u: self.u.to_elem(p)?,
            u_frob: self.u_frob.as_ref().map(|x| x.to_elem(p)).transpose()?,
            phi: self.phi.clone(),
        };
        pt.validate(&curve)?;
        Ok((curve, pt))
    }
}
