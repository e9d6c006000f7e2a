use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::iwasawa_series::{derivative_at_k, Series, Shape};
use crate::padic_core::PadicElem;

/// The two one-variable restrictions of the triple-product function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Line {
    /// w = (k, 1, 1).
    Cyclotomic,
    /// w = (2, ν̂, ν̂) for characters ν̂ of the anticyclotomic Γ⁻.
    Anticyclotomic,
}

impl Line {
    pub fn name(&self) -> &'static str {
        match self {
            Line::Cyclotomic => "(k,1,1)",
            Line::Anticyclotomic => "(2,nu,nu)",
        }
    }
}

/// A sample point on the arc through weight 2.
///
/// The arc parameter is X = (1+p)^e − 1 with e = j (p−1) p^m; on the
/// cyclotomic line this is the weight k = 2 + e, on the anticyclotomic line
/// the character ν̂ sending the topological generator to (1+p)^e.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcPoint {
    pub index: usize,
    pub exponent: i64,
    pub x: PadicElem,
}

impl ArcPoint {
    /// The weight triple on the cyclotomic line.
    pub fn weights(&self) -> [i64; 3] {
        [2 + self.exponent, 1, 1]
    }
}

/// `count` points with e_j = j (p−1) p^m.
pub fn arc_points(p: u32, prec: u32, m: u32, count: usize) -> Result<Vec<ArcPoint>> {
    let step = (p as i64 - 1) * (p as i64).pow(m);
    (0..count)
        .map(|j| {
            let e = j as i64 * step;
            let x = crate::iwasawa_series::lambda_point(p, prec, e)?;
            Ok(ArcPoint { index: j, exponent: e, x })
        })
        .collect()
}

/// A fitted one-variable series in the arc parameter X.
#[derive(Clone, Debug)]
pub struct LineFit {
    pub line: Line,
    pub series: Series<PadicElem>,
    pub samples: Vec<ArcPoint>,
    pub values: Vec<PadicElem>,
    /// Digits to which every coefficient is determined.
    pub certified_prec: u32,
}

impl LineFit {
    /// d/dk at weight k on the cyclotomic line (X = (1+p)^{k−2} − 1).
    pub fn derivative_at(&self, k: i64) -> Result<PadicElem> {
        if self.line != Line::Cyclotomic {
            return Err(Error::Unsupported("derivatives in k live on the cyclotomic line".into()));
        }
        derivative_at_k(&self.series, k - 2)
    }

    /// The fitted series at the arc parameter x.
    pub fn eval(&self, x: &PadicElem) -> PadicElem {
        self.series.evaluate(&[*x])
    }
}

/// Sample the pipeline along the line and fit the degree-`degree` series in X
/// through the values by Newton interpolation.
///
/// Samples are evaluated concurrently; the fit is a single reduction. The
/// divided differences divide by X_i − X_j (valuation 1 + m + v_p(i−j)), so
/// the certified precision of the result is reported alongside it.
pub fn lp_restrict_line(
    line: Line,
    p: u32,
    prec: u32,
    m: u32,
    degree: usize,
    samples: usize,
    eval: impl Fn(&ArcPoint) -> Result<PadicElem> + Sync,
) -> Result<LineFit> {
    if samples < degree + 1 {
        return Err(Error::InsufficientSamples(format!("degree {degree} needs {} samples, got {samples}", degree + 1)));
    }
    let pts = arc_points(p, prec, m, samples)?;
    let values = pts.par_iter().map(&eval).collect::<Result<Vec<_>>>()?;
    let xs: Vec<PadicElem> = pts.iter().map(|pt| pt.x).collect();
    let newton = divided_differences(&xs[..=degree], &values[..=degree])?;
    let coeffs = newton_to_monomial(&newton, &xs[..degree]);
    let certified_prec = coeffs.iter().map(|c| c.prec()).min().unwrap_or(prec);
    if certified_prec == 0 {
        return Err(Error::InsufficientSamples("interpolation consumed every digit".into()));
    }
    let fit_shape: Arc<Shape> = Shape::univariate("X", degree);
    let coeffs: Vec<PadicElem> = coeffs.iter().map(|c| c.reduce(certified_prec)).collect();
    let series = Series::from_coeffs(&fit_shape, coeffs);
    // the extra samples must agree with the fit
    for (pt, v) in pts.iter().zip(&values).skip(degree + 1) {
        if series.evaluate(&[pt.x]) != *v {
            return Err(Error::InsufficientSamples(format!(
                "sample {} disagrees with the degree-{degree} fit",
                pt.index
            )));
        }
    }
    Ok(LineFit { line, series, samples: pts, values, certified_prec })
}

fn divided_differences(xs: &[PadicElem], ys: &[PadicElem]) -> Result<Vec<PadicElem>> {
    let n = xs.len();
    let mut table = ys.to_vec();
    let mut out = vec![table[0]];
    for r in 1..n {
        for i in 0..n - r {
            let num = table[i + 1] - table[i];
            let den = xs[i + r] - xs[i];
            table[i] = if num.is_zero() { num.zero_like().reduce(num.prec().saturating_sub(den.valuation())) } else { num.div(&den)? };
        }
        out.push(table[0]);
    }
    Ok(out)
}

/// Σ c_r Π_{i<r} (X − x_i) expanded in powers of X.
fn newton_to_monomial(c: &[PadicElem], xs: &[PadicElem]) -> Vec<PadicElem> {
    let n = c.len();
    let mut acc = vec![c[n - 1]];
    for r in (0..n - 1).rev() {
        // acc ← acc·(X − x_r) + c_r
        let mut next = vec![c[r].zero_like(); acc.len() + 1];
        for (i, a) in acc.iter().enumerate() {
            next[i + 1] = next[i + 1] + *a;
            next[i] = next[i] - *a * xs[r];
        }
        next[0] = next[0] + c[r];
        acc = next;
    }
    acc
}
