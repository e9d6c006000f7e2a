use super::linalg::{inverse, mat_eq, mat_mul, mat_pow, unit_pivots, vec_mat, Matrix};
use super::QExpansion;
use crate::error::{Error, Result};
use crate::padic_core::CoeffRing;

/// Default bound on n in the iteration U_p^{n!}.
///
/// Over Z/p^N the unit eigenvalues only settle once p^{N−1}(p²−1) divides
/// n!, which for p = 5, N = 8 first happens at n = 30.
pub const DEFAULT_MAX_ITER: usize = 64;

/// e^ord(ξ) = lim U_p^{n!} ξ computed directly on the q-expansion.
///
/// Iterates are compared on their common range. An iterate that vanishes
/// stays zero under the linear map U_p, so the limit is then the zero
/// expansion, returned at the input cap.
pub fn ord_project<R: CoeffRing>(xi: &QExpansion<R>, p: u64, max_iter: usize) -> Result<QExpansion<R>> {
    let zero = || QExpansion::zero(&xi.coeffs[0], xi.cap(), xi.level, xi.character.clone()).with_weight(xi.weight);
    if xi.is_zero() {
        return Ok(zero());
    }
    let mut prev = xi.clone();
    let mut steps: u64 = 1;
    for n in 1..=max_iter as u64 {
        if n > 1 {
            steps = steps.saturating_mul(n - 1);
        }
        let cur = match prev.u_p_pow(p, steps) {
            Ok(c) => c,
            Err(Error::CapExhausted(_)) => return Err(Error::NoConvergence(n as usize)),
            Err(e) => return Err(e),
        };
        if cur.is_zero() {
            return Ok(zero());
        }
        if cur.agrees_with(&prev) {
            return Ok(prev);
        }
        prev = cur;
    }
    Err(Error::NoConvergence(max_iter))
}

/// A finite U_p-stable span of q-expansions, on which e^ord is computed from
/// the matrix of U_p.
///
/// Coordinates are read off at pivot indices n ≤ Q/p where the basis
/// restricts to an invertible matrix; vectors are rows, so U_p acts by
/// c ↦ c·M.
#[derive(Clone, Debug)]
pub struct OrdinarySpan<R> {
    basis: Vec<QExpansion<R>>,
    p: u64,
    pivots: Vec<usize>,
    pivot_inv: Matrix<R>,
    up: Matrix<R>,
}

impl<R: CoeffRing> OrdinarySpan<R> {
    pub fn new(basis: Vec<QExpansion<R>>, p: u64) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::RankDeficient("empty basis".into()));
        }
        let cap = basis.iter().map(|b| b.cap()).min().unwrap();
        let sub = cap / p as usize;
        let rows: Vec<Vec<R>> = basis.iter().map(|b| b.coeffs[..=cap].to_vec()).collect();
        let pivots = unit_pivots(&rows, 0..=sub)?;
        let restricted: Matrix<R> = rows.iter().map(|r| pivots.iter().map(|&j| r[j].clone()).collect()).collect();
        let pivot_inv = inverse(&restricted)?;
        let mut span = OrdinarySpan { basis, p, pivots, pivot_inv, up: Vec::new() };
        let mut up = Vec::with_capacity(span.basis.len());
        for b in &span.basis {
            let image = b.u_p(p)?;
            let c = span.coordinates(&image).map_err(|_| Error::InconsistencyFound("the span is not U_p-stable".into()))?;
            up.push(c);
        }
        span.up = up;
        Ok(span)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[QExpansion<R>] {
        &self.basis
    }

    /// The matrix of U_p (row i = coordinates of U_p b_i).
    pub fn up_matrix(&self) -> &Matrix<R> {
        &self.up
    }

    /// Coordinates of ξ on the basis, verified on every common coefficient.
    pub fn coordinates(&self, xi: &QExpansion<R>) -> Result<Vec<R>> {
        if self.pivots.iter().any(|&j| j > xi.cap()) {
            return Err(Error::CapExhausted("input cap is below the pivot range".into()));
        }
        let v: Vec<R> = self.pivots.iter().map(|&j| xi.coeffs[j].clone()).collect();
        let c = vec_mat(&v, &self.pivot_inv);
        let back = self.combine(&c);
        if !back.agrees_with(xi) {
            return Err(Error::DomainError("the expansion is not in the span".into()));
        }
        Ok(c)
    }

    /// Σ c_i b_i.
    pub fn combine(&self, c: &[R]) -> QExpansion<R> {
        let mut acc = self.basis[0].scale_by(&c[0]);
        for (b, ci) in self.basis.iter().zip(c).skip(1) {
            acc = acc.add(&b.scale_by(ci));
        }
        acc
    }

    /// The idempotent lim M^{n!}.
    pub fn projector(&self, max_iter: usize) -> Result<Matrix<R>> {
        let mut pm = self.up.clone();
        for n in 2..=max_iter as u64 {
            let next = mat_pow(&pm, n);
            if mat_eq(&next, &pm) && mat_eq(&mat_mul(&pm, &pm), &pm) {
                return Ok(pm);
            }
            pm = next;
        }
        Err(Error::NoConvergence(max_iter))
    }

    /// e^ord(ξ) for ξ in the span.
    pub fn project(&self, xi: &QExpansion<R>, max_iter: usize) -> Result<QExpansion<R>> {
        let c = self.coordinates(xi)?;
        let pm = self.projector(max_iter)?;
        Ok(self.combine(&vec_mat(&c, &pm)))
    }

    /// U_p^m in coordinates.
    pub fn up_pow_coords(&self, c: &[R], m: u64) -> Vec<R> {
        vec_mat(c, &mat_pow(&self.up, m))
    }

    pub fn p(&self) -> u64 {
        self.p
    }
}
