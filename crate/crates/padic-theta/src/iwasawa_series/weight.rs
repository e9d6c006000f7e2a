use std::sync::Arc;

use crate::error::{Error, Result};
use crate::padic_core::{plog, CoeffRing, ExtElem, ExtRing, PadicElem, RampedElem};

/// Finite-order character value ζ_{p^m}^j on the chosen topological generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FiniteTwist {
    pub m: u32,
    pub j: u64,
}

/// A weight (a continuous algebra map out of a coefficient ring).
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    /// T ↦ ε(1+p)(1+p)^k − 1 on Λ.
    Arithmetic { k: i64, eps: Option<FiniteTwist> },
    /// [u] ↦ u^k on R_K, optionally twisted by ζ^{j·c_i(u)} on coordinate `var`.
    GroupAlgebra { k: i64, twist: Option<(usize, FiniteTwist)> },
    /// One weight per tensor factor.
    Composite(Vec<Weight>),
}

impl Weight {
    pub fn k(&self) -> i64 {
        match self {
            Weight::Arithmetic { k, .. } | Weight::GroupAlgebra { k, .. } => *k,
            Weight::Composite(ws) => ws.iter().map(|w| w.k()).sum(),
        }
    }

    pub fn is_classical(&self) -> bool {
        self.k() >= 2
    }
}

/// (1+p)^k − 1.
pub fn lambda_point(p: u32, prec: u32, k: i64) -> Result<PadicElem> {
    let u = PadicElem::from_int(p, prec, 1 + p as i128);
    Ok(u.powi(k)? - u.one_like())
}

/// ζ^j (1+p)^k − 1 in Z_{p²}[ζ_{p^m}].
pub fn lambda_point_twisted(ring: &Arc<ExtRing>, prec: u32, k: i64, j: u64) -> Result<ExtElem> {
    let u = PadicElem::from_int(ring.p, prec, 1 + ring.p as i128).powi(k)?;
    let z = ExtElem::generator(ring, prec).pow_u64(j);
    Ok(z.scale(&u).sub_ref(&z.one_like()))
}

/// The Λ_Col variable X = (T − p)/(p^a γ) at weight k; needs p^a | k − 1.
pub fn col_point(ring: &Arc<ExtRing>, prec: u32, a: u32, k: i64) -> Result<RampedElem> {
    let p = ring.p;
    if (k - 1).rem_euclid((p as i64).pow(a)) != 0 {
        return Err(Error::WeightOutOfRadius(format!("p^{a} does not divide k − 1 = {}", k - 1)));
    }
    let w = prec + a + 2;
    let t = lambda_point(p, w, k)?;
    let num = t - t.int_like(p as i128);
    let q = num.div_p_pow(a + 1)?.reduce(prec);
    Ok(RampedElem::monomial(ring, q, (p - 2) as usize))
}

/// Coordinates on W_K = 1 + pZ_{p²} with respect to u₁ = 1+p, u₂ = 1+pδ.
#[derive(Clone, Debug)]
pub struct HidaCoords {
    pub p: u32,
    log_u1: PadicElem,
    log_u2: PadicElem,
}

/// The generators u₁ = 1+p and u₂ = 1+pδ at the given precision.
pub fn hida_generators(p: u32, prec: u32) -> [PadicElem; 2] {
    [PadicElem::new(p, prec, 1 + p as i128, 0), PadicElem::new(p, prec, 1, p as i128)]
}

impl HidaCoords {
    /// Precompute the logarithms of the generators at `prec + 1` digits.
    pub fn new(p: u32, prec: u32) -> Result<Self> {
        let [u1, u2] = hida_generators(p, prec + 1);
        Ok(HidaCoords { p, log_u1: plog(&u1)?, log_u2: plog(&u2)? })
    }

    /// (c₁, c₂) ∈ Z_p² with u = u₁^{c₁} u₂^{c₂}; one digit is lost to the
    /// division by the logarithms (which have valuation 1).
    pub fn coordinates(&self, u: &PadicElem) -> Result<(PadicElem, PadicElem)> {
        let l = plog(u)?;
        let n = l.prec().min(self.log_u1.prec());
        let a = PadicElem::from_int(self.p, n, l.a());
        let b = PadicElem::from_int(self.p, n, l.b());
        let l1 = PadicElem::from_int(self.p, n, self.log_u1.a());
        let x = PadicElem::from_int(self.p, n, self.log_u2.a());
        let y = PadicElem::from_int(self.p, n, self.log_u2.b());
        let c2 = b.div(&y)?;
        let c1 = (a.reduce(c2.prec()) - c2 * x).div(&l1)?;
        Ok((c1.reduce(c2.prec().min(c1.prec())), c2.reduce(c1.prec())))
    }
}

/// The W_K coordinates of u (convenience wrapper).
pub fn w_k_coordinates(u: &PadicElem) -> Result<(PadicElem, PadicElem)> {
    HidaCoords::new(u.p(), u.prec())?.coordinates(u)
}

/// S_i ↦ u_i^k − 1: the weight [u] ↦ u^k on R_K.
pub fn hida_point(p: u32, prec: u32, k: i64) -> Result<[PadicElem; 2]> {
    let [u1, u2] = hida_generators(p, prec);
    Ok([u1.powi(k)? - u1.one_like(), u2.powi(k)? - u2.one_like()])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates_reconstruct_element() {
        let p = 5;
        let hc = HidaCoords::new(p, 9).unwrap();
        let u = PadicElem::new(p, 9, 1 + 5 * 7, 5 * 3);
        let (c1, c2) = hc.coordinates(&u).unwrap();
        let [u1, u2] = hida_generators(p, 8);
        let r1 = crate::padic_core::pexp(&(plog(&u1).unwrap() * c1.reduce(8))).unwrap();
        let r2 = crate::padic_core::pexp(&(plog(&u2).unwrap() * c2.reduce(8))).unwrap();
        assert_eq!(r1 * r2, u.reduce(8));
        assert!(c1.is_in_zp() && c2.is_in_zp());
    }

    #[test]
    fn col_point_radius() {
        let r = ExtRing::ramped(5, 8);
        let x = col_point(&r, 8, 0, 1).unwrap();
        assert!(x.is_zero());
        assert!(col_point(&r, 8, 1, 3).is_err());
        assert!(col_point(&r, 8, 1, 6).is_ok());
    }
}
