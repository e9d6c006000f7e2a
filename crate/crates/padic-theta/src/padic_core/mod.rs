//! Exact arithmetic in Z_{p²} modulo p^N and in its extensions
//! Z_{p²}[γ] (γ^{p−1} = p) and Z_{p²}[ζ_{p^m}].
//!
//! The transcendental functions here (Teichmüller lift, logarithm,
//! exponential, square roots of principal units, binomial series) raise
//! their working precision internally so that every division by an integer
//! is absorbed, and hand back results at the input precision.

mod elem;
mod ext;
mod ring;

pub use elem::{max_precision, nonresidue, ppow, vp_int, PadicElem};
pub(crate) use elem::powmod_u64;
pub use ext::{ExtElem, ExtKind, ExtRing, RampedElem};
pub use ring::CoeffRing;

use std::sync::Arc;

use crate::error::{Error, Result};

/// Smallest `e` with `p^e ≥ n`.
pub fn ceil_log(p: u32, n: u64) -> u32 {
    let mut e = 0;
    let mut q = 1u128;
    while q < n as u128 {
        q *= p as u128;
        e += 1;
    }
    e
}

/// v_p(n!) by Legendre's formula.
pub fn vp_factorial(p: u32, n: u64) -> u32 {
    let mut v = 0;
    let mut q = p as u64;
    while q <= n {
        v += (n / q) as u32;
        q = q.saturating_mul(p as u64);
    }
    v
}

/// Teichmüller representative ω(u): the unique root of unity of order
/// dividing p²−1 congruent to `u` mod p.
///
/// # Complexity
///
/// `prec` raisings to the p²-th power, i.e. O(prec·log p) multiplications.
pub fn teichmuller(u: &PadicElem) -> Result<PadicElem> {
    if !u.is_unit() {
        return Err(Error::NonUnit);
    }
    let q = (u.p() as u64) * (u.p() as u64);
    let mut x = *u;
    for _ in 0..u.prec() {
        x = x.pow(q);
    }
    Ok(x)
}

/// Principal-unit part ⟨u⟩ = u/ω(u) ∈ 1 + pZ_{p²}.
pub fn unit_part(u: &PadicElem) -> Result<PadicElem> {
    Ok(*u * teichmuller(u)?.inv()?)
}

/// p-adic logarithm on 1 + pZ_{p²}.
///
/// # Precision
///
/// Terms are summed at `N + ⌈log_p n_max⌉ + 1` digits and the result is
/// returned at the input precision N.
pub fn plog(u: &PadicElem) -> Result<PadicElem> {
    let n = u.prec();
    let x0 = *u - u.one_like();
    if !x0.is_zero() && x0.valuation() == 0 {
        return Err(Error::DomainError("plog needs u ≡ 1 mod p".into()));
    }
    if n == 0 {
        return Ok(u.zero_like());
    }
    let mut nmax = n as u64;
    while (nmax as i64) - (ceil_log(u.p(), nmax + 1) as i64) < n as i64 + 1 {
        nmax += 1;
    }
    let w = n + ceil_log(u.p(), nmax + 1) + 1;
    let x = x0.lift_to(w);
    let mut pw = x;
    let mut acc = x.zero_like();
    for k in 1..=nmax {
        let kk = k as i128;
        let v = vp_int(u.p(), kk);
        let unit = x.int_like(kk / ppow(u.p(), v)).inv()?;
        let term = pw.div_p_pow(v)? * unit;
        acc = if k % 2 == 1 { acc + term } else { acc - term };
        pw = pw * x;
    }
    Ok(acc.reduce(n))
}

/// p-adic exponential on pZ_{p²}.
pub fn pexp(x: &PadicElem) -> Result<PadicElem> {
    let n = x.prec();
    if n == 0 {
        return Ok(x.one_like());
    }
    if !x.is_zero() && x.valuation() == 0 {
        return Err(Error::DomainError("pexp needs ord_p(x) ≥ 1".into()));
    }
    let p = x.p() as u64;
    let nmax = (n as u64 * (p - 1)).div_ceil(p - 2) + 2;
    let w = n + (nmax / (p - 1)) as u32 + 2;
    let xw = x.lift_to(w);
    let mut term = xw.one_like();
    let mut acc = xw.one_like();
    for k in 1..=nmax {
        let kk = k as i128;
        let v = vp_int(x.p(), kk);
        let unit = xw.int_like(kk / ppow(x.p(), v)).inv()?;
        term = (term * xw).div_p_pow(v)? * unit;
        acc = acc + term;
    }
    Ok(acc.reduce(n))
}

/// ⟨s⟩^{1/2}: the square root of s·ω(s)^{−1} congruent to 1 mod p.
pub fn sqrt_one_unit(s: &PadicElem) -> Result<PadicElem> {
    let t = unit_part(s)?;
    let half = s.int_like(2).inv()?;
    pexp(&(plog(&t)? * half))
}

/// ⟨u⟩^e for a unit `u` and a p-adic exponent `e`, via exp(e·log⟨u⟩).
pub fn unit_part_pow(u: &PadicElem, e: &PadicElem) -> Result<PadicElem> {
    pexp(&(plog(&unit_part(u)?)? * *e))
}

/// Integral binomial coefficients C(c, n) for n ≤ d, c ∈ Z_p (or any c for
/// which they are integral).
pub fn binom_integral(c: &PadicElem, d: usize) -> Result<Vec<PadicElem>> {
    let n = c.prec();
    let w = n + vp_factorial(c.p(), d as u64) + 1;
    let cw = c.lift_to(w);
    let mut out = Vec::with_capacity(d + 1);
    let mut b = cw.one_like();
    out.push(b.reduce(n));
    for k in 1..=d {
        let kk = k as i128;
        let v = vp_int(c.p(), kk);
        let unit = cw.int_like(kk / ppow(c.p(), v)).inv()?;
        b = (b * (cw - cw.int_like(kk - 1)))
            .div_p_pow(v)
            .map_err(|_| Error::DomainError("binomial coefficient is not integral".into()))?
            * unit;
        out.push(b.reduce(n));
    }
    Ok(out)
}

/// Coefficients of (1+T)^s in the variable Y = T/(p^a γ):
/// `coeffs[n] = C(s, n)·(p^a γ)^n`, integral by the bound v(n!) ≤ n/(p−1).
#[derive(Clone, Debug)]
pub struct BinomSeries {
    pub a: u32,
    pub coeffs: Vec<RampedElem>,
    pub ring: Arc<ExtRing>,
}

/// Build the binomial series of `s = num/p^a` up to degree `d` inclusive.
pub fn binom_series(num: &PadicElem, a: u32, d: usize) -> Result<BinomSeries> {
    let p = num.p();
    let n = num.prec();
    let ring = ExtRing::ramped(p, n);
    let e = (p - 1) as usize;
    let w = n + vp_factorial(p, d as u64) + 2;
    let numw = num.lift_to(w);
    let step = numw.int_like(ppow(p, a));
    let mut prod = numw.one_like();
    let mut nfact_unit = numw.one_like();
    let mut coeffs = Vec::with_capacity(d + 1);
    for k in 0..=d {
        if k > 0 {
            prod = prod * (numw - step * numw.int_like(k as i128 - 1));
            let kk = k as i128;
            nfact_unit = nfact_unit * numw.int_like(kk / ppow(p, vp_int(p, kk)));
        }
        let vf = vp_factorial(p, k as u64);
        let up = (k / e) as u32;
        let scaled = if up >= vf {
            prod * prod.int_like(ppow(p, up - vf))
        } else {
            prod.div_p_pow(vf - up)
                .map_err(|_| Error::PrecisionLoss("binomial denominator bound violated".into()))?
        };
        let c = scaled * nfact_unit.inv()?;
        coeffs.push(RampedElem::monomial(&ring, c.reduce(n), k % e));
    }
    Ok(BinomSeries { a, coeffs, ring })
}

impl BinomSeries {
    /// The variable Y = T/(p^a γ) at a point T with v(T) ≥ a+1.
    ///
    /// T is taken to be exact (weight points are integer powers), so its
    /// representative is lifted before the division by p^{a+1}.
    pub fn variable_at(&self, t: &PadicElem) -> Result<RampedElem> {
        let p = t.p();
        if !t.is_zero() && t.valuation() < self.a + 1 {
            return Err(Error::WeightOutOfRadius(format!(
                "need ord_p(T) ≥ {}, got {}",
                self.a + 1,
                t.valuation()
            )));
        }
        let q = t.lift_to(t.prec() + self.a + 1).div_p_pow(self.a + 1)?;
        Ok(RampedElem::monomial(&self.ring, q, (p - 2) as usize))
    }

    /// Evaluate at T, certifying `target` digits; returns the Z_{p²} value.
    pub fn eval(&self, t: &PadicElem, target: u32) -> Result<PadicElem> {
        let y = self.variable_at(t)?;
        let e = t.p() - 1;
        let vy = y.ramped_valuation().unwrap_or(u32::MAX);
        let d = self.coeffs.len() as u64;
        let bound = (d * vy as u64) / e as u64;
        if bound < target as u64 {
            return Err(Error::PrecisionLoss(format!(
                "cap {} certifies only {} digits",
                d - 1,
                bound
            )));
        }
        let mut acc = self.coeffs[0].zero_like();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(&y).add_ref(c);
        }
        Ok(acc.reduce_prec(target).to_base()?.reduce(target))
    }

    /// Truncation error bound (in powers of p) when evaluating at T.
    pub fn error_bound(&self, t: &PadicElem) -> Result<u32> {
        let y = self.variable_at(t)?;
        let vy = y.ramped_valuation().unwrap_or(u32::MAX / 1024);
        Ok((self.coeffs.len() as u64 * vy as u64 / (t.p() - 1) as u64) as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: i128) -> PadicElem {
        PadicElem::from_int(5, 8, n)
    }

    #[test]
    fn teichmuller_brute_force_mod_125() {
        let t = teichmuller(&PadicElem::from_int(5, 3, 2)).unwrap();
        let roots: Vec<i128> = (0..125).filter(|x| x % 5 == 2 && (x * x * x * x) % 125 == 1).collect();
        assert_eq!(roots, vec![t.a()]);
        assert_eq!(teichmuller(&PadicElem::from_int(5, 3, 1)).unwrap(), PadicElem::from_int(5, 3, 1));
        let u7 = unit_part(&PadicElem::from_int(5, 3, 7)).unwrap();
        assert!(u7.eq_mod(&PadicElem::from_int(5, 3, 1), 1));
        assert_eq!(teichmuller(&PadicElem::from_int(5, 3, 7)).unwrap(), t);
    }

    #[test]
    fn teichmuller_in_zp2_has_order_dividing_24() {
        let u = PadicElem::new(5, 6, 2, 3);
        let t = teichmuller(&u).unwrap();
        assert_eq!(t.pow(24), t.one_like());
        assert!(t.eq_mod(&u, 1));
    }

    #[test]
    fn log_exp_roundtrip() {
        let six = PadicElem::from_int(5, 4, 6);
        assert_eq!(pexp(&plog(&six).unwrap()).unwrap(), six);
        assert_eq!(plog(&six.one_like()).unwrap(), six.zero_like());
        assert_eq!(pexp(&six.zero_like()).unwrap(), six.one_like());
        let x = PadicElem::new(5, 8, 15, 35);
        assert_eq!(plog(&pexp(&x).unwrap()).unwrap(), x);
        assert!(plog(&z(2)).is_err());
        assert!(pexp(&z(2)).is_err());
    }

    #[test]
    fn sqrt_exhaustive_mod_125() {
        let r = sqrt_one_unit(&PadicElem::from_int(5, 3, 6)).unwrap();
        let sols: Vec<i128> = (0..125).filter(|x| x % 5 == 1 && (x * x) % 125 == 6).collect();
        assert_eq!(sols, vec![r.a()]);
        assert_eq!(sqrt_one_unit(&z(1)).unwrap(), z(1));
    }

    #[test]
    fn binom_polynomial_cases() {
        let b = binom_integral(&z(3), 5).unwrap();
        assert_eq!(b, vec![z(1), z(3), z(3), z(1), z(0), z(0)]);
        let s = binom_series(&z(0), 0, 4).unwrap();
        assert!(s.coeffs[1..].iter().all(|c| c.is_zero()));
    }

    #[test]
    fn binom_series_matches_log_exp() {
        // 5s ∈ Z_25 with s = (2 + 3δ)/5, evaluated at T = 6^5 − 1.
        let num = PadicElem::new(5, 8, 2, 3);
        let s = binom_series(&num, 1, 30).unwrap();
        let t = z(6).pow(5) - z(1);
        let got = s.eval(&t, 8).unwrap();
        let want = pexp(&(num * plog(&z(6)).unwrap())).unwrap();
        assert_eq!(got, want);
    }
}
