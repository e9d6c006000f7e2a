use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest modulus we allow, so that products of two residues fit in i128.
const MODULUS_LIMIT: i128 = 1 << 62;

/// Smallest positive quadratic non-residue modulo the odd prime `p`.
pub fn nonresidue(p: u32) -> u32 {
    let p64 = p as u64;
    (2..p64)
        .find(|&n| powmod_u64(n, (p64 - 1) / 2, p64) == p64 - 1)
        .expect("odd prime has a non-residue") as u32
}

pub(crate) fn powmod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// `p^n` as i128.
pub fn ppow(p: u32, n: u32) -> i128 {
    (p as i128).pow(n)
}

/// Largest precision whose modulus stays below 2^62.
pub fn max_precision(p: u32) -> u32 {
    let mut n = 0;
    while ppow(p, n + 1) < MODULUS_LIMIT {
        n += 1;
    }
    n
}

/// p-adic valuation of a nonzero integer.
pub fn vp_int(p: u32, mut x: i128) -> u32 {
    assert!(x != 0, "valuation of zero");
    let p = p as i128;
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

pub(crate) fn inv_mod(a: i128, m: i128) -> Option<i128> {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 == 1 {
        Some(s0.rem_euclid(m))
    } else {
        None
    }
}

/// An element `a + b·δ` of Z_{p²} known modulo `p^prec`, with `δ²` the
/// smallest positive non-residue mod p.
///
/// Precision is absolute and tracked per element: binary operations return
/// the smaller of the two precisions. Equality compares at the smaller
/// precision of the two operands.
#[derive(Clone, Copy)]
pub struct PadicElem {
    a: i128,
    b: i128,
    p: u32,
    nr: u32,
    prec: u32,
}

impl PadicElem {
    pub fn new(p: u32, prec: u32, a: i128, b: i128) -> Self {
        assert!(p >= 3 && p % 2 == 1, "p must be an odd prime");
        let m = ppow(p, prec);
        assert!(m < MODULUS_LIMIT, "precision {prec} too large for p={p}");
        PadicElem {
            a: a.rem_euclid(m),
            b: b.rem_euclid(m),
            p,
            nr: nonresidue(p),
            prec,
        }
    }

    fn raw(&self, a: i128, b: i128, prec: u32) -> Self {
        let m = ppow(self.p, prec);
        PadicElem {
            a: a.rem_euclid(m),
            b: b.rem_euclid(m),
            p: self.p,
            nr: self.nr,
            prec,
        }
    }

    pub fn from_int(p: u32, prec: u32, n: i128) -> Self {
        Self::new(p, prec, n, 0)
    }

    pub fn zero(p: u32, prec: u32) -> Self {
        Self::new(p, prec, 0, 0)
    }

    pub fn one(p: u32, prec: u32) -> Self {
        Self::new(p, prec, 1, 0)
    }

    /// The fixed square root δ of the non-residue.
    pub fn delta(p: u32, prec: u32) -> Self {
        Self::new(p, prec, 0, 1)
    }

    /// Rational number `num/den` with `den` prime to p.
    pub fn from_ratio(p: u32, prec: u32, num: i128, den: i128) -> Result<Self> {
        let d = Self::from_int(p, prec, den).inv()?;
        Ok(Self::from_int(p, prec, num) * d)
    }

    pub fn zero_like(&self) -> Self {
        self.raw(0, 0, self.prec)
    }

    pub fn one_like(&self) -> Self {
        self.raw(1, 0, self.prec)
    }

    pub fn int_like(&self, n: i128) -> Self {
        self.raw(n, 0, self.prec)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// δ² as an integer.
    pub fn nonresidue(&self) -> u32 {
        self.nr
    }

    pub fn modulus(&self) -> i128 {
        ppow(self.p, self.prec)
    }

    /// Coordinate on 1, in `[0, p^prec)`.
    pub fn a(&self) -> i128 {
        self.a
    }

    /// Coordinate on δ, in `[0, p^prec)`.
    pub fn b(&self) -> i128 {
        self.b
    }

    /// Coordinate on 1 as a balanced representative.
    pub fn a_balanced(&self) -> i128 {
        let m = self.modulus();
        if self.a > m / 2 {
            self.a - m
        } else {
            self.a
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn is_unit(&self) -> bool {
        let p = self.p as i128;
        self.prec > 0 && (self.a % p != 0 || self.b % p != 0)
    }

    /// Lies in Z_p (δ-coordinate vanishes to the known precision).
    pub fn is_in_zp(&self) -> bool {
        self.b == 0
    }

    /// Valuation, capped at the precision for zero.
    pub fn valuation(&self) -> u32 {
        let va = if self.a == 0 { self.prec } else { vp_int(self.p, self.a) };
        let vb = if self.b == 0 { self.prec } else { vp_int(self.p, self.b) };
        va.min(vb).min(self.prec)
    }

    /// Truncate to a lower precision (no-op if `n >= prec`).
    pub fn reduce(&self, n: u32) -> Self {
        if n >= self.prec {
            *self
        } else {
            self.raw(self.a, self.b, n)
        }
    }

    /// Reinterpret the stored representative at precision `n`.
    ///
    /// Only meaningful when the representative is exact (e.g. an integer
    /// input); used to raise working precision before lossy divisions.
    pub fn lift_to(&self, n: u32) -> Self {
        let m = ppow(self.p, n);
        assert!(m < MODULUS_LIMIT, "precision {n} too large for p={}", self.p);
        let a = if n < self.prec { self.a % m } else { self.a };
        let b = if n < self.prec { self.b % m } else { self.b };
        PadicElem { a, b, p: self.p, nr: self.nr, prec: n }
    }

    /// Same precision as `self`, with the precision of `other` ignored.
    pub fn with_prec_of(&self, other: &PadicElem) -> Self {
        if other.prec <= self.prec {
            self.reduce(other.prec)
        } else {
            self.lift_to(other.prec)
        }
    }

    /// Galois conjugate δ ↦ −δ (the Frobenius of Q_{p²}/Q_p).
    pub fn conj(&self) -> Self {
        self.raw(self.a, -self.b, self.prec)
    }

    /// Norm to Z_p: a² − δ²b².
    pub fn norm(&self) -> Self {
        let m = self.modulus();
        let aa = self.a * self.a % m;
        let bb = self.b * self.b % m * self.nr as i128 % m;
        self.raw(aa - bb, 0, self.prec)
    }

    /// Trace to Z_p: 2a.
    pub fn trace(&self) -> Self {
        self.raw(2 * self.a, 0, self.prec)
    }

    pub fn inv(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NonUnit);
        }
        let m = self.modulus();
        let n = self.norm().a;
        let ni = inv_mod(n, m).ok_or(Error::NonUnit)?;
        Ok(self.raw(self.a * ni % m, -(self.b * ni % m), self.prec))
    }

    /// Exact division by `p^k`; the result loses `k` digits of precision.
    pub fn div_p_pow(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Ok(*self);
        }
        if k > self.prec {
            return Err(Error::PrecisionLoss(format!(
                "dividing by p^{k} at precision {}",
                self.prec
            )));
        }
        let d = ppow(self.p, k);
        if self.a % d != 0 || self.b % d != 0 {
            return Err(Error::DomainError(format!("not divisible by p^{k}")));
        }
        Ok(self.raw(self.a / d, self.b / d, self.prec - k))
    }

    /// Multiply by `p^k`; the result gains `k` digits of precision.
    pub fn mul_p_pow(&self, k: u32) -> Self {
        let d = ppow(self.p, k);
        let np = self.prec + k;
        self.lift_to(np).raw(self.a * d, self.b * d, np)
    }

    /// Division `self / other` where `other = p^v·unit` and `v ≤ val(self)`.
    pub fn div(&self, other: &PadicElem) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DomainError("division by zero".into()));
        }
        let v = other.valuation();
        let u = other.div_p_pow(v)?;
        let x = self.div_p_pow(v)?;
        Ok(x * u.inv()?)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut r = self.one_like();
        let mut b = *self;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b;
            }
            b = b * b;
            e >>= 1;
        }
        r
    }

    /// Integer power allowing negative exponents for units.
    pub fn powi(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.inv()?.pow(e.unsigned_abs()))
        }
    }

    /// Agreement modulo `p^n` (both must be known to at least `n` digits).
    pub fn eq_mod(&self, other: &PadicElem, n: u32) -> bool {
        let n = n.min(self.prec).min(other.prec);
        let m = ppow(self.p, n);
        self.a % m == other.a % m && self.b % m == other.b % m
    }

    fn binop_prec(&self, other: &PadicElem) -> u32 {
        debug_assert_eq!(self.p, other.p, "mixing primes");
        self.prec.min(other.prec)
    }
}

impl PartialEq for PadicElem {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.eq_mod(other, self.prec.min(other.prec))
    }
}

impl Eq for PadicElem {}

impl fmt::Debug for PadicElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for PadicElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b == 0 {
            write!(f, "{} + O({}^{})", self.a, self.p, self.prec)
        } else {
            write!(f, "{} + {}δ + O({}^{})", self.a, self.b, self.p, self.prec)
        }
    }
}

impl Add for PadicElem {
    type Output = PadicElem;
    fn add(self, o: PadicElem) -> PadicElem {
        let n = self.binop_prec(&o);
        self.raw(self.a + o.a, self.b + o.b, n)
    }
}

impl Sub for PadicElem {
    type Output = PadicElem;
    fn sub(self, o: PadicElem) -> PadicElem {
        let n = self.binop_prec(&o);
        self.raw(self.a - o.a, self.b - o.b, n)
    }
}

impl Mul for PadicElem {
    type Output = PadicElem;
    fn mul(self, o: PadicElem) -> PadicElem {
        let n = self.binop_prec(&o);
        let m = ppow(self.p, n);
        let (a, b, c, d) = (self.a % m, self.b % m, o.a % m, o.b % m);
        let ac = a * c % m;
        let bd = b * d % m * self.nr as i128 % m;
        let ad = a * d % m;
        let bc = b * c % m;
        self.raw(ac + bd, ad + bc, n)
    }
}

impl Neg for PadicElem {
    type Output = PadicElem;
    fn neg(self) -> PadicElem {
        self.raw(-self.a, -self.b, self.prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonresidues() {
        assert_eq!(nonresidue(5), 2);
        assert_eq!(nonresidue(7), 3);
        assert_eq!(nonresidue(17), 3);
    }

    #[test]
    fn inverse_and_norm() {
        let x = PadicElem::new(5, 6, 3, 7);
        let y = x.inv().unwrap();
        assert_eq!(x * y, x.one_like());
        assert_eq!((x * x.conj()).b(), 0);
        assert_eq!(x * x.conj(), x.norm());
    }

    #[test]
    fn valuation_and_division() {
        let x = PadicElem::new(5, 8, 50, 25);
        assert_eq!(x.valuation(), 2);
        let y = x.div_p_pow(2).unwrap();
        assert_eq!(y.prec(), 6);
        assert_eq!(y, PadicElem::new(5, 6, 2, 1));
        assert!(PadicElem::new(5, 8, 5, 1).div_p_pow(1).is_err());
    }

    #[test]
    fn delta_squares_to_nonresidue() {
        let d = PadicElem::delta(7, 5);
        assert_eq!(d * d, PadicElem::from_int(7, 5, 3));
    }

    #[test]
    fn max_precision_bound() {
        assert_eq!(max_precision(5), 26);
        assert!(ppow(5, max_precision(5)) < MODULUS_LIMIT);
    }
}
