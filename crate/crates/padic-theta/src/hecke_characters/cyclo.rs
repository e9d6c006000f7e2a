use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Root;
use crate::error::{Error, Result};

/// The cyclotomic field Q(ζ_m), with Φ_m precomputed.
#[derive(Debug, PartialEq, Eq)]
pub struct CycloField {
    m: u64,
    /// Coefficients of Φ_m, constant term first (monic).
    phi: Vec<i64>,
}

impl CycloField {
    pub fn new(m: u64) -> Arc<Self> {
        Arc::new(CycloField { m, phi: cyclotomic_poly(m) })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }
}

/// Φ_m by dividing x^m − 1 by Φ_d for the proper divisors d of m.
pub fn cyclotomic_poly(m: u64) -> Vec<i64> {
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in (1..m).filter(|d| m % d == 0) {
        num = divide_exact(&num, &cyclotomic_poly(d));
    }
    num
}

fn divide_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    let mut q = vec![0i64; r.len() - dd];
    for i in (0..q.len()).rev() {
        let c = r[i + dd];
        q[i] = c;
        for (j, &x) in den.iter().enumerate() {
            r[i + j] -= c * x;
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

/// An element of Q(ζ_m) on the power basis 1, ζ, …, ζ^{φ(m)−1}.
#[derive(Clone)]
pub struct Cyclo {
    field: Arc<CycloField>,
    c: Vec<BigRational>,
}

impl PartialEq for Cyclo {
    fn eq(&self, o: &Self) -> bool {
        self.field.m == o.field.m && self.c == o.c
    }
}

impl Eq for Cyclo {}

impl Cyclo {
    pub fn zero(field: &Arc<CycloField>) -> Self {
        Cyclo { field: field.clone(), c: vec![BigRational::zero(); field.degree()] }
    }

    pub fn from_rational(field: &Arc<CycloField>, x: BigRational) -> Self {
        let mut z = Self::zero(field);
        z.c[0] = x;
        z
    }

    pub fn from_int(field: &Arc<CycloField>, n: i64) -> Self {
        Self::from_rational(field, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn one(field: &Arc<CycloField>) -> Self {
        Self::from_int(field, 1)
    }

    /// ζ_m^e.
    pub fn zeta_pow(field: &Arc<CycloField>, e: i64) -> Self {
        let m = field.m as i64;
        let mut full = vec![BigRational::zero(); m as usize];
        full[e.rem_euclid(m) as usize] = BigRational::one();
        Self::reduce(field, full)
    }

    /// The image of a root of unity; its order must divide m.
    pub fn from_root(field: &Arc<CycloField>, r: &Root) -> Result<Self> {
        let e = r
            .exponent_in(field.m)
            .ok_or_else(|| Error::Unsupported(format!("root of order {} is not in Q(ζ_{})", r.den, field.m)))?;
        Ok(Self::zeta_pow(field, e as i64))
    }

    pub fn field(&self) -> &Arc<CycloField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    fn reduce(field: &Arc<CycloField>, mut full: Vec<BigRational>) -> Self {
        let d = field.degree();
        for i in (d..full.len()).rev() {
            if full[i].is_zero() {
                continue;
            }
            let c = full[i].clone();
            for (j, &f) in field.phi.iter().enumerate().take(d) {
                if f != 0 {
                    full[i - d + j] -= &c * BigRational::from_integer(BigInt::from(f));
                }
            }
            full[i] = BigRational::zero();
        }
        full.resize(d, BigRational::zero());
        Cyclo { field: field.clone(), c: full }
    }

    pub fn add(&self, o: &Self) -> Self {
        Cyclo { field: self.field.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Cyclo { field: self.field.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self) -> Self {
        Cyclo { field: self.field.clone(), c: self.c.iter().map(|a| -a).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let d = self.field.degree();
        let mut full = vec![BigRational::zero(); 2 * d.max(1)];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    full[i + j] += a * b;
                }
            }
        }
        Self::reduce(&self.field, full)
    }

    pub fn scale(&self, x: &BigRational) -> Self {
        Cyclo { field: self.field.clone(), c: self.c.iter().map(|a| a * x).collect() }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut r = Self::one(&self.field);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        r
    }

    /// Complex conjugation ζ ↦ ζ^{−1}.
    pub fn conj(&self) -> Self {
        self.galois(self.field.m - 1)
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|a| a.is_zero())
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one(&self.field)
    }

    /// The rational value, if the element lies in Q.
    pub fn to_rational(&self) -> Option<BigRational> {
        self.c[1..].iter().all(|a| a.is_zero()).then(|| self.c[0].clone())
    }

    /// Inverse via the norm trick x⁻¹ = Π_{σ≠1} σ(x) / N(x).
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DomainError("inverse of zero".into()));
        }
        let m = self.field.m;
        let mut prod = Self::one(&self.field);
        for a in (2..m).filter(|a| num_integer::gcd(*a, m) == 1) {
            prod = prod.mul(&self.galois(a));
        }
        let n = self.mul(&prod).to_rational().ok_or_else(|| Error::DomainError("norm is not rational".into()))?;
        Ok(prod.scale(&n.recip()))
    }

    /// The automorphism ζ ↦ ζ^a.
    pub fn galois(&self, a: u64) -> Self {
        let m = self.field.m;
        let mut full = vec![BigRational::zero(); m as usize];
        for (i, c) in self.c.iter().enumerate() {
            if !c.is_zero() {
                full[(i as u64 * a % m) as usize] += c;
            }
        }
        Self::reduce(&self.field, full)
    }

    /// Σ_e counts[e]·ζ^e for a table indexed by exponents mod m.
    pub fn from_zeta_counts(field: &Arc<CycloField>, counts: &[i64]) -> Self {
        let m = field.m as usize;
        let mut full = vec![BigRational::zero(); m];
        for (e, &c) in counts.iter().enumerate() {
            if c != 0 {
                full[e % m] += BigRational::from_integer(BigInt::from(c));
            }
        }
        Self::reduce(field, full)
    }
}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Deterministic text form, e.g. `1/2 - 3*z^2` with z = ζ_m.
impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "z".into(),
                _ => format!("z^{i}"),
            };
            let mag = a.abs();
            let body = if i > 0 && mag.is_one() { mono } else if i == 0 { mag.to_string() } else { format!("{mag}*{mono}") };
            if first {
                write!(f, "{}{}", if a.is_negative() { "-" } else { "" }, body)?;
            } else {
                write!(f, " {} {}", if a.is_negative() { "-" } else { "+" }, body)?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_poly(5).len(), 5);
    }

    #[test]
    fn roots_of_unity_sum_to_zero() {
        for m in [3u64, 4, 5, 12, 20] {
            let k = CycloField::new(m);
            let mut s = Cyclo::zero(&k);
            for e in 0..m as i64 {
                s = s.add(&Cyclo::zeta_pow(&k, e));
            }
            assert!(s.is_zero(), "m={m}");
            let z = Cyclo::zeta_pow(&k, 1);
            assert!(z.pow(m).is_one());
            assert!(z.mul(&z.conj()).is_one());
        }
    }

    #[test]
    fn inverse_and_display() {
        let k = CycloField::new(5);
        let x = Cyclo::from_int(&k, 2).add(&Cyclo::zeta_pow(&k, 2));
        assert!(x.mul(&x.inv().unwrap()).is_one());
        let k3 = CycloField::new(3);
        assert_eq!(Cyclo::zeta_pow(&k3, 2).to_string(), "-1 - z");
        assert_eq!(Cyclo::zero(&k3).to_string(), "0");
    }
}
