use num_integer::Integer;

use super::{HeckeChar, Root, RootEmbedding};
use crate::error::{Error, Result};
use crate::padic_core::{powmod_u64, PadicElem};

/// A Dirichlet character as an explicit value table modulo its modulus
/// (`None` on residues that are not prime to it).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletChar {
    modulus: u64,
    values: Vec<Option<Root>>,
}

impl DirichletChar {
    pub fn from_fn(modulus: u64, f: impl Fn(u64) -> Root) -> Self {
        let values = (0..modulus).map(|n| (n.gcd(&modulus) == 1).then(|| f(n))).collect();
        DirichletChar { modulus, values }
    }

    pub fn trivial(modulus: u64) -> Self {
        Self::from_fn(modulus, |_| Root::one())
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn value(&self, n: i64) -> Option<Root> {
        self.values[n.rem_euclid(self.modulus as i64) as usize]
    }

    /// The value embedded in Z_{p²}, zero off the support.
    pub fn embed(&self, n: i64, emb: &RootEmbedding) -> Result<PadicElem> {
        match self.value(n) {
            Some(r) => emb.embed(&r),
            None => Ok(PadicElem::zero(emb.p(), emb.prec())),
        }
    }

    /// Product, on the lcm of the moduli.
    pub fn mul(&self, o: &Self) -> Self {
        let m = self.modulus.lcm(&o.modulus);
        Self::from_fn(m, |n| self.value(n as i64).unwrap().mul(&o.value(n as i64).unwrap()))
    }

    pub fn pow(&self, e: i64) -> Self {
        DirichletChar { modulus: self.modulus, values: self.values.iter().map(|v| v.map(|r| r.pow(e))).collect() }
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().flatten().all(|r| r.is_one())
    }

    /// χ(−1) = ±1.
    pub fn parity(&self) -> i32 {
        if self.value(-1).is_none_or(|r| r.is_one()) {
            1
        } else {
            -1
        }
    }

    /// The conductor: the least divisor m of the modulus with χ trivial on
    /// residues ≡ 1 mod m.
    pub fn conductor(&self) -> u64 {
        let n = self.modulus;
        (1..=n)
            .filter(|m| n % m == 0)
            .find(|m| {
                (0..n).filter(|x| x % m == 1 % m && x.gcd(&n) == 1).all(|x| self.values[x as usize].unwrap().is_one())
            })
            .unwrap_or(n)
    }

    /// The quadratic character ε_K(n) = (−d/n) of K = Q(√−d), d ≡ 3 mod 4;
    /// by reciprocity this is the Jacobi symbol (n/d).
    pub fn kronecker(d: u64) -> Self {
        Self::from_fn(d, |n| {
            let s = crate::quadfield::prime_factors(d).iter().filter(|&&q| powmod_u64(n, (q - 1) / 2, q) != 1).count();
            Root::new((s % 2) as i128, 2)
        })
    }

    /// ω^j, with ω the Teichmüller character mod p.
    pub fn teichmuller_power(p: u32, j: i64, emb: &RootEmbedding) -> Result<Self> {
        let mut vals = Vec::with_capacity(p as usize);
        for n in 0..p as i64 {
            vals.push(if n == 0 { None } else { Some(emb.residue_log(&PadicElem::from_int(p, 1, n as i128))?.pow(j)) });
        }
        Ok(DirichletChar { modulus: p as u64, values: vals })
    }

    /// η|_Q : n ↦ η((n)), on the modulus 𝔠 ∩ Z.
    pub fn restriction_of(eta: &HeckeChar) -> Result<Self> {
        let m = eta.group().modulus().basis()[0].u as u64;
        let mut values = Vec::with_capacity(m as usize);
        for n in 0..m {
            values.push(if n.gcd(&m) == 1 { Some(eta.central_value(n.max(1) as i64)?) } else { None });
        }
        Ok(DirichletChar { modulus: m, values })
    }

    /// Lift to a multiple of the modulus.
    pub fn extend(&self, modulus: u64) -> Result<Self> {
        if modulus % self.modulus != 0 {
            return Err(Error::DomainError(format!("{modulus} is not a multiple of {}", self.modulus)));
        }
        Ok(Self::from_fn(modulus, |n| self.value(n as i64).unwrap()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic_core::teichmuller;

    #[test]
    fn kronecker_matches_field_splitting() {
        let k = crate::quadfield::QuadField::new(23).unwrap();
        let e = DirichletChar::kronecker(23);
        for l in [2u64, 3, 5, 7, 11, 13, 29, 31, 47] {
            let v = e.value(l as i64).map(|r| if r.is_one() { 1 } else { -1 }).unwrap_or(0);
            assert_eq!(v, k.kronecker(l), "l={l}");
        }
        assert_eq!(e.parity(), -1);
        assert_eq!(e.conductor(), 23);
    }

    #[test]
    fn teichmuller_character_embeds_to_teichmuller_lift() {
        let emb = RootEmbedding::new(5, 6).unwrap();
        let w = DirichletChar::teichmuller_power(5, 1, &emb).unwrap();
        for n in 1..5 {
            assert_eq!(w.embed(n, &emb).unwrap(), teichmuller(&PadicElem::from_int(5, 6, n as i128)).unwrap());
        }
        assert_eq!(w.pow(4), DirichletChar::trivial(5));
        assert_eq!(w.parity(), -1);
    }
}
