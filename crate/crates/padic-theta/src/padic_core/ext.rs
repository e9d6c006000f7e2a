use std::fmt;
use std::sync::Arc;

use super::{CoeffRing, PadicElem};
use crate::error::{Error, Result};

/// Which finite extension of Z_{p²} an [`ExtRing`] realizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtKind {
    /// Z_{p²}[γ] with γ^{p−1} = p.
    Ramped,
    /// Z_{p²}[ζ] with ζ a primitive `p^m`-th root of unity.
    Cyclotomic { m: u32 },
}

/// Z_{p²}[x]/(F) for a monic F with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtRing {
    pub p: u32,
    pub prec: u32,
    pub kind: ExtKind,
    /// Lower coefficients of F = x^d + Σ_{j<d} f_j x^j.
    pub tail: Vec<i128>,
}

impl ExtRing {
    pub fn ramped(p: u32, prec: u32) -> Arc<Self> {
        let d = (p - 1) as usize;
        let mut tail = vec![0i128; d];
        tail[0] = -(p as i128);
        Arc::new(ExtRing { p, prec, kind: ExtKind::Ramped, tail })
    }

    /// Φ_{p^m}(x) = Σ_{i<p} x^{i·p^{m−1}}.
    pub fn cyclotomic(p: u32, m: u32, prec: u32) -> Arc<Self> {
        assert!(m >= 1);
        let step = (p as usize).pow(m - 1);
        let d = step * (p as usize - 1);
        let mut tail = vec![0i128; d];
        for i in 0..(p as usize - 1) {
            tail[i * step] = 1;
        }
        Arc::new(ExtRing { p, prec, kind: ExtKind::Cyclotomic { m }, tail })
    }

    pub fn degree(&self) -> usize {
        self.tail.len()
    }
}

/// An element of an [`ExtRing`], stored on the power basis of the generator.
#[derive(Clone)]
pub struct ExtElem {
    ring: Arc<ExtRing>,
    c: Vec<PadicElem>,
}

/// Element of Z_{p²}[γ], γ^{p−1} = p.
pub type RampedElem = ExtElem;

impl ExtElem {
    pub fn from_coeffs(ring: &Arc<ExtRing>, mut c: Vec<PadicElem>) -> Self {
        let d = ring.degree();
        assert!(c.len() <= d, "too many coefficients");
        let z = PadicElem::zero(ring.p, ring.prec);
        c.resize(d, z);
        ExtElem { ring: ring.clone(), c }
    }

    pub fn from_base(ring: &Arc<ExtRing>, x: PadicElem) -> Self {
        Self::from_coeffs(ring, vec![x])
    }

    /// `x·t^j` for the generator t.
    pub fn monomial(ring: &Arc<ExtRing>, x: PadicElem, j: usize) -> Self {
        let gen = Self::generator(ring, x.prec());
        Self::from_base(ring, x).mul_ref(&gen.pow_u64(j as u64))
    }

    pub fn generator(ring: &Arc<ExtRing>, prec: u32) -> Self {
        let mut c = vec![PadicElem::zero(ring.p, prec); ring.degree()];
        if ring.degree() == 1 {
            c[0] = PadicElem::from_int(ring.p, prec, -ring.tail[0]);
        } else {
            c[1] = PadicElem::one(ring.p, prec);
        }
        ExtElem { ring: ring.clone(), c }
    }

    pub fn ring(&self) -> &Arc<ExtRing> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[PadicElem] {
        &self.c
    }

    pub fn prec(&self) -> u32 {
        self.c.iter().map(|x| x.prec()).min().unwrap_or(0)
    }

    /// Valuation in units of 1/(p−1) for the ramped ring; `None` for zero.
    pub fn ramped_valuation(&self) -> Option<u32> {
        assert_eq!(self.ring.kind, ExtKind::Ramped);
        let e = self.ring.p - 1;
        self.c
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(j, x)| e * x.valuation() + j as u32)
            .min()
    }

    /// Returns the base coefficient when all higher components vanish.
    pub fn to_base(&self) -> Result<PadicElem> {
        if self.c[1..].iter().all(|x| x.is_zero()) {
            Ok(self.c[0])
        } else {
            Err(Error::DomainError(
                "extension element does not lie in Z_{p^2}".into(),
            ))
        }
    }

    /// Value of the residue map x ↦ x(1) used to detect units of the
    /// totally ramified rings (γ ↦ 0 for the ramped ring).
    fn residue_scalar(&self) -> PadicElem {
        match self.ring.kind {
            ExtKind::Ramped => self.c[0],
            ExtKind::Cyclotomic { .. } => self
                .c
                .iter()
                .fold(self.c[0].zero_like(), |acc, x| acc + *x),
        }
    }

    fn check_same(&self, o: &Self) {
        debug_assert!(
            Arc::ptr_eq(&self.ring, &o.ring) || *self.ring == *o.ring,
            "mixing extension rings"
        );
    }
}

impl PartialEq for ExtElem {
    fn eq(&self, o: &Self) -> bool {
        self.ring == o.ring && self.c == o.c
    }
}

impl fmt::Debug for ExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.c.iter().map(|x| format!("[{},{}]", x.a(), x.b())).collect();
        write!(f, "Ext{:?}({})", self.ring.kind, parts.join(" "))
    }
}

impl CoeffRing for ExtElem {
    fn zero_like(&self) -> Self {
        ExtElem { ring: self.ring.clone(), c: self.c.iter().map(|x| x.zero_like()).collect() }
    }

    fn one_like(&self) -> Self {
        let mut z = self.zero_like();
        z.c[0] = self.c[0].one_like();
        z
    }

    fn add_ref(&self, o: &Self) -> Self {
        self.check_same(o);
        ExtElem { ring: self.ring.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| *a + *b).collect() }
    }

    fn sub_ref(&self, o: &Self) -> Self {
        self.check_same(o);
        ExtElem { ring: self.ring.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| *a - *b).collect() }
    }

    fn mul_ref(&self, o: &Self) -> Self {
        self.check_same(o);
        let d = self.ring.degree();
        let z = self.c[0].zero_like().reduce(o.prec());
        let mut r = vec![z; 2 * d - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                r[i + j] = r[i + j] + *a * *b;
            }
        }
        for i in (d..2 * d - 1).rev() {
            let top = r[i];
            if top.is_zero() {
                continue;
            }
            for (j, f) in self.ring.tail.iter().enumerate() {
                if *f != 0 {
                    r[i - d + j] = r[i - d + j] - top * top.int_like(*f);
                }
            }
        }
        r.truncate(d);
        ExtElem { ring: self.ring.clone(), c: r }
    }

    fn neg_ref(&self) -> Self {
        ExtElem { ring: self.ring.clone(), c: self.c.iter().map(|x| -*x).collect() }
    }

    fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    fn scale(&self, s: &PadicElem) -> Self {
        ExtElem { ring: self.ring.clone(), c: self.c.iter().map(|x| *x * *s).collect() }
    }

    /// Newton iteration y ← y(2 − xy) from the inverse of the residue.
    fn try_inv(&self) -> Option<Self> {
        let r = self.residue_scalar();
        let mut y = ExtElem::from_base(&self.ring, r.inv().ok()?).reduce_prec(self.prec());
        let two = self.scalar_like(&r.int_like(2));
        for _ in 0..64 {
            let e = self.mul_ref(&y);
            if e == self.one_like() {
                return Some(y);
            }
            y = y.mul_ref(&two.sub_ref(&e));
        }
        None
    }

    fn base_scalar(&self) -> PadicElem {
        self.c[0].reduce(self.prec())
    }

    fn reduce_prec(&self, n: u32) -> Self {
        ExtElem { ring: self.ring.clone(), c: self.c.iter().map(|x| x.reduce(n)).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_power_is_p() {
        let r = ExtRing::ramped(5, 6);
        let g = ExtElem::generator(&r, 6);
        let g4 = g.pow_u64(4);
        assert_eq!(g4, ExtElem::from_base(&r, PadicElem::from_int(5, 6, 5)));
        assert_eq!(g.ramped_valuation(), Some(1));
        assert_eq!(g4.ramped_valuation(), Some(4));
    }

    #[test]
    fn cyclotomic_root_has_order_p() {
        let r = ExtRing::cyclotomic(5, 1, 6);
        let z = ExtElem::generator(&r, 6);
        assert_eq!(z.pow_u64(5), z.one_like());
        assert_ne!(z.pow_u64(1), z.one_like());
        let r2 = ExtRing::cyclotomic(5, 2, 4);
        let z2 = ExtElem::generator(&r2, 4);
        assert_eq!(z2.pow_u64(25), z2.one_like());
        assert_ne!(z2.pow_u64(5), z2.one_like());
    }

    #[test]
    fn inverse_in_extensions() {
        let r = ExtRing::ramped(5, 6);
        let g = ExtElem::generator(&r, 6);
        let one = g.one_like();
        let x = one.add_ref(&g).add_ref(&g.mul_ref(&g).scale(&PadicElem::delta(5, 6)));
        let y = x.try_inv().unwrap();
        assert_eq!(x.mul_ref(&y), one);
        assert!(g.try_inv().is_none());
        let c = ExtRing::cyclotomic(5, 1, 6);
        let z = ExtElem::generator(&c, 6);
        let u = z.add_ref(&z.one_like().scale(&PadicElem::from_int(5, 6, 2)));
        assert_eq!(u.mul_ref(&u.try_inv().unwrap()), u.one_like());
    }
}
