use std::fmt;

use super::PadicElem;

/// The operations shared by every coefficient ring in the crate:
/// Z_{p²} itself, its finite extensions, and truncated power series over them.
///
/// Constructors are context-carrying (`zero_like`, `one_like`) because every
/// ring needs runtime data such as the prime, precision or series shape.
pub trait CoeffRing: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Multiply by a scalar of Z_{p²}.
    fn scale(&self, c: &PadicElem) -> Self;
    /// Inverse when the element is a unit of the ring.
    fn try_inv(&self) -> Option<Self>;
    /// Truncate every scalar to precision `n`.
    fn reduce_prec(&self, n: u32) -> Self;
    /// A scalar carrying the prime and working precision of the element.
    fn base_scalar(&self) -> PadicElem;

    fn scalar_like(&self, c: &PadicElem) -> Self {
        self.one_like().scale(c)
    }

    fn pow_u64(&self, mut e: u64) -> Self {
        let mut r = self.one_like();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul_ref(&b);
            }
            b = b.mul_ref(&b);
            e >>= 1;
        }
        r
    }
}

impl CoeffRing for PadicElem {
    fn zero_like(&self) -> Self {
        PadicElem::zero_like(self)
    }
    fn one_like(&self) -> Self {
        PadicElem::one_like(self)
    }
    fn add_ref(&self, o: &Self) -> Self {
        *self + *o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        *self - *o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        *self * *o
    }
    fn neg_ref(&self) -> Self {
        -*self
    }
    fn is_zero(&self) -> bool {
        PadicElem::is_zero(self)
    }
    fn scale(&self, c: &PadicElem) -> Self {
        *self * *c
    }
    fn try_inv(&self) -> Option<Self> {
        self.inv().ok()
    }
    fn reduce_prec(&self, n: u32) -> Self {
        self.reduce(n)
    }
    fn base_scalar(&self) -> PadicElem {
        *self
    }
}
