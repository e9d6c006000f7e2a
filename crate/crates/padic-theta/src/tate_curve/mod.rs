//! Tate curves: the period q_E, the branch log_{q_E}, and the symmetrized
//! Heegner combinations P^± read through their u-coordinates.

mod point;


use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

pub use point::{CurveSpec, PhiMeta, PointFile, UCoord};

use crate::error::{Error, Result};
use crate::padic_core::{max_precision, plog, unit_part, vp_int, PadicElem};

/// A nonzero element p^val · unit of Q_{p²}^×.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Qp2Elem {
    val: i64,
    unit: PadicElem,
}

impl Qp2Elem {
    pub fn new(val: i64, unit: PadicElem) -> Result<Self> {
        if !unit.is_unit() {
            return Err(Error::NonUnit);
        }
        Ok(Qp2Elem { val, unit })
    }

    /// Splits off the valuation; the unit keeps the remaining digits.
    pub fn from_padic(x: &PadicElem) -> Result<Self> {
        if x.is_zero() {
            return Err(Error::DomainError("zero has no valuation".into()));
        }
        let v = x.valuation();
        Ok(Qp2Elem { val: v as i64, unit: x.div_p_pow(v)? })
    }

    pub fn from_rational(p: u32, prec: u32, x: &BigRational) -> Result<Self> {
        if x.is_zero() {
            return Err(Error::DomainError("zero has no valuation".into()));
        }
        let (vn, un) = split_int(x.numer(), p);
        let (vd, ud) = split_int(x.denom(), p);
        let m = BigInt::from(p).pow(prec);
        let num = to_i128(&un.mod_floor(&m))?;
        let den = to_i128(&ud.mod_floor(&m))?;
        Ok(Qp2Elem { val: vn as i64 - vd as i64, unit: PadicElem::from_ratio(p, prec, num, den)? })
    }

    pub fn val(&self) -> i64 {
        self.val
    }

    pub fn unit(&self) -> &PadicElem {
        &self.unit
    }

    pub fn p(&self) -> u32 {
        self.unit.p()
    }

    pub fn mul(&self, o: &Self) -> Self {
        Qp2Elem { val: self.val + o.val, unit: self.unit * o.unit }
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(Qp2Elem { val: -self.val, unit: self.unit.inv()? })
    }

    pub fn powi(&self, e: i64) -> Result<Self> {
        Ok(Qp2Elem { val: self.val * e, unit: self.unit.powi(e)? })
    }

    /// The Frobenius of Q_{p²}/Q_p.
    pub fn conj(&self) -> Self {
        Qp2Elem { val: self.val, unit: self.unit.conj() }
    }

    /// The integral element, if val ≥ 0.
    pub fn to_padic(&self) -> Result<PadicElem> {
        if self.val < 0 {
            return Err(Error::DomainError("element is not integral".into()));
        }
        Ok(self.unit.mul_p_pow(self.val as u32))
    }

    /// Equality of valuations and of units to `n` digits.
    pub fn eq_rel(&self, o: &Self, n: u32) -> bool {
        self.val == o.val && self.unit.eq_mod(&o.unit, n)
    }
}

fn split_int(x: &BigInt, p: u32) -> (u32, BigInt) {
    let pb = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0;
    while !x.is_zero() && (&x % &pb).is_zero() {
        x /= &pb;
        v += 1;
    }
    (v, x)
}

fn to_i128(x: &BigInt) -> Result<i128> {
    x.to_i128().ok_or_else(|| Error::PrecisionLoss("residue does not fit in 128 bits".into()))
}

fn big_to_padic(x: &BigInt, p: u32, prec: u32) -> Result<PadicElem> {
    let m = BigInt::from(p).pow(prec);
    Ok(PadicElem::from_int(p, prec, to_i128(&x.mod_floor(&m))?))
}

/// Coefficients b_0, …, b_n of q·j(q) = E₄³/∏(1−q^m)^{24}
/// (so j = q⁻¹ + 744 + 196884 q + …).
pub fn j_coefficients(n: usize) -> Vec<BigInt> {
    let len = n + 1;
    let mut e4 = vec![BigInt::zero(); len];
    e4[0] = BigInt::from(1);
    for (m, c) in e4.iter_mut().enumerate().skip(1) {
        let s3: u64 = (1..=m as u64).filter(|d| m as u64 % d == 0).map(|d| d * d * d).sum();
        *c = BigInt::from(240u64 * s3);
    }
    let e4_3 = mul_trunc(&mul_trunc(&e4, &e4), &e4);
    // 1/∏(1−q^m)^{24} = (Σ p(k) q^k)^{24}
    let mut part = vec![BigInt::zero(); len];
    part[0] = BigInt::from(1);
    for m in 1..len {
        for k in m..len {
            let t = part[k - m].clone();
            part[k] += t;
        }
    }
    let mut inv_eta24 = vec![BigInt::zero(); len];
    inv_eta24[0] = BigInt::from(1);
    for _ in 0..24 {
        inv_eta24 = mul_trunc(&inv_eta24, &part);
    }
    mul_trunc(&e4_3, &inv_eta24)
}

fn mul_trunc(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().min(b.len());
    let mut out = vec![BigInt::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// f(q) = j(q) − q⁻¹ = Σ_{n≥1} b_n q^{n−1} for q ∈ pZ_{p²}.
fn j_tail(q: &PadicElem, coeffs: &[BigInt]) -> Result<PadicElem> {
    let mut acc = q.zero_like();
    let mut qp = q.one_like();
    for b in &coeffs[1..] {
        acc = acc + big_to_padic(b, q.p(), q.prec())? * qp;
        qp = qp * *q;
        if qp.is_zero() {
            break;
        }
    }
    Ok(acc)
}

fn terms_needed(q: &PadicElem) -> usize {
    let v = q.valuation().max(1) as usize;
    q.prec() as usize / v + 2
}

/// j(q) for q ∈ pZ_{p²}, returned as p^{−v(q)} · unit.
pub fn j_invariant(q: &PadicElem) -> Result<Qp2Elem> {
    let v = q.valuation();
    if v == 0 || q.is_zero() {
        return Err(Error::DomainError("the j-series needs 0 < v(q) < precision".into()));
    }
    let coeffs = j_coefficients(terms_needed(q));
    let num = q.one_like() + *q * j_tail(q, &coeffs)?;
    let uq = q.div_p_pow(v)?;
    Ok(Qp2Elem { val: -(v as i64), unit: (num.reduce(uq.prec()) * uq.inv()?) })
}

/// q_E with j(q_E) = j to `prec` digits of relative precision, by the
/// fixed point q ← w / (1 − w f(q)), w = 1/j.
pub fn tate_period(p: u32, prec: u32, j: &BigRational) -> Result<PadicElem> {
    let jv = Qp2Elem::from_rational(p, 1, j).map_err(|_| Error::NotMultiplicative("j = 0".into()))?.val();
    if jv >= 0 {
        return Err(Error::NotMultiplicative(format!("ord_p(j) = {jv} ≥ 0")));
    }
    let v = (-jv) as u32;
    let work = prec + v + 2;
    if work > max_precision(p) {
        return Err(Error::ModulusTooLarge(format!("{work} digits at p = {p}")));
    }
    let w = Qp2Elem::from_rational(p, work - v, &j.recip())?.to_padic()?;
    let coeffs = j_coefficients(work as usize / v as usize + 2);
    let mut q = w;
    for _ in 0..=work {
        let next = w * (w.one_like() - w * j_tail(&q, &coeffs)?).inv()?;
        if next == q {
            return Ok(q.reduce(prec + v));
        }
        q = next;
    }
    Err(Error::NoConvergence(work as usize))
}

/// A curve with split (α = +1) or non-split (α = −1) multiplicative
/// reduction at p, through its Tate period.
#[derive(Clone, Debug)]
pub struct TateCurve {
    pub p: u32,
    pub prec: u32,
    pub j: BigRational,
    pub q: PadicElem,
    pub alpha: i64,
}

/// c4, c6 and Δ of a Weierstrass model [a1, a2, a3, a4, a6].
pub fn c_invariants(a: &[i64; 5]) -> (BigInt, BigInt, BigInt) {
    let [a1, a2, a3, a4, a6] = a.map(BigInt::from);
    let k = |n: i64| BigInt::from(n);
    let b2: BigInt = &a1 * &a1 + k(4) * &a2;
    let b4: BigInt = k(2) * &a4 + &a1 * &a3;
    let b6: BigInt = &a3 * &a3 + k(4) * &a6;
    let b8: BigInt = &a1 * &a1 * &a6 + k(4) * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3 - &a4 * &a4;
    let c4: BigInt = &b2 * &b2 - k(24) * &b4;
    let c6: BigInt = -(&b2 * &b2 * &b2) + k(36) * &b2 * &b4 - k(216) * &b6;
    let disc: BigInt = -(&b2 * &b2 * &b8) - k(8) * &b4 * &b4 * &b4 - k(27) * &b6 * &b6 + k(9) * &b2 * &b4 * &b6;
    (c4, c6, disc)
}

impl TateCurve {
    pub fn from_j(p: u32, prec: u32, j: BigRational, alpha: i64) -> Result<Self> {
        if alpha != 1 && alpha != -1 {
            return Err(Error::DomainError(format!("α = {alpha} is not ±1")));
        }
        let q = tate_period(p, prec, &j)?;
        Ok(TateCurve { p, prec, j, q, alpha })
    }

    /// j = c4³/Δ; α = +1 iff −c6 is a square mod p (the model must be
    /// minimal at p, so c6 is a unit).
    pub fn from_a_invariants(p: u32, prec: u32, a: &[i64; 5]) -> Result<Self> {
        let (c4, c6, disc) = c_invariants(a);
        if disc.is_zero() {
            return Err(Error::DomainError("singular model".into()));
        }
        let j = BigRational::new(&c4 * &c4 * &c4, disc);
        let pb = BigInt::from(p);
        let r = (-c6).mod_floor(&pb);
        if r.is_zero() {
            return Err(Error::NotMultiplicative("c6 ≡ 0 mod p: the model is not minimal multiplicative".into()));
        }
        let e = BigInt::from((p - 1) / 2);
        let alpha = if r.modpow(&e, &pb) == BigInt::from(1) { 1 } else { -1 };
        Self::from_j(p, prec, j, alpha)
    }

    pub fn ord_q(&self) -> u32 {
        self.q.valuation()
    }

    /// log_{q_E}(u) = log⟨u⟩ − (ord u / ord q_E)·log⟨q_E⟩.
    pub fn log_qe(&self, u: &Qp2Elem) -> Result<PadicElem> {
        log_qe(u, &self.q)
    }

    /// log_E of the point Φ_Tate(u).
    pub fn log_e(&self, u: &Qp2Elem) -> Result<PadicElem> {
        self.log_qe(u)
    }

    /// Whether u ∈ μ_{p²−1} · q_E^Z to the available precision.
    pub fn is_torsion(&self, u: &Qp2Elem) -> Result<bool> {
        let vq = self.ord_q() as i64;
        if u.val().rem_euclid(vq) != 0 {
            return Ok(false);
        }
        let shifted = u.mul(&Qp2Elem::from_padic(&self.q)?.powi(-u.val() / vq)?);
        let w = unit_part(shifted.unit())?;
        Ok(w == w.one_like())
    }
}

/// The branch of the logarithm with log(q) = 0 and log(ζ) = 0.
pub fn log_qe(u: &Qp2Elem, q: &PadicElem) -> Result<PadicElem> {
    let qe = Qp2Elem::from_padic(q)?;
    let vq = qe.val();
    let prec = u.unit().prec().min(qe.unit().prec());
    let lu = plog(&unit_part(&u.unit().reduce(prec))?)?;
    if u.val() == 0 {
        return Ok(lu);
    }
    let lq = plog(&unit_part(&qe.unit().reduce(prec))?)?;
    if vp_int(q.p(), vq as i128) > 0 {
        return Err(Error::Unsupported(format!("ord_p(q_E) = {vq} is divisible by p")));
    }
    let ratio = PadicElem::from_ratio(q.p(), prec, u.val() as i128, vq as i128)?;
    Ok(lu - ratio * lq)
}

/// X(u, q) and Y(u, q) of the Tate curve y² + xy = x³ + a₄x + a₆, for a unit
/// u with u ≢ 1 mod p. Used to validate u-coordinates.
pub fn tate_xy(u: &PadicElem, q: &PadicElem) -> Result<(PadicElem, PadicElem)> {
    let one = u.one_like();
    if !(one - *u).is_unit() {
        return Err(Error::Unsupported("forward map needs u ≢ 1 mod p".into()));
    }
    let n = terms_needed(q);
    let ui = u.inv()?;
    let mut x = *u * (one - *u).powi(-2)?;
    let mut y = *u * *u * (one - *u).powi(-3)?;
    let mut qn = one;
    let mut s1 = u.zero_like();
    for m in 1..=n {
        qn = qn * *q;
        if qn.is_zero() {
            break;
        }
        let a = qn * *u;
        let b = qn * ui;
        x = x + a * (one - a).powi(-2)? + b * (one - b).powi(-2)?;
        // the n = −m terms, rewritten in b = q^m/u
        y = y + a * a * (one - a).powi(-3)? - b * (one - b).powi(-3)?;
        s1 = s1 + qn.int_like(m as i128) * qn * (one - qn).inv()?;
    }
    Ok((x - s1.int_like(2) * s1, y + s1))
}

/// a₄ = −5 s₃ and a₆ = −(5 s₃ + 7 s₅)/12 with s_k = Σ n^k qⁿ/(1 − qⁿ).
pub fn tate_coefficients(q: &PadicElem) -> Result<(PadicElem, PadicElem)> {
    let one = q.one_like();
    let mut s3 = q.zero_like();
    let mut s5 = q.zero_like();
    let mut qn = one;
    for m in 1..=terms_needed(q) {
        qn = qn * *q;
        if qn.is_zero() {
            break;
        }
        let t = qn * (one - qn).inv()?;
        let m = m as i128;
        s3 = s3 + t * q.int_like(m * m * m);
        s5 = s5 + t * q.int_like(m * m * m * m * m);
    }
    let a4 = -(s3 * q.int_like(5));
    let a6 = -((s3 * q.int_like(5) + s5 * q.int_like(7)) * q.int_like(12).inv()?);
    Ok((a4, a6))
}

/// P_φ with its Frobenius image, on u-coordinates.
#[derive(Clone, Debug)]
pub struct HeegnerPointData {
    pub u: Qp2Elem,
    pub u_frob: Option<Qp2Elem>,
    pub phi: PhiMeta,
}

impl HeegnerPointData {
    /// u^{Frob} = σ(u): Φ_Tate is defined over Q_p.
    pub fn with_galois_frobenius(u: Qp2Elem, phi: PhiMeta) -> Self {
        HeegnerPointData { u_frob: Some(u.conj()), u, phi }
    }

    /// For quadratic φ with the check flag set: P^{Frob} = φ₁(p)·P, i.e.
    /// u^{Frob} · u^{−φ₁(p)} is torsion.
    pub fn validate(&self, curve: &TateCurve) -> Result<()> {
        if !(self.phi.quadratic && self.phi.check_frobenius) {
            return Ok(());
        }
        let uf = self.u_frob.as_ref().ok_or(Error::MissingFrobenius)?;
        let e = self.phi.phi1_p.ok_or_else(|| Error::validation("phi1(p)", "quadratic φ needs φ₁(p) = ±1"))?;
        if !curve.is_torsion(&uf.mul(&self.u.powi(-e)?))? {
            return Err(Error::InconsistencyFound(format!("P^Frob is not φ₁(p)·P with φ₁(p) = {e}")));
        }
        Ok(())
    }
}

/// log_E(P^+) and log_E(P^−) with P^± = P ± α·P^{Frob}.
#[derive(Clone, Debug, PartialEq)]
pub struct HeegnerLogs {
    pub plus: PadicElem,
    pub minus: PadicElem,
    pub log_p: PadicElem,
}

impl HeegnerLogs {
    /// "P+ = 2P", "P- = 2P", "both zero" or "generic".
    pub fn classification(&self) -> &'static str {
        let two_l = self.log_p.int_like(2) * self.log_p;
        match (self.plus == two_l, self.minus == two_l, self.plus.is_zero(), self.minus.is_zero()) {
            (_, _, true, true) => "both zero",
            (true, _, _, true) => "P+ = 2P",
            (_, true, true, _) => "P- = 2P",
            _ => "generic",
        }
    }
}

pub fn heegner_combine(curve: &TateCurve, pt: &HeegnerPointData, alpha: i64) -> Result<HeegnerLogs> {
    if alpha.abs() != 1 {
        return Err(Error::DomainError(format!("α = {alpha} is not ±1")));
    }
    let uf = pt.u_frob.as_ref().ok_or(Error::MissingFrobenius)?;
    let plus = curve.log_e(&pt.u.mul(&uf.powi(alpha)?))?;
    let minus = curve.log_e(&pt.u.mul(&uf.powi(-alpha)?))?;
    Ok(HeegnerLogs { plus, minus, log_p: curve.log_e(&pt.u)? })
}
