use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::hecke_characters::{Cyclo, CycloField, Root, RootEmbedding};
use crate::padic_core::{plog, teichmuller, CoeffRing, ExtElem, ExtRing, PadicElem};

/// A character of (Z_{p²}/p^n)^×, extended to Q_{p²}^× by η̃(p) = 1.
///
/// Z_{p²}^× = μ_{p²−1} × (1 + pZ_{p²}); on the first factor the character is
/// ζ ↦ ζ^a for the generator fixed by [`RootEmbedding`], on the second it is
/// v ↦ ζ_{p^{n−1}}^{b₁L₁ + b₂L₂} where L₁ + L₂δ = log(v)/p mod p^{n−1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalChar {
    p: u32,
    n: u32,
    a: u64,
    b: [u64; 2],
}

impl LocalChar {
    /// `a` is read mod p²−1 and `b` mod p^{n−1}.
    pub fn new(p: u32, n: u32, a: i64, b: [i64; 2]) -> Result<Self> {
        if p == 2 || !crate::quadfield::is_prime(p as u64) {
            return Err(Error::DomainError(format!("{p} is not an odd prime")));
        }
        let q1 = (p as i64) * (p as i64) - 1;
        let pn1 = if n == 0 { 1 } else { (p as i64).pow(n - 1) };
        Ok(LocalChar {
            p,
            n,
            a: if n == 0 { 0 } else { a.rem_euclid(q1) as u64 },
            b: [b[0].rem_euclid(pn1) as u64, b[1].rem_euclid(pn1) as u64],
        })
    }

    pub fn trivial(p: u32) -> Self {
        LocalChar { p, n: 0, a: 0, b: [0, 0] }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// The modulus exponent n the character was declared on.
    pub fn modulus_exponent(&self) -> u32 {
        self.n
    }

    pub fn tame_exponent(&self) -> u64 {
        self.a
    }

    pub fn wild_exponents(&self) -> [u64; 2] {
        self.b
    }

    /// The exact conductor exponent.
    pub fn level(&self) -> u32 {
        let p = self.p as u64;
        if self.b != [0, 0] {
            let v = self.b.iter().filter(|&&x| x != 0).map(|&x| vp_u64(x, p)).min().unwrap_or(0);
            return self.n - v;
        }
        u32::from(self.a != 0)
    }

    pub fn inv(&self) -> Self {
        let q1 = (self.p as u64).pow(2) - 1;
        let pn1 = if self.n == 0 { 1 } else { (self.p as u64).pow(self.n - 1) };
        LocalChar {
            p: self.p,
            n: self.n,
            a: (q1 - self.a) % q1,
            b: [(pn1 - self.b[0]) % pn1, (pn1 - self.b[1]) % pn1],
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.p != o.p || self.n != o.n {
            return Err(Error::DomainError("characters live on different moduli".into()));
        }
        LocalChar::new(
            self.p,
            self.n,
            (self.a + o.a) as i64,
            [(self.b[0] + o.b[0]) as i64, (self.b[1] + o.b[1]) as i64],
        )
    }

    /// η̃(−1) = (−1)^a.
    pub fn at_minus_one(&self) -> i64 {
        if self.a % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Whether η̃ is trivial on Z_p^× (equivalently on Q_p^×, as η̃(p) = 1).
    pub fn trivial_on_qp(&self, units: &UnitTable) -> Result<bool> {
        let pn = (self.p as i128).pow(self.n.max(1));
        for x in 1..pn {
            if x % self.p as i128 == 0 {
                continue;
            }
            if !self.value(units, x, 0)?.is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// η̃(x + yδ) for a unit residue mod p^n.
    pub fn value(&self, units: &UnitTable, x: i128, y: i128) -> Result<Root> {
        let (i, l) = units.decompose(x, y)?;
        let q1 = (self.p as u64).pow(2) - 1;
        let pn1 = units.pn1;
        let wild = (self.b[0] as i128 * l[0] + self.b[1] as i128 * l[1]).rem_euclid(pn1 as i128);
        Ok(Root::new(self.a as i128 * i as i128 * pn1 as i128 + wild * q1 as i128, q1 * pn1))
    }
}

fn vp_u64(mut x: u64, p: u64) -> u32 {
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Discrete logs on (Z_{p²}/p^n)^× in the coordinates of [`LocalChar`].
#[derive(Debug)]
pub struct UnitTable {
    p: u32,
    n: u32,
    pn1: u64,
    residue_log: HashMap<(i128, i128), u64>,
    emb: RootEmbedding,
}

impl UnitTable {
    pub fn new(p: u32, n: u32) -> Result<Self> {
        let emb = RootEmbedding::new(p, n.max(1) + 1)?;
        let q1 = (p as u64).pow(2) - 1;
        let z = emb.embed(&Root::new(1, q1))?.reduce(1);
        let mut residue_log = HashMap::new();
        let mut y = z.one_like();
        for e in 0..q1 {
            residue_log.insert((y.a(), y.b()), e);
            y = y * z;
        }
        let pn1 = if n == 0 { 1 } else { (p as u64).pow(n - 1) };
        Ok(UnitTable { p, n, pn1, residue_log, emb })
    }

    pub fn embedding(&self) -> &RootEmbedding {
        &self.emb
    }

    /// (i, L) with u = ζ^i · v and log(v)/p ≡ L₁ + L₂δ mod p^{n−1}.
    pub fn decompose(&self, x: i128, y: i128) -> Result<(u64, [i128; 2])> {
        let p = self.p as i128;
        let key = (x.rem_euclid(p), y.rem_euclid(p));
        let i = *self.residue_log.get(&key).ok_or(Error::NonUnit)?;
        if self.n <= 1 {
            return Ok((i, [0, 0]));
        }
        let u = PadicElem::new(self.p, self.n + 1, x, y);
        let v = u * teichmuller(&u)?.inv()?;
        let l = plog(&v)?.div_p_pow(1)?;
        let m = self.pn1 as i128;
        Ok((i, [l.a().rem_euclid(m), l.b().rem_euclid(m)]))
    }

    /// Unit residues x + yδ mod p^n.
    pub fn units(&self) -> impl Iterator<Item = (i128, i128)> + '_ {
        let pn = (self.p as i128).pow(self.n.max(1));
        let p = self.p as i128;
        (0..pn).flat_map(move |x| (0..pn).map(move |y| (x, y))).filter(move |(x, y)| x % p != 0 || y % p != 0)
    }
}

/// W(η̃) = G(η̃)/p^n with G(η̃) = Σ_u η̃(u) e(Tr(u)/p^n), held exactly in
/// Q(ζ_{(p²−1)p^n}).
#[derive(Clone, Debug)]
pub struct RootNumber {
    pub p: u32,
    pub n: u32,
    pub gauss: Cyclo,
    pub value: Cyclo,
}

impl RootNumber {
    pub fn field(&self) -> &Arc<CycloField> {
        self.value.field()
    }

    /// W⁻¹, which is W̄ because W·W̄ = 1 was checked on construction.
    pub fn inverse(&self) -> Cyclo {
        self.value.conj()
    }

    /// W as a rational number when it is one (e.g. ±1).
    pub fn to_rational(&self) -> Option<BigRational> {
        self.value.to_rational()
    }

    /// ι_p(G(η̃)) in Z_{p²}[ζ_{p^n}]; W is this image divided by p^n.
    pub fn padic_gauss(&self, emb: &RootEmbedding) -> Result<ExtElem> {
        let p = self.p;
        let prec = emb.prec();
        let q1 = (p as u64).pow(2) - 1;
        let pn = (p as u64).pow(self.n);
        let ring = ExtRing::cyclotomic(p, self.n, prec);
        // ζ_m^e = ζ_{p²−1}^{e·(p^n)⁻¹} · ζ_{p^n}^{e·(p²−1)⁻¹} by CRT
        let inv_pn = modinv(pn % q1, q1);
        let inv_q1 = modinv(q1 % pn, pn);
        let mut acc = ExtElem::from_base(&ring, PadicElem::zero(p, prec));
        let gen = ExtElem::generator(&ring, prec);
        let powers: Vec<ExtElem> =
            std::iter::successors(Some(gen.one_like()), |g| Some(g.mul_ref(&gen))).take(pn as usize).collect();
        for (e, c) in self.gauss.coeffs().iter().enumerate() {
            if num_traits::Zero::is_zero(c) {
                continue;
            }
            let e = e as u64;
            let tame = (e % q1) * inv_pn % q1;
            let wild = (e % pn) * inv_q1 % pn;
            let c = rational_to_padic(c, p, prec)?;
            let z = emb.embed(&Root::new(tame as i128, q1))?;
            acc = acc.add_ref(&powers[wild as usize].scale(&(c * z)));
        }
        Ok(acc)
    }
}

fn modinv(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    (1..m).find(|x| a * x % m == 1).expect("coprime moduli")
}

fn rational_to_padic(c: &BigRational, p: u32, prec: u32) -> Result<PadicElem> {
    let num: i128 = c.numer().try_into().map_err(|_| Error::PrecisionLoss("coefficient too large".into()))?;
    let den: i128 = c.denom().try_into().map_err(|_| Error::PrecisionLoss("coefficient too large".into()))?;
    PadicElem::from_ratio(p, prec, num, den)
}

/// The normalized Gauss sum of a character of exact level n ≥ 1.
pub fn root_number(chi: &LocalChar, units: &UnitTable) -> Result<RootNumber> {
    let n = chi.modulus_exponent();
    if n == 0 || chi.level() != n {
        return Err(Error::NotPrimitive(format!("character has level {} on modulus p^{n}", chi.level())));
    }
    if units.n != n || units.p != chi.p {
        return Err(Error::DomainError("unit table built for another modulus".into()));
    }
    let p = chi.p as u64;
    let q1 = p * p - 1;
    let pn = p.pow(n);
    let m = q1 * pn;
    let field = CycloField::new(m);
    let mut counts = vec![0i64; m as usize];
    for (x, y) in units.units() {
        let r = chi.value(units, x, y)?;
        let e_chi = r.exponent_in(m).expect("character values lie in μ_m");
        // Tr(x + yδ) = 2x
        let e_psi = (2 * x as u64 % pn) * q1;
        counts[((e_chi + e_psi) % m) as usize] += 1;
    }
    let gauss = Cyclo::from_zeta_counts(&field, &counts);
    let value = gauss.scale(&BigRational::new(BigInt::from(1), BigInt::from(pn)));
    if !value.mul(&value.conj()).is_one() {
        return Err(Error::InconsistencyFound(format!("|W| != 1 for {chi:?}")));
    }
    Ok(RootNumber { p: chi.p, n, gauss, value })
}

/// Every character of (Z_{p²}/p^n)^× of exact level n.
pub fn primitive_characters(p: u32, n: u32) -> Result<Vec<LocalChar>> {
    let q1 = (p as i64).pow(2) - 1;
    let pn1 = if n == 0 { 1 } else { (p as i64).pow(n - 1) };
    let mut out = Vec::new();
    for a in 0..q1 {
        for b0 in 0..pn1 {
            for b1 in 0..pn1 {
                let c = LocalChar::new(p, n, a, [b0, b1])?;
                if c.level() == n {
                    out.push(c);
                }
            }
        }
    }
    Ok(out)
}
