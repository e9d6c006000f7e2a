//! Ray class characters η, the p-adic avatar λ with ⟨λ⟩ and s(𝔞), the
//! characters η_k, and the φ/ψ decomposition attached to a pair (η₁, η₂).

use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic_core::{pexp, plog, teichmuller, unit_part, PadicElem};
use crate::quadfield::{Ideal, IdealRep, OkElem, QuadField, RayClassGroup};

mod cyclo;
mod dirichlet;

pub use cyclo::{cyclotomic_poly, Cyclo, CycloField};
pub use dirichlet::DirichletChar;

/// A root of unity e^{2πi·num/den}, stored as a reduced fraction in Q/Z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Root {
    pub num: u64,
    pub den: u64,
}

impl Root {
    pub fn one() -> Self {
        Root { num: 0, den: 1 }
    }

    pub fn new(num: i128, den: u64) -> Self {
        let n = num.rem_euclid(den as i128) as u64;
        let g = n.gcd(&den);
        Root { num: n / g, den: den / g }
    }

    pub fn mul(&self, o: &Root) -> Root {
        let l = self.den.lcm(&o.den);
        Root::new((self.num * (l / self.den) + o.num * (l / o.den)) as i128, l)
    }

    pub fn pow(&self, e: i64) -> Root {
        Root::new(self.num as i128 * e as i128, self.den)
    }

    pub fn inv(&self) -> Root {
        self.pow(-1)
    }

    pub fn is_one(&self) -> bool {
        self.num == 0
    }

    pub fn order(&self) -> u64 {
        self.den
    }

    /// Exponent of this root as a power of ζ_m (requires den | m).
    pub fn exponent_in(&self, m: u64) -> Option<u64> {
        (m % self.den == 0).then(|| self.num * (m / self.den))
    }
}

/// The fixed embedding μ_{p²−1} → Z_{p²}: ζ_{p²−1} ↦ ω(g) for the first
/// generator g = a + bδ of F_{p²}^× in the order (b, a).
#[derive(Clone, Debug)]
pub struct RootEmbedding {
    p: u32,
    prec: u32,
    zeta: PadicElem,
}

impl RootEmbedding {
    pub fn new(p: u32, prec: u32) -> Result<Self> {
        let q1 = (p as u64) * (p as u64) - 1;
        let primes = crate::quadfield::prime_factors(q1);
        for b in 1..p as i128 {
            for a in 0..p as i128 {
                let g = PadicElem::new(p, 1, a, b);
                if primes.iter().all(|&l| g.pow(q1 / l) != g.one_like()) {
                    let zeta = teichmuller(&PadicElem::new(p, prec, a, b))?;
                    return Ok(RootEmbedding { p, prec, zeta });
                }
            }
        }
        unreachable!("F_(p^2)^× is cyclic")
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// ι_p of a root of unity; `Unsupported` if its order does not divide p²−1.
    pub fn embed(&self, r: &Root) -> Result<PadicElem> {
        let q1 = (self.p as u64) * (self.p as u64) - 1;
        let e = r
            .exponent_in(q1)
            .ok_or_else(|| Error::Unsupported(format!("root of unity of order {} is not in Z_(p^2)", r.den)))?;
        Ok(self.zeta.pow(e))
    }

    /// The root ζ with ι_p(ζ) ≡ x mod p, for a unit x.
    pub fn residue_log(&self, x: &PadicElem) -> Result<Root> {
        if !x.is_unit() {
            return Err(Error::NonUnit);
        }
        let q1 = (self.p as u64) * (self.p as u64) - 1;
        let target = x.reduce(1);
        let z = self.zeta.reduce(1);
        let mut y = z.one_like();
        for e in 0..q1 {
            if y == target {
                return Ok(Root::new(e as i128, q1));
            }
            y = y * z;
        }
        unreachable!("ζ generates F_(p^2)^×")
    }
}

/// A character of a ray class group, given by exponents x_i of ζ_M
/// (M the group exponent) on the Smith generators.
#[derive(Clone, Debug)]
pub struct HeckeChar {
    group: Arc<RayClassGroup>,
    exps: Vec<u64>,
    m: u64,
}

impl PartialEq for HeckeChar {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.group, &o.group) && self.exps == o.exps
    }
}

impl HeckeChar {
    pub fn new(group: &Arc<RayClassGroup>, exps: Vec<u64>) -> Result<Self> {
        let inv = group.invariants();
        let m = group.group().exponent();
        if exps.len() != inv.len() {
            return Err(Error::validation(
                "character",
                format!("{} generator images for {} generators", exps.len(), inv.len()),
            ));
        }
        for (x, d) in exps.iter().zip(inv) {
            if (x * d) % m != 0 {
                return Err(Error::validation("character", format!("image ζ^{x} has order not dividing {d}")));
            }
        }
        Ok(HeckeChar { group: group.clone(), exps: exps.iter().map(|x| x % m).collect(), m })
    }

    pub fn trivial(group: &Arc<RayClassGroup>) -> Self {
        let n = group.invariants().len();
        HeckeChar { group: group.clone(), exps: vec![0; n], m: group.group().exponent() }
    }

    pub fn group(&self) -> &Arc<RayClassGroup> {
        &self.group
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }

    /// Value on a class given by its exponent vector.
    pub fn on_class(&self, c: &[u64]) -> Root {
        let s: u128 = c.iter().zip(&self.exps).map(|(a, b)| *a as u128 * *b as u128).sum();
        Root::new((s % self.m as u128) as i128, self.m)
    }

    pub fn value(&self, a: &Ideal) -> Result<Root> {
        Ok(self.on_class(&self.group.class_of(a)?))
    }

    pub fn order(&self) -> u64 {
        let g = self.exps.iter().fold(self.m, |g, x| g.gcd(x));
        self.m / g
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&x| x == 0)
    }

    fn same_group(&self, o: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.group, &o.group) {
            Ok(())
        } else {
            Err(Error::Unsupported("characters live on different ray class groups".into()))
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.same_group(o)?;
        let exps = self.exps.iter().zip(&o.exps).map(|(a, b)| (a + b) % self.m).collect();
        Ok(HeckeChar { group: self.group.clone(), exps, m: self.m })
    }

    pub fn pow(&self, e: i64) -> Self {
        let m = self.m as i128;
        let exps = self.exps.iter().map(|&x| (x as i128 * e as i128).rem_euclid(m) as u64).collect();
        HeckeChar { group: self.group.clone(), exps, m: self.m }
    }

    /// η^σ(𝔞) = η(𝔞̄).
    pub fn conj(&self) -> Result<Self> {
        let n = self.exps.len();
        let mut exps = Vec::with_capacity(n);
        for i in 0..n {
            let mut e = vec![0u64; n];
            e[i] = 1;
            let r = self.on_class(&self.group.conj_class(&e)?);
            exps.push(r.exponent_in(self.m).unwrap());
        }
        Ok(HeckeChar { group: self.group.clone(), exps, m: self.m })
    }

    /// True when η = η^σ, i.e. η might come from a character of G_Q.
    pub fn is_conj_invariant(&self) -> Result<bool> {
        Ok(self.conj()? == *self)
    }

    /// η((n)) for a rational integer n prime to the modulus.
    pub fn central_value(&self, n: i64) -> Result<Root> {
        let k = self.group.field();
        self.value(&k.principal(&OkElem::int(n as i128)))
    }

    /// The conductor, found prime by prime as the smallest 𝔭-exponent for
    /// which η kills every (α) with α ≡ 1 modulo the reduced modulus.
    pub fn conductor(&self) -> Result<Ideal> {
        let k = self.group.field().as_ref();
        let modulus = *self.group.modulus();
        let parts = k.factor(&modulus);
        let residues = unit_residues(k, &modulus);
        let mut cond = Ideal::unit();
        for (idx, (pr, e)) in parts.iter().enumerate() {
            let others = parts
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != idx)
                .fold(Ideal::unit(), |acc, (_, (q, f))| k.ideal_mul(&acc, &k.ideal_pow(q, *f)));
            let mut fmin = *e;
            for f in 0..*e {
                let sub = k.ideal_mul(&others, &k.ideal_pow(pr, f));
                let trivial = residues.iter().filter(|x| sub.contains(&OkElem::new(x.u - 1, x.v))).try_fold(
                    true,
                    |ok, x| -> Result<bool> { Ok(ok && self.value(&k.principal(x))?.is_one()) },
                )?;
                if trivial {
                    fmin = f;
                    break;
                }
            }
            cond = k.ideal_mul(&cond, &k.ideal_pow(pr, fmin));
        }
        Ok(cond)
    }

    /// The primitive-at-the-modulus test.
    pub fn is_primitive(&self) -> Result<bool> {
        Ok(self.conductor()? == *self.group.modulus())
    }

    pub fn to_spec(&self, c0: &Ideal) -> CharSpec {
        CharSpec {
            d_k: self.group.field().d_k(),
            c0: c0.rep(),
            r: self.group.r(),
            generator_images: self.exps.clone(),
        }
    }
}

/// Residues of (O_K/𝔪)^× as canonical representatives.
fn unit_residues(k: &QuadField, m: &Ideal) -> Vec<OkElem> {
    let [a, _] = m.basis();
    let mut out = Vec::new();
    for u in 0..a.u {
        for v in 0..m.content() {
            let x = OkElem::new(u, v);
            if (u, v) != (0, 0) && k.coprime(&k.principal(&x), m) {
                out.push(x);
            }
        }
    }
    out
}

/// On-disk character description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharSpec {
    #[serde(rename = "d_K")]
    pub d_k: u64,
    pub c0: IdealRep,
    pub r: u32,
    pub generator_images: Vec<u64>,
}

impl CharSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let msg = inner.to_string();
            // a missing field is reported at the parent; name the field itself
            let missing = msg.strip_prefix("missing field `").and_then(|m| m.split('`').next());
            let loc = match (missing, path.as_str()) {
                (Some(f), ".") => f.to_string(),
                (Some(f), p) => format!("{p}.{f}"),
                (None, ".") => format!("line {} column {}", inner.line(), inner.column()),
                (None, p) => p.to_string(),
            };
            Error::parse(loc, msg)
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    /// Build field, ray class group Cl_K(𝔠₀p^r) and the character.
    pub fn build(&self, p: u64) -> Result<HeckeChar> {
        let field = Arc::new(QuadField::new(self.d_k)?);
        let c0 = Ideal::from_rep(&self.c0);
        if field.lattice(&c0.basis()) != Some(c0) || c0.rep() != self.c0 {
            return Err(Error::parse("c0", "not a valid ideal triple"));
        }
        let g = Arc::new(RayClassGroup::new(&field, &c0, p, self.r)?);
        HeckeChar::new(&g, self.generator_images.clone())
    }
}

/// The p-adic avatar λ (with the torsion of its values projected away):
/// ⟨λ(𝔞)⟩ = ⟨α⟩^{1/h} for 𝔞^h = (α).
#[derive(Clone, Debug)]
pub struct LambdaChar {
    field: Arc<QuadField>,
    p: u32,
    prec: u32,
    /// √−d_K = c·δ in Z_{p²}.
    c: PadicElem,
    log_1p: PadicElem,
}

/// Construct λ for p inert in K with p ∤ h_K.
pub fn build_lambda(field: &Arc<QuadField>, p: u32, prec: u32) -> Result<LambdaChar> {
    if field.kronecker(p as u64) != -1 {
        return Err(Error::validation("p inert", format!("{p} is not inert in Q(√−{})", field.d_k())));
    }
    if field.class_number() as u64 % p as u64 == 0 {
        return Err(Error::Unsupported(format!("p = {p} divides the class number")));
    }
    let w = prec + 1;
    let d = field.d_k() as i128;
    let nr = crate::padic_core::nonresidue(p) as i128;
    let t = PadicElem::from_int(p, w, -d).div(&PadicElem::from_int(p, w, nr))?;
    let c = zp_sqrt(&t)?;
    let log_1p = plog(&PadicElem::from_int(p, w, 1 + p as i128))?;
    Ok(LambdaChar { field: field.clone(), p, prec, c, log_1p })
}

/// The square root of a unit square t ∈ Z_p whose reduction mod p is the
/// smallest positive root.
fn zp_sqrt(t: &PadicElem) -> Result<PadicElem> {
    let p = t.p() as i128;
    let t0 = t.a().rem_euclid(p);
    let r0 = (1..p).find(|x| (x * x - t0).rem_euclid(p) == 0).ok_or(Error::NonUnit)?;
    let r0 = r0.min(p - r0);
    let mut x = t.int_like(r0);
    let half = t.int_like(2).inv()?;
    for _ in 0..64 {
        let nx = (x + *t * x.inv()?) * half;
        if nx == x {
            break;
        }
        x = nx;
    }
    Ok(x)
}

impl LambdaChar {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn field(&self) -> &Arc<QuadField> {
        &self.field
    }

    /// ι_p : O_K → Z_{p²}, ω ↦ (1 + cδ)/2.
    pub fn embed(&self, x: &OkElem) -> PadicElem {
        self.embed_at(x, self.prec)
    }

    fn embed_at(&self, x: &OkElem, n: u32) -> PadicElem {
        let p = self.p;
        let half = PadicElem::from_int(p, n, 2).inv().expect("p odd");
        let w = (PadicElem::one(p, n) + self.c.reduce(n) * PadicElem::delta(p, n)) * half;
        PadicElem::from_int(p, n, x.u) + PadicElem::from_int(p, n, x.v) * w
    }

    fn check(&self, a: &Ideal) -> Result<()> {
        if a.norm() % self.p as i128 == 0 {
            Err(Error::NotCoprime)
        } else {
            Ok(())
        }
    }

    fn unit_part_at(&self, a: &Ideal, n: u32) -> Result<PadicElem> {
        self.check(a)?;
        let k = self.field.as_ref();
        let h = k.class_number() as u32;
        let alpha = k.generator(&k.ideal_pow(a, h)).expect("𝔞^h is principal");
        let u = unit_part(&self.embed_at(&alpha, n))?;
        if h == 1 {
            return Ok(u);
        }
        let inv_h = PadicElem::from_int(self.p, n, h as i128).inv()?;
        pexp(&(plog(&u)? * inv_h))
    }

    /// ⟨λ(𝔞)⟩ ∈ 1 + pZ_{p²}.
    pub fn unit_part(&self, a: &Ideal) -> Result<PadicElem> {
        self.unit_part_at(a, self.prec)
    }

    /// s(𝔞) = log_p⟨λ(𝔞)⟩ / log_p(1+p) ∈ Z_{p²}.
    pub fn s(&self, a: &Ideal) -> Result<PadicElem> {
        let l = plog(&self.unit_part_at(a, self.prec + 1)?)?;
        Ok(l.div(&self.log_1p)?.reduce(self.prec))
    }

    /// λ((α)) for α ≡ 1 mod p.
    pub fn on_principal(&self, alpha: &OkElem) -> Result<PadicElem> {
        let x = self.embed(alpha);
        if !(x - x.one_like()).is_zero() && (x - x.one_like()).valuation() == 0 {
            return Err(Error::DomainError("α must be ≡ 1 mod p".into()));
        }
        self.unit_part(&self.field.principal(alpha))
    }
}

/// η_k(𝔞) = η(𝔞)·⟨λ(𝔞)⟩^{k−1}.
pub fn eta_k(eta: &HeckeChar, lambda: &LambdaChar, emb: &RootEmbedding, k: i64, a: &Ideal) -> Result<PadicElem> {
    let e = emb.embed(&eta.value(a)?)?;
    if k == 1 {
        return Ok(e);
    }
    Ok(e * lambda.unit_part(a)?.powi(k - 1)?)
}

/// The characters φ = η₁η₂, ψ = η₁η₂^σ and their restrictions to the
/// prime-to-p part Δ and to the p-part under the fixed splitting.
#[derive(Clone, Debug)]
pub struct PhiPsi {
    pub phi: HeckeChar,
    pub psi: HeckeChar,
    pub phi_t: HeckeChar,
    pub phi_minus: HeckeChar,
    pub psi_t: HeckeChar,
    pub psi_minus: HeckeChar,
    pub phi_prime_to_p: bool,
    pub psi_minus_nontrivial: bool,
    pub phi_quadratic: bool,
    pub psi_trivial: bool,
}

impl PhiPsi {
    /// The standing assumption: φ has conductor prime to p and ψ is nontrivial.
    pub fn assumption_holds(&self) -> bool {
        self.phi_prime_to_p && !self.psi_trivial
    }
}

/// Restriction of a character to one primary component, extended by zero.
fn primary_part(x: &HeckeChar, p: u64, prime_to_p: bool) -> HeckeChar {
    let m = x.m as i128;
    let exps = x
        .exps
        .iter()
        .zip(x.group.invariants())
        .map(|(&e, &d)| {
            let mut q = 1u64;
            while (d / q) % p == 0 {
                q *= p;
            }
            let mm = d / q;
            // idempotent e ≡ 1 mod mm, ≡ 0 mod q (or the reverse)
            let (one, zero) = if prime_to_p { (mm, q) } else { (q, mm) };
            let idem = crt_idempotent(one, zero);
            (e as i128 * idem as i128).rem_euclid(m) as u64
        })
        .collect();
    HeckeChar { group: x.group.clone(), exps, m: x.m }
}

fn crt_idempotent(one: u64, zero: u64) -> u64 {
    if one == 1 {
        return 0;
    }
    if zero == 1 {
        return 1;
    }
    let n = one * zero;
    (0..n).step_by(zero as usize).find(|x| x % one == 1).unwrap()
}

pub fn phi_psi_split(eta1: &HeckeChar, eta2: &HeckeChar) -> Result<PhiPsi> {
    eta1.same_group(eta2)?;
    let g = eta1.group();
    let nm = g.modulus().norm();
    for n in 2..(2 * nm as i64 + 20) {
        if n.gcd(&(nm as i64)) != 1 {
            continue;
        }
        if !eta1.central_value(n)?.mul(&eta2.central_value(n)?).is_one() {
            return Err(Error::NotSelfDual(format!("η₁η₂((n)) ≠ 1 at n = {n}")));
        }
    }
    let p = g.p();
    let phi = eta1.mul(eta2)?;
    let psi = eta1.mul(&eta2.conj()?)?;
    let k = g.field();
    let phi_cond = phi.conductor()?;
    let phi_prime_to_p = k.coprime(&phi_cond, &k.principal(&OkElem::int(p as i128)));
    let psi_minus = primary_part(&psi, p, false);
    Ok(PhiPsi {
        phi_t: primary_part(&phi, p, true),
        phi_minus: primary_part(&phi, p, false),
        psi_t: primary_part(&psi, p, true),
        psi_minus_nontrivial: !psi_minus.is_trivial(),
        psi_minus,
        phi_prime_to_p,
        phi_quadratic: phi.pow(2).is_trivial(),
        psi_trivial: psi.is_trivial(),
        phi,
        psi,
    })
}
