//! Theta series of ray class characters of K = Q(√−d) with p inert, and the
//! two families g_Col (over the Coleman disc Λ_Col) and g_Hida (over the
//! group algebra R_K of W_K = 1 + pZ_{p²}).

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hecke_characters::{build_lambda, Cyclo, CycloField, DirichletChar, HeckeChar, LambdaChar, Root, RootEmbedding};
use crate::iwasawa_series::{col_point, hida_generators, FiniteTwist, HidaCoords, Series, Shape, Weight};
use crate::lambda_hecke::{col_binomial, QExpansion};
use crate::padic_core::{binom_integral, ppow, CoeffRing, ExtElem, ExtRing, PadicElem};
use crate::quadfield::{Ideal, OkElem, QuadField};

/// Default q-cap.
pub const DEFAULT_Q: usize = 200;
/// Default degree cap of the Λ_Col variable.
pub const DEFAULT_COL_CAP: usize = 12;
/// Default box caps of the R_K variables.
pub const DEFAULT_HIDA_CAPS: [usize; 2] = [7, 7];

/// Everything the constructions share: η, λ, the fixed embedding of roots of
/// unity, and the p-adic precision.
#[derive(Clone, Debug)]
pub struct ThetaSetup {
    pub eta: HeckeChar,
    pub lambda: LambdaChar,
    /// λ at one extra digit, for the W_K coordinates.
    lambda_hi: LambdaChar,
    pub emb: RootEmbedding,
    pub prec: u32,
    /// p^a s(𝔞) ∈ Z_{p²} for all 𝔞.
    pub a: u32,
}

impl ThetaSetup {
    /// Validate the standing assumptions: p inert, p | 𝔠 (so U_p g = 0),
    /// p ∤ h_K, and η ≠ η^σ.
    pub fn new(eta: HeckeChar, prec: u32) -> Result<Self> {
        let g = eta.group().clone();
        let field = g.field().clone();
        let p = g.p() as u32;
        if g.r() == 0 {
            return Err(Error::validation("p | c", "the conductor must be divisible by p (U_p g = 0 case)"));
        }
        let lambda = build_lambda(&field, p, prec)?;
        let lambda_hi = build_lambda(&field, p, prec + 1)?;
        if eta.is_conj_invariant()? {
            return Err(Error::validation("eta != eta^sigma", "η is the restriction of a character of G_Q"));
        }
        let emb = RootEmbedding::new(p, prec)?;
        Ok(ThetaSetup { eta, lambda, lambda_hi, emb, prec, a: 0 })
    }

    pub fn p(&self) -> u32 {
        self.lambda.p()
    }

    pub fn field(&self) -> &Arc<QuadField> {
        self.lambda.field()
    }

    pub fn modulus(&self) -> &Ideal {
        self.eta.group().modulus()
    }

    /// N_g = d_K · N(𝔠).
    pub fn level(&self) -> u64 {
        self.field().d_k() * self.modulus().norm() as u64
    }

    /// N_g° = N_g / p^{2r}.
    pub fn tame_level(&self) -> u64 {
        self.level() / (ppow(self.p(), 2 * self.eta.group().r()) as u64)
    }

    /// χ_g = ε_K · η|_Q.
    pub fn chi_g(&self) -> Result<DirichletChar> {
        Ok(DirichletChar::kronecker(self.field().d_k()).mul(&DirichletChar::restriction_of(&self.eta)?))
    }

    /// The tame character χ_g·ω^{−1}.
    pub fn tame_character(&self) -> Result<DirichletChar> {
        Ok(self.chi_g()?.mul(&DirichletChar::teichmuller_power(self.p(), -1, &self.emb)?))
    }

    /// Λ-adic tag χ_g·ω, so that weight k carries nebentypus χ_g ω^{1−k}.
    pub fn lambda_tag(&self) -> Result<DirichletChar> {
        Ok(self.chi_g()?.mul(&DirichletChar::teichmuller_power(self.p(), 1, &self.emb)?))
    }

    /// Ideals prime to 𝔠 with norm ≤ q, sorted by (norm, HNF).
    pub fn ideals(&self, q: usize) -> Vec<Ideal> {
        self.field().enumerate_ideals(q as u64, self.modulus())
    }

    /// (c₁, c₂) with ⟨λ(𝔞)⟩ = u₁^{c₁} u₂^{c₂}, exact mod p^prec.
    pub fn hida_coordinates(&self, a: &Ideal, hc: &HidaCoords) -> Result<(PadicElem, PadicElem)> {
        let u = self.lambda_hi.unit_part(a)?;
        let (c1, c2) = hc.coordinates(&u)?;
        Ok((c1.reduce(self.prec), c2.reduce(self.prec)))
    }

    fn eta_at(&self, a: &Ideal) -> Result<PadicElem> {
        self.emb.embed(&self.eta.value(a)?)
    }
}

/// Sum per-ideal contributions into q-expansion coefficients (the map runs
/// on the rayon pool; the reduction is in the fixed ideal order).
fn assemble<R: CoeffRing>(
    ideals: &[Ideal],
    q: usize,
    zero: &R,
    term: impl Fn(&Ideal) -> Result<R> + Sync,
) -> Result<Vec<R>> {
    let terms: Vec<R> = ideals.par_iter().map(&term).collect::<Result<Vec<_>>>()?;
    let mut a = vec![zero.zero_like(); q + 1];
    for (id, t) in ideals.iter().zip(terms) {
        let n = id.norm() as usize;
        a[n] = a[n].add_ref(&t);
    }
    Ok(a)
}

/// g_k = Σ_{(𝔞,𝔠)=1} η_k(𝔞) q^{N𝔞} with η_k = η·⟨λ⟩^{k−1}.
pub fn theta_classical(setup: &ThetaSetup, k: i64, q: usize) -> Result<QExpansion<PadicElem>> {
    let ideals = setup.ideals(q);
    let zero = PadicElem::zero(setup.p(), setup.prec);
    let coeffs = assemble(&ideals, q, &zero, |a| {
        let e = setup.eta_at(a)?;
        if k == 1 {
            Ok(e)
        } else {
            Ok(e * setup.lambda.unit_part(a)?.powi(k - 1)?)
        }
    })?;
    QExpansion::new(coeffs, setup.level(), setup.lambda_tag()?, Some(k))
}

/// The weight-1 theta series Σ η(𝔞) q^{N𝔞} exactly, over Q(ζ_M) with M the
/// order of η. No prime p is involved.
pub fn theta_exact(eta: &HeckeChar, q: usize) -> Result<Vec<Cyclo>> {
    let k = eta.group().field().clone();
    let cf = CycloField::new(eta.order().max(1));
    let ideals = k.enumerate_ideals(q as u64, eta.group().modulus());
    let mut a = vec![Cyclo::zero(&cf); q + 1];
    for id in &ideals {
        let n = id.norm() as usize;
        a[n] = a[n].add(&Cyclo::from_root(&cf, &eta.value(id)?)?);
    }
    Ok(a)
}

/// Which construction a family comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    Col,
    Hida,
}

/// The q-expansion of a family, with coefficients in Λ_Col (variable X) or
/// in R_K (variables S₁, S₂).
#[derive(Clone, Debug)]
pub enum FamilyExpansion {
    Col(QExpansion<Series<ExtElem>>),
    Hida(QExpansion<Series<PadicElem>>),
}

#[derive(Clone, Debug)]
pub struct ThetaFamily {
    pub kind: FamilyKind,
    pub expansion: FamilyExpansion,
    pub setup: Arc<ThetaSetup>,
    pub q: usize,
    pub level: u64,
    pub tame_level: u64,
    pub tame_character: DirichletChar,
}

impl ThetaFamily {
    fn new(kind: FamilyKind, expansion: FamilyExpansion, setup: &Arc<ThetaSetup>, q: usize) -> Result<Self> {
        Ok(ThetaFamily {
            kind,
            expansion,
            setup: setup.clone(),
            q,
            level: setup.level(),
            tame_level: setup.tame_level(),
            tame_character: setup.tame_character()?,
        })
    }

    /// U_p of the family, as a list of coefficient-vanishing flags.
    pub fn u_p_vanishes(&self) -> Result<bool> {
        let p = self.setup.p() as u64;
        Ok(match &self.expansion {
            FamilyExpansion::Col(x) => x.u_p(p)?.is_zero(),
            FamilyExpansion::Hida(x) => x.u_p(p)?.is_zero(),
        })
    }
}

/// g_Col = Σ η(𝔞) ((1+T)/(1+p))^{s(𝔞)} q^{N𝔞} in the variable
/// X = (T − p)/(p^a γ), truncated at degree `d`.
pub fn build_g_col(setup: &Arc<ThetaSetup>, q: usize, d: usize) -> Result<ThetaFamily> {
    let p = setup.p();
    let ring = ExtRing::ramped(p, setup.prec);
    let shape = Shape::univariate("X", d);
    let one = PadicElem::one(p, setup.prec);
    let zero = Series::zero(&shape, &ExtElem::from_base(&ring, one.zero_like()));
    let ideals = setup.ideals(q);
    let coeffs = assemble(&ideals, q, &zero, |a| {
        let s = setup.lambda.s(a)?;
        let b = col_binomial(&shape, &s, setup.a, &one)?;
        Ok(b.scale(&setup.eta_at(a)?))
    })?;
    let x = QExpansion::new(coeffs, setup.level(), setup.lambda_tag()?, None)?;
    ThetaFamily::new(FamilyKind::Col, FamilyExpansion::Col(x), setup, q)
}

/// g_Hida = Σ η(𝔞)⟨λ(𝔞)⟩^{−1} [⟨λ(𝔞)⟩] q^{N𝔞} with [u₁^{c₁}u₂^{c₂}] =
/// (1+S₁)^{c₁}(1+S₂)^{c₂}, truncated to the box `caps`.
pub fn build_g_hida(setup: &Arc<ThetaSetup>, q: usize, caps: [usize; 2]) -> Result<ThetaFamily> {
    let p = setup.p();
    let shape = Shape::new(&["S1", "S2"], &caps);
    let zero = Series::zero(&shape, &PadicElem::zero(p, setup.prec));
    let hc = HidaCoords::new(p, setup.prec + 1)?;
    let ideals = setup.ideals(q);
    let coeffs = assemble(&ideals, q, &zero, |a| {
        let (c1, c2) = setup.hida_coordinates(a, &hc)?;
        let b1 = binom_integral(&c1, caps[0])?;
        let b2 = binom_integral(&c2, caps[1])?;
        let scalar = setup.eta_at(a)? * setup.lambda.unit_part(a)?.inv()?;
        let dense: Vec<PadicElem> = b1.iter().flat_map(|x| b2.iter().map(move |y| *x * *y * scalar)).collect();
        Ok(Series::from_dense(&shape, dense))
    })?;
    let x = QExpansion::new(coeffs, setup.level(), setup.lambda_tag()?, None)?;
    ThetaFamily::new(FamilyKind::Hida, FamilyExpansion::Hida(x), setup, q)
}

/// A specialization: over Z_{p²}, or over Z_{p²}[ζ_{p^m}] for twisted weights.
#[derive(Clone, Debug, PartialEq)]
pub enum Specialized {
    Base(QExpansion<PadicElem>),
    Twisted(QExpansion<ExtElem>),
}

impl Specialized {
    pub fn base(self) -> Result<QExpansion<PadicElem>> {
        match self {
            Specialized::Base(x) => Ok(x),
            Specialized::Twisted(_) => Err(Error::DomainError("twisted specialization".into())),
        }
    }

    pub fn twisted(self) -> Result<QExpansion<ExtElem>> {
        match self {
            Specialized::Twisted(x) => Ok(x),
            Specialized::Base(_) => Err(Error::DomainError("untwisted specialization".into())),
        }
    }
}

/// Apply a weight coefficient-wise. Fails with `PrecisionLoss` when the
/// truncation cannot certify the full working precision.
pub fn specialize_family(f: &ThetaFamily, w: &Weight) -> Result<Specialized> {
    let setup = &f.setup;
    let p = setup.p();
    let prec = setup.prec;
    match (&f.expansion, w) {
        (FamilyExpansion::Col(x), Weight::Arithmetic { k, eps: None }) => {
            let ring = ExtRing::ramped(p, prec);
            let pt = col_point(&ring, prec, setup.a, *k)?;
            let d = x.coeff(0).shape().caps[0];
            if let Some(v) = pt.ramped_valuation() {
                let certified = ((d as u64 + 1) * v as u64) / (p as u64 - 1);
                if certified < prec as u64 {
                    return Err(Error::PrecisionLoss(format!("degree cap {d} certifies {certified} digits at k = {k}")));
                }
            }
            Ok(Specialized::Base(x.specialize(Some(*k), |s| s.evaluate(std::slice::from_ref(&pt)).to_base())?))
        }
        (FamilyExpansion::Col(_), _) => Err(Error::Unsupported("g_Col only specializes at untwisted arithmetic weights".into())),
        (FamilyExpansion::Hida(x), Weight::Arithmetic { k, eps: None }) | (FamilyExpansion::Hida(x), Weight::GroupAlgebra { k, twist: None }) => {
            let caps = x.coeff(0).shape().caps.clone();
            let us = hida_generators(p, prec);
            let pts: Vec<PadicElem> = us.iter().map(|u| Ok(u.powi(*k)? - u.one_like())).collect::<Result<_>>()?;
            for (c, t) in caps.iter().zip(&pts) {
                let v = if t.is_zero() { u32::MAX } else { t.valuation() };
                if (v as u64) * (*c as u64 + 1) < prec as u64 {
                    return Err(Error::PrecisionLoss(format!("box cap {c} certifies too few digits at k = {k}")));
                }
            }
            Ok(Specialized::Base(x.specialize(Some(*k), |s| Ok(s.evaluate(&pts)))?))
        }
        (FamilyExpansion::Hida(x), Weight::GroupAlgebra { k, twist: Some((var, tw)) }) => {
            let ring = ExtRing::cyclotomic(p, tw.m, prec);
            let caps = x.coeff(0).shape().caps.clone();
            let us = hida_generators(p, prec);
            let zeta = ExtElem::generator(&ring, prec).pow_u64(tw.j);
            let mut pts = Vec::new();
            for (i, u) in us.iter().enumerate() {
                let uk = ExtElem::from_base(&ring, u.powi(*k)?);
                let v = if i == *var { zeta.mul_ref(&uk) } else { uk };
                pts.push(v.sub_ref(&v.one_like()));
            }
            // ζ^j − 1 has valuation 1/φ(p^m) when p ∤ j
            let e = (p as u64 - 1) * (p as u64).pow(tw.m - 1);
            let cert = (caps[*var] as u64 + 1) / e;
            if cert < prec as u64 && tw.j % p as u64 != 0 {
                return Err(Error::PrecisionLoss(format!("cap {} certifies {cert} digits for a twisted weight", caps[*var])));
            }
            Ok(Specialized::Twisted(x.specialize(Some(*k), |s| {
                Ok(s.map_coeffs(|c| ExtElem::from_base(&ring, *c)).evaluate(&pts))
            })?))
        }
        (FamilyExpansion::Hida(_), _) => Err(Error::Unsupported("weight type not defined on R_K".into())),
    }
}

/// Conductor data of η·ε_w for a twisted weight w: the p-exponent f of the
/// conductor, the level d_K·N(𝔠₀)·p^{2f} of the specialization, the change
/// e(w, η) = 2(f − r) of the p-order of the level, and the central
/// character of ε_w.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistData {
    pub conductor_exponent: u32,
    pub level: u64,
    pub level_bump: i64,
    pub nebentypus_shift: DirichletChar,
}

/// ε_w(𝔞) = ζ_{p^m}^{j·c_var(⟨λ(𝔞)⟩)}.
fn twist_root(setup: &ThetaSetup, hc: &HidaCoords, a: &Ideal, var: usize, tw: &FiniteTwist) -> Result<Root> {
    let (c1, c2) = setup.hida_coordinates(a, hc)?;
    let c = if var == 0 { c1 } else { c2 };
    let pm = ppow(setup.p(), tw.m);
    Ok(Root::new(c.a().rem_euclid(pm) * tw.j as i128, pm as u64))
}

/// Compute e(w, η) from the conductor of η·ε_w, by testing triviality on
/// (α) for α ≡ 1 mod 𝔠₀p^{f} over representatives modulo 𝔠₀p^R.
pub fn twist_conductor(setup: &ThetaSetup, var: usize, tw: &FiniteTwist) -> Result<TwistData> {
    let g = setup.eta.group();
    let k = setup.field().as_ref();
    let p = setup.p() as i128;
    let r = g.r();
    let hc = HidaCoords::new(setup.p(), setup.prec + 1)?;
    let big_r = r.max(tw.m + 1);
    let modulus = g.modulus();
    let n_mod = modulus.norm() as u64;
    let c0n = (n_mod / (ppow(setup.p(), 2 * r) as u64)) as i128;
    let c0_int = {
        // the least positive integer in 𝔠₀ divides N(𝔠₀)
        let c0 = k.ideal_add(modulus, &k.principal(&OkElem::int(c0n)));
        c0.basis()[0].u
    };
    let value = |alpha: &OkElem| -> Result<Root> {
        let a = k.principal(alpha);
        Ok(setup.eta.value(&a)?.mul(&twist_root(setup, &hc, &a, var, tw)?))
    };
    let mut f = big_r;
    for rp in 0..big_r {
        let span = ppow(setup.p(), big_r - rp);
        let step = ppow(setup.p(), rp) * c0_int;
        let mut trivial = true;
        'outer: for x in 0..span {
            for y in 0..span {
                let alpha = OkElem::new(1 + step * x, step * y);
                if k.norm(&alpha) % p == 0 {
                    continue;
                }
                if !value(&alpha)?.is_one() {
                    trivial = false;
                    break 'outer;
                }
            }
        }
        if trivial {
            f = rp;
            break;
        }
    }
    let pm1 = ppow(setup.p(), tw.m + 1) as u64;
    let shift = DirichletChar::from_fn(pm1, |n| {
        let a = k.principal(&OkElem::int(n as i128));
        twist_root(setup, &hc, &a, var, tw).unwrap_or(Root::one())
    });
    let tame = setup.field().d_k() * c0n as u64;
    Ok(TwistData {
        conductor_exponent: f,
        level: tame * ppow(setup.p(), 2 * f) as u64,
        level_bump: 2 * (f as i64 - r as i64),
        nebentypus_shift: shift,
    })
}

/// The twisted theta series Σ η_k(𝔞) ε_w(𝔞) q^{N𝔞}, computed directly.
pub fn theta_twisted(setup: &ThetaSetup, k: i64, var: usize, tw: &FiniteTwist, q: usize) -> Result<QExpansion<ExtElem>> {
    let ring = ExtRing::cyclotomic(setup.p(), tw.m, setup.prec);
    let zeta = ExtElem::generator(&ring, setup.prec);
    let hc = HidaCoords::new(setup.p(), setup.prec + 1)?;
    let ideals = setup.ideals(q);
    let zero = ExtElem::from_base(&ring, PadicElem::zero(setup.p(), setup.prec));
    let pm = ppow(setup.p(), tw.m) as u64;
    let coeffs = assemble(&ideals, q, &zero, |a| {
        let base = setup.eta_at(a)? * setup.lambda.unit_part(a)?.powi(k - 1)?;
        let e = twist_root(setup, &hc, a, var, tw)?.exponent_in(pm).expect("order divides p^m");
        Ok(zeta.pow_u64(e).scale(&base))
    })?;
    QExpansion::new(coeffs, setup.level(), setup.lambda_tag()?, Some(k))
}

#[cfg(test)]
mod tests;
