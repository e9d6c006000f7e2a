//! A controlled triple-product configuration on the line (k, 1, 1).
//!
//! The ordinary part is spanned by Λ-adic Eisenstein-type eigenlines
//! E(χ, χ̄), a_n = Σ_{d | n, p ∤ d} χ(n/d) χ̄(d) d^{−1} ⟨d⟩_Λ, for three
//! characters χ mod 7 (U_p-eigenvalue χ(p)). The kernel is
//!
//!   Ξ = Σ c_i(T) E_i + (g × h|_Θ)^{[p]},
//!
//! where g, h are the weight-one theta series of η and η^{−1} for the default
//! instance and ^{[p]} is p-depletion, so that the last summand is killed by
//! U_p and e^ord must remove it. The coefficient on the target line is
//! A·(1 − a_p^{−2}(1+T)/(1+p)²), which at k = 2 is A times the p-new
//! multiplier 1 − a_p^{−2}.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hecke_characters::{DirichletChar, HeckeChar, Root, RootEmbedding};
use crate::iwasawa_series::{lambda_point, Series, Shape};
use crate::lambda_hecke::{multiplicative_expansion, DiamondAction, LambdaDiamond, QExpansion};
use crate::padic_core::{unit_part, CoeffRing, PadicElem};
use crate::quadfield::{Ideal, QuadField, RayClassGroup};
use crate::theta_families::{theta_classical, ThetaSetup};

use super::{
    build_xi, case_constant, choose_t, eigen_coordinate, eigen_project, gamma0_index, lift_constant, xi_classical,
    EigenData, EigenTag, OrdinaryBasis, PCase, TwistChar, TwistSide,
};

/// The exponents j with χ_j(3^e) = ζ_6^{je} used for the three lines.
pub const LINE_CHARACTERS: [u64; 3] = [0, 3, 2];
/// Auxiliary modulus of the eigenline characters.
pub const AUX_MODULUS: u64 = 7;
/// Tame level of the target.
pub const N_F: u64 = 7;

/// χ_j mod 7 (3 is a primitive root).
pub fn aux_character(j: u64) -> DirichletChar {
    DirichletChar::from_fn(AUX_MODULUS, |n| {
        let e = (0..6).find(|&e| crate::padic_core::powmod_u64(3, e, AUX_MODULUS) == n % AUX_MODULUS).unwrap();
        Root::new((j * e) as i128, 6)
    })
}

#[derive(Clone, Debug)]
pub struct SyntheticTriple {
    pub p: u32,
    pub prec: u32,
    pub q: usize,
    pub shape: Arc<Shape>,
    pub twist: TwistChar,
    pub emb: RootEmbedding,
    pub g1: QExpansion<PadicElem>,
    pub h1: QExpansion<PadicElem>,
    pub characters: Vec<DirichletChar>,
    pub lines: Vec<QExpansion<Series<PadicElem>>>,
    pub tags: Vec<EigenTag<Series<PadicElem>>>,
    pub nilpotent: QExpansion<Series<PadicElem>>,
    pub coefficients: Vec<Series<PadicElem>>,
    pub target: usize,
    pub eta_f: PadicElem,
    /// M = c² d_K N_f.
    pub m_level: u64,
}

impl SyntheticTriple {
    /// p = 5, K = Q(√−7), 𝔠 = 5O_K, Λ-cap `cap`, q-cap `q`; `target` picks the
    /// eigenline (0: a_p = 1, 1: a_p = −1, 2: a_p = ζ₃²).
    pub fn new(prec: u32, q: usize, cap: usize, target: usize) -> Result<Self> {
        let p = 5u32;
        let field = Arc::new(QuadField::new(7)?);
        let group = Arc::new(RayClassGroup::new(&field, &Ideal::unit(), p as u64, 1)?);
        let eta = HeckeChar::new(&group, vec![1])?;
        let sg = ThetaSetup::new(eta.clone(), prec)?;
        let sh = ThetaSetup::new(eta.pow(-1), prec)?;
        let g1 = theta_classical(&sg, 1, q)?;
        let h1 = theta_classical(&sh, 1, q)?;
        let shape = Shape::univariate("T", cap);
        let twist = TwistChar::new(&shape, p, prec, 0, [TwistSide::Variable(0), TwistSide::Fixed(1), TwistSide::Fixed(1)])?;
        let emb = RootEmbedding::new(p, prec)?;
        let diamond = LambdaDiamond { shape: shape.clone(), prec, p };
        let characters: Vec<DirichletChar> = LINE_CHARACTERS.iter().map(|&j| aux_character(j)).collect();
        let one = Series::constant(&shape, PadicElem::one(p, prec));
        let mut lines = Vec::new();
        let mut tags = Vec::new();
        for chi in &characters {
            let a_prime = |l: u64| -> Result<Series<PadicElem>> { lambda_eigenvalue(chi, l, p, prec, &diamond, &emb) };
            let eps = |l: u64| -> Result<Series<PadicElem>> {
                if l == p as u64 || l == AUX_MODULUS {
                    return Ok(one.zero_like());
                }
                let linv = PadicElem::from_int(p, prec, l as i128).inv()?;
                Ok(diamond.diamond(l)?.scale(&linv))
            };
            let coeffs = multiplicative_expansion(q, &one, a_prime, eps)?;
            let tame = DirichletChar::trivial(AUX_MODULUS * p as u64);
            lines.push(QExpansion::new(coeffs, AUX_MODULUS * p as u64, tame, None)?);
            let mut a_l = BTreeMap::new();
            for l in [2u64, 3, 11, 13] {
                a_l.insert(l, a_prime(l)?);
            }
            tags.push(EigenTag { a_l, a_p: a_prime(p as u64)? });
        }
        let gl = lift_constant(&g1, &shape)?;
        let hl = lift_constant(&h1, &shape)?;
        let nilpotent = build_xi(&gl, &hl, &twist)?.p_deplete(p as u64);
        let ap = tags[target].a_p.clone();
        let coefficients = (0..lines.len())
            .map(|i| {
                if i == target {
                    controlled_multiplier(&shape, &ap, prec).map(|m| m.scale(&PadicElem::from_int(p, prec, 3)))
                } else {
                    Ok(one.scale(&PadicElem::from_int(p, prec, 2 + i as i128)))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let m_level = 25 * field.d_k() * N_F;
        Ok(SyntheticTriple {
            p,
            prec,
            q,
            shape,
            twist,
            emb,
            g1,
            h1,
            characters,
            lines,
            tags,
            nilpotent,
            coefficients,
            target,
            eta_f: PadicElem::from_int(p, prec, 3),
            m_level,
        })
    }

    /// The Λ-adic ordinary basis: the three eigenlines and the depleted kernel.
    pub fn lambda_basis(&self) -> Result<OrdinaryBasis<Series<PadicElem>>> {
        let mut lines = self.lines.clone();
        lines.push(self.nilpotent.clone());
        let mut tags: Vec<_> = self.tags.iter().cloned().map(Some).collect();
        tags.push(None);
        OrdinaryBasis::new(lines, tags, self.p as u64)
    }

    pub fn lambda_target(&self) -> EigenData<Series<PadicElem>> {
        self.target_with(self.tags[self.target].clone())
    }

    fn target_with<R: CoeffRing>(&self, tag: EigenTag<R>) -> EigenData<R> {
        EigenData {
            label: format!("E(chi_{})", LINE_CHARACTERS[self.target]),
            tame_level: N_F,
            case: PCase::New { s: 1 },
            weight: 2,
            tag,
            lambda_n: PadicElem::one(self.p, self.prec),
            eta_f: self.eta_f,
            ordinary: true,
            trivial_character: self.target == 0,
            lambda_e: None,
        }
    }

    /// Ξ over Λ.
    pub fn xi(&self) -> QExpansion<Series<PadicElem>> {
        let mut acc = self.nilpotent.clone();
        for (f, c) in self.lines.iter().zip(&self.coefficients) {
            acc = acc.add(&f.scale_by(c));
        }
        acc
    }

    /// T_k = (1+p)^k − 1.
    pub fn point(&self, k: i64) -> Result<PadicElem> {
        lambda_point(self.p, self.prec, k)
    }

    /// The case constant η_f·C·p^{k(t−s)}/a_p^{t−s} with a_p specialized at k.
    pub fn constant(&self, k: i64) -> Result<PadicElem> {
        let c = gamma0_index(N_F, self.m_level)?;
        let ap = self.tags[self.target].a_p.evaluate(&[self.point(k)?]);
        case_constant(&self.eta_f, c, PCase::New { s: 1 }, choose_t(1, &[1]), k, &ap)
    }

    /// The Λ-adic eigen-coordinate L(T) of e^ord(Ξ).
    pub fn lambda_value(&self) -> Result<Series<PadicElem>> {
        eigen_coordinate(&self.xi(), &self.lambda_target(), &self.lambda_basis()?)
    }

    /// Λ-adic pipeline, then specialization at (k, 1, 1).
    pub fn value_lambda_then_specialize(&self, k: i64) -> Result<PadicElem> {
        Ok(self.lambda_value()?.evaluate(&[self.point(k)?]) * self.constant(k)?)
    }

    /// The classical weight-k eigenline E_k(χ, χ̄) from its divisor sum.
    pub fn classical_line(&self, i: usize, k: i64) -> Result<QExpansion<PadicElem>> {
        let chi = &self.characters[i];
        let p = self.p;
        let mut coeffs = vec![PadicElem::zero(p, self.prec); self.q + 1];
        for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
            for d in (1..=n).filter(|d| n % d == 0 && d % p as usize != 0) {
                let x = PadicElem::from_int(p, self.prec, d as i128);
                let term = chi.embed((n / d) as i64, &self.emb)?
                    * chi.pow(-1).embed(d as i64, &self.emb)?
                    * x.inv()?
                    * unit_part(&x)?.powi(k)?;
                *c = *c + term;
            }
        }
        QExpansion::new(coeffs, AUX_MODULUS * p as u64, DirichletChar::trivial(AUX_MODULUS * p as u64), Some(k))
    }

    /// Specialize the families first, then run the classical pipeline.
    pub fn value_classical(&self, k: i64) -> Result<PadicElem> {
        let t = self.point(k)?;
        let mut lines = Vec::new();
        let mut tags = Vec::new();
        for i in 0..self.lines.len() {
            lines.push(self.classical_line(i, k)?);
            let tag = &self.tags[i];
            tags.push(Some(EigenTag {
                a_l: tag.a_l.iter().map(|(l, a)| (*l, a.evaluate(&[t]))).collect(),
                a_p: tag.a_p.evaluate(&[t]),
            }));
        }
        let nil = xi_classical(&self.g1, &self.h1, self.twist.a(), [k, 1, 1])?.p_deplete(self.p as u64);
        let mut xi = nil.clone();
        for (f, c) in lines.iter().zip(&self.coefficients) {
            xi = xi.add(&f.scale_by(&c.evaluate(&[t])));
        }
        lines.push(nil);
        tags.push(None);
        let basis = OrdinaryBasis::new(lines, tags.clone(), self.p as u64)?;
        let target = self.target_with(tags[self.target].clone().ok_or_else(|| Error::InconsistencyFound("target line lost its tag".into()))?);
        eigen_project(&xi, &target, &basis, &self.constant(k)?)
    }
}

/// a_ℓ(E(χ, χ̄)) = χ(ℓ) + χ̄(ℓ) ℓ^{−1} ⟨ℓ⟩_Λ, and a_p = χ(p).
fn lambda_eigenvalue(
    chi: &DirichletChar,
    l: u64,
    p: u32,
    prec: u32,
    diamond: &LambdaDiamond,
    emb: &RootEmbedding,
) -> Result<Series<PadicElem>> {
    let head = Series::constant(&diamond.shape, chi.embed(l as i64, emb)?);
    if l == p as u64 {
        return Ok(head);
    }
    let linv = PadicElem::from_int(p, prec, l as i128).inv()?;
    let tail = diamond.diamond(l)?.scale(&(chi.pow(-1).embed(l as i64, emb)? * linv));
    Ok(head.add_ref(&tail))
}

/// 1 − a_p^{−2}(1+T)/(1+p)²: equal to 1 − a_p^{−2} at k = 2.
pub fn controlled_multiplier(shape: &Arc<Shape>, a_p: &Series<PadicElem>, prec: u32) -> Result<Series<PadicElem>> {
    let p = a_p.constant_term().p();
    let inv = a_p.try_inv().ok_or(Error::NonUnit)?;
    let u = PadicElem::from_int(p, prec, 1 + p as i128).powi(-2)?;
    let one = Series::constant(shape, PadicElem::one(p, prec));
    let one_t = one.add_ref(&Series::var(shape, 0, &PadicElem::one(p, prec)));
    Ok(one.sub_ref(&inv.mul_ref(&inv).mul_ref(&one_t).scale(&u)))
}
