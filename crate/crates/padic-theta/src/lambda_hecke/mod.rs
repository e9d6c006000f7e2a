//! q-expansions over any coefficient ring, the Hecke operators T_ℓ, U_p, V_p,
//! p-depletion, the ordinary projector and products of families.

mod linalg;
mod ordinary;

pub use linalg::{identity, inverse, mat_eq, mat_mul, mat_pow, unit_pivots, vec_mat, Matrix};
pub use ordinary::{ord_project, OrdinarySpan, DEFAULT_MAX_ITER};

use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hecke_characters::{DirichletChar, RootEmbedding};
use crate::iwasawa_series::{one_plus_t_pow, series_to_json, JsonCoeff, Series, Shape};
use crate::padic_core::{binom_series, plog, unit_part, CoeffRing, ExtElem, PadicElem};

/// A q-expansion a_0 + a_1 q + … + a_Q q^Q.
///
/// `character` is the tag χ of the Λ-adic normalization: T_ℓ acts through
/// ⟨ℓ⟩_R χ(ℓ) ℓ^{−1}. A weight-k specialization therefore has classical
/// nebentypus χ·ω^{−k}.
#[derive(Clone, Debug, PartialEq)]
pub struct QExpansion<R> {
    coeffs: Vec<R>,
    level: u64,
    character: DirichletChar,
    weight: Option<i64>,
}

impl<R: CoeffRing> QExpansion<R> {
    pub fn new(coeffs: Vec<R>, level: u64, character: DirichletChar, weight: Option<i64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::CapExhausted("a q-expansion needs Q ≥ 1".into()));
        }
        Ok(QExpansion { coeffs, level, character, weight })
    }

    pub fn zero(template: &R, cap: usize, level: u64, character: DirichletChar) -> Self {
        QExpansion { coeffs: vec![template.zero_like(); cap + 1], level, character, weight: None }
    }

    /// The q-cap Q.
    pub fn cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &R {
        &self.coeffs[n]
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn character(&self) -> &DirichletChar {
        &self.character
    }

    pub fn weight(&self) -> Option<i64> {
        self.weight
    }

    pub fn with_weight(mut self, k: Option<i64>) -> Self {
        self.weight = k;
        self
    }

    /// Classical nebentypus χ·ω^{−k} of a weight-tagged expansion.
    pub fn nebentypus(&self, emb: &RootEmbedding) -> Result<Option<DirichletChar>> {
        match self.weight {
            None => Ok(None),
            Some(k) => {
                let w = DirichletChar::teichmuller_power(emb.p(), -k, emb)?;
                Ok(Some(self.character.mul(&w)))
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Drop coefficients beyond `cap`.
    pub fn truncate(&self, cap: usize) -> Self {
        let mut out = self.clone();
        out.coeffs.truncate(cap.min(self.cap()) + 1);
        out
    }

    fn with_coeffs(&self, coeffs: Vec<R>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::CapExhausted(format!("output cap {} < 1", coeffs.len() as i64 - 1)));
        }
        Ok(QExpansion { coeffs, level: self.level, character: self.character.clone(), weight: self.weight })
    }

    /// Pointwise sum at the common cap.
    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().min(o.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeffs[i].add_ref(&o.coeffs[i])).collect();
        QExpansion { coeffs, ..self.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale_by(&o.coeffs[0].one_like().neg_ref()))
    }

    /// Multiply every coefficient by a ring element.
    pub fn scale_by(&self, c: &R) -> Self {
        QExpansion { coeffs: self.coeffs.iter().map(|a| a.mul_ref(c)).collect(), ..self.clone() }
    }

    /// Equality on the common range of coefficients.
    pub fn agrees_with(&self, o: &Self) -> bool {
        let n = self.coeffs.len().min(o.coeffs.len());
        self.coeffs[..n] == o.coeffs[..n]
    }

    /// a_n(T_ℓ ξ) = Σ_{d | (n, ℓ)} ⟨d⟩_R χ(d) d^{−1} a_{nℓ/d²}(ξ), with χ(ℓ) = 0
    /// when ℓ | N (so T_ℓ = U_ℓ there).
    pub fn hecke_t(&self, l: u64, diamond: &dyn DiamondAction<R>, emb: &RootEmbedding) -> Result<Self> {
        let p = emb.p() as u64;
        if l == p {
            return Err(Error::DomainError("use U_p for ℓ = p".into()));
        }
        let factor = if self.level % l == 0 {
            None
        } else {
            let chi = self.character.embed(l as i64, emb)?;
            if chi.is_zero() {
                None
            } else {
                let linv = PadicElem::from_int(emb.p(), emb.prec(), l as i128).inv()?;
                Some(diamond.diamond(l)?.scale(&(chi * linv)))
            }
        };
        self.apply_t(l, factor.as_ref())
    }

    /// T_ℓ in the standard normalization a_{nℓ} + ψ(ℓ)ℓ^{k−1} a_{n/ℓ} for a
    /// weight-k form with nebentypus ψ.
    pub fn hecke_t_classical(&self, l: u64, nebentypus: &DirichletChar, k: i64, emb: &RootEmbedding) -> Result<Self> {
        let factor = if self.level % l == 0 {
            None
        } else {
            let psi = nebentypus.embed(l as i64, emb)?;
            let lk = PadicElem::from_int(emb.p(), emb.prec(), l as i128).powi(k - 1)?;
            Some(self.coeffs[0].scalar_like(&(psi * lk)))
        };
        self.apply_t(l, factor.as_ref())
    }

    fn apply_t(&self, l: u64, factor: Option<&R>) -> Result<Self> {
        let l = l as usize;
        let cap = self.cap() / l;
        let coeffs = (0..=cap)
            .map(|n| {
                let mut a = self.coeffs[n * l].clone();
                if let Some(f) = factor {
                    if n % l == 0 {
                        a = a.add_ref(&f.mul_ref(&self.coeffs[n / l]));
                    }
                }
                a
            })
            .collect();
        self.with_coeffs(coeffs)
    }

    /// U_p : a_n ↦ a_{np}; the cap shrinks to ⌊Q/p⌋.
    pub fn u_p(&self, p: u64) -> Result<Self> {
        let p = p as usize;
        self.with_coeffs((0..=self.cap() / p).map(|n| self.coeffs[n * p].clone()).collect())
    }

    /// U_p applied m times.
    pub fn u_p_pow(&self, p: u64, m: u64) -> Result<Self> {
        let mut x = self.clone();
        for _ in 0..m {
            if x.is_zero() {
                break;
            }
            x = x.u_p(p)?;
        }
        Ok(x)
    }

    /// V_p : a_n ↦ a_{n/p} (zero off multiples of p); the cap grows to pQ.
    pub fn v_p(&self, p: u64) -> Result<Self> {
        let p = p as usize;
        let z = self.coeffs[0].zero_like();
        let coeffs = (0..=self.cap() * p).map(|n| if n % p == 0 { self.coeffs[n / p].clone() } else { z.clone() }).collect();
        let mut out = self.with_coeffs(coeffs)?;
        out.level *= p as u64;
        Ok(out)
    }

    /// ξ − V_p U_p ξ: zero out the coefficients a_n with p | n.
    pub fn p_deplete(&self, p: u64) -> Self {
        let z = self.coeffs[0].zero_like();
        let coeffs =
            self.coeffs.iter().enumerate().map(|(n, a)| if n as u64 % p == 0 { z.clone() } else { a.clone() }).collect();
        QExpansion { coeffs, ..self.clone() }
    }

    /// Apply a weight (or any ring map) coefficient by coefficient.
    pub fn specialize<S: CoeffRing>(&self, k: Option<i64>, f: impl Fn(&R) -> Result<S>) -> Result<QExpansion<S>> {
        let coeffs = self.coeffs.iter().map(&f).collect::<Result<Vec<_>>>()?;
        Ok(QExpansion { coeffs, level: self.level, character: self.character.clone(), weight: k.or(self.weight) })
    }

    /// JSON export {weight_ring, Q, coefficients}.
    pub fn to_json(&self) -> Value
    where
        R: ExpansionCoeff,
    {
        json!({
            "weight_ring": self.coeffs[0].ring_name(),
            "Q": self.cap(),
            "level": self.level,
            "weight": self.weight,
            "coefficients": self.coeffs.iter().map(|c| c.json()).collect::<Vec<_>>(),
        })
    }
}

/// Coefficients that can be written to the q-expansion JSON format.
pub trait ExpansionCoeff: CoeffRing {
    fn ring_name(&self) -> String;
    fn json(&self) -> Value;
}

impl ExpansionCoeff for PadicElem {
    fn ring_name(&self) -> String {
        "Zp2".into()
    }
    fn json(&self) -> Value {
        JsonCoeff::to_json(self)
    }
}

impl ExpansionCoeff for ExtElem {
    fn ring_name(&self) -> String {
        self.ring_tag()
    }
    fn json(&self) -> Value {
        JsonCoeff::to_json(self)
    }
}

impl<C: JsonCoeff> ExpansionCoeff for Series<C> {
    fn ring_name(&self) -> String {
        format!("{}[[{}]]", self.constant_term().ring_tag(), self.shape().vars.join(","))
    }
    fn json(&self) -> Value {
        series_to_json(self)
    }
}

/// The diamond operators d ↦ ⟨d⟩_R = [d·ω^{−1}(d)] in a coefficient ring.
pub trait DiamondAction<R>: Send + Sync {
    fn diamond(&self, d: u64) -> Result<R>;
}

/// s(d) = log_p⟨d⟩ / log_p(1+p) ∈ Z_p.
pub(crate) fn rational_exponent(p: u32, prec: u32, d: u64) -> Result<PadicElem> {
    let w = prec + 1;
    let u = unit_part(&PadicElem::from_int(p, w, d as i128))?;
    let s = plog(&u)?.div(&plog(&PadicElem::from_int(p, w, 1 + p as i128))?)?;
    Ok(s.reduce(prec))
}

/// ⟨d⟩ at the arithmetic weight k: ⟨d⟩^k ∈ Z_p.
#[derive(Clone, Debug)]
pub struct WeightDiamond {
    pub p: u32,
    pub prec: u32,
    pub k: i64,
}

impl DiamondAction<PadicElem> for WeightDiamond {
    fn diamond(&self, d: u64) -> Result<PadicElem> {
        unit_part(&PadicElem::from_int(self.p, self.prec, d as i128))?.powi(self.k)
    }
}

/// ⟨d⟩_Λ = (1+T)^{s(d)} on a univariate Λ = Z_{p²}[[T]].
#[derive(Clone, Debug)]
pub struct LambdaDiamond {
    pub shape: Arc<Shape>,
    pub prec: u32,
    pub p: u32,
}

impl DiamondAction<Series<PadicElem>> for LambdaDiamond {
    fn diamond(&self, d: u64) -> Result<Series<PadicElem>> {
        one_plus_t_pow(&self.shape, &rational_exponent(self.p, self.prec, d)?)
    }
}

/// ⟨d⟩ in R_K = Z_{p²}[[S₁, S₂]]: d ∈ 1+pZ_p is a power of u₁ = 1+p.
#[derive(Clone, Debug)]
pub struct HidaDiamond {
    pub shape: Arc<Shape>,
    pub prec: u32,
    pub p: u32,
}

impl DiamondAction<Series<PadicElem>> for HidaDiamond {
    fn diamond(&self, d: u64) -> Result<Series<PadicElem>> {
        let uni = Shape::univariate(&self.shape.vars[0], self.shape.caps[0]);
        one_plus_t_pow(&uni, &rational_exponent(self.p, self.prec, d)?)?.embed(&self.shape, &[0])
    }
}

/// ⟨d⟩ in Λ_Col, the variable being X = (T − p)/(p^a γ):
/// (1+T)^s = (1+p)^s (1 + p^a γ X/(1+p))^s.
#[derive(Clone, Debug)]
pub struct ColDiamond {
    pub shape: Arc<Shape>,
    pub prec: u32,
    pub p: u32,
    pub a: u32,
}

impl DiamondAction<Series<ExtElem>> for ColDiamond {
    fn diamond(&self, d: u64) -> Result<Series<ExtElem>> {
        let s = rational_exponent(self.p, self.prec, d)?;
        let head = unit_part(&PadicElem::from_int(self.p, self.prec, d as i128))?;
        col_binomial(&self.shape, &s, self.a, &head)
    }
}

/// head · (1 + p^a γ X/(1+p))^s as a Λ_Col series (s·p^a ∈ Z_{p²}).
pub fn col_binomial(shape: &Arc<Shape>, s: &PadicElem, a: u32, head: &PadicElem) -> Result<Series<ExtElem>> {
    let p = s.p();
    let prec = s.prec();
    let num = s.mul_p_pow(a).reduce(prec);
    let b = binom_series(&num, a, shape.caps[0])?;
    let inv = PadicElem::from_int(p, prec, 1 + p as i128).inv()?;
    let mut scale = head.reduce(prec);
    let mut coeffs = Vec::with_capacity(b.coeffs.len());
    for c in &b.coeffs {
        coeffs.push(c.scale(&scale));
        scale = scale * inv;
    }
    Ok(Series::from_coeffs(shape, coeffs))
}

/// The product family ξ₁ × ξ₂ over the completed tensor product of the two
/// coefficient rings (variables are concatenated).
pub fn family_product<C: CoeffRing>(x1: &QExpansion<Series<C>>, x2: &QExpansion<Series<C>>) -> Result<QExpansion<Series<C>>> {
    let s1 = x1.coeffs[0].shape();
    let s2 = x2.coeffs[0].shape();
    let mut vars = s1.vars.clone();
    let mut caps = s1.caps.clone();
    for (v, c) in s2.vars.iter().zip(&s2.caps) {
        if vars.contains(v) {
            return Err(Error::CapMismatch(format!("variable {v} appears in both factors")));
        }
        vars.push(v.clone());
        caps.push(*c);
    }
    let size: usize = caps.iter().map(|c| c + 1).product();
    if size > MAX_TENSOR_SIZE {
        return Err(Error::CapOverflow(format!("tensor shape has {size} monomials")));
    }
    let target = Arc::new(Shape { vars, caps });
    let m1: Vec<usize> = (0..s1.nvars()).collect();
    let m2: Vec<usize> = (s1.nvars()..s1.nvars() + s2.nvars()).collect();
    let e1 = x1.coeffs.iter().map(|c| c.embed(&target, &m1)).collect::<Result<Vec<_>>>()?;
    let e2 = x2.coeffs.iter().map(|c| c.embed(&target, &m2)).collect::<Result<Vec<_>>>()?;
    let cap = x1.cap().min(x2.cap());
    let coeffs = (0..=cap)
        .map(|n| {
            let mut acc = e1[0].zero_like();
            for i in 0..=n {
                if !e1[i].is_zero() && !e2[n - i].is_zero() {
                    acc = acc.add_ref(&e1[i].mul_ref(&e2[n - i]));
                }
            }
            acc
        })
        .collect();
    Ok(QExpansion {
        coeffs,
        level: num_integer::lcm(x1.level, x2.level),
        character: x1.character.mul(&x2.character),
        weight: match (x1.weight, x2.weight) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        },
    })
}

/// Largest tensor shape accepted by [`family_product`].
pub const MAX_TENSOR_SIZE: usize = 1 << 20;

/// The q-expansion of a normalized eigenline from its prime eigenvalues:
/// a_1 = 1, a_{ℓ^{j+1}} = a_ℓ a_{ℓ^j} − ε(ℓ) a_{ℓ^{j−1}}, multiplicative in n.
/// `eps(ℓ)` is the coefficient of the Hecke recursion (χ(ℓ)ℓ^{k−1}, zero for ℓ | N).
pub fn multiplicative_expansion<R: CoeffRing>(
    cap: usize,
    template: &R,
    a_prime: impl Fn(u64) -> Result<R>,
    eps: impl Fn(u64) -> Result<R>,
) -> Result<Vec<R>> {
    let mut a = vec![template.zero_like(); cap + 1];
    if cap == 0 {
        return Ok(a);
    }
    a[1] = template.one_like();
    let mut done = vec![false; cap + 1];
    done[1] = true;
    for l in 2..=cap as u64 {
        if !crate::quadfield::is_prime(l) {
            continue;
        }
        let al = a_prime(l)?;
        let e = eps(l)?;
        let mut prev = template.one_like();
        let mut cur = al.clone();
        let mut q = l as usize;
        while q <= cap {
            a[q] = cur.clone();
            done[q] = true;
            let next = al.mul_ref(&cur).sub_ref(&e.mul_ref(&prev));
            prev = cur;
            cur = next;
            match q.checked_mul(l as usize) {
                Some(x) => q = x,
                None => break,
            }
        }
    }
    for n in 2..=cap {
        if done[n] {
            continue;
        }
        let f = crate::quadfield::prime_factors(n as u64)[0] as usize;
        let mut q = f;
        while (n / q) % f == 0 {
            q *= f;
        }
        a[n] = a[q].mul_ref(&a[n / q]);
    }
    Ok(a)
}
