//! The Θ-twist on the triple ring R_fgh = Λ_f ⊗ R_g ⊗ R_h, the kernel
//! Ξ = g × (h|_Θ), level-adjusted test vectors, eigen-projection against
//! ingested eigen-data, and restriction to one-variable lines.
//!
//! The triple ring is a [`Series`] over Z_{p²} whose shape concatenates the
//! variables of the three factors. A factor that has already been
//! specialized at a classical weight enters only through its weight.

mod eigen;
mod line;
pub mod synthetic;

pub use eigen::{
    case_constant, choose_t, eigen_coordinate, eigen_project, gamma0_index, EigenData, EigenTag, OrdinaryBasis,
    PCase,
};
pub use line::{arc_points, lp_restrict_line, ArcPoint, Line, LineFit};

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hecke_characters::{DirichletChar, RootEmbedding};
use crate::iwasawa_series::{one_plus_t_pow, Series, Shape};
use crate::lambda_hecke::{rational_exponent, QExpansion};
use crate::padic_core::{sqrt_one_unit, teichmuller, CoeffRing, PadicElem};
use crate::theta_families::{FamilyExpansion, ThetaFamily};

/// How one factor of the triple ring sees ⟨s⟩ for s ∈ 1 + pZ_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwistSide {
    /// A variable X of the triple ring with ⟨s⟩ = (1+X)^{log s / log(1+p)}.
    Variable(usize),
    /// A factor fixed at the classical weight k, where ⟨s⟩ = s^k.
    Fixed(i64),
}

/// Θ(s) = ω^{−a−1}(s) ⟨s⟩_f^{1/2} ⟨s⟩_g^{−1/2} ⟨s⟩_h^{−1/2}.
///
/// Half powers use ⟨s⟩^{1/2} = ⟨s̃⟩ with s̃² = s ω^{−1}(s), s̃ ∈ 1 + pZ_p, and
/// ⟨s⟩^{−1/2} = ⟨s^{−1}⟩^{1/2}.
#[derive(Clone, Debug)]
pub struct TwistChar {
    p: u32,
    prec: u32,
    a: i64,
    shape: Arc<Shape>,
    sides: [TwistSide; 3],
    emb: RootEmbedding,
}

impl TwistChar {
    pub fn new(shape: &Arc<Shape>, p: u32, prec: u32, a: i64, sides: [TwistSide; 3]) -> Result<Self> {
        let mut seen = Vec::new();
        for s in &sides {
            if let TwistSide::Variable(i) = s {
                if *i >= shape.nvars() {
                    return Err(Error::CapMismatch(format!("variable index {i} outside the triple ring")));
                }
                if seen.contains(i) {
                    return Err(Error::CapMismatch(format!("variable {i} used by two factors")));
                }
                seen.push(*i);
            }
        }
        let emb = RootEmbedding::new(p, prec)?;
        Ok(TwistChar { p, prec, a, shape: shape.clone(), sides, emb })
    }

    /// Solve χ_f χ_g χ_h = ω^{2a} for a ∈ [0, (p−1)/2) and build Θ.
    pub fn from_characters(
        shape: &Arc<Shape>,
        p: u32,
        prec: u32,
        sides: [TwistSide; 3],
        chars: [&DirichletChar; 3],
    ) -> Result<Self> {
        let emb = RootEmbedding::new(p, prec)?;
        let prod = chars[0].mul(chars[1]).mul(chars[2]);
        let m = num_integer::lcm(prod.modulus(), p as u64);
        let prod = prod.extend(m)?;
        for a in 0..(p as i64 - 1) / 2 {
            if DirichletChar::teichmuller_power(p, 2 * a, &emb)?.extend(m)? == prod {
                return Self::new(shape, p, prec, a, sides);
            }
        }
        Err(Error::NotSelfDual("χ_f χ_g χ_h is not an even power of ω".into()))
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn shape(&self) -> &Arc<Shape> {
        &self.shape
    }

    pub fn sides(&self) -> &[TwistSide; 3] {
        &self.sides
    }

    pub fn embedding(&self) -> &RootEmbedding {
        &self.emb
    }

    fn check_unit(&self, n: u64) -> Result<PadicElem> {
        if n % self.p as u64 == 0 {
            return Err(Error::DomainError(format!("Θ({n}) is only defined for p ∤ n")));
        }
        Ok(PadicElem::from_int(self.p, self.prec, n as i128))
    }

    /// Θ(n) in the triple ring.
    pub fn value(&self, n: u64) -> Result<Series<PadicElem>> {
        let x = self.check_unit(n)?;
        let w = teichmuller(&x)?.powi(-self.a - 1)?;
        let half = rational_exponent(self.p, self.prec, n)? * x.int_like(2).inv()?;
        let mut acc = Series::constant(&self.shape, w);
        for (i, side) in self.sides.iter().enumerate() {
            let sign = if i == 0 { 1 } else { -1 };
            match side {
                TwistSide::Variable(v) => {
                    let uni = Shape::univariate(&self.shape.vars[*v], self.shape.caps[*v]);
                    let e = if sign > 0 { half } else { -half };
                    let f = one_plus_t_pow(&uni, &e)?.embed(&self.shape, &[*v])?;
                    acc = acc.mul_ref(&f);
                }
                TwistSide::Fixed(k) => {
                    acc = acc.scale(&sqrt_one_unit(&x)?.powi(sign * k)?);
                }
            }
        }
        Ok(acc)
    }

    /// Θ specialized at weights (k_x, k_y, k_z), evaluated directly as
    /// ω^{−a−1}(n) · (n ω^{−1}(n))^{(k_x − k_y − k_z)/2}.
    pub fn value_at(&self, n: u64, ks: [i64; 3]) -> Result<PadicElem> {
        let x = self.check_unit(n)?;
        let w = teichmuller(&x)?.powi(-self.a - 1)?;
        Ok(w * sqrt_one_unit(&x)?.powi(ks[0] - ks[1] - ks[2])?)
    }

    /// The values of the triple-ring variables at weights (k_x, k_y, k_z):
    /// X ↦ (1+p)^k − 1 on each Θ variable, and `extra` on the rest.
    pub fn point(&self, ks: [i64; 3], extra: &[(usize, PadicElem)]) -> Result<Vec<PadicElem>> {
        let z = PadicElem::zero(self.p, self.prec);
        let mut vals = vec![z; self.shape.nvars()];
        for (side, k) in self.sides.iter().zip(ks) {
            if let TwistSide::Variable(v) = side {
                vals[*v] = crate::iwasawa_series::lambda_point(self.p, self.prec, k)?;
            }
        }
        for (i, x) in extra {
            vals[*i] = *x;
        }
        Ok(vals)
    }
}

/// Z|_Θ = Σ_{p ∤ n} Θ(n) a_n q^n.
///
/// The character tag becomes tag(Z)·ω^{−2a−2}.
pub fn theta_twist(xi: &QExpansion<Series<PadicElem>>, th: &TwistChar) -> Result<QExpansion<Series<PadicElem>>> {
    if **xi.coeff(0).shape() != *th.shape {
        return Err(Error::CapMismatch("the expansion is not over the triple ring".into()));
    }
    let p = th.p as u64;
    let coeffs = (0..=xi.cap())
        .into_par_iter()
        .map(|n| {
            let a = xi.coeff(n);
            if n as u64 % p == 0 || a.is_zero() {
                Ok(a.zero_like())
            } else {
                Ok(th.value(n as u64)?.mul_ref(a))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let omega = DirichletChar::teichmuller_power(th.p, -2 * th.a - 2, &th.emb)?;
    QExpansion::new(coeffs, xi.level(), xi.character().mul(&omega), None)
}

/// The Cauchy product of two q-expansions with equal caps.
pub fn qexp_product<R: CoeffRing>(x: &QExpansion<R>, y: &QExpansion<R>) -> Result<QExpansion<R>> {
    if x.cap() != y.cap() {
        return Err(Error::CapMismatch(format!("q-caps {} and {}", x.cap(), y.cap())));
    }
    let support: Vec<usize> = (0..=y.cap()).filter(|&j| !y.coeff(j).is_zero()).collect();
    let coeffs = (0..=x.cap())
        .into_par_iter()
        .map(|n| {
            let mut acc = x.coeff(0).zero_like();
            for &j in support.iter().take_while(|&&j| j <= n) {
                let a = x.coeff(n - j);
                if !a.is_zero() {
                    acc = acc.add_ref(&a.mul_ref(y.coeff(j)));
                }
            }
            acc
        })
        .collect();
    let level = num_integer::lcm(x.level(), y.level());
    let weight = x.weight().zip(y.weight()).map(|(a, b)| a + b);
    QExpansion::new(coeffs, level, x.character().mul(y.character()), weight)
}

/// Ξ = g × (h|_Θ), with g and h already over the triple ring.
pub fn build_xi(
    g: &QExpansion<Series<PadicElem>>,
    h: &QExpansion<Series<PadicElem>>,
    th: &TwistChar,
) -> Result<QExpansion<Series<PadicElem>>> {
    if **g.coeff(0).shape() != *th.shape {
        return Err(Error::CapMismatch("g is not over the triple ring".into()));
    }
    qexp_product(g, &theta_twist(h, th)?)
}

/// A classical expansion as a constant family over `shape`.
pub fn lift_constant(x: &QExpansion<PadicElem>, shape: &Arc<Shape>) -> Result<QExpansion<Series<PadicElem>>> {
    x.specialize(x.weight(), |c| Ok(Series::constant(shape, *c)))
}

/// Evaluate every coefficient at a point of the triple ring.
pub fn specialize_at(
    x: &QExpansion<Series<PadicElem>>,
    point: &[PadicElem],
    k: Option<i64>,
) -> Result<QExpansion<PadicElem>> {
    x.specialize(k, |s| Ok(s.evaluate(point)))
}

/// d^m ξ = Σ n^m a_n q^n (m < 0 needs a_n = 0 for p | n).
pub fn serre_derivative(x: &QExpansion<PadicElem>, m: i64) -> Result<QExpansion<PadicElem>> {
    let p = x.coeff(0).p();
    let prec = x.coeff(0).prec();
    let coeffs = (0..=x.cap())
        .map(|n| {
            let a = *x.coeff(n);
            if a.is_zero() || m == 0 {
                return Ok(a);
            }
            if n as u64 % p as u64 == 0 && m < 0 {
                return Err(Error::DomainError(format!("d^{m} needs a_{n} = 0")));
            }
            Ok(a * PadicElem::from_int(p, prec, n as i128).powi(m)?)
        })
        .collect::<Result<Vec<_>>>()?;
    QExpansion::new(coeffs, x.level(), x.character().clone(), x.weight().map(|k| k + 2 * m))
}

/// The classical side of the specialization identity:
/// Ξ_w = g_y × d^m(h_z ⊗ ψ_w) with m = (k_x − k_y − k_z)/2 and ψ_w = ω^{−a−1−m}
/// (p-depleted).
pub fn xi_classical(
    g_y: &QExpansion<PadicElem>,
    h_z: &QExpansion<PadicElem>,
    a: i64,
    ks: [i64; 3],
) -> Result<QExpansion<PadicElem>> {
    let diff = ks[0] - ks[1] - ks[2];
    if diff % 2 != 0 {
        return Err(Error::DomainError(format!("k_x − k_y − k_z = {diff} is odd")));
    }
    let m = diff / 2;
    let p = h_z.coeff(0).p();
    let twisted = h_z.p_deplete(p as u64);
    let coeffs = (0..=twisted.cap())
        .map(|n| {
            let c = *twisted.coeff(n);
            if c.is_zero() {
                return Ok(c);
            }
            Ok(c * teichmuller(&c.int_like(n as i128))?.powi(-a - 1 - m)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let twisted = QExpansion::new(coeffs, twisted.level(), twisted.character().clone(), h_z.weight())?;
    qexp_product(g_y, &serre_derivative(&twisted, m)?)
}

/// g* = g(q^{N_f}) to cap `q`: a_{N_f n}(g*) = a_n(g), other coefficients 0.
/// The level is multiplied by N_f.
pub fn test_vector<R: CoeffRing>(x: &QExpansion<R>, n_f: u64, q: usize) -> Result<QExpansion<R>> {
    if n_f == 0 {
        return Err(Error::DomainError("N_f must be positive".into()));
    }
    let n_f = n_f as usize;
    if x.cap() < q / n_f {
        return Err(Error::CapExhausted(format!("g(q^{n_f}) to q^{q} needs cap {} > {}", q / n_f, x.cap())));
    }
    let z = x.coeff(0).zero_like();
    let coeffs = (0..=q).map(|n| if n % n_f == 0 { x.coeff(n / n_f).clone() } else { z.clone() }).collect();
    QExpansion::new(coeffs, x.level() * n_f as u64, x.character().clone(), x.weight())
}

/// [`test_vector`] on either realization of a theta family, keeping its cap.
pub fn test_vector_family(f: &ThetaFamily, n_f: u64) -> Result<ThetaFamily> {
    let expansion = match &f.expansion {
        FamilyExpansion::Col(x) => FamilyExpansion::Col(test_vector(x, n_f, f.q)?),
        FamilyExpansion::Hida(x) => FamilyExpansion::Hida(test_vector(x, n_f, f.q)?),
    };
    Ok(ThetaFamily { expansion, level: f.level * n_f, tame_level: f.tame_level * n_f, ..f.clone() })
}
