use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::hecke_characters::RootEmbedding;
use crate::lambda_hecke::{vec_mat, OrdinarySpan, QExpansion, DEFAULT_MAX_ITER};
use crate::padic_core::{CoeffRing, PadicElem};
use crate::quadfield::prime_factors;

/// Hecke eigenvalues attached to one line of an ordinary basis.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenTag<R> {
    pub a_l: BTreeMap<u64, R>,
    pub a_p: R,
}

/// Which of the two evaluation formulas applies to the target f.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PCase {
    /// f is new of level N_f p^s.
    New { s: u32 },
    /// f is the ordinary p-stabilization of a level-N_f newform.
    Old,
}

impl PCase {
    pub fn s(&self) -> u32 {
        match self {
            PCase::New { s } => *s,
            PCase::Old => 1,
        }
    }
}

/// Ingested eigen-data of the target f̆ (eigenvalues are those of f̆).
#[derive(Clone, Debug)]
pub struct EigenData<R> {
    pub label: String,
    /// N_f.
    pub tame_level: u64,
    pub case: PCase,
    pub weight: i64,
    pub tag: EigenTag<R>,
    /// Pseudo-eigenvalue λ_N(f).
    pub lambda_n: PadicElem,
    /// Congruence number η_f.
    pub eta_f: PadicElem,
    pub ordinary: bool,
    pub trivial_character: bool,
    /// Atkin–Lehner sign of an attached elliptic curve, if any.
    pub lambda_e: Option<i64>,
}

impl<R: CoeffRing> EigenData<R> {
    pub fn validate(&self) -> Result<()> {
        if self.ordinary && self.tag.a_p.try_inv().is_none() {
            return Err(Error::validation("ordinary", format!("{}: a_p is not a unit", self.label)));
        }
        if matches!(self.case, PCase::New { .. }) && self.weight == 2 && self.trivial_character {
            let one = self.tag.a_p.one_like();
            if self.tag.a_p != one && self.tag.a_p != one.neg_ref() {
                return Err(Error::validation("a_p = ±1", format!("{}: weight-2 p-new form needs a_p = ±1", self.label)));
            }
        }
        if self.eta_f.is_zero() {
            return Err(Error::validation("eta_f != 0", format!("{}: zero congruence number", self.label)));
        }
        Ok(())
    }

    fn matches(&self, t: &EigenTag<R>) -> bool {
        t.a_p == self.tag.a_p && self.tag.a_l.iter().all(|(l, a)| t.a_l.get(l).is_none_or(|b| b == a))
    }
}

/// A U_p-stable span standing in for S_k^ord(Mp^t, χ), with optional
/// eigen-metadata per line.
#[derive(Clone, Debug)]
pub struct OrdinaryBasis<R> {
    span: OrdinarySpan<R>,
    tags: Vec<Option<EigenTag<R>>>,
}

impl<R: CoeffRing> OrdinaryBasis<R> {
    /// Validates full rank on a pivot set and U_p-stability.
    pub fn new(lines: Vec<QExpansion<R>>, tags: Vec<Option<EigenTag<R>>>, p: u64) -> Result<Self> {
        if lines.len() != tags.len() {
            return Err(Error::DomainError("one tag slot per line is required".into()));
        }
        let span = OrdinarySpan::new(lines, p).map_err(|e| match e {
            Error::RankDeficient(m) => Error::RankDeficient(m),
            Error::NonUnit => Error::RankDeficient("no invertible pivot set".into()),
            other => other,
        })?;
        Ok(OrdinaryBasis { span, tags })
    }

    pub fn span(&self) -> &OrdinarySpan<R> {
        &self.span
    }

    pub fn tags(&self) -> &[Option<EigenTag<R>>] {
        &self.tags
    }

    pub fn dim(&self) -> usize {
        self.span.dim()
    }

    /// The unique tagged line whose eigenvalues agree with the target.
    pub fn target_index(&self, target: &EigenData<R>) -> Result<usize> {
        let hits: Vec<usize> =
            (0..self.tags.len()).filter(|&i| self.tags[i].as_ref().is_some_and(|t| target.matches(t))).collect();
        match hits.as_slice() {
            [i] => Ok(*i),
            [] => Err(Error::EigenAmbiguous(format!("no line carries the eigenvalues of {}", target.label))),
            _ => Err(Error::EigenAmbiguous(format!("{} lines match {}", hits.len(), target.label))),
        }
    }

    /// Check tagged lines against the Hecke action: a_ℓ(line) = a_ℓ·a_1(line)
    /// for tagged ℓ ≤ l_max and U_p(line) = a_p·line.
    pub fn verify_tags(&self, l_max: u64) -> Result<()> {
        let p = self.span.p();
        for (b, tag) in self.span.basis().iter().zip(&self.tags) {
            let Some(t) = tag else { continue };
            let a1 = b.coeff(1);
            for (&l, a) in t.a_l.iter().filter(|(l, _)| **l <= l_max) {
                if l as usize > b.cap() {
                    continue;
                }
                let found = b.coeff(l as usize);
                if *found != a.mul_ref(a1) {
                    return Err(Error::EigenMismatch {
                        ell: l,
                        expected: format!("{a:?}"),
                        found: format!("{found:?}"),
                    });
                }
            }
            let up = b.u_p(p)?;
            if !up.agrees_with(&b.scale_by(&t.a_p)) {
                return Err(Error::EigenMismatch { ell: p, expected: format!("{:?}", t.a_p), found: "U_p image".into() });
            }
        }
        Ok(())
    }
}

impl OrdinaryBasis<PadicElem> {
    /// [`OrdinaryBasis::verify_tags`] plus T_ℓ ξ = a_ℓ ξ on the whole common
    /// range, for a weight-k basis whose lines carry their nebentypus.
    pub fn verify_hecke(&self, k: i64, emb: &RootEmbedding, l_max: u64) -> Result<()> {
        self.verify_tags(l_max)?;
        for (b, tag) in self.span.basis().iter().zip(&self.tags) {
            let Some(t) = tag else { continue };
            let Some(neb) = b.nebentypus(emb)? else { continue };
            for (&l, a) in t.a_l.iter().filter(|(l, _)| **l <= l_max && b.level() % **l != 0) {
                let image = b.hecke_t_classical(l, &neb, k, emb)?;
                if !image.agrees_with(&b.scale_by(a)) {
                    return Err(Error::EigenMismatch {
                        ell: l,
                        expected: format!("{a:?}"),
                        found: "T_l image".into(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// The a_1 of the target eigencomponent of e^ord(ξ).
///
/// ξ is written in the basis, projected by lim M^{n!}, and the coordinate on
/// the target line is scaled by that line's own a_1.
pub fn eigen_coordinate<R: CoeffRing>(xi: &QExpansion<R>, target: &EigenData<R>, basis: &OrdinaryBasis<R>) -> Result<R> {
    let i = basis.target_index(target)?;
    let c = basis.span.coordinates(xi).map_err(|e| match e {
        Error::DomainError(m) => Error::RankDeficient(format!("the basis cannot represent the input: {m}")),
        other => other,
    })?;
    let pm = basis.span.projector(DEFAULT_MAX_ITER)?;
    let ord = vec_mat(&c, &pm);
    Ok(ord[i].mul_ref(basis.span.basis()[i].coeff(1)))
}

/// η_f · C · (case factor) · (target coordinate).
pub fn eigen_project<R: CoeffRing>(
    xi: &QExpansion<R>,
    target: &EigenData<R>,
    basis: &OrdinaryBasis<R>,
    constant: &PadicElem,
) -> Result<R> {
    Ok(eigen_coordinate(xi, target, basis)?.scale(constant))
}

/// [Γ₀(N_f) : Γ₀(M)] = (M/N_f) ∏_{ℓ | M, ℓ ∤ N_f} (1 + 1/ℓ).
pub fn gamma0_index(n_f: u64, m: u64) -> Result<u64> {
    if n_f == 0 || m % n_f != 0 {
        return Err(Error::DomainError(format!("N_f = {n_f} does not divide M = {m}")));
    }
    let mut num = m / n_f;
    let mut den = 1u64;
    for l in prime_factors(m) {
        if n_f % l != 0 {
            num *= l + 1;
            den *= l;
        }
    }
    if num % den != 0 {
        return Err(Error::InconsistencyFound(format!("index {num}/{den} is not integral")));
    }
    Ok(num / den)
}

/// η_f · C · p^{k(t−s)} / a_p(f̆)^{t−s}, the scalar in front of the
/// eigen-coordinate (s = 1 for p-stabilized targets).
pub fn case_constant(eta_f: &PadicElem, c: u64, case: PCase, t: u32, k: i64, a_p_breve: &PadicElem) -> Result<PadicElem> {
    let s = case.s();
    if t < s {
        return Err(Error::DomainError(format!("t = {t} is below the p-exponent s = {s} of the target")));
    }
    let e = (t - s) as i64;
    let pk = eta_f.int_like(eta_f.p() as i128).powi(k * e)?;
    Ok(*eta_f * eta_f.int_like(c as i128) * pk * a_p_breve.powi(-e)?)
}

/// t = max(1, s, p-exponents of the specialized conductors).
pub fn choose_t(s: u32, conductor_exponents: &[u32]) -> u32 {
    conductor_exponents.iter().copied().fold(s.max(1), u32::max)
}
