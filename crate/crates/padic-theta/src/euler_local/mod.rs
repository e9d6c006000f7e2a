//! Local factors at p: the unbalanced zeta integral, root numbers of
//! characters of Q_{p²}, and the anticyclotomic multiplier.
//!
//! All values are exact. a_p is a rational p-adic unit and root numbers live
//! in Q(ζ_{(p²−1)p^n}).

mod chars;
mod table;

#[cfg(test)]
mod tests;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

pub use chars::{primitive_characters, root_number, LocalChar, RootNumber, UnitTable};
pub use table::{render_csv, render_text};

use crate::error::{Error, Result};
use crate::hecke_characters::{Cyclo, CycloField, Root};

/// Whether f is the p-stabilization of a level-prime-to-p form or p-new.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PType {
    Old,
    New,
}

impl fmt::Display for PType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PType::Old => "p-old",
            PType::New => "p-new",
        })
    }
}

/// Inputs of one factor ℐ_{η,w}.
#[derive(Clone, Debug)]
pub struct LocalFactorInput {
    pub p: u32,
    pub ptype: PType,
    pub k: i64,
    pub a_p: BigRational,
    /// Conductor exponent of ημ₁ at p.
    pub n: u32,
    /// η̃ on (Z_{p²}/p^n)^×; required when n > 0.
    pub character: Option<LocalChar>,
}

impl LocalFactorInput {
    pub fn unramified(p: u32, ptype: PType, k: i64, a_p: BigRational) -> Self {
        LocalFactorInput { p, ptype, k, a_p, n: 0, character: None }
    }

    pub fn ramified(p: u32, ptype: PType, k: i64, a_p: BigRational, character: LocalChar) -> Self {
        LocalFactorInput { p, ptype, k, a_p, n: character.modulus_exponent(), character: Some(character) }
    }

    fn check(&self) -> Result<()> {
        if self.k < 2 || self.k % 2 != 0 {
            return Err(Error::DomainError(format!("weight {} is not even and ≥ 2", self.k)));
        }
        if !is_p_unit(&self.a_p, self.p) {
            return Err(Error::NonUnit);
        }
        if self.ptype == PType::New && self.k != 2 {
            return Err(Error::CaseMismatch(format!("a p-new form occurs only in weight 2, got k = {}", self.k)));
        }
        match (&self.character, self.n) {
            (None, 0) => Ok(()),
            (Some(c), 0) if c.level() == 0 => Ok(()),
            (Some(c), 0) => Err(Error::CaseMismatch(format!("n = 0 but η̃ has level {}", c.level()))),
            (None, n) => Err(Error::CaseMismatch(format!("level {n} needs the character table of η̃"))),
            (Some(c), n) if c.level() != n => {
                Err(Error::NotPrimitive(format!("η̃ has level {} but n = {n}", c.level())))
            }
            (Some(_), _) => Ok(()),
        }
    }
}

/// A value of a local factor: a rational part times an optional W(η̃)^{−1}.
#[derive(Clone, Debug)]
pub struct FactorValue {
    pub rational: BigRational,
    pub root_number: Option<RootNumber>,
    pub exact: Cyclo,
}

impl FactorValue {
    fn rational(x: BigRational) -> Self {
        let field = CycloField::new(1);
        FactorValue { exact: Cyclo::from_rational(&field, x.clone()), rational: x, root_number: None }
    }

    pub fn is_zero(&self) -> bool {
        self.exact.is_zero()
    }
}

fn is_p_unit(x: &BigRational, p: u32) -> bool {
    let p = BigInt::from(p);
    !x.is_zero() && !(x.numer() % &p).is_zero() && !(x.denom() % &p).is_zero()
}

fn pow_rat(x: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

fn p_rat(p: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(p))
}

/// 1 − p^{k−2}/a_p².
fn euler_term(p: u32, k: i64, a_p: &BigRational) -> BigRational {
    BigRational::one() - pow_rat(&p_rat(p), k - 2) / (a_p * a_p)
}

/// (p/a_p²)^n · p^{n(k−2)}.
fn ramified_term(p: u32, k: i64, a_p: &BigRational, n: u32) -> BigRational {
    let n = n as i64;
    pow_rat(&(p_rat(p) / (a_p * a_p)), n) * pow_rat(&p_rat(p), n * (k - 2))
}

/// ℐ_{η,w} in the three cases: unramified p-old, unramified p-new, ramified.
pub fn unb_factor(inp: &LocalFactorInput, units: Option<&UnitTable>) -> Result<FactorValue> {
    inp.check()?;
    if inp.n == 0 {
        let t = euler_term(inp.p, inp.k, &inp.a_p);
        return Ok(FactorValue::rational(match inp.ptype {
            PType::Old => &t * &t,
            PType::New => t,
        }));
    }
    let chi = inp.character.as_ref().expect("checked above");
    let owned;
    let units = match units {
        Some(u) => u,
        None => {
            owned = UnitTable::new(inp.p, inp.n)?;
            &owned
        }
    };
    let w = root_number(chi, units)?;
    let r = ramified_term(inp.p, inp.k, &inp.a_p, inp.n);
    let exact = w.inverse().scale(&r);
    Ok(FactorValue { rational: r, root_number: Some(w), exact })
}

/// ℐ^{unb} = ℐ_φ · ℐ_ψ, returned in the compositum field when both sides
/// are ramified at the same n (otherwise the rational factor is lifted).
pub fn unb_product(phi: &FactorValue, psi: &FactorValue) -> Result<Cyclo> {
    let (a, b) = (&phi.exact, &psi.exact);
    match (a.field().m(), b.field().m()) {
        (x, y) if x == y => Ok(a.mul(b)),
        (1, _) => Ok(b.scale(&a.to_rational().expect("rational factor"))),
        (_, 1) => Ok(a.scale(&b.to_rational().expect("rational factor"))),
        (x, y) => Err(Error::Unsupported(format!("factors live in Q(ζ_{x}) and Q(ζ_{y})"))),
    }
}

/// e_p(f, χ_tν).
pub fn anticyc_multiplier(p: u32, k: i64, a_p: &BigRational, n: u32, ptype: PType) -> BigRational {
    if n > 0 {
        return ramified_term(p, k, a_p, n);
    }
    let t = euler_term(p, k, a_p);
    match ptype {
        PType::Old => &t * &t,
        PType::New => t,
    }
}

/// C_p(f, χ_tν) with δ_K^{k−1} split as d_K^{⌊(k−1)/2⌋}·δ_K^{(k−1) mod 2}.
#[derive(Clone, Debug, PartialEq)]
pub struct CpConstant {
    pub scalar: BigRational,
    /// Power of δ_K = √d_K left over (0 or 1).
    pub delta_power: u32,
    /// χ_tν(𝔑⁺).
    pub character_value: Root,
}

impl fmt::Display for CpConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.scalar)?;
        if self.delta_power == 1 {
            write!(f, "*sqrt(d_K)")?;
        }
        if !self.character_value.is_one() {
            write!(f, "*e({}/{})", self.character_value.num, self.character_value.den)?;
        }
        Ok(())
    }
}

/// u_K = #O_K^× / 2.
pub fn u_k(d_k: i64) -> u64 {
    match d_k {
        -3 => 3,
        -4 => 2,
        _ => 1,
    }
}

/// C_p = (−1)^{(2+2j−k)/2} Γ(k/2+j) Γ(k/2−j) · c · δ_K^{k−1} · u_K² · ε · χ_tν(𝔑⁺).
///
/// ε = ε(π_{f,p}, 1/2) is ingested.
pub fn cp_constant(k: i64, j: i64, c: u64, d_k: i64, epsilon: &BigRational, nu_n_plus: Root) -> Result<CpConstant> {
    if k % 2 != 0 || k < 2 {
        return Err(Error::DomainError(format!("weight {k} is not even and ≥ 2")));
    }
    if 2 * j.abs() >= k {
        return Err(Error::DomainError(format!("|j| = {} is not below k/2 = {}", j.abs(), k / 2)));
    }
    let e = (2 + 2 * j - k) / 2;
    let sign = if e.rem_euclid(2) == 0 { 1 } else { -1 };
    let gamma = |x: i64| -> BigInt { (1..x).map(BigInt::from).product() };
    let u = u_k(d_k) as i64;
    let mut scalar = BigRational::from_integer(
        BigInt::from(sign) * gamma(k / 2 + j) * gamma(k / 2 - j) * BigInt::from(c) * BigInt::from(u * u),
    );
    scalar *= pow_rat(&BigRational::from_integer(BigInt::from(d_k)), (k - 1) / 2);
    scalar *= epsilon;
    Ok(CpConstant { scalar, delta_power: ((k - 1) % 2) as u32, character_value: nu_n_plus })
}

/// One checked point of the consistency grid.
#[derive(Clone, Debug)]
pub struct GridRow {
    pub k: i64,
    pub n: u32,
    pub ptype: PType,
    pub a_p: BigRational,
    pub character: Option<LocalChar>,
    pub unb: Cyclo,
    pub e_p: BigRational,
    pub root_number: Option<Cyclo>,
    pub ok: bool,
}

/// A grid point: (k, n, a_p, p-type, η̃).
#[derive(Clone, Debug)]
pub struct GridPoint {
    pub k: i64,
    pub ptype: PType,
    pub a_p: BigRational,
    pub character: Option<LocalChar>,
}

#[derive(Clone, Debug)]
pub struct ConsistencyReport {
    pub p: u32,
    pub rows: Vec<GridRow>,
}

impl ConsistencyReport {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.ok).count()
    }
}

/// ℐ_{η,w} = e_p on unramified points and ℐ_{η,w}·W(η̃) = e_p on ramified
/// ones, compared as elements of Q(ζ_m). The first failure aborts.
pub fn consistency_check(p: u32, grid: &[GridPoint]) -> Result<ConsistencyReport> {
    let tables: Vec<Arc<UnitTable>> = (0..=2).map(|n| UnitTable::new(p, n).map(Arc::new)).collect::<Result<_>>()?;
    let rows = grid
        .par_iter()
        .map(|g| {
            let inp = match &g.character {
                Some(c) if c.level() > 0 => LocalFactorInput::ramified(p, g.ptype, g.k, g.a_p.clone(), c.clone()),
                _ => LocalFactorInput::unramified(p, g.ptype, g.k, g.a_p.clone()),
            };
            let units = tables.get(inp.n as usize).map(|t| t.as_ref());
            let v = unb_factor(&inp, units)?;
            let e_p = anticyc_multiplier(p, g.k, &g.a_p, inp.n, g.ptype);
            let lhs = match &v.root_number {
                Some(w) => v.exact.mul(&w.value),
                None => v.exact.clone(),
            };
            let ok = lhs == Cyclo::from_rational(lhs.field(), e_p.clone());
            let row = GridRow {
                k: g.k,
                n: inp.n,
                ptype: g.ptype,
                a_p: g.a_p.clone(),
                character: g.character.clone(),
                unb: v.exact,
                e_p,
                root_number: v.root_number.map(|w| w.value),
                ok,
            };
            if !ok {
                return Err(Error::InconsistencyFound(format!(
                    "k={} n={} {} a_p={}: I·W = {lhs} but e_p = {}",
                    row.k, row.n, row.ptype, row.a_p, row.e_p
                )));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConsistencyReport { p, rows })
}

/// Unit samples used alongside ±1 on the default grid.
pub fn unit_samples() -> Vec<BigRational> {
    vec![
        BigRational::from_integer(2.into()),
        BigRational::from_integer(3.into()),
        BigRational::new(7.into(), 3.into()),
    ]
}

/// k ∈ {2,4,6}, n ∈ {0,1,2}, a_p ∈ {±1} ∪ unit samples; p-new rows only at
/// k = 2; two characters per ramified level.
pub fn default_grid(p: u32) -> Result<Vec<GridPoint>> {
    let q1 = (p as i64) * (p as i64) - 1;
    let mut aps = vec![BigRational::one(), -BigRational::one()];
    aps.extend(unit_samples());
    let chars: Vec<Option<LocalChar>> = vec![
        None,
        Some(LocalChar::new(p, 1, q1 / 2, [0, 0])?),
        Some(LocalChar::new(p, 1, 1, [0, 0])?),
        Some(LocalChar::new(p, 2, 0, [1, 0])?),
        Some(LocalChar::new(p, 2, p as i64, [2, 3])?),
    ];
    let mut grid = Vec::new();
    for k in [2i64, 4, 6] {
        for ch in &chars {
            for ap in &aps {
                for ptype in [PType::Old, PType::New] {
                    if ptype == PType::New && k != 2 {
                        continue;
                    }
                    grid.push(GridPoint { k, ptype, a_p: ap.clone(), character: ch.clone() });
                }
            }
        }
    }
    Ok(grid)
}
