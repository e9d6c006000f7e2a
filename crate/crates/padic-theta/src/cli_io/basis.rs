//! On-disk ordinary bases and classical q-expansions.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hecke_characters::{DirichletChar, RootEmbedding};
use crate::lambda_hecke::QExpansion;
use crate::padic_core::PadicElem;
use crate::triple_product::synthetic::SyntheticTriple;
use crate::triple_product::{EigenTag, OrdinaryBasis};

pub const BASIS_SCHEMA: &str = "padic-theta/ordinary-basis/1";
pub const EXPANSION_SCHEMA: &str = "padic-theta/expansion/1";
/// Tagged eigenvalues are checked against the Hecke action up to this ℓ.
pub const HECKE_CHECK_BOUND: u64 = 13;

/// A Z_{p²} digit pair (a, b) for a + bδ.
pub type Digits = [u64; 2];

fn elem(p: u32, prec: u32, d: &Digits) -> PadicElem {
    PadicElem::new(p, prec, d[0] as i128, d[1] as i128)
}

fn digits(x: &PadicElem) -> Digits {
    [x.a() as u64, x.b() as u64]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TagFile {
    pub a_p: Digits,
    pub a_l: BTreeMap<u64, Digits>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisLine {
    pub label: String,
    pub coefficients: Vec<Digits>,
    #[serde(default)]
    pub tag: Option<TagFile>,
}

/// Lines of weight `weight` on Γ₁(level) with trivial tame character (the
/// nebentypus is then ω^{−k}).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisFile {
    pub schema: String,
    pub p: u32,
    pub precision: u32,
    pub weight: i64,
    pub level: u64,
    pub lines: Vec<BasisLine>,
}

/// A single classical expansion, e.g. a kernel to project.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionFile {
    pub schema: String,
    pub p: u32,
    pub precision: u32,
    pub weight: i64,
    pub level: u64,
    pub coefficients: Vec<Digits>,
}

#[derive(Clone, Debug)]
pub struct LoadedBasis {
    pub basis: OrdinaryBasis<PadicElem>,
    pub labels: Vec<String>,
    pub weight: i64,
    pub level: u64,
    pub p: u32,
    pub precision: u32,
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn check_schema(found: &str, expected: &str) -> Result<()> {
    if found != expected {
        return Err(Error::parse("schema", format!("expected {expected}, found {found}")));
    }
    Ok(())
}

impl BasisFile {
    pub fn from_json(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data") + "\n"
    }

    /// Build the basis, check its rank and cross-check every tag against
    /// the Hecke action for ℓ ≤ 13 (and U_p).
    pub fn load(&self) -> Result<LoadedBasis> {
        check_schema(&self.schema, BASIS_SCHEMA)?;
        let (p, prec) = (self.p, self.precision);
        if self.lines.is_empty() {
            return Err(Error::RankDeficient("the basis is empty".into()));
        }
        let cap = self.lines[0].coefficients.len();
        let mut lines = Vec::new();
        let mut tags = Vec::new();
        for (i, l) in self.lines.iter().enumerate() {
            if l.coefficients.len() != cap {
                return Err(Error::parse(format!("lines[{i}].coefficients"), "all lines need the same length"));
            }
            let coeffs = l.coefficients.iter().map(|d| elem(p, prec, d)).collect();
            lines.push(QExpansion::new(coeffs, self.level, DirichletChar::trivial(self.level), Some(self.weight))?);
            tags.push(l.tag.as_ref().map(|t| EigenTag {
                a_p: elem(p, prec, &t.a_p),
                a_l: t.a_l.iter().map(|(l, d)| (*l, elem(p, prec, d))).collect(),
            }));
        }
        let basis = OrdinaryBasis::new(lines, tags, p as u64)?;
        let emb = RootEmbedding::new(p, prec)?;
        basis.verify_hecke(self.weight, &emb, HECKE_CHECK_BOUND)?;
        Ok(LoadedBasis {
            basis,
            labels: self.lines.iter().map(|l| l.label.clone()).collect(),
            weight: self.weight,
            level: self.level,
            p,
            precision: prec,
        })
    }
}

/// Read, parse and validate an ordinary basis file.
pub fn load_eigenbasis(path: &Path) -> Result<LoadedBasis> {
    BasisFile::from_json(&read(path)?)?.load()
}

impl ExpansionFile {
    pub fn from_json(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data") + "\n"
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&read(path)?)
    }

    pub fn expansion(&self) -> Result<QExpansion<PadicElem>> {
        check_schema(&self.schema, EXPANSION_SCHEMA)?;
        let coeffs = self.coefficients.iter().map(|d| elem(self.p, self.precision, d)).collect();
        QExpansion::new(coeffs, self.level, DirichletChar::trivial(self.level), Some(self.weight))
    }

    pub fn from_expansion(x: &QExpansion<PadicElem>, weight: i64) -> Self {
        let c0 = x.coeff(0);
        ExpansionFile {
            schema: EXPANSION_SCHEMA.into(),
            p: c0.p(),
            precision: c0.prec(),
            weight,
            level: x.level(),
            coefficients: x.coeffs().iter().map(digits).collect(),
        }
    }
}

/// The weight-k specialization of the synthetic triple's eigenlines, and
/// (with `kernel`) its depleted theta product as an untagged fourth line.
/// The shipped fixtures are generated by this function.
pub fn synthetic_basis(prec: u32, q: usize, k: i64, kernel: bool) -> Result<(BasisFile, ExpansionFile)> {
    let syn = SyntheticTriple::new(prec, q, 7, 0)?;
    let t = syn.point(k)?;
    let names = ["E(1,1)", "E(chi3,chi3^-1)", "E(chi2,chi2^-1)"];
    let mut lines = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let f = syn.classical_line(i, k)?;
        let tag = &syn.tags[i];
        lines.push(BasisLine {
            label: name.to_string(),
            coefficients: f.coeffs().iter().map(digits).collect(),
            tag: Some(TagFile {
                a_p: digits(&tag.a_p.evaluate(&[t])),
                a_l: tag.a_l.iter().map(|(l, a)| (*l, digits(&a.evaluate(&[t])))).collect(),
            }),
        });
    }
    let nil = crate::triple_product::xi_classical(&syn.g1, &syn.h1, syn.twist.a(), [k, 1, 1])?.p_deplete(syn.p as u64);
    let level = lines_level(&syn);
    if kernel {
        lines.push(BasisLine {
            label: "kernel".into(),
            coefficients: nil.truncate(q).coeffs().iter().map(digits).collect(),
            tag: None,
        });
    }
    // ξ = 2·E₀ + 3·E₁ + 4·E₂ + kernel
    let mut xi = nil.truncate(q);
    for (i, c) in [2i128, 3, 4].iter().enumerate() {
        xi = xi.add(&syn.classical_line(i, k)?.scale_by(&PadicElem::from_int(syn.p, prec, *c)));
    }
    let basis = BasisFile { schema: BASIS_SCHEMA.into(), p: syn.p, precision: prec, weight: k, level, lines };
    let mut input = ExpansionFile::from_expansion(&xi, k);
    input.level = level;
    Ok((basis, input))
}

fn lines_level(syn: &SyntheticTriple) -> u64 {
    syn.lines[0].level()
}
