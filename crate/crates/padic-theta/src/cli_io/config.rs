//! The TOML pipeline configuration and the standing-assumption checks.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hecke_characters::{phi_psi_split, CharSpec, HeckeChar};
use crate::quadfield::{is_prime, prime_factors, Ideal, OkElem, QuadField, RayClassGroup};

fn default_precision() -> u32 {
    8
}
fn default_qcap() -> usize {
    200
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub p: u32,
    #[serde(default = "default_precision")]
    pub precision: u32,
    #[serde(default = "default_qcap")]
    pub qcap: usize,
    pub field: FieldSpec,
    pub characters: CharacterSpec,
    #[serde(default)]
    pub f: TargetSpec,
    #[serde(default)]
    pub family: FamilySpec,
    #[serde(default)]
    pub theta: ThetaSpec,
    #[serde(default)]
    pub ordproj: Option<OrdprojSpec>,
    #[serde(default)]
    pub triple: TripleSpec,
    #[serde(default)]
    pub tate: Option<TateSpec>,
    /// Directory the config was read from; relative paths resolve against it.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub d_k: u64,
}

/// Paths of the η₁ and η₂ spec files; η₂ defaults to η₁^{−1}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterSpec {
    pub eta1: PathBuf,
    #[serde(default)]
    pub eta2: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub n_f: u64,
    #[serde(default = "three")]
    pub eta_f: i64,
}

fn three() -> i64 {
    3
}

impl Default for TargetSpec {
    fn default() -> Self {
        TargetSpec { n_f: 1, eta_f: 3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyChoice {
    Col,
    Hida,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    #[serde(default = "default_kind")]
    pub kind: FamilyChoice,
    /// q-cap of the family (defaults to the global cap).
    #[serde(default)]
    pub qcap: Option<usize>,
    #[serde(default = "default_col_cap")]
    pub col_cap: usize,
    #[serde(default = "default_hida_caps")]
    pub hida_caps: [usize; 2],
}

fn default_kind() -> FamilyChoice {
    FamilyChoice::Hida
}
fn default_col_cap() -> usize {
    crate::theta_families::DEFAULT_COL_CAP
}
fn default_hida_caps() -> [usize; 2] {
    crate::theta_families::DEFAULT_HIDA_CAPS
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec { kind: default_kind(), qcap: None, col_cap: default_col_cap(), hida_caps: default_hida_caps() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaSpec {
    #[serde(default = "default_weights")]
    pub weights: Vec<i64>,
}

fn default_weights() -> Vec<i64> {
    vec![1]
}

impl Default for ThetaSpec {
    fn default() -> Self {
        ThetaSpec { weights: default_weights() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrdprojSpec {
    pub basis: PathBuf,
    pub input: PathBuf,
    /// Label of the target line for the eigen-coordinate.
    #[serde(default)]
    pub target: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleSpec {
    #[serde(default = "default_target")]
    pub target: usize,
    #[serde(default = "default_lambda_cap")]
    pub lambda_cap: usize,
    #[serde(default = "default_triple_q")]
    pub qcap: usize,
    #[serde(default = "default_triple_weights")]
    pub weights: Vec<i64>,
}

fn default_target() -> usize {
    0
}
fn default_lambda_cap() -> usize {
    7
}
fn default_triple_q() -> usize {
    60
}
fn default_triple_weights() -> Vec<i64> {
    vec![2, 4, 6]
}

impl Default for TripleSpec {
    fn default() -> Self {
        TripleSpec {
            target: default_target(),
            lambda_cap: default_lambda_cap(),
            qcap: default_triple_q(),
            weights: default_triple_weights(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TateSpec {
    pub point: PathBuf,
}

/// The checked arithmetic data of a configuration.
#[derive(Clone, Debug)]
pub struct Validated {
    pub field: Arc<QuadField>,
    pub group: Arc<RayClassGroup>,
    pub eta1: HeckeChar,
    pub eta2: HeckeChar,
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let loc = match e.span() {
                Some(s) => {
                    let line = text[..s.start].matches('\n').count() + 1;
                    format!("line {line}")
                }
                None => "config".to_string(),
            };
            Error::parse(loc, e.message().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn char_spec(&self, path: &Path) -> Result<CharSpec> {
        let path = self.resolve(path);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        CharSpec::from_json(&text)
    }

    /// All standing assumptions, each failure naming its clause:
    /// "p prime", "field", "p inert", "N_f squarefree", "N_f coprime to d_K",
    /// "Heegner parity", "conductor shape", "split c", "eta != eta^sigma"
    /// and "self-duality".
    pub fn validate(&self) -> Result<Validated> {
        let p = self.p as u64;
        if p < 3 || !is_prime(p) {
            return Err(Error::validation("p prime", format!("p = {p} is not an odd prime")));
        }
        if self.precision == 0 || self.precision > crate::padic_core::max_precision(self.p) {
            return Err(Error::validation("precision", format!("N = {} is out of range", self.precision)));
        }
        let field = Arc::new(QuadField::new(self.field.d_k)?);
        let d = self.field.d_k;
        if field.kronecker(p) != -1 {
            return Err(Error::validation("p inert", format!("{p} is not inert in Q(√−{d})")));
        }
        let n_f = self.f.n_f;
        let primes = prime_factors(n_f);
        if n_f == 0 || primes.iter().any(|l| n_f % (l * l) == 0) {
            return Err(Error::validation("N_f squarefree", format!("N_f = {n_f}")));
        }
        if n_f.gcd(&d) != 1 {
            return Err(Error::validation("N_f coprime to d_K", format!("gcd({n_f}, {d}) ≠ 1")));
        }
        let inert = primes.iter().filter(|&&l| field.kronecker(l) == -1).count();
        if inert % 2 != 0 {
            return Err(Error::validation("Heegner parity", format!("N_f = {n_f} has {inert} inert prime divisors")));
        }
        let spec1 = self.char_spec(&self.characters.eta1)?;
        let spec2 = match &self.characters.eta2 {
            Some(path) => Some(self.char_spec(path)?),
            None => None,
        };
        for spec in std::iter::once(&spec1).chain(spec2.as_ref()) {
            if spec.d_k != d {
                return Err(Error::validation("field", format!("character over d_K = {} in a d_K = {d} run", spec.d_k)));
            }
        }
        if spec2.as_ref().is_some_and(|s2| (s2.c0, s2.r) != (spec1.c0, spec1.r)) {
            return Err(Error::validation("conductor shape", "η₁ and η₂ need the same modulus c·p^r"));
        }
        let c0 = Ideal::from_rep(&spec1.c0);
        let c = c0.norm().isqrt() as u64;
        if c == 0 || c0 != field.principal(&OkElem::int(c as i128)) {
            return Err(Error::validation("conductor shape", "the tame part of the modulus must be c·O_K with c ∈ Z"));
        }
        if spec1.r == 0 || c.gcd(&(p * d * n_f)) != 1 {
            return Err(Error::validation(
                "conductor shape",
                format!("need r ≥ 1 and (c, p·d_K·N_f) = 1; got c = {c}, r = {}", spec1.r),
            ));
        }
        if let Some(l) = prime_factors(c).into_iter().find(|&l| field.kronecker(l) != 1) {
            return Err(Error::validation("split c", format!("{l} | c is not split in K")));
        }
        let group = Arc::new(RayClassGroup::new(&field, &c0, p, spec1.r)?);
        let eta1 = HeckeChar::new(&group, spec1.generator_images.clone())?;
        let eta2 = match &spec2 {
            Some(s2) => HeckeChar::new(&group, s2.generator_images.clone())?,
            None => eta1.pow(-1),
        };
        for (name, eta) in [("eta1", &eta1), ("eta2", &eta2)] {
            if !eta.is_primitive()? {
                return Err(Error::validation("conductor shape", format!("{name} is not primitive of conductor c·p^r")));
            }
            if eta.is_conj_invariant()? {
                return Err(Error::validation("eta != eta^sigma", format!("{name} is induced from a Dirichlet character")));
            }
        }
        phi_psi_split(&eta1, &eta2).map_err(|e| match e {
            Error::NotSelfDual(m) => Error::validation("self-duality", m),
            other => other,
        })?;
        Ok(Validated { field, group, eta1, eta2 })
    }
}
