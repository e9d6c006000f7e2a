//! The verbs. Each returns its payload files; nothing here touches the
//! output directory, so two runs can be compared byte for byte.

use std::path::Path;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Value};

use super::basis::{load_eigenbasis, synthetic_basis, ExpansionFile};
use super::cache::cached_ideals;
use super::config::{FamilyChoice, PipelineConfig};
use crate::error::{Error, Result};
use crate::euler_local::{
    consistency_check, default_grid, primitive_characters, render_csv, render_text, root_number, unb_factor,
    LocalFactorInput, PType, UnitTable,
};
use crate::hecke_characters::{Cyclo, CycloField, HeckeChar};
use crate::iwasawa_series::{series_to_json, JsonCoeff, Weight};
use crate::lambda_hecke::{vec_mat, DEFAULT_MAX_ITER};
use crate::padic_core::{CoeffRing, PadicElem};
use crate::tate_curve::{heegner_combine, PointFile, TateCurve, UCoord};
use crate::theta_families::{
    build_g_col, build_g_hida, specialize_family, theta_classical, FamilyExpansion, ThetaSetup,
};
use crate::triple_product::synthetic::SyntheticTriple;

/// One output file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Payload {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Payload {
    pub fn json(name: &str, v: &Value) -> Self {
        let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
        s.push('\n');
        Payload { name: name.into(), bytes: s.into_bytes() }
    }

    pub fn text(name: &str, s: String) -> Self {
        Payload { name: name.into(), bytes: s.into_bytes() }
    }
}

fn pe(x: &PadicElem) -> Value {
    JsonCoeff::to_json(x)
}

/// The exact weight-one expansion Σ η(𝔞) q^{N𝔞} over Q(ζ_M), from the
/// (cached) list of all ideals of norm ≤ q.
fn exact_weight_one(eta: &HeckeChar, q: usize, cache: &Path) -> Result<Vec<String>> {
    let field = eta.group().field().clone();
    let cf = CycloField::new(eta.order().max(1));
    let modulus = *eta.group().modulus();
    let mut a = vec![Cyclo::zero(&cf); q + 1];
    for id in cached_ideals(cache, &field, q as u64)? {
        if field.coprime(&id, &modulus) {
            let n = id.norm() as usize;
            a[n] = a[n].add(&Cyclo::from_root(&cf, &eta.value(&id)?)?);
        }
    }
    Ok(a.iter().map(|c| c.to_string()).collect())
}

fn theta_payload(name: &str, label: &str, eta: &HeckeChar, cfg: &PipelineConfig, cache: &Path) -> Result<Payload> {
    let setup = ThetaSetup::new(eta.clone(), cfg.precision)?;
    let mut weights = serde_json::Map::new();
    for &k in &cfg.theta.weights {
        let g = theta_classical(&setup, k, cfg.qcap)?;
        log::info!("{label}: weight {k} theta to q^{}", cfg.qcap);
        weights.insert(k.to_string(), g.to_json());
    }
    let v = json!({
        "form": label,
        "p": cfg.p,
        "precision": cfg.precision,
        "d_K": cfg.field.d_k,
        "eta": eta.exponents(),
        "level": setup.level(),
        "u_p_vanishes": theta_classical(&setup, 1, cfg.qcap)?.u_p(cfg.p as u64)?.is_zero(),
        "weights": weights,
        "exact_weight_one": exact_weight_one(eta, cfg.qcap, cache)?,
    });
    Ok(Payload::json(name, &v))
}

/// theta_g.json and theta_h.json: the classical theta series of η₁ and η₂.
pub fn cmd_theta(cfg: &PipelineConfig, cache: &Path) -> Result<Vec<Payload>> {
    let v = cfg.validate()?;
    Ok(vec![
        theta_payload("theta_g.json", "g", &v.eta1, cfg, cache)?,
        theta_payload("theta_h.json", "h", &v.eta2, cfg, cache)?,
    ])
}

/// family.json: g_Col or g_Hida with its U_p check and the comparison of
/// its weight-one specialization with the classical theta series.
pub fn cmd_family(cfg: &PipelineConfig) -> Result<Vec<Payload>> {
    let v = cfg.validate()?;
    let setup = Arc::new(ThetaSetup::new(v.eta1.clone(), cfg.precision)?);
    let q = cfg.family.qcap.unwrap_or(cfg.qcap);
    let fam = match cfg.family.kind {
        FamilyChoice::Col => build_g_col(&setup, q, cfg.family.col_cap)?,
        FamilyChoice::Hida => build_g_hida(&setup, q, cfg.family.hida_caps)?,
    };
    let classical = theta_classical(&setup, 1, q)?;
    let spec = specialize_family(&fam, &Weight::Arithmetic { k: 1, eps: None })?.base()?;
    let (kind, expansion) = match &fam.expansion {
        FamilyExpansion::Col(x) => ("col", x.to_json()),
        FamilyExpansion::Hida(x) => ("hida", x.to_json()),
    };
    log::info!("family {kind} to q^{q}");
    let out = json!({
        "kind": kind,
        "p": cfg.p,
        "precision": cfg.precision,
        "level": fam.level,
        "tame_level": fam.tame_level,
        "u_p_vanishes": fam.u_p_vanishes()?,
        "weight_one_is_theta": spec.coeffs() == classical.coeffs(),
        "expansion": expansion,
    });
    Ok(vec![Payload::json("family.json", &out)])
}

/// ordproj.json: coordinates of the input in the loaded basis, their
/// ordinary projection, and the eigen-coordinates of the tagged lines.
pub fn cmd_ordproj(cfg: &PipelineConfig) -> Result<Vec<Payload>> {
    let spec = cfg.ordproj.as_ref().ok_or_else(|| Error::validation("ordproj", "the config has no [ordproj] section"))?;
    let loaded = load_eigenbasis(&cfg.resolve(&spec.basis))?;
    let xi = ExpansionFile::load(&cfg.resolve(&spec.input))?.expansion()?;
    let span = loaded.basis.span();
    let coords = span.coordinates(&xi)?;
    let proj = span.projector(DEFAULT_MAX_ITER)?;
    let ord = vec_mat(&coords, &proj);
    let rest: Vec<PadicElem> = coords.iter().zip(&ord).map(|(a, b)| a.sub_ref(b)).collect();
    let killed = span.up_pow_coords(&rest, cfg.precision as u64).iter().all(|c| c.is_zero());
    let projected = span.combine(&ord);
    let mut eigen = serde_json::Map::new();
    for (i, (label, tag)) in loaded.labels.iter().zip(loaded.basis.tags()).enumerate() {
        if tag.is_some() {
            eigen.insert(label.clone(), pe(&ord[i].mul_ref(span.basis()[i].coeff(1))));
        }
    }
    if let Some(t) = &spec.target {
        if !eigen.contains_key(t) {
            return Err(Error::EigenAmbiguous(format!("no tagged line is labelled {t}")));
        }
    }
    let out = json!({
        "labels": loaded.labels,
        "weight": loaded.weight,
        "coordinates": coords.iter().map(pe).collect::<Vec<_>>(),
        "ordinary_coordinates": ord.iter().map(pe).collect::<Vec<_>>(),
        "eigen_coordinates": eigen,
        "target": spec.target,
        "non_ordinary_part_killed": killed,
        "projected": projected.to_json(),
    });
    Ok(vec![Payload::json("ordproj.json", &out)])
}

/// triple.json: the synthetic triple along (k, 1, 1), both ways round.
pub fn cmd_triple(cfg: &PipelineConfig) -> Result<Vec<Payload>> {
    let t = &cfg.triple;
    let syn = SyntheticTriple::new(cfg.precision, t.qcap, t.lambda_cap, t.target)?;
    let lv = syn.lambda_value()?;
    let mut rows = Vec::new();
    for &k in &t.weights {
        let lam = lv.evaluate(&[syn.point(k)?]) * syn.constant(k)?;
        let cl = syn.value_classical(k)?;
        log::info!("triple at k = {k}");
        rows.push(json!({
            "k": k,
            "lambda_then_specialize": pe(&lam),
            "specialize_then_classical": pe(&cl),
            "agree": lam == cl,
            "zero": lam.is_zero(),
        }));
    }
    let out = json!({
        "p": syn.p,
        "precision": syn.prec,
        "target": t.target,
        "m_level": syn.m_level,
        "lambda_value": series_to_json(&lv),
        "points": rows,
    });
    Ok(vec![Payload::json("triple.json", &out)])
}

/// euler.txt and euler.csv: the Euler-multiplier consistency table.
pub fn cmd_euler(p: u32) -> Result<Vec<Payload>> {
    let report = consistency_check(p, &default_grid(p)?)?;
    log::info!("euler grid: {} rows, {} failures", report.rows.len(), report.failures());
    Ok(vec![Payload::text("euler.txt", render_text(&report)), Payload::text("euler.csv", render_csv(&report))])
}

/// tate.json: q_E, the logs of P and P^±, and the case classification.
pub fn cmd_tate(cfg: &PipelineConfig) -> Result<Vec<Payload>> {
    let spec = cfg.tate.as_ref().ok_or_else(|| Error::validation("tate", "the config has no [tate] section"))?;
    let path = cfg.resolve(&spec.point);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let file = PointFile::from_json(&text)?;
    let (curve, pt) = file.load()?;
    let logs = heegner_combine(&curve, &pt, curve.alpha)?;
    let two = logs.log_p.int_like(2) * logs.log_p;
    let q = crate::tate_curve::Qp2Elem::from_padic(&curve.q)?;
    let out = json!({
        "curve": {
            "p": curve.p,
            "precision": curve.prec,
            "j": curve.j.to_string(),
            "alpha": curve.alpha,
            "ord_q": curve.ord_q(),
            "q_E": UCoord::from_elem(&q),
        },
        "phi": file.phi,
        "log_P": pe(&logs.log_p),
        "log_P_plus": pe(&logs.plus),
        "log_P_minus": pe(&logs.minus),
        "sum_rule": logs.plus + logs.minus == two,
        "classification": logs.classification(),
    });
    Ok(vec![Payload::json("tate.json", &out)])
}

fn check(lines: &mut Vec<String>, name: &str, r: Result<bool>) {
    let (ok, detail) = match r {
        Ok(true) => (true, String::new()),
        Ok(false) => (false, " check failed".to_string()),
        Err(e) => (false, format!(" {e}")),
    };
    lines.push(format!("{} {name}{detail}", if ok { "PASS" } else { "FAIL" }));
}

/// selfcheck.txt: fast built-in checks of each module on fixed data.
pub fn cmd_selfcheck() -> Result<(Vec<Payload>, bool)> {
    let mut lines = Vec::new();
    check(&mut lines, "theta: U_p(g) = 0 for the default instance", (|| {
        let field = Arc::new(crate::quadfield::QuadField::new(7)?);
        let g = Arc::new(crate::quadfield::RayClassGroup::new(&field, &crate::quadfield::Ideal::unit(), 5, 1)?);
        let setup = ThetaSetup::new(HeckeChar::new(&g, vec![1])?, 8)?;
        Ok(theta_classical(&setup, 1, 100)?.u_p(5)?.is_zero())
    })());
    check(&mut lines, "euler: default grid is consistent", (|| {
        Ok(consistency_check(5, &default_grid(5)?)?.failures() == 0)
    })());
    check(&mut lines, "euler: level-one root numbers have |W| = 1", (|| {
        let units = UnitTable::new(5, 1)?;
        let mut ok = true;
        for c in primitive_characters(5, 1)? {
            let w = root_number(&c, &units)?;
            ok &= w.value.mul(&w.value.conj()).is_one();
        }
        Ok(ok)
    })());
    check(&mut lines, "euler: p-new multiplier vanishes at k = 2", (|| {
        let f = unb_factor(&LocalFactorInput::unramified(5, PType::New, 2, BigRational::one()), None)?;
        Ok(f.exact.is_zero())
    })());
    check(&mut lines, "tate: log_qE(q_E) = 0 for X0(11)", (|| {
        let c = TateCurve::from_a_invariants(11, 6, &[0, -1, 1, -10, -20])?;
        Ok(c.log_qe(&crate::tate_curve::Qp2Elem::from_padic(&c.q)?)?.is_zero())
    })());
    check(&mut lines, "cli: synthetic basis loads", (|| {
        let (b, _) = synthetic_basis(8, 40, 2, false)?;
        Ok(b.load()?.basis.dim() == 3)
    })());
    let ok = lines.iter().all(|l| l.starts_with("PASS"));
    let mut text = lines.join("\n");
    text.push('\n');
    Ok((vec![Payload::text("selfcheck.txt", text)], ok))
}
