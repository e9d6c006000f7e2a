//! The eleven acceptance criteria, one PASS/FAIL line each.
//!
//! Each criterion runs against an oracle that is independent of the code
//! path under test where one exists. Wall-clock budgets are compared as
//! measured in the current profile. Set `ACCEPTANCE_STRICT=1` to turn any
//! FAIL into a test failure.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use padic_theta::cli_io::{load_eigenbasis, synthetic_basis, ExpansionFile};
use padic_theta::euler_local::{
    consistency_check, default_grid, primitive_characters, root_number, unb_factor, LocalFactorInput, PType, UnitTable,
};
use padic_theta::hecke_characters::{Cyclo, CycloField, DirichletChar, HeckeChar, Root};
use padic_theta::iwasawa_series::Weight;
use padic_theta::lambda_hecke::{mat_mul, multiplicative_expansion, ord_project, vec_mat, OrdinarySpan, QExpansion, DEFAULT_MAX_ITER};
use padic_theta::padic_core::PadicElem;
use padic_theta::quadfield::{Ideal, QuadField, RayClassGroup};
use padic_theta::tate_curve::{heegner_combine, j_invariant, tate_period, HeegnerPointData, PhiMeta, Qp2Elem, TateCurve};
use padic_theta::theta_families::{
    build_g_col, build_g_hida, specialize_family, theta_classical, theta_exact, FamilyExpansion, ThetaSetup,
    DEFAULT_COL_CAP, DEFAULT_HIDA_CAPS,
};
use padic_theta::triple_product::synthetic::SyntheticTriple;
use padic_theta::triple_product::{eigen_project, EigenData, EigenTag, PCase};

type Check = std::result::Result<(), String>;

const P: u32 = 5;
const N: u32 = 8;
const Q: usize = 200;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

struct Outcome {
    id: usize,
    name: &'static str,
    pass: bool,
}

fn criterion(id: usize, name: &'static str, budget: Duration, f: impl FnOnce() -> Check) -> Outcome {
    let t = Instant::now();
    let r = f();
    let dt = t.elapsed();
    let (pass, note) = match r {
        Ok(()) if dt <= budget => (true, String::new()),
        Ok(()) => (false, " (over budget)".to_string()),
        Err(m) => (false, format!(" ({m})")),
    };
    println!(
        "{} [{id:>2}] {name}: {:.2}s of {:.0}s{note}",
        if pass { "PASS" } else { "FAIL" },
        dt.as_secs_f64(),
        budget.as_secs_f64()
    );
    Outcome { id, name, pass }
}

fn default_setup() -> Arc<ThetaSetup> {
    let k = Arc::new(QuadField::new(7).unwrap());
    let g = Arc::new(RayClassGroup::new(&k, &Ideal::unit(), P as u64, 1).unwrap());
    Arc::new(ThetaSetup::new(HeckeChar::new(&g, vec![1]).unwrap(), N).unwrap())
}

fn z(n: i128) -> PadicElem {
    PadicElem::from_int(P, N, n)
}

fn rand_elem(rng: &mut ChaCha8Rng) -> PadicElem {
    let m = 5i128.pow(N);
    PadicElem::new(P, N, rng.gen_range(0..m), rng.gen_range(0..m))
}

// 1. Weight-one theta for the cubic class character of Q(√−23).

/// Representation numbers of the three reduced forms of discriminant −23,
/// by brute force over (x, y).
fn form_counts(q: usize) -> [Vec<i64>; 3] {
    let forms = [(1i64, 1i64, 6i64), (2, 1, 3), (2, -1, 3)];
    let b = 40i64;
    forms.map(|(a, bb, c)| {
        let mut r = vec![0i64; q + 1];
        for x in -b..=b {
            for y in -b..=b {
                let n = a * x * x + bb * x * y + c * y * y;
                if n > 0 && n as usize <= q {
                    r[n as usize] += 1;
                }
            }
        }
        r
    })
}

fn theta_d23() -> Check {
    let k = Arc::new(QuadField::new(23).map_err(err)?);
    let g = Arc::new(RayClassGroup::new(&k, &Ideal::unit(), P as u64, 0).map_err(err)?);
    let eta = HeckeChar::new(&g, vec![1]).map_err(err)?;
    let a = theta_exact(&eta, Q).map_err(err)?;
    let cf = CycloField::new(3);
    let r = form_counts(Q);
    let half = BigRational::new(1.into(), 2.into());
    // which of the two non-principal classes is sent to ζ₃ is a labelling choice
    let oracle = |z1: i64| -> Vec<Cyclo> {
        (0..=Q)
            .map(|n| {
                if n == 0 {
                    return Cyclo::zero(&cf);
                }
                Cyclo::from_int(&cf, r[0][n])
                    .add(&Cyclo::zeta_pow(&cf, z1).mul(&Cyclo::from_int(&cf, r[1][n])))
                    .add(&Cyclo::zeta_pow(&cf, 2 * z1).mul(&Cyclo::from_int(&cf, r[2][n])))
                    .scale(&half)
            })
            .collect()
    };
    ensure(a == oracle(1) || a == oracle(2), || "theta differs from the form-count oracle".into())?;
    // T_ℓ eigenform of character (−23/·): a_{ℓn} = a_ℓ a_n − χ(ℓ) a_{n/ℓ}
    for l in (2..=50u64).filter(|&l| (2..l).all(|d| l % d != 0)) {
        let chi = Cyclo::from_int(&cf, k.kronecker(l) as i64);
        for n in 1..=Q / l as usize {
            let mut rhs = a[l as usize].mul(&a[n]);
            if n % l as usize == 0 {
                rhs = rhs.sub(&chi.mul(&a[n / l as usize]));
            }
            ensure(a[l as usize * n] == rhs, || format!("Hecke relation fails at l={l} n={n}"))?;
        }
    }
    Ok(())
}

// 2. U_p(g) = 0 and e^ord of both families vanishes.

fn infinite_slope() -> Check {
    let s = default_setup();
    let g = theta_classical(&s, 1, Q).map_err(err)?;
    ensure(g.u_p(P as u64).map_err(err)?.is_zero(), || "U_p(g) ≠ 0".into())?;
    ensure(!g.is_zero(), || "g is zero".into())?;
    let col = build_g_col(&s, Q, DEFAULT_COL_CAP).map_err(err)?;
    let hida = build_g_hida(&s, Q, DEFAULT_HIDA_CAPS).map_err(err)?;
    let (FamilyExpansion::Col(xc), FamilyExpansion::Hida(xh)) = (&col.expansion, &hida.expansion) else {
        return Err("unexpected family kinds".into());
    };
    ensure(ord_project(xc, P as u64, DEFAULT_MAX_ITER).map_err(err)?.is_zero(), || "e^ord(g_Col) ≠ 0".into())?;
    ensure(ord_project(xh, P as u64, DEFAULT_MAX_ITER).map_err(err)?.is_zero(), || "e^ord(g_Hida) ≠ 0".into())
}

// 3 and 4. Coleman interpolation and Hida/Coleman agreement.

fn arith(k: i64) -> Weight {
    Weight::Arithmetic { k, eps: None }
}

fn coleman_interpolation() -> Check {
    let s = default_setup();
    let col = build_g_col(&s, Q, DEFAULT_COL_CAP).map_err(err)?;
    // the disc has radius parameter a = 0, so 1 + h·p^a = 1 + h
    for h in 0..3 {
        let k = 1 + h;
        let spec = specialize_family(&col, &arith(k)).map_err(err)?.base().map_err(err)?;
        let classical = theta_classical(&s, k, Q).map_err(err)?;
        ensure(spec == classical, || format!("k={k}"))?;
    }
    Ok(())
}

fn hida_coleman() -> Check {
    let s = default_setup();
    let col = build_g_col(&s, Q, DEFAULT_COL_CAP).map_err(err)?;
    let hida = build_g_hida(&s, Q, DEFAULT_HIDA_CAPS).map_err(err)?;
    for k in 1..=3 {
        let a = specialize_family(&hida, &Weight::GroupAlgebra { k, twist: None }).map_err(err)?;
        let b = specialize_family(&col, &arith(k)).map_err(err)?;
        ensure(a == b, || format!("k={k}"))?;
    }
    Ok(())
}

// 5. The ordinary projector.

/// A normalized eigenform with U_p-eigenvalue α and arbitrary prime-to-p
/// eigenvalues.
fn eigenline(alpha: PadicElem, cap: usize, seed: i128) -> QExpansion<PadicElem> {
    let ap = |l: u64| Ok(if l == 5 { alpha } else { z((l as i128 * seed + 3) % 17) });
    let eps = |l: u64| Ok(if l == 5 { z(0) } else { z(l as i128) });
    QExpansion::new(multiplicative_expansion(cap, &z(0), ap, eps).unwrap(), 35, DirichletChar::trivial(1), None).unwrap()
}

/// M^e by repeated squaring on 2×2 matrices, written out by hand.
fn pow2(m: [[PadicElem; 2]; 2], mut e: u64) -> [[PadicElem; 2]; 2] {
    let mul = |a: [[PadicElem; 2]; 2], b: [[PadicElem; 2]; 2]| {
        let mut c = [[z(0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        c
    };
    let (mut acc, mut base) = ([[z(1), z(0)], [z(0), z(1)]], m);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, base);
        }
        base = mul(base, base);
        e >>= 1;
    }
    acc
}

fn ordinary_projector() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a1 = eigenline(z(2), 300, 1);
    let a2 = eigenline(z(7), 300, 4);
    let b1 = eigenline(z(5), 300, 6);
    let b2 = eigenline(z(15), 300, 9);
    let va = a1.v_p(5).map_err(err)?.truncate(300);
    let span = OrdinarySpan::new(vec![a1, a2, b1, b2, va], 5).map_err(err)?;
    let pm = span.projector(DEFAULT_MAX_ITER).map_err(err)?;
    ensure(mat_mul(&pm, &pm) == pm, || "e∘e ≠ e on the matrix".into())?;
    for i in 0..50 {
        let c: Vec<PadicElem> = (0..span.dim()).map(|_| rand_elem(&mut rng)).collect();
        let cap = rng.gen_range(150..=300);
        let xi = span.combine(&c).truncate(cap);
        let e1 = span.project(&xi, DEFAULT_MAX_ITER).map_err(err)?;
        let e2 = span.project(&e1, DEFAULT_MAX_ITER).map_err(err)?;
        ensure(e1 == e2, || format!("e∘e ≠ e on input {i}"))?;
    }

    // the shipped fixtures: ξ = 2E₀ + 3E₁ + 4E₂ + (depleted kernel)
    let fx = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let loaded = load_eigenbasis(&fx.join("basis.json")).map_err(err)?;
    let xi = ExpansionFile::load(&fx.join("xi.json")).map_err(err)?.expansion().map_err(err)?;
    let span = loaded.basis.span();
    let c = span.coordinates(&xi).map_err(err)?;
    let ord = vec_mat(&c, &span.projector(DEFAULT_MAX_ITER).map_err(err)?);
    let rest: Vec<PadicElem> = c.iter().zip(&ord).map(|(a, b)| *a - *b).collect();
    ensure(rest.iter().any(|x| !x.is_zero()), || "the fixture has no non-ordinary part".into())?;
    for m in 8..=16 {
        ensure(span.up_pow_coords(&rest, m).iter().all(|x| x.is_zero()), || format!("U_p^{m}(1−e)ξ ≠ 0"))?;
    }

    // span{ξ₀, V_p ξ₀}: U_p has matrix [[α, 0], [1, 0]] on rows, and e is
    // its power of exponent (p²−1)p^{N−1}, which fixes every unit α
    let alpha = z(2);
    let xi0 = eigenline(alpha, 400, 5);
    let v = xi0.v_p(5).map_err(err)?.truncate(400);
    let span = OrdinarySpan::new(vec![xi0.clone(), v.clone()], 5).map_err(err)?;
    let e = pow2([[alpha, z(0)], [z(1), z(0)]], 24 * 5u64.pow(N - 1));
    let oracle = xi0.scale_by(&e[1][0]).add(&v.scale_by(&e[1][1])).truncate(400);
    ensure(span.project(&v, DEFAULT_MAX_ITER).map_err(err)? == oracle, || "e(V_p ξ₀) differs from the 2×2 oracle".into())?;
    ensure(e[1][0] == alpha.inv().map_err(err)?, || "2×2 oracle is not α⁻¹".into())
}

// 6. Euler-factor consistency over the grid.

fn euler_consistency() -> Check {
    let grid = default_grid(P).map_err(err)?;
    let report = consistency_check(P, &grid).map_err(err)?;
    ensure(report.failures() == 0, || format!("{} failing rows", report.failures()))?;
    let mut seen = BTreeMap::new();
    for r in &report.rows {
        *seen.entry((r.k, r.n)).or_insert(0) += 1;
        let lhs = match &r.root_number {
            Some(w) => r.unb.mul(w),
            None => r.unb.clone(),
        };
        let rhs = Cyclo::from_rational(lhs.field(), r.e_p.clone());
        ensure(lhs == rhs, || format!("row k={} n={} a_p={}", r.k, r.n, r.a_p))?;
    }
    for k in [2i64, 4, 6] {
        for n in 0..=2 {
            ensure(seen.contains_key(&(k, n)), || format!("grid misses k={k} n={n}"))?;
        }
    }
    Ok(())
}

// 7. The exceptional zero at k = 2.

fn exceptional_zero() -> Check {
    for ap in [BigRational::one(), -BigRational::one()] {
        let f = unb_factor(&LocalFactorInput::unramified(P, PType::New, 2, ap.clone()), None).map_err(err)?;
        ensure(f.exact.is_zero(), || format!("multiplier at a_p={ap} is {}", f.rational))?;
    }
    let syn = SyntheticTriple::new(N, 60, 7, 0).map_err(err)?;
    let a = syn.value_lambda_then_specialize(2).map_err(err)?;
    let b = syn.value_classical(2).map_err(err)?;
    ensure(a.is_zero() && b.is_zero(), || format!("pipeline value at (2,1,1) is {a:?} / {b:?}"))
}

// 8. Root numbers.

fn root_numbers() -> Check {
    let q1 = (P as i64).pow(2) - 1;
    let units = UnitTable::new(P, 1).map_err(err)?;
    let mut signs = Vec::new();
    for c in primitive_characters(P, 1).map_err(err)? {
        if !c.trivial_on_qp(&units).map_err(err)? {
            continue;
        }
        let w = root_number(&c, &units).map_err(err)?.value;
        let w = w.to_rational().ok_or_else(|| format!("W not rational for {c:?}"))?;
        ensure(w == BigRational::one() || w == -BigRational::one(), || format!("W = {w}"))?;
        // W(η) = η⁻¹(α) with α = ζ^{(p+1)/2}
        let a = c.tame_exponent() as i64;
        let e = Root::new(-(a * (P as i64 + 1) / 2) as i128, q1 as u64);
        let closed = if e.is_one() { BigRational::one() } else { -BigRational::one() };
        ensure(w == closed, || format!("closed form fails for a={a}"))?;
        signs.push((a / (P as i64 - 1), w));
    }
    ensure(signs.len() == P as usize, || format!("{} characters trivial on Q_p^×", signs.len()))?;
    // the sign depends only on the parity of j in the twist ζ ↦ ζ^{(p−1)j}
    for (j1, w1) in &signs {
        for (j2, w2) in &signs {
            let expect = if (j1 - j2) % 2 == 0 { w2.clone() } else { -w2.clone() };
            ensure(*w1 == expect, || format!("parity law fails for j={j1},{j2}"))?;
        }
    }
    for n in [1u32, 2] {
        let units = UnitTable::new(P, n).map_err(err)?;
        for c in primitive_characters(P, n).map_err(err)? {
            let w = root_number(&c, &units).map_err(err)?.value;
            ensure(w.mul(&w.conj()).is_one(), || format!("W·W̄ ≠ 1 for {c:?}"))?;
        }
    }
    Ok(())
}

// 9. The Tate curve.

fn tate_module() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..20 {
        let v = 1 + (i % 3) as u32;
        let mut num: i64 = rng.gen_range(-100_000..100_000);
        while num == 0 || num % P as i64 == 0 {
            num += 1;
        }
        let mut den: i64 = rng.gen_range(1..1000);
        while den % P as i64 == 0 {
            den += 1;
        }
        let j = BigRational::new(BigInt::from(num), BigInt::from(den) * BigInt::from(P).pow(v));
        let q = tate_period(P, N, &j).map_err(err)?;
        let back = j_invariant(&q).map_err(err)?;
        ensure(back.eq_rel(&Qp2Elem::from_rational(P, N, &j).map_err(err)?, N), || format!("j = {j}"))?;
        let c = TateCurve::from_j(P, N, j.clone(), 1).map_err(err)?;
        ensure(c.log_qe(&Qp2Elem::from_padic(&c.q).map_err(err)?).map_err(err)?.is_zero(), || format!("log q_E ≠ 0 at j = {j}"))?;
    }
    // quadratic φ: u with σ(u) = u^{φ₁(p)} up to torsion
    let quad = |phi1: i64| PhiMeta {
        label: format!("quadratic phi1(p)={phi1}"),
        quadratic: true,
        phi1_p: Some(phi1),
        d1: Some(-3),
        d2: Some(-23),
        check_frobenius: true,
    };
    let point = |phi1: i64| -> Qp2Elem {
        if phi1 == 1 {
            Qp2Elem::new(2, PadicElem::new(P, N, 7, 0)).unwrap()
        } else {
            let x = PadicElem::new(P, N, 7, 0) * PadicElem::new(P, N, 1, 5);
            Qp2Elem::new(0, x * x.conj().inv().unwrap()).unwrap()
        }
    };
    for alpha in [1i64, -1] {
        let c = TateCurve::from_j(P, N, BigRational::new(BigInt::from(-7), BigInt::from(5)), alpha).map_err(err)?;
        for phi1 in [1i64, -1] {
            let pt = HeegnerPointData::with_galois_frobenius(point(phi1), quad(phi1));
            pt.validate(&c).map_err(err)?;
            let logs = heegner_combine(&c, &pt, c.alpha).map_err(err)?;
            let two_l = logs.log_p.int_like(2) * logs.log_p;
            let zero = two_l.zero_like();
            let want = if phi1 * alpha == 1 { (two_l, zero) } else { (zero, two_l) };
            ensure(!logs.log_p.is_zero() && (logs.plus, logs.minus) == want, || format!("case α={alpha} φ₁={phi1}"))?;
        }
    }
    Ok(())
}

// 10. Linearity and commutation of the triple pipeline.

fn pipeline_linearity() -> Check {
    let (file, _) = synthetic_basis(N, 60, 2, true).map_err(err)?;
    let loaded = file.load().map_err(err)?;
    let basis = &loaded.basis;
    let tag: EigenTag<PadicElem> = basis.tags()[0].clone().ok_or("untagged target")?;
    let target = EigenData {
        label: "E(1,1)".into(),
        tame_level: 7,
        case: PCase::New { s: 1 },
        weight: 2,
        tag,
        lambda_n: z(1),
        eta_f: z(3),
        ordinary: true,
        trivial_character: true,
        lambda_e: None,
    };
    let constant = z(7);
    let span = basis.span();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for i in 0..10 {
        let cx: Vec<PadicElem> = (0..span.dim()).map(|_| rand_elem(&mut rng)).collect();
        let cy: Vec<PadicElem> = (0..span.dim()).map(|_| rand_elem(&mut rng)).collect();
        let (x, y) = (span.combine(&cx), span.combine(&cy));
        let (a, b) = (rand_elem(&mut rng), rand_elem(&mut rng));
        let lhs = eigen_project(&x.scale_by(&a).add(&y.scale_by(&b)), &target, basis, &constant).map_err(err)?;
        let px = eigen_project(&x, &target, basis, &constant).map_err(err)?;
        let py = eigen_project(&y, &target, basis, &constant).map_err(err)?;
        ensure(lhs == a * px + b * py, || format!("pair {i}"))?;
    }
    let syn = SyntheticTriple::new(N, 60, 7, 0).map_err(err)?;
    for k in [2i64, 4, 6] {
        let a = syn.value_lambda_then_specialize(k).map_err(err)?;
        let b = syn.value_classical(k).map_err(err)?;
        ensure(a == b, || format!("k={k}: {a:?} vs {b:?}"))?;
    }
    Ok(())
}

// 11. Byte reproducibility of the CLI.

fn reproducibility() -> Check {
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/config.toml");
    let tmp = tempfile::tempdir().map_err(err)?;
    for verb in ["theta", "family", "ordproj", "triple", "euler", "tate", "selfcheck"] {
        let mut outs = Vec::new();
        for (run, threads) in [(0, "1"), (1, "4")] {
            let out = tmp.path().join(format!("{verb}-{run}"));
            let st = Command::new(env!("CARGO_BIN_EXE_padic-theta"))
                .args([verb, "--config", cfg.to_str().unwrap(), "--threads", threads, "--out"])
                .arg(&out)
                .output()
                .map_err(err)?;
            ensure(st.status.success(), || format!("{verb} exited with {:?}", st.status.code()))?;
            let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&out)
                .map_err(err)?
                .filter_map(|e| e.ok())
                .filter(|e| e.file_type().map(|t| t.is_file()).unwrap_or(false))
                .map(|e| e.file_name().into_string().unwrap())
                .filter(|n| n != "padic-theta.log")
                .map(|n| {
                    let b = std::fs::read(out.join(&n)).unwrap();
                    (n, b)
                })
                .collect();
            files.sort();
            outs.push(files);
        }
        ensure(outs[0] == outs[1], || format!("{verb} payloads differ"))?;
    }
    Ok(())
}

#[test]
fn acceptance() {
    let s = Duration::from_secs;
    let results = [
        criterion(1, "theta correctness", s(1), theta_d23),
        criterion(2, "infinite slope", s(1), infinite_slope),
        criterion(3, "Coleman interpolation", s(5), coleman_interpolation),
        criterion(4, "Hida/Coleman agreement", s(5), hida_coleman),
        criterion(5, "ordinary projector", s(10), ordinary_projector),
        criterion(6, "Euler-factor consistency", s(5), euler_consistency),
        criterion(7, "exceptional zero", s(10), exceptional_zero),
        criterion(8, "root numbers", s(30), root_numbers),
        criterion(9, "Tate module", s(5), tate_module),
        criterion(10, "pipeline linearity and commutation", s(60), pipeline_linearity),
        criterion(11, "reproducibility", s(60), reproducibility),
    ];
    let failed: Vec<String> = results.iter().filter(|r| !r.pass).map(|r| format!("{} {}", r.id, r.name)).collect();
    println!("acceptance: {} of {} pass", results.len() - failed.len(), results.len());
    if std::env::var_os("ACCEPTANCE_STRICT").is_some() {
        assert!(failed.is_empty(), "failing criteria: {failed:?}");
    }
}
