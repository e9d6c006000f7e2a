use super::*;
use crate::lambda_hecke::{ColDiamond, HidaDiamond, WeightDiamond};
use crate::quadfield::RayClassGroup;

const PREC: u32 = 8;

fn default_setup() -> Arc<ThetaSetup> {
    let k = Arc::new(QuadField::new(7).unwrap());
    let g = Arc::new(RayClassGroup::new(&k, &Ideal::unit(), 5, 1).unwrap());
    let eta = HeckeChar::new(&g, vec![1]).unwrap();
    Arc::new(ThetaSetup::new(eta, PREC).unwrap())
}

fn arith(k: i64) -> Weight {
    Weight::Arithmetic { k, eps: None }
}

#[test]
fn validation_branches() {
    let k = Arc::new(QuadField::new(7).unwrap());
    let g = Arc::new(RayClassGroup::new(&k, &Ideal::unit(), 5, 1).unwrap());
    let err = ThetaSetup::new(HeckeChar::new(&g, vec![3]).unwrap(), PREC).unwrap_err();
    assert!(matches!(err, Error::ValidationFailed { ref clause, .. } if clause == "eta != eta^sigma"), "{err:?}");
    let g0 = Arc::new(RayClassGroup::new(&k, &Ideal::unit(), 5, 0).unwrap());
    let err = ThetaSetup::new(HeckeChar::trivial(&g0), PREC).unwrap_err();
    assert!(matches!(err, Error::ValidationFailed { ref clause, .. } if clause == "p | c"));
    let k23 = Arc::new(QuadField::new(23).unwrap());
    let g23 = Arc::new(RayClassGroup::new(&k23, &Ideal::unit(), 3, 1).unwrap());
    let err = ThetaSetup::new(HeckeChar::trivial(&g23), PREC).unwrap_err();
    assert!(matches!(err, Error::ValidationFailed { ref clause, .. } if clause == "p inert"));
}

#[test]
fn exact_weight_one_theta_for_d23() {
    let k = Arc::new(QuadField::new(23).unwrap());
    let g = Arc::new(RayClassGroup::new(&k, &Ideal::unit(), 5, 0).unwrap());
    let eta = HeckeChar::new(&g, vec![1]).unwrap();
    let a = theta_exact(&eta, 30).unwrap();
    let cf = a[1].field().clone();
    let int = |n: i64| Cyclo::from_int(&cf, n);
    assert_eq!((a[0].clone(), a[1].clone(), a[2].clone(), a[3].clone(), a[4].clone()), (int(0), int(1), int(-1), int(-1), int(0)));
    // a_2² − a_4 = χ(2)
    assert_eq!(a[2].mul(&a[2]).sub(&a[4]), int(1));
}

#[test]
fn level_and_characters() {
    let s = default_setup();
    assert_eq!(s.level(), 175);
    assert_eq!(s.tame_level(), 7);
    let chi = s.chi_g().unwrap();
    // χ_g is odd: ε_K is odd and η|_Q is even on (Z/5)^× / ±1
    assert_eq!(chi.parity(), -1);
    let g1 = theta_classical(&s, 1, 50).unwrap();
    assert_eq!(g1.nebentypus(&s.emb).unwrap().unwrap(), chi);
}

#[test]
fn theta_is_killed_by_u_p() {
    let s = default_setup();
    let g = theta_classical(&s, 1, DEFAULT_Q).unwrap();
    assert!(g.u_p(5).unwrap().is_zero());
    assert_eq!(*g.coeff(1), PadicElem::one(5, PREC));
    assert!(build_g_col(&s, 60, DEFAULT_COL_CAP).unwrap().u_p_vanishes().unwrap());
    assert!(build_g_hida(&s, 60, DEFAULT_HIDA_CAPS).unwrap().u_p_vanishes().unwrap());
}

#[test]
fn classical_theta_is_a_hecke_eigenform() {
    let s = default_setup();
    for k in [1i64, 2, 5] {
        let g = theta_classical(&s, k, DEFAULT_Q).unwrap();
        let neb = g.nebentypus(&s.emb).unwrap().unwrap();
        for l in [2u64, 3, 11, 13, 17] {
            let t = g.hecke_t_classical(l, &neb, k, &s.emb).unwrap();
            let lhs = g.truncate(t.cap()).scale_by(g.coeff(l as usize));
            assert_eq!(t, lhs, "k={k} l={l}");
        }
    }
}

#[test]
fn coleman_interpolation() {
    let s = default_setup();
    let f = build_g_col(&s, 100, DEFAULT_COL_CAP).unwrap();
    let FamilyExpansion::Col(x) = &f.expansion else { unreachable!() };
    assert_eq!(x.coeff(1).coeffs()[0].to_base().unwrap(), PadicElem::one(5, PREC));
    assert!(x.coeff(1).coeffs()[1..].iter().all(|c| c.is_zero()));
    for h in 0..3 {
        let k = 1 + h;
        let spec = specialize_family(&f, &arith(k)).unwrap().base().unwrap();
        assert_eq!(spec, theta_classical(&s, k, 100).unwrap(), "k={k}");
    }
    let small = build_g_col(&s, 20, 4).unwrap();
    assert!(matches!(specialize_family(&small, &arith(2)), Err(Error::PrecisionLoss(_))));
}

#[test]
fn hida_agrees_with_coleman() {
    let s = default_setup();
    let col = build_g_col(&s, 100, DEFAULT_COL_CAP).unwrap();
    let hida = build_g_hida(&s, 100, DEFAULT_HIDA_CAPS).unwrap();
    for k in 1..=3 {
        let a = specialize_family(&hida, &Weight::GroupAlgebra { k, twist: None }).unwrap();
        let b = specialize_family(&col, &arith(k)).unwrap();
        assert_eq!(a, b, "k={k}");
    }
}

#[test]
fn specialization_commutes_with_hecke() {
    let s = default_setup();
    let col = build_g_col(&s, 100, DEFAULT_COL_CAP).unwrap();
    let hida = build_g_hida(&s, 100, DEFAULT_HIDA_CAPS).unwrap();
    let (FamilyExpansion::Col(xc), FamilyExpansion::Hida(xh)) = (&col.expansion, &hida.expansion) else { unreachable!() };
    let cd = ColDiamond { shape: xc.coeff(0).shape().clone(), prec: PREC, p: 5, a: 0 };
    let hd = HidaDiamond { shape: xh.coeff(0).shape().clone(), prec: PREC, p: 5 };
    for k in [2i64, 3] {
        let wd = WeightDiamond { p: 5, prec: PREC, k };
        let gk = theta_classical(&s, k, 100).unwrap();
        let classical = gk.hecke_t(3, &wd, &s.emb).unwrap();
        let tc = ThetaFamily { expansion: FamilyExpansion::Col(xc.hecke_t(3, &cd, &s.emb).unwrap()), ..col.clone() };
        assert_eq!(specialize_family(&tc, &arith(k)).unwrap().base().unwrap(), classical);
        let th = ThetaFamily { expansion: FamilyExpansion::Hida(xh.hecke_t(3, &hd, &s.emb).unwrap()), ..hida.clone() };
        assert_eq!(specialize_family(&th, &arith(k)).unwrap().base().unwrap(), classical);
    }
}

#[test]
fn twisted_hida_specialization() {
    let s = default_setup();
    let hida = build_g_hida(&s, 80, [7, 31]).unwrap();
    let tw = FiniteTwist { m: 1, j: 1 };
    let w = Weight::GroupAlgebra { k: 2, twist: Some((1, tw)) };
    let x = specialize_family(&hida, &w).unwrap().twisted().unwrap();
    assert_eq!(x, theta_twisted(&s, 2, 1, &tw, 80).unwrap());
    // a_{pn} = 0 and multiplicativity on coprime indices
    assert!(x.u_p(5).unwrap().is_zero());
    for m in 2..9usize {
        for n in 2..9usize {
            if num_integer::gcd(m, n) == 1 && m * n <= 80 {
                assert_eq!(*x.coeff(m * n), x.coeff(m).mul_ref(x.coeff(n)), "m={m} n={n}");
            }
        }
    }
    // the untruncated twist is genuinely different from g_2
    let g2 = theta_classical(&s, 2, 80).unwrap();
    let lifted = g2.specialize(None, |c| Ok(ExtElem::from_base(x.coeff(0).ring(), *c))).unwrap();
    assert_ne!(lifted, x);
    let low = build_g_hida(&s, 20, [7, 7]).unwrap();
    assert!(matches!(specialize_family(&low, &w), Err(Error::PrecisionLoss(_))));
}

#[test]
fn twist_conductor_data() {
    let s = default_setup();
    let t = twist_conductor(&s, 1, &FiniteTwist { m: 1, j: 1 }).unwrap();
    // η has p-conductor exponent 1; ε_w needs two digits of p
    assert_eq!(t.conductor_exponent, 2);
    assert_eq!(t.level, 7 * 625);
    assert_eq!(t.level_bump, 2);
    // twisting along u₂ leaves the central character alone
    assert!(t.nebentypus_shift.is_trivial());
    let t1 = twist_conductor(&s, 0, &FiniteTwist { m: 1, j: 1 }).unwrap();
    assert!(!t1.nebentypus_shift.is_trivial());
    assert_eq!(t1.nebentypus_shift.conductor(), 25);
}
