use std::collections::HashSet;
use std::sync::Arc;

use super::{AbelianGroup, Ideal, OkElem, QuadField, Splitting};
use crate::error::{Error, Result};

/// Largest modulus norm and group order handled with explicit tables.
pub const MAX_MODULUS_NORM: i128 = 1_000_000;
pub const MAX_GROUP_ORDER: usize = 100_000;

/// A ray class: (Picard class index, canonical residue of β/N(𝔟) mod 𝔠
/// modulo units), where 𝔞·𝔟̄ = (β) for the fixed representative 𝔟 of
/// the Picard class of 𝔞.
pub type RayKey = (usize, OkElem);

/// Cl_K(𝔠) with discrete-log tables.
#[derive(Clone, Debug)]
pub struct RayClassGroup {
    field: Arc<QuadField>,
    modulus: Ideal,
    p: u64,
    r: u32,
    reps: Vec<Ideal>,
    rep_norms: Vec<i128>,
    /// gamma[i][j] = (k, γ) with 𝔟̄_i 𝔟̄_j 𝔟_k = (γ).
    gamma: Vec<Vec<(usize, OkElem)>>,
    units: Vec<OkElem>,
    phi: u64,
    group: AbelianGroup<RayKey>,
    prime_gens: Vec<Ideal>,
}

impl RayClassGroup {
    /// Cl_K(𝔠₀ p^r).
    pub fn new(field: &Arc<QuadField>, c0: &Ideal, p: u64, r: u32) -> Result<Self> {
        let k = field.as_ref();
        let pr = k.principal(&OkElem::int((p as i128).pow(r)));
        if r > 0 && !k.coprime(c0, &k.principal(&OkElem::int(p as i128))) {
            return Err(Error::validation("conductor", "𝔠₀ must be prime to p"));
        }
        let modulus = k.ideal_mul(c0, &pr);
        if modulus.norm() > MAX_MODULUS_NORM {
            return Err(Error::ModulusTooLarge(format!("N(𝔠) = {}", modulus.norm())));
        }
        Self::with_modulus(field, modulus, p, r)
    }

    pub fn with_modulus(field: &Arc<QuadField>, modulus: Ideal, p: u64, r: u32) -> Result<Self> {
        let k = field.as_ref();
        let nm = modulus.norm();
        let h = k.class_number();
        let mut reps: Vec<Option<Ideal>> = vec![None; h];
        reps[0] = Some(Ideal::unit());
        let mut bound = 16u64;
        while reps.iter().any(|x| x.is_none()) {
            for id in k.enumerate_ideals(bound, &Ideal::unit()) {
                if num_integer::gcd(id.norm(), nm) != 1 {
                    continue;
                }
                let c = k.class_index(&id);
                if reps[c].is_none() {
                    reps[c] = Some(id);
                }
            }
            bound *= 2;
        }
        let reps: Vec<Ideal> = reps.into_iter().map(|x| x.unwrap()).collect();
        let rep_norms: Vec<i128> = reps.iter().map(|x| x.norm()).collect();
        let mut gamma = vec![vec![(0usize, OkElem::int(1)); h]; h];
        for i in 0..h {
            for j in 0..h {
                let bij = k.ideal_mul(&k.ideal_conj(&reps[i]), &k.ideal_conj(&reps[j]));
                let kk = (0..h).find(|&t| k.is_principal(&k.ideal_mul(&bij, &reps[t]))).expect("class group closed");
                let g = k.generator(&k.ideal_mul(&bij, &reps[kk])).unwrap();
                gamma[i][j] = (kk, g);
            }
        }
        let units = k.units();
        let phi = k.phi(&modulus);
        let mut g = RayClassGroup {
            field: field.clone(),
            modulus,
            p,
            r,
            reps,
            rep_norms,
            gamma,
            units,
            phi,
            group: AbelianGroup::generate((0, OkElem::int(0)), &[], |a, _| *a),
            prime_gens: Vec::new(),
        };
        let unit_image: HashSet<OkElem> = g.units.iter().map(|u| g.modulus.reduce(u)).collect();
        let expected = h * g.phi as usize / unit_image.len();
        if expected > MAX_GROUP_ORDER {
            return Err(Error::ModulusTooLarge(format!("|Cl_K(𝔠)| = {expected}")));
        }
        let id = g.identity();
        let mut span: HashSet<RayKey> = HashSet::from([id]);
        let mut gens = Vec::new();
        let mut keys = Vec::new();
        let mut l = 2u64;
        while span.len() < expected {
            if super::is_prime(l) {
                let primes = match k.prime_splitting(l) {
                    Splitting::Split(a, b) => vec![a, b],
                    Splitting::Inert(a) | Splitting::Ramified(a) => vec![a],
                };
                for q in primes {
                    if !k.coprime(&q, &g.modulus) {
                        continue;
                    }
                    let key = g.key_of(&q)?;
                    if span.contains(&key) {
                        continue;
                    }
                    let mut layer: Vec<RayKey> = span.iter().copied().collect();
                    loop {
                        layer = layer.iter().map(|x| g.mul(x, &key)).collect();
                        if span.contains(&layer[0]) {
                            break;
                        }
                        span.extend(layer.iter().copied());
                    }
                    gens.push(q);
                    keys.push(key);
                }
            }
            l += 1;
            if l > 100_000 {
                return Err(Error::NoConvergence(0));
            }
        }
        let grp = AbelianGroup::generate(id, &keys, |a, b| g.mul(a, b));
        g.group = grp;
        g.prime_gens = gens;
        Ok(g)
    }

    pub fn field(&self) -> &Arc<QuadField> {
        &self.field
    }

    pub fn modulus(&self) -> &Ideal {
        &self.modulus
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn invariants(&self) -> &[u64] {
        self.group.invariants()
    }

    pub fn group(&self) -> &AbelianGroup<RayKey> {
        &self.group
    }

    /// Prime ideals whose classes generate the group (input generators).
    pub fn prime_generators(&self) -> &[Ideal] {
        &self.prime_gens
    }

    pub fn identity(&self) -> RayKey {
        (0, self.canon(&OkElem::int(1)))
    }

    fn rmul(&self, x: &OkElem, y: &OkElem) -> OkElem {
        self.modulus.reduce(&self.field.mul(x, y))
    }

    fn rpow(&self, x: &OkElem, mut e: u64) -> OkElem {
        let mut r = self.modulus.reduce(&OkElem::int(1));
        let mut b = self.modulus.reduce(x);
        while e > 0 {
            if e & 1 == 1 {
                r = self.rmul(&r, &b);
            }
            b = self.rmul(&b, &b);
            e >>= 1;
        }
        r
    }

    /// Inverse in (O_K/𝔠)^× via x^{φ(𝔠)−1}.
    fn rinv(&self, x: &OkElem) -> OkElem {
        self.rpow(x, self.phi.max(1) - 1)
    }

    fn canon(&self, x: &OkElem) -> OkElem {
        self.units.iter().map(|u| self.rmul(u, x)).min().unwrap()
    }

    /// Group law transported through the representatives.
    pub fn mul(&self, a: &RayKey, b: &RayKey) -> RayKey {
        let (i, x) = a;
        let (j, y) = b;
        let (kk, g) = self.gamma[*i][*j];
        let n = OkElem::int(self.rep_norms[*i] * self.rep_norms[*j]);
        let z = self.rmul(&self.rmul(x, y), &self.rmul(&n, &self.rinv(&g)));
        (kk, self.canon(&z))
    }

    /// The ray class of an ideal prime to the modulus.
    pub fn key_of(&self, a: &Ideal) -> Result<RayKey> {
        let k = self.field.as_ref();
        if !k.coprime(a, &self.modulus) {
            return Err(Error::NotCoprime);
        }
        let i = (0..self.reps.len())
            .find(|&t| k.is_principal(&k.ideal_mul(a, &k.ideal_conj(&self.reps[t]))))
            .expect("class found");
        let beta = k.generator(&k.ideal_mul(a, &k.ideal_conj(&self.reps[i]))).unwrap();
        let x = self.rmul(&beta, &self.rinv(&OkElem::int(self.rep_norms[i])));
        Ok((i, self.canon(&x)))
    }

    /// Exponent vector on the SNF generators.
    pub fn class_of(&self, a: &Ideal) -> Result<Vec<u64>> {
        let key = self.key_of(a)?;
        Ok(self.group.dlog(&key).expect("key lies in the group").to_vec())
    }

    /// Classes of a word in the prime generators.
    pub fn word_class(&self, word: &[i64]) -> Vec<u64> {
        let inv = self.invariants();
        let mut out = vec![0i128; inv.len()];
        for (w, q) in word.iter().zip(&self.prime_gens) {
            let c = self.class_of(q).expect("generators are prime to the modulus");
            for t in 0..inv.len() {
                out[t] += *w as i128 * c[t] as i128;
            }
        }
        out.iter().zip(inv).map(|(x, d)| x.rem_euclid(*d as i128) as u64).collect()
    }

    pub fn is_conj_stable(&self) -> bool {
        self.field.ideal_conj(&self.modulus) == self.modulus
    }

    /// Action of complex conjugation on exponent vectors (needs 𝔠 = 𝔠̄).
    pub fn conj_class(&self, c: &[u64]) -> Result<Vec<u64>> {
        if !self.is_conj_stable() {
            return Err(Error::DomainError("modulus is not stable under conjugation".into()));
        }
        let k = self.field.as_ref();
        let inv = self.invariants();
        let images: Vec<Vec<u64>> =
            self.prime_gens.iter().map(|q| self.class_of(&k.ideal_conj(q))).collect::<Result<_>>()?;
        let mut out = vec![0i128; inv.len()];
        for (i, ci) in c.iter().enumerate() {
            let word = self.group.generator_word(i);
            for (w, img) in word.iter().zip(&images) {
                for t in 0..inv.len() {
                    out[t] += *ci as i128 * *w as i128 * img[t] as i128;
                }
            }
        }
        Ok(out.iter().zip(inv).map(|(x, d)| x.rem_euclid(*d as i128) as u64).collect())
    }

    /// Fixed splitting of each cyclic factor Z/d = Z/m × Z/p^e (p ∤ m):
    /// returns (invariants of the prime-to-p part Δ, of the p-part).
    pub fn primary_invariants(&self) -> (Vec<u64>, Vec<u64>) {
        let mut delta = Vec::new();
        let mut pp = Vec::new();
        for &d in self.invariants() {
            let (m, q) = split_p(d, self.p);
            if m > 1 {
                delta.push(m);
            }
            if q > 1 {
                pp.push(q);
            }
        }
        (delta, pp)
    }

    /// Coordinates of a class in (Δ, p-part) under the fixed splitting.
    pub fn split_class(&self, c: &[u64]) -> (Vec<u64>, Vec<u64>) {
        let mut delta = Vec::new();
        let mut pp = Vec::new();
        for (&x, &d) in c.iter().zip(self.invariants()) {
            let (m, q) = split_p(d, self.p);
            if m > 1 {
                delta.push(x % m);
            }
            if q > 1 {
                pp.push(x % q);
            }
        }
        (delta, pp)
    }

    /// Direct coset count of (O_K/𝔠)^× modulo units times h_K, for tests.
    pub fn brute_force_order(&self) -> usize {
        let k = self.field.as_ref();
        let [a, _] = self.modulus.basis();
        if self.modulus.norm() == 1 {
            return k.class_number();
        }
        let mut seen: HashSet<OkElem> = HashSet::new();
        let c = self.modulus.c_;
        for u in 0..a.u {
            for v in 0..c {
                let x = OkElem::new(u, v);
                if (u, v) != (0, 0) && k.coprime(&k.principal(&x), &self.modulus) {
                    seen.insert(self.canon(&x));
                }
            }
        }
        seen.len() * k.class_number()
    }
}

fn split_p(d: u64, p: u64) -> (u64, u64) {
    let mut q = 1;
    let mut m = d;
    while m % p == 0 {
        m /= p;
        q *= p;
    }
    (m, q)
}
