//! Imaginary quadratic fields K = Q(√−d) with d ≡ 3 mod 4: integers on the
//! basis {1, ω = (1+√−d)/2}, ideals in Hermite normal form, reduced forms,
//! ideal enumeration and ray class groups.

mod group;
mod ray;

use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};

pub use group::{smith_columns, AbelianGroup};
pub use ray::{RayClassGroup, RayKey};

/// u + v·ω with ω = (1+√−d)/2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OkElem {
    pub u: i128,
    pub v: i128,
}

impl OkElem {
    pub const fn new(u: i128, v: i128) -> Self {
        OkElem { u, v }
    }

    pub const fn int(n: i128) -> Self {
        OkElem { u: n, v: 0 }
    }

    /// The coordinates (x, y) with the element equal to (x + y√−d)/2.
    pub fn half_coords(&self) -> (i128, i128) {
        (2 * self.u + self.v, self.v)
    }
}

/// An ideal in Hermite normal form: the lattice Z·A ⊕ Z·(B + C·ω) with
/// C | A, C | B and 0 ≤ B < A.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ideal {
    pub a_: i128,
    pub b_: i128,
    pub c_: i128,
}

/// The exported ideal triple: content·[a, (b+√−d)/2] with 0 < b < 2a odd.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct IdealRep {
    pub a: i64,
    pub b: i64,
    pub content: i64,
}

impl Ideal {
    pub fn unit() -> Self {
        Ideal { a_: 1, b_: 0, c_: 1 }
    }

    pub fn norm(&self) -> i128 {
        self.a_ * self.c_
    }

    pub fn content(&self) -> i128 {
        self.c_
    }

    pub fn rep(&self) -> IdealRep {
        let c = self.c_;
        let a = self.a_ / c;
        let b = 2 * (self.b_ / c) + 1;
        IdealRep { a: a as i64, b: b as i64, content: c as i64 }
    }

    pub fn from_rep(r: &IdealRep) -> Self {
        let c = r.content as i128;
        let a = r.a as i128;
        let bb = ((r.b as i128 - 1) / 2).rem_euclid(a);
        Ideal { a_: a * c, b_: bb * c, c_: c }
    }

    pub fn basis(&self) -> [OkElem; 2] {
        [OkElem::int(self.a_), OkElem::new(self.b_, self.c_)]
    }

    pub fn contains(&self, x: &OkElem) -> bool {
        if x.v.rem_euclid(self.c_) != 0 {
            return false;
        }
        (x.u - (x.v / self.c_) * self.b_).rem_euclid(self.a_) == 0
    }

    /// Canonical residue of x modulo the ideal.
    pub fn reduce(&self, x: &OkElem) -> OkElem {
        let v = x.v.rem_euclid(self.c_);
        let q = (x.v - v) / self.c_;
        OkElem::new((x.u - q * self.b_).rem_euclid(self.a_), v)
    }
}

impl fmt::Display for IdealRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·[{}, ({}+√−d)/2]", self.content, self.a, self.b)
    }
}

/// How a rational prime decomposes in K.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Splitting {
    Split(Ideal, Ideal),
    Inert(Ideal),
    Ramified(Ideal),
}

/// The field K = Q(√−d_K).
#[derive(Clone, Debug)]
pub struct QuadField {
    d: i128,
    /// (1 + d)/4, so that ω² = ω − d4.
    d4: i128,
    forms: Vec<(i128, i128, i128)>,
}

impl QuadField {
    pub fn new(d_k: u64) -> Result<Self> {
        let d = d_k as i128;
        if d < 3 || d % 4 != 3 {
            return Err(Error::validation("field", format!("need d_K ≡ 3 mod 4, got {d_k}")));
        }
        if (2..).take_while(|q| q * q <= d).any(|q| d % (q * q) == 0) {
            return Err(Error::validation("field", format!("d_K = {d_k} is not squarefree")));
        }
        let forms = reduced_forms(d);
        Ok(QuadField { d, d4: (1 + d) / 4, forms })
    }

    pub fn d_k(&self) -> u64 {
        self.d as u64
    }

    pub fn class_number(&self) -> usize {
        self.forms.len()
    }

    /// Reduced primitive forms (a, b, c) with b² − 4ac = −d_K.
    pub fn reduced_forms(&self) -> &[(i128, i128, i128)] {
        &self.forms
    }

    /// #O_K^× / 2.
    pub fn u_k(&self) -> u32 {
        if self.d == 3 {
            3
        } else {
            1
        }
    }

    pub fn units(&self) -> Vec<OkElem> {
        if self.d == 3 {
            let w = OkElem::new(0, 1);
            let mut out = vec![OkElem::int(1)];
            for _ in 0..5 {
                let x = self.mul(out.last().unwrap(), &w);
                out.push(x);
            }
            out
        } else {
            vec![OkElem::int(1), OkElem::int(-1)]
        }
    }

    pub fn mul(&self, x: &OkElem, y: &OkElem) -> OkElem {
        OkElem::new(x.u * y.u - self.d4 * x.v * y.v, x.u * y.v + x.v * y.u + x.v * y.v)
    }

    pub fn add(&self, x: &OkElem, y: &OkElem) -> OkElem {
        OkElem::new(x.u + y.u, x.v + y.v)
    }

    pub fn conj(&self, x: &OkElem) -> OkElem {
        OkElem::new(x.u + x.v, -x.v)
    }

    pub fn norm(&self, x: &OkElem) -> i128 {
        x.u * x.u + x.u * x.v + self.d4 * x.v * x.v
    }

    /// The HNF of the Z-lattice spanned by `gens`; `None` if not of rank 2.
    pub fn lattice(&self, gens: &[OkElem]) -> Option<Ideal> {
        let mut vs: Vec<(i128, i128)> = gens.iter().map(|g| (g.u, g.v)).collect();
        // Euclid on the ω-coordinate.
        loop {
            vs.retain(|&(u, v)| u != 0 || v != 0);
            let nz: Vec<usize> = (0..vs.len()).filter(|&i| vs[i].1 != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&i| vs[i].1.abs()).unwrap();
            let (pu, pv) = vs[piv];
            for &i in &nz {
                if i != piv {
                    let q = vs[i].1.div_euclid(pv);
                    vs[i] = (vs[i].0 - q * pu, vs[i].1 - q * pv);
                }
            }
        }
        let (mut b, mut c) = vs.iter().copied().find(|x| x.1 != 0)?;
        let a = vs.iter().filter(|x| x.1 == 0).fold(0i128, |g, x| g.gcd(&x.0));
        if a == 0 {
            return None;
        }
        if c < 0 {
            b = -b;
            c = -c;
        }
        Some(Ideal { a_: a, b_: b.rem_euclid(a), c_: c })
    }

    pub fn principal(&self, x: &OkElem) -> Ideal {
        self.lattice(&[*x, self.mul(x, &OkElem::new(0, 1))]).expect("nonzero element")
    }

    pub fn ideal_mul(&self, x: &Ideal, y: &Ideal) -> Ideal {
        let mut g = Vec::with_capacity(4);
        for s in x.basis() {
            for t in y.basis() {
                g.push(self.mul(&s, &t));
            }
        }
        self.lattice(&g).expect("product of nonzero ideals")
    }

    pub fn ideal_pow(&self, x: &Ideal, e: u32) -> Ideal {
        (0..e).fold(Ideal::unit(), |acc, _| self.ideal_mul(&acc, x))
    }

    pub fn ideal_add(&self, x: &Ideal, y: &Ideal) -> Ideal {
        let g = [x.basis(), y.basis()].concat();
        self.lattice(&g).expect("sum of nonzero ideals")
    }

    pub fn ideal_conj(&self, x: &Ideal) -> Ideal {
        let [s, t] = x.basis();
        self.lattice(&[self.conj(&s), self.conj(&t)]).expect("conjugate")
    }

    pub fn coprime(&self, x: &Ideal, y: &Ideal) -> bool {
        self.ideal_add(x, y) == Ideal::unit()
    }

    /// Lagrange–Gauss reduction of the ideal lattice under the norm form;
    /// returns a shortest nonzero element.
    pub fn shortest(&self, x: &Ideal) -> OkElem {
        let [mut v1, mut v2] = x.basis();
        loop {
            if self.norm(&v2) < self.norm(&v1) {
                std::mem::swap(&mut v1, &mut v2);
            }
            let n1 = self.norm(&v1);
            let two_b = self.norm(&self.add(&v1, &v2)) - n1 - self.norm(&v2);
            let mu = round_div(two_b, 2 * n1);
            if mu == 0 {
                return v1;
            }
            v2 = OkElem::new(v2.u - mu * v1.u, v2.v - mu * v1.v);
        }
    }

    /// A generator when the ideal is principal.
    pub fn generator(&self, x: &Ideal) -> Option<OkElem> {
        let s = self.shortest(x);
        (self.norm(&s) == x.norm()).then_some(s)
    }

    pub fn is_principal(&self, x: &Ideal) -> bool {
        self.generator(x).is_some()
    }

    /// The Kronecker symbol (−d_K / ℓ).
    pub fn kronecker(&self, l: u64) -> i32 {
        let l = l as i128;
        if self.d % l == 0 {
            return 0;
        }
        if l == 2 {
            return if (-self.d).rem_euclid(8) == 1 { 1 } else { -1 };
        }
        let r = modpow((-self.d).rem_euclid(l), (l - 1) / 2, l);
        if r == 1 {
            1
        } else {
            -1
        }
    }

    pub fn prime_splitting(&self, l: u64) -> Splitting {
        let li = l as i128;
        match self.kronecker(l) {
            -1 => Splitting::Inert(Ideal { a_: li, b_: 0, c_: li }),
            k => {
                let roots = self.primitive_roots_of_norm(li);
                let mk = |bb: i128| Ideal { a_: li, b_: bb, c_: 1 };
                if k == 0 {
                    Splitting::Ramified(mk(roots[0]))
                } else {
                    Splitting::Split(mk(roots[0]), mk(roots[1]))
                }
            }
        }
    }

    /// Solutions B mod a of B² + B + d4 ≡ 0, i.e. primitive ideals of norm a.
    fn primitive_roots_of_norm(&self, a: i128) -> Vec<i128> {
        (0..a).filter(|&b| (b * b + b + self.d4) % a == 0).collect()
    }

    /// All integral ideals of norm ≤ n_max coprime to `coprime_to`, sorted
    /// by (norm, a, b) of their exported triple.
    pub fn enumerate_ideals(&self, n_max: u64, coprime_to: &Ideal) -> Vec<Ideal> {
        let n_max = n_max as i128;
        let mut out = Vec::new();
        for a in 1..=n_max {
            for bb in self.primitive_roots_of_norm(a) {
                let mut c = 1i128;
                while c * c * a <= n_max {
                    let id = Ideal { a_: a * c, b_: bb * c, c_: c };
                    if coprime_to.norm() == 1 || self.coprime(&id, coprime_to) {
                        out.push(id);
                    }
                    c += 1;
                }
            }
        }
        out.sort_by_key(|i| {
            let r = i.rep();
            (i.norm(), r.a, r.b)
        });
        out
    }

    /// The prime ideals dividing `x`, with multiplicities.
    pub fn factor(&self, x: &Ideal) -> Vec<(Ideal, u32)> {
        let mut out = Vec::new();
        let n = x.norm();
        for l in prime_factors(n as u64) {
            let primes = match self.prime_splitting(l) {
                Splitting::Split(p, q) => vec![p, q],
                Splitting::Inert(p) | Splitting::Ramified(p) => vec![p],
            };
            for pr in primes {
                let mut e = 0;
                let mut pe = pr;
                while self.ideal_add(x, &pe) == pe {
                    e += 1;
                    pe = self.ideal_mul(&pe, &pr);
                }
                if e > 0 {
                    out.push((pr, e));
                }
            }
        }
        out
    }

    /// #(O_K/𝔪)^×.
    pub fn phi(&self, m: &Ideal) -> u64 {
        self.factor(m).iter().fold(1u64, |acc, (pr, e)| {
            let q = pr.norm() as u64;
            acc * q.pow(e - 1) * (q - 1)
        })
    }

    /// Class index (into `reduced_forms`) of an ideal, by principal tests.
    pub fn class_index(&self, x: &Ideal) -> usize {
        (0..self.forms.len())
            .find(|&i| {
                let f = self.form_ideal(i);
                self.is_principal(&self.ideal_mul(x, &self.ideal_conj(&f)))
            })
            .expect("every ideal lies in some form class")
    }

    /// The primitive ideal [a, (−b+√−d)/2] attached to reduced form i.
    pub fn form_ideal(&self, i: usize) -> Ideal {
        let (a, b, _) = self.forms[i];
        Ideal { a_: a, b_: ((-b - 1) / 2).rem_euclid(a), c_: 1 }
    }
}

fn round_div(n: i128, d: i128) -> i128 {
    (2 * n + d).div_euclid(2 * d)
}

fn modpow(mut b: i128, mut e: i128, m: i128) -> i128 {
    let mut r = 1 % m;
    b = b.rem_euclid(m);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n % q == 0 {
            out.push(q);
            while n % q == 0 {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && prime_factors(n) == [n]
}

fn reduced_forms(d: i128) -> Vec<(i128, i128, i128)> {
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= d {
        for b in -a + 1..=a {
            if (b * b + d) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b + d) / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if a.gcd(&b).gcd(&c) == 1 {
                out.push((a, b, c));
            }
        }
        a += 1;
    }
    out
}

/// CSV lines `norm,a,b,content`, sorted by (norm, a, b).
pub fn ideals_to_csv(ideals: &[Ideal]) -> String {
    let mut rows: Vec<(i128, IdealRep)> = ideals.iter().map(|i| (i.norm(), i.rep())).collect();
    rows.sort_by_key(|(n, r)| (*n, r.a, r.b, r.content));
    let mut s = String::from("norm,a,b,content\n");
    for (n, r) in rows {
        s.push_str(&format!("{n},{},{},{}\n", r.a, r.b, r.content));
    }
    s
}

pub fn ideals_from_csv(text: &str) -> Result<Vec<Ideal>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<i64> = line
            .split(',')
            .map(|x| x.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::parse(format!("line {}", ln + 1), e.to_string()))?;
        if f.len() != 4 {
            return Err(Error::parse(format!("line {}", ln + 1), "expected four fields"));
        }
        let id = Ideal::from_rep(&IdealRep { a: f[1], b: f[2], content: f[3] });
        if id.norm() != f[0] as i128 {
            return Err(Error::parse(format!("line {}", ln + 1), "norm does not match triple"));
        }
        out.push(id);
    }
    Ok(out)
}
