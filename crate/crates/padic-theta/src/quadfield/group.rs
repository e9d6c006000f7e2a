use std::collections::HashMap;
use std::hash::Hash;

/// A finite abelian group given by a multiplication oracle on hashable keys,
/// decomposed as ⊕ Z/d_i with d_1 | d_2 | ... (all d_i > 1).
#[derive(Clone, Debug)]
pub struct AbelianGroup<K> {
    invariants: Vec<u64>,
    elements: Vec<K>,
    index: HashMap<K, usize>,
    /// Coordinates of each element on the SNF generators.
    coords: Vec<Vec<u64>>,
    /// Row i: exponents of the input generators giving SNF generator i.
    gen_words: Vec<Vec<i64>>,
}

impl<K: Clone + Eq + Hash> AbelianGroup<K> {
    /// Build the group generated by `gens` from the identity.
    ///
    /// The elements are first enumerated in polycyclic normal form
    /// g_1^{e_1}…g_r^{e_r} with 0 ≤ e_i < m_i, which yields a triangular
    /// relation matrix; its Smith form gives the invariants.
    pub fn generate(identity: K, gens: &[K], mul: impl Fn(&K, &K) -> K) -> Self {
        let r = gens.len();
        let mut elements = vec![identity.clone()];
        let mut poly: Vec<Vec<i64>> = vec![vec![0; r]];
        let mut index: HashMap<K, usize> = HashMap::from([(identity, 0)]);
        let mut rel: Vec<Vec<i64>> = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            let mut x = g.clone();
            let mut m = 1i64;
            while !index.contains_key(&x) {
                m += 1;
                x = mul(&x, g);
            }
            let mut row = poly[index[&x]].iter().map(|v| -v).collect::<Vec<_>>();
            row[i] += m;
            rel.push(row);
            if m == 1 {
                continue;
            }
            let base = elements.len();
            let mut layer: Vec<K> = elements.clone();
            for j in 1..m {
                layer = layer.iter().map(|h| mul(h, g)).collect();
                for (t, h) in layer.iter().enumerate() {
                    let mut c = poly[t % base].clone();
                    c[i] = j;
                    index.insert(h.clone(), elements.len());
                    elements.push(h.clone());
                    poly.push(c);
                }
            }
        }
        let (diag, v, vinv) = smith_columns(&rel);
        let keep: Vec<usize> = (0..r).filter(|&i| diag[i] > 1).collect();
        let invariants: Vec<u64> = keep.iter().map(|&i| diag[i] as u64).collect();
        let coords = poly
            .iter()
            .map(|x| {
                keep.iter()
                    .map(|&i| {
                        let s: i128 = (0..r).map(|j| x[j] as i128 * v[j][i] as i128).sum();
                        s.rem_euclid(diag[i] as i128) as u64
                    })
                    .collect()
            })
            .collect();
        let gen_words = keep.iter().map(|&i| vinv[i].clone()).collect();
        AbelianGroup { invariants, elements, index, coords, gen_words }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    /// Exponent (lcm of the invariants).
    pub fn exponent(&self) -> u64 {
        self.invariants.iter().fold(1, |a, &d| num_integer::lcm(a, d))
    }

    pub fn elements(&self) -> &[K] {
        &self.elements
    }

    /// Discrete logarithm on the SNF generators.
    pub fn dlog(&self, x: &K) -> Option<&[u64]> {
        self.index.get(x).map(|&i| self.coords[i].as_slice())
    }

    /// Word in the input generators for SNF generator `i`.
    pub fn generator_word(&self, i: usize) -> &[i64] {
        &self.gen_words[i]
    }

    /// The element with the given SNF coordinates.
    pub fn element(&self, c: &[u64]) -> Option<&K> {
        let c: Vec<u64> = c.iter().zip(&self.invariants).map(|(x, d)| x % d).collect();
        self.coords.iter().position(|x| *x == c).map(|i| &self.elements[i])
    }
}

/// Column-transforming Smith normal form of a square integer matrix:
/// returns (diagonal, V, V⁻¹) with U·M·V diagonal for some unimodular U.
pub fn smith_columns(m: &[Vec<i64>]) -> (Vec<i64>, Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let id = |n: usize| -> Vec<Vec<i128>> {
        (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect()
    };
    let mut v = id(n);
    let mut vinv = id(n);
    // Column op: col_j += q·col_i  (V ← V·E, V⁻¹ ← E⁻¹·V⁻¹ i.e. row_i −= q·row_j).
    let col_add = |a: &mut Vec<Vec<i128>>, v: &mut Vec<Vec<i128>>, vinv: &mut Vec<Vec<i128>>, i: usize, j: usize, q: i128| {
        for r in a.iter_mut() {
            r[j] += q * r[i];
        }
        for r in v.iter_mut() {
            r[j] += q * r[i];
        }
        for c in 0..n {
            let t = vinv[j][c];
            vinv[i][c] -= q * t;
        }
    };
    let col_swap = |a: &mut Vec<Vec<i128>>, v: &mut Vec<Vec<i128>>, vinv: &mut Vec<Vec<i128>>, i: usize, j: usize| {
        for r in a.iter_mut() {
            r.swap(i, j);
        }
        for r in v.iter_mut() {
            r.swap(i, j);
        }
        vinv.swap(i, j);
    };
    for t in 0..n {
        loop {
            // Pivot: smallest nonzero entry of the trailing block.
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap(t, pi);
            if pj != t {
                col_swap(&mut a, &mut v, &mut vinv, t, pj);
            }
            let mut clean = true;
            for i in t + 1..n {
                let q = a[i][t].div_euclid(a[t][t]);
                if q != 0 {
                    let row_t = a[t].clone();
                    for (x, y) in a[i].iter_mut().zip(&row_t) {
                        *x -= q * y;
                    }
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..n {
                let q = a[t][j].div_euclid(a[t][t]);
                if q != 0 {
                    col_add(&mut a, &mut v, &mut vinv, t, j, -q);
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // Enforce d_t | every trailing entry.
            let bad = (t + 1..n).flat_map(|i| (t + 1..n).map(move |j| (i, j))).find(|&(i, j)| a[i][j] % a[t][t] != 0);
            match bad {
                Some((i, _)) => {
                    let row_i = a[i].clone();
                    for (x, y) in a[t].iter_mut().zip(&row_i) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
        if a[t][t] < 0 {
            for r in a.iter_mut() {
                r[t] = -r[t];
            }
            for r in v.iter_mut() {
                r[t] = -r[t];
            }
            for c in vinv[t].iter_mut() {
                *c = -*c;
            }
        }
    }
    let cast = |m: Vec<Vec<i128>>| -> Vec<Vec<i64>> { m.into_iter().map(|r| r.into_iter().map(|x| x as i64).collect()).collect() };
    ((0..n).map(|i| a[i][i] as i64).collect(), cast(v), cast(vinv))
}
