//! Brute-force reference implementations on plain vectors, written
//! directly from the definitions and sharing no code with the library.

#![allow(dead_code)]

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Mono = Vec<u32>;
pub type Label = Vec<usize>;
/// Element of a Taylor component: `(label, monomial) -> coefficient`.
pub type Elem = BTreeMap<(Label, Mono), i64>;

pub fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub fn lcm(a: &[u32], b: &[u32]) -> Mono {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

pub fn mul(a: &[u32], b: &[u32]) -> Mono {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn quo(a: &[u32], b: &[u32]) -> Mono {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn m_of(mons: &[Mono], k: &[usize]) -> Mono {
    let n = mons[0].len();
    k.iter().fold(vec![0; n], |acc, &i| lcm(&acc, &mons[i - 1]))
}

/// All ascending sequences in `1..=r`, by length then lexicographically.
pub fn all_labels(r: usize) -> Vec<Label> {
    let mut out: Vec<Label> = Vec::new();
    for mask in 0u32..(1 << r) {
        out.push((1..=r).filter(|i| mask & (1 << (i - 1)) != 0).collect());
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

/// `δv_k = Σ_ℓ (−1)^{ℓ−1} (m_k / m_{k∖k_ℓ}) v_{k∖k_ℓ}`.
pub fn differential(mons: &[Mono], k: &[usize]) -> Elem {
    let mk = m_of(mons, k);
    let mut out = Elem::new();
    for pos in 0..k.len() {
        let mut face = k.to_vec();
        face.remove(pos);
        let sign = if pos % 2 == 0 { 1 } else { -1 };
        out.insert((face.clone(), quo(&mk, &m_of(mons, &face))), sign);
    }
    out
}

pub fn apply_differential(mons: &[Mono], u: &Elem) -> Elem {
    let mut out = Elem::new();
    for ((k, m), c) in u {
        for ((l, mm), d) in differential(mons, k) {
            *out.entry((l, mul(m, &mm))).or_insert(0) += c * d;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Base {
    Lex,
    GrevLex,
}

pub fn base_cmp(base: Base, a: &[u32], b: &[u32]) -> Ordering {
    match base {
        Base::Lex => a.cmp(b),
        Base::GrevLex => {
            let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
            da.cmp(&db).then_with(|| {
                // smaller trailing exponent wins
                for (x, y) in a.iter().zip(b).rev() {
                    if x != y {
                        return y.cmp(x);
                    }
                }
                Ordering::Equal
            })
        }
    }
}

/// The recursive Taylor order: compare the leading terms of `s·δu_k` and
/// `t·δu_l` one degree down, then break ties on the labels.
pub struct RecursiveOrder {
    pub mons: Vec<Mono>,
    pub base: Base,
    pub reverse: bool,
    cache: RefCell<HashMap<(Mono, Label), (Mono, Label)>>,
}

impl RecursiveOrder {
    pub fn new(mons: &[Mono], base: Base, reverse: bool) -> Self {
        RecursiveOrder {
            mons: mons.to_vec(),
            base,
            reverse,
            cache: RefCell::new(HashMap::new()),
        }
    }

    /// Leading term (without coefficient) of `s·δu_k`.
    pub fn lead(&self, s: &[u32], k: &[usize]) -> (Mono, Label) {
        let key = (s.to_vec(), k.to_vec());
        if let Some(v) = self.cache.borrow().get(&key) {
            return v.clone();
        }
        let mk = m_of(&self.mons, k);
        let mut best: Option<(Mono, Label)> = None;
        for pos in 0..k.len() {
            let mut face = k.to_vec();
            face.remove(pos);
            let cand = (mul(s, &quo(&mk, &m_of(&self.mons, &face))), face);
            best = match best {
                Some(b) if self.cmp(&b.0, &b.1, &cand.0, &cand.1) != Ordering::Less => Some(b),
                _ => Some(cand),
            };
        }
        let v = best.expect("nonempty label");
        self.cache.borrow_mut().insert(key, v.clone());
        v
    }

    pub fn cmp(&self, s: &[u32], k: &[usize], t: &[u32], l: &[usize]) -> Ordering {
        assert_eq!(k.len(), l.len());
        if k.is_empty() {
            return base_cmp(self.base, s, t);
        }
        let (a, b) = (self.lead(s, k), self.lead(t, l));
        self.cmp(&a.0, &a.1, &b.0, &b.1)
            .then_with(|| if self.reverse { l.cmp(k) } else { k.cmp(l) })
    }

    /// Leading term of an element, with its coefficient.
    pub fn leading(&self, u: &Elem) -> ((Label, Mono), i64) {
        let mut it = u.iter();
        let (mut best, mut c) = it.next().map(|(k, c)| (k.clone(), *c)).expect("nonzero");
        for (k, d) in it {
            if self.cmp(&k.1, &k.0, &best.1, &best.0) == Ordering::Greater {
                best = k.clone();
                c = *d;
            }
        }
        (best, c)
    }
}

/// Kept labels by Lyubeznik's rule: `v_k` is dropped when some `m_i`
/// divides `m_{k_{>i}}` (forward) or `m_{k_{<i}}` (reverse), the tail being
/// nonempty. Returns the kept set and the dropped labels with the smallest
/// witness.
pub fn lyubeznik(mons: &[Mono], reverse: bool) -> (BTreeSet<Label>, BTreeMap<Label, usize>) {
    let r = mons.len();
    let mut kept = BTreeSet::new();
    let mut dropped = BTreeMap::new();
    for k in all_labels(r) {
        let witness = (1..=r).find(|&i| {
            let tail: Label = k
                .iter()
                .copied()
                .filter(|&j| if reverse { j < i } else { j > i })
                .collect();
            !tail.is_empty() && divides(&mons[i - 1], &m_of(mons, &tail))
        });
        match witness {
            Some(i) => {
                dropped.insert(k, i);
            }
            None => {
                kept.insert(k);
            }
        }
    }
    (kept, dropped)
}

/// Rank over the rationals by plain Gaussian elimination.
pub fn rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect()
        })
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for x in m[rank].iter_mut() {
            *x = &*x / &pivot;
        }
        for i in 0..m.len() {
            if i != rank && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let v = &m[rank][j] * &f;
                    m[i][j] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Matrix of `δ` from the `q`-labels to the `(q−1)`-labels of `kept` in
/// multidegree `mu` (rows are targets).
fn strand_matrix(mons: &[Mono], kept: &BTreeSet<Label>, mu: &[u32], q: usize) -> Vec<Vec<i64>> {
    let src: Vec<&Label> = kept
        .iter()
        .filter(|k| k.len() == q && divides(&m_of(mons, k), mu))
        .collect();
    let dst: Vec<&Label> = kept
        .iter()
        .filter(|k| k.len() == q - 1 && divides(&m_of(mons, k), mu))
        .collect();
    let mut rows = vec![vec![0i64; src.len()]; dst.len()];
    for (j, k) in src.iter().enumerate() {
        for ((l, _), c) in differential(mons, k) {
            if let Some(i) = dst.iter().position(|d| **d == l) {
                rows[i][j] = c;
            }
        }
    }
    rows
}

/// Strand homology `dim H_q` at `mu` of the subcomplex spanned by `kept`.
pub fn strand_homology(mons: &[Mono], kept: &BTreeSet<Label>, mu: &[u32]) -> Vec<i64> {
    let r = mons.len();
    let dims: Vec<i64> = (0..=r)
        .map(|q| {
            kept.iter()
                .filter(|k| k.len() == q && divides(&m_of(mons, k), mu))
                .count() as i64
        })
        .collect();
    let mut ranks = vec![0i64; r + 2];
    for q in 1..=r {
        ranks[q] = rank(&strand_matrix(mons, kept, mu, q)) as i64;
    }
    (0..=r).map(|q| dims[q] - ranks[q] - ranks[q + 1]).collect()
}

/// Every lcm of a subset of `mons`, including the empty one.
pub fn lcm_points(mons: &[Mono]) -> BTreeSet<Mono> {
    all_labels(mons.len())
        .iter()
        .map(|k| m_of(mons, k))
        .collect()
}

pub fn exact(mons: &[Mono], kept: &BTreeSet<Label>) -> bool {
    lcm_points(mons).iter().all(|mu| {
        let h = strand_homology(mons, kept, mu);
        let h0 = i64::from(!mons.iter().any(|m| divides(m, mu)));
        h[0] == h0 && h[1..].iter().all(|&x| x == 0)
    })
}

/// Betti numbers from the unit entries of `δ`, trailing zeros trimmed.
pub fn betti(mons: &[Mono]) -> Vec<usize> {
    let r = mons.len();
    let labels = all_labels(r);
    let of_len = |q: usize| labels.iter().filter(|k| k.len() == q).collect::<Vec<_>>();
    let mut ranks = vec![0usize; r + 2];
    for q in 1..=r {
        let src = of_len(q);
        let dst = of_len(q - 1);
        let rows: Vec<Vec<i64>> = dst
            .iter()
            .map(|l| {
                src.iter()
                    .map(|k| {
                        let d = differential(mons, k);
                        d.iter()
                            .find(|((t, m), _)| t == *l && m.iter().all(|&e| e == 0))
                            .map_or(0, |(_, c)| *c)
                    })
                    .collect()
            })
            .collect();
        ranks[q] = rank(&rows);
    }
    let mut out: Vec<usize> = (0..=r)
        .map(|q| of_len(q).len() - ranks[q] - ranks[q + 1])
        .collect();
    while out.len() > 1 && out.last() == Some(&0) {
        out.pop();
    }
    out
}

/// `count` random sets of distinct monomials `≠ 1`, with `1 ≤ r ≤ r_max`,
/// `1 ≤ n ≤ n_max` variables and exponents `≤ e_max`.
pub fn random_sets(
    seed: u64,
    count: usize,
    r_max: usize,
    n_max: usize,
    e_max: u32,
) -> Vec<Vec<Mono>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=n_max);
            let r = rng.gen_range(1..=r_max);
            let mut set: Vec<Mono> = Vec::new();
            for _ in 0..200 {
                if set.len() == r {
                    break;
                }
                let m: Mono = (0..n).map(|_| rng.gen_range(0..=e_max)).collect();
                if m.iter().any(|&e| e > 0) && !set.contains(&m) {
                    set.push(m);
                }
            }
            set
        })
        .collect()
}
