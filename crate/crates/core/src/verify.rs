//! Certificates for complexes: `δ² = 0`, multigraded exactness and Betti
//! numbers, all by exact linear algebra.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{IndexSeq, ModuleElement, Monomial, Scalar};
use crate::taylor::FreeComplex;

/// Labels `k` with `δ(δv_k) ≠ 0`.
pub fn d_squared_failures(c: &FreeComplex) -> Vec<IndexSeq> {
    (2..=c.top())
        .flat_map(|q| c.labels(q))
        .filter(|l| {
            let d = c.differential(l).expect("own label");
            !c.delta(d).map(|dd| dd.is_zero()).unwrap_or(false)
        })
        .cloned()
        .collect()
}

/// `δ∘δ = 0` on every generator.
pub fn check_d_squared(c: &FreeComplex) -> bool {
    d_squared_failures(c).is_empty()
}

/// The degree-`q` differential restricted to multidegree `μ`: columns are
/// the generators `v_k` of degree `q` with `m_k | μ` (standing for
/// `(μ/m_k)·v_k`), rows the same for degree `q − 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrandMatrix {
    pub mu: Monomial,
    pub q: usize,
    pub rows: Vec<IndexSeq>,
    pub cols: Vec<IndexSeq>,
    /// Row-major, `rows.len() × cols.len()`.
    pub entries: Vec<Vec<Scalar>>,
}

impl StrandMatrix {
    pub fn rank(&self) -> usize {
        rank(&self.entries)
    }
}

fn strand_basis(c: &FreeComplex, mu: &Monomial, q: usize) -> Vec<IndexSeq> {
    c.generators(q)
        .iter()
        .filter(|g| g.multidegree.divides(mu))
        .map(|g| g.label.clone())
        .collect()
}

/// Matrix of `δ: C_q → C_{q−1}` at multidegree `μ`. For `q = 0` the matrix
/// has no rows.
pub fn strand(c: &FreeComplex, mu: &Monomial, q: usize) -> StrandMatrix {
    let cols = strand_basis(c, mu, q);
    let rows = if q == 0 {
        Vec::new()
    } else {
        strand_basis(c, mu, q - 1)
    };
    let mut entries = vec![vec![Scalar::zero(); cols.len()]; rows.len()];
    for (j, k) in cols.iter().enumerate() {
        let nu = mu.div(c.multidegree(k).expect("own label"));
        for (l, mono, coeff) in c.differential(k).expect("own label").iter() {
            let Ok(i) = rows.binary_search(l) else {
                continue;
            };
            let Ok(ml) = c.multidegree(l) else { continue };
            if nu.mul(mono).mul(ml) == *mu {
                entries[i][j] += coeff;
            }
        }
    }
    StrandMatrix {
        mu: mu.clone(),
        q,
        rows,
        cols,
        entries,
    }
}

/// Rank over the rationals: columns are scaled to integers, then
/// fraction-free (Bareiss) elimination runs over `BigInt`.
pub fn rank(m: &[Vec<Scalar>]) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return 0;
    }
    let mut a: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); cols]; rows];
    for j in 0..cols {
        let den = (0..rows).fold(BigInt::one(), |acc, i| acc.lcm(m[i][j].denom()));
        for i in 0..rows {
            a[i][j] = m[i][j].numer() * (&den / m[i][j].denom());
        }
    }
    bareiss_rank(&mut a)
}

fn bareiss_rank(a: &mut [Vec<BigInt>]) -> usize {
    let rows = a.len();
    let cols = a[0].len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in col + 1..cols {
                let v = &a[r][col] * &a[i][j] - &a[i][col] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[r][col].clone();
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Homology of one strand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrandHomology {
    pub mu: Monomial,
    /// Basis sizes per degree.
    pub dims: Vec<usize>,
    /// `dim ker δ_q − rank δ_{q+1}`, with entry 0 the cokernel of `δ_1`.
    /// Negative entries mean the strand is not a complex.
    pub homology: Vec<i64>,
    /// `dim (P/J)_μ`: 1 if no generator divides `μ`.
    pub expected_h0: usize,
}

impl StrandHomology {
    pub fn is_exact(&self) -> bool {
        self.homology[0] == self.expected_h0 as i64 && self.homology[1..].iter().all(|&h| h == 0)
    }

    /// Alternating sums of dimensions and of homology agree.
    pub fn euler_consistent(&self) -> bool {
        let alt = |v: &[usize]| {
            v.iter()
                .enumerate()
                .map(|(q, &d)| if q % 2 == 0 { d as i64 } else { -(d as i64) })
                .sum::<i64>()
        };
        alt(&self.dims)
            == self
                .homology
                .iter()
                .enumerate()
                .map(|(q, &h)| if q % 2 == 0 { h } else { -h })
                .sum::<i64>()
    }
}

pub fn strand_homology(c: &FreeComplex, mu: &Monomial) -> StrandHomology {
    let top = c.top();
    let dims: Vec<usize> = (0..=top).map(|q| strand_basis(c, mu, q).len()).collect();
    // ranks[q] = rank of δ_q : C_q → C_{q−1}; ranks[0] = 0
    let mut ranks = vec![0usize; top + 2];
    for q in 1..=top {
        if dims[q] > 0 && dims[q - 1] > 0 {
            ranks[q] = strand(c, mu, q).rank();
        }
    }
    let homology = (0..=top)
        .map(|q| dims[q] as i64 - ranks[q] as i64 - ranks[q + 1] as i64)
        .collect();
    let expected_h0 = usize::from(!c.monomials().iter().any(|m| m.divides(mu)));
    StrandHomology {
        mu: mu.clone(),
        dims,
        homology,
        expected_h0,
    }
}

/// Which multidegrees to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrandSet {
    /// `μ = 1` and every `m_k`, `k ≠ ∅`.
    Lcm,
    /// As `Lcm`, plus `count` random multiples of lattice points.
    LcmPlusRandom { count: usize, seed: u64 },
}

/// The lcm lattice `{m_k : k ≠ ∅}` together with `1`, deduplicated.
pub fn lcm_lattice(monomials: &[Monomial]) -> Vec<Monomial> {
    let n = monomials.first().map_or(0, Monomial::n);
    let mut seen: BTreeSet<Monomial> = BTreeSet::new();
    seen.insert(Monomial::one(n));
    let mut layer: BTreeSet<Monomial> = monomials.iter().cloned().collect();
    while !layer.is_empty() {
        let fresh: BTreeSet<Monomial> = layer
            .iter()
            .filter(|m| !seen.contains(*m))
            .cloned()
            .collect();
        seen.extend(fresh.iter().cloned());
        layer = fresh
            .iter()
            .flat_map(|a| monomials.iter().map(move |m| a.lcm(m)))
            .filter(|m| !seen.contains(m))
            .collect();
    }
    seen.into_iter().collect()
}

fn strand_points(c: &FreeComplex, set: StrandSet) -> Vec<Monomial> {
    let mut pts = lcm_lattice(c.monomials());
    if let StrandSet::LcmPlusRandom { count, seed } = set {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = pts.clone();
        for _ in 0..count {
            let b = &base[rng.gen_range(0..base.len())];
            let extra = Monomial::new((0..c.n()).map(|_| rng.gen_range(0..=2u32)));
            pts.push(b.mul(&extra));
        }
    }
    pts
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub d_squared_ok: bool,
    pub strands: Vec<StrandHomology>,
    pub betti: Vec<usize>,
    pub ranks: Vec<usize>,
    pub minimal: bool,
}

impl VerificationReport {
    pub fn exact(&self) -> bool {
        self.d_squared_ok && self.strands.iter().all(StrandHomology::is_exact)
    }

    pub fn failing_strands(&self) -> impl Iterator<Item = &StrandHomology> {
        self.strands.iter().filter(|s| !s.is_exact())
    }
}

/// Checks `δ² = 0`, exactness of every strand in `set` and computes Betti
/// numbers.
pub fn check_exactness(c: &FreeComplex, set: StrandSet) -> VerificationReport {
    let d_squared_ok = check_d_squared(c);
    let strands: Vec<StrandHomology> = strand_points(c, set)
        .par_iter()
        .map(|mu| strand_homology(c, mu))
        .collect();
    let betti = betti_numbers(c);
    let ranks = c.ranks_trimmed();
    let minimal = betti == ranks;
    VerificationReport {
        d_squared_ok,
        strands,
        betti,
        ranks,
        minimal,
    }
}

/// Matrix of `δ_q ⊗ k`: only differential entries with monomial `1` survive.
fn unit_matrix(c: &FreeComplex, q: usize) -> Vec<Vec<Scalar>> {
    let rows: Vec<&IndexSeq> = c.labels(q - 1).collect();
    let cols: Vec<&IndexSeq> = c.labels(q).collect();
    let mut m = vec![vec![Scalar::zero(); cols.len()]; rows.len()];
    for (j, k) in cols.iter().enumerate() {
        let d: &ModuleElement = c.differential(k).expect("own label");
        for (l, mono, coeff) in d.iter() {
            if mono.is_one() {
                if let Ok(i) = rows.binary_search(&l) {
                    m[i][j] += coeff;
                }
            }
        }
    }
    m
}

/// `dim H_q(C ⊗ k)` per degree, trailing zeros removed.
pub fn betti_numbers(c: &FreeComplex) -> Vec<usize> {
    let top = c.top();
    let mut ranks = vec![0usize; top + 2];
    for q in 1..=top {
        ranks[q] = rank(&unit_matrix(c, q));
    }
    let mut b: Vec<usize> = (0..=top)
        .map(|q| c.rank(q) - ranks[q] - ranks[q + 1])
        .collect();
    while b.last() == Some(&0) {
        b.pop();
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{scalar, VarContext};
    use crate::orders::Direction;
    use crate::reduction::{extract_subcomplex, lyubeznik_filter};
    use crate::taylor::build_taylor;
    use proptest::prelude::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial::new(e.iter().copied())
    }

    fn xy_xz_yz() -> FreeComplex {
        build_taylor(
            &VarContext::numbered(3),
            &[m(&[1, 1, 0]), m(&[1, 0, 1]), m(&[0, 1, 1])],
            12,
        )
        .unwrap()
    }

    #[test]
    fn strand_dimensions() {
        let t = xy_xz_yz();
        let dims = |mu: &Monomial| {
            (0..=3)
                .map(|q| strand(&t, mu, q).cols.len())
                .collect::<Vec<_>>()
        };
        assert_eq!(dims(&m(&[1, 1, 1])), vec![1, 3, 3, 1]);
        assert_eq!(dims(&Monomial::one(3)), vec![1, 0, 0, 0]);
        assert_eq!(dims(&m(&[1, 1, 0])), vec![1, 1, 0, 0]);
    }

    #[test]
    fn rank_examples() {
        let q = |v: &[&[i64]]| {
            v.iter()
                .map(|r| r.iter().map(|&x| scalar(x)).collect())
                .collect::<Vec<Vec<Scalar>>>()
        };
        assert_eq!(rank(&q(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&q(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank(&q(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]])), 3);
        let half = vec![
            vec![scalar(1) / scalar(2), scalar(1)],
            vec![scalar(1), scalar(2)],
        ];
        assert_eq!(rank(&half), 1);
    }

    #[test]
    fn betti_examples() {
        let t = xy_xz_yz();
        assert_eq!(betti_numbers(&t), vec![1, 3, 2]);
        let l = extract_subcomplex(&t, &lyubeznik_filter(&t, Direction::Forward)).unwrap();
        assert_eq!(betti_numbers(&l), vec![1, 3, 2]);
        assert_eq!(l.ranks_trimmed(), vec![1, 3, 2]);
        let t2 = build_taylor(
            &VarContext::numbered(2),
            &[m(&[2, 0]), m(&[1, 1]), m(&[0, 2])],
            12,
        )
        .unwrap();
        let rep = check_exactness(&t2, StrandSet::Lcm);
        assert_eq!(rep.betti, vec![1, 3, 2]);
        assert!(!rep.minimal);
        let one = build_taylor(&VarContext::numbered(2), &[m(&[1, 3])], 12).unwrap();
        assert_eq!(betti_numbers(&one), vec![1, 1]);
    }

    #[test]
    fn exactness_and_mutations() {
        let t = xy_xz_yz();
        let rep = check_exactness(&t, StrandSet::LcmPlusRandom { count: 10, seed: 7 });
        assert!(rep.exact());
        assert!(!rep.minimal);
        let l = extract_subcomplex(&t, &lyubeznik_filter(&t, Direction::Forward)).unwrap();
        let rep = check_exactness(&l, StrandSet::Lcm);
        assert!(rep.exact() && rep.minimal);

        let k = IndexSeq::new([1, 2]).unwrap();
        let flipped = t
            .with_differential(&k, t.differential(&k).unwrap().neg())
            .unwrap();
        assert!(!check_d_squared(&flipped));
    }

    #[test]
    fn lattice_is_closed() {
        let mons = [m(&[1, 1, 0]), m(&[1, 0, 1]), m(&[0, 1, 1])];
        assert_eq!(
            lcm_lattice(&mons),
            vec![
                Monomial::one(3),
                m(&[0, 1, 1]),
                m(&[1, 0, 1]),
                m(&[1, 1, 0]),
                m(&[1, 1, 1])
            ]
        );
    }

    proptest! {
        #[test]
        fn strand_homology_depends_on_support(
            set in proptest::collection::btree_set(proptest::collection::vec(0u32..=3, 3), 1..=5),
            extra in proptest::collection::vec(0u32..=2, 3),
            pick in any::<proptest::sample::Index>(),
        ) {
            let mons: Vec<Monomial> = set.into_iter().map(Monomial::new).collect();
            let t = build_taylor(&VarContext::numbered(3), &mons, 12).unwrap();
            let l = extract_subcomplex(&t, &lyubeznik_filter(&t, Direction::Forward)).unwrap();
            let lattice = lcm_lattice(&mons);
            let mu = lattice[pick.index(lattice.len())].mul(&Monomial::new(extra));
            let support = mons.iter().filter(|mi| mi.divides(&mu)).fold(Monomial::one(3), |a, mi| a.lcm(mi));
            for c in [&t, &l] {
                let a = strand_homology(c, &mu);
                let b = strand_homology(c, &support);
                prop_assert_eq!(&a.homology, &b.homology);
                prop_assert!(a.euler_consistent());
                prop_assert!(a.is_exact());
            }
        }
    }
}
