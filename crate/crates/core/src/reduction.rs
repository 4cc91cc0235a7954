//! Schreyer syzygies, chain-criterion elimination and the Lyubeznik
//! subcomplexes of the Taylor complex.

use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::{IndexSeq, ModuleElement, ModuleTerm, Monomial, Scalar};
use crate::division::{Divider, SPolyNormalization};
use crate::error::{Error, Result};
use crate::orders::{Direction, TermOrder};
use crate::taylor::{ComplexKind, Eliminated, FreeComplex};

/// The syzygy `S_ij` of an ordered basis `G` together with the syzygy
/// `S̃_ij` of the leading terms. Both live in the free module with basis
/// `e_1,…,e_s`, represented with single-entry labels `(α)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchreyerSyzygy {
    pub i: usize,
    pub j: usize,
    pub element: ModuleElement,
    pub lead_syzygy: ModuleElement,
}

impl SchreyerSyzygy {
    /// Reads `e_α` as the generator `labels[α − 1]` of the next degree.
    pub fn relabel(&self, labels: &[IndexSeq]) -> ModuleElement {
        let degree = labels.first().map_or(0, IndexSeq::len);
        self.element
            .relabel(degree, |l| labels[l.entries()[0] - 1].clone())
    }
}

fn basis_term(coeff: Scalar, mono: Monomial, alpha: usize) -> ModuleTerm {
    ModuleTerm::new(coeff, mono, IndexSeq::single(alpha))
}

/// `S_ij` for 1-based positions `i`, `j` in the divider's list.
///
/// Returns `None` when the leading terms lie on different generators.
/// A nonzero remainder of the S-polynomial means `G` is not a Gröbner basis.
pub fn schreyer_syzygy_with<O: TermOrder>(
    div: &Divider<O>,
    i: usize,
    j: usize,
    norm: SPolyNormalization,
) -> Result<Option<SchreyerSyzygy>> {
    let s = div.generators().len();
    for p in [i, j] {
        if !(1..=s).contains(&p) {
            return Err(Error::Index { index: p, len: s });
        }
    }
    let sp = div.s_pair(i - 1, j - 1, norm)?;
    if sp.is_sentinel() {
        return Ok(None);
    }
    let res = div.divide(&sp.spoly)?;
    if !res.remainder.is_zero() {
        return Err(Error::NotGroebner(format!(
            "S-polynomial of positions {i} and {j} has nonzero normal form {:?}",
            res.remainder
        )));
    }
    let (lc, lm) = sp.left;
    let (rc, rm) = sp.right;
    let lead = ModuleElement::from_terms(1, [basis_term(lc, lm, i), basis_term(-rc, rm, j)])?;
    let mut element = lead.clone();
    for (alpha, p) in res.quotients.iter().enumerate() {
        for (m, c) in p.terms() {
            element.add_term(&basis_term(-c.clone(), m.clone(), alpha + 1))?;
        }
    }
    Ok(Some(SchreyerSyzygy {
        i,
        j,
        element,
        lead_syzygy: lead,
    }))
}

/// `S_ij` of the ordered list `g` (1-based positions).
pub fn schreyer_syzygy<O: TermOrder + ?Sized>(
    g: &[ModuleElement],
    i: usize,
    j: usize,
    order: &O,
    norm: SPolyNormalization,
) -> Result<Option<SchreyerSyzygy>> {
    schreyer_syzygy_with(&Divider::new(g, order)?, i, j, norm)
}

/// All `S_ij`, `i < j`, whose leading terms share a generator.
pub fn schreyer_basis<O: TermOrder + ?Sized>(
    g: &[ModuleElement],
    order: &O,
) -> Result<Vec<SchreyerSyzygy>> {
    let div = Divider::new(g, order)?;
    div.critical_pairs()
        .into_iter()
        .map(|(i, j)| {
            Ok(
                schreyer_syzygy_with(&div, i + 1, j + 1, SPolyNormalization::Monic)?
                    .expect("same label"),
            )
        })
        .collect()
}

/// `Σ_α s_α·g_α` for a syzygy candidate `s` with labels `(α)`.
pub fn apply_syzygy(g: &[ModuleElement], s: &ModuleElement) -> Result<ModuleElement> {
    let degree = g.first().map_or(0, ModuleElement::degree);
    let mut out = ModuleElement::zero(degree);
    for (l, m, c) in s.iter() {
        let alpha = l.entries().first().copied().ok_or(Error::Degree {
            expected: 1,
            found: 0,
        })?;
        let ga = g.get(alpha - 1).ok_or(Error::Index {
            index: alpha,
            len: g.len(),
        })?;
        out.add_scaled(c, Some(m), ga)?;
    }
    Ok(out)
}

/// Which chain-criterion instances may fire.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainMode {
    /// Any witness `c` distinct from the pair.
    Unrestricted,
    /// Forward: the witness is smaller than both pair indices. Reverse:
    /// larger than both.
    Lyubeznik(Direction),
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ChainOutcome {
    pub kept: BTreeSet<(usize, usize)>,
    /// Removed pairs with the witness `c` used.
    pub removed: Vec<((usize, usize), usize)>,
}

/// Drops a pair `(a,b)` while pairs `(c,a)` and `(c,b)` are still present
/// and `leads[c−1]` divides `lcm(leads[a−1], leads[b−1])`. Pairs are
/// unordered and stored as `(min, max)`; indices are 1-based.
///
/// Witnesses are scanned ascending and, for each, pairs ascending. A single
/// sweep reaches the fixed point since removals only ever disable later
/// instances.
pub fn chain_criterion_eliminate(
    pairs: &BTreeSet<(usize, usize)>,
    leads: &[Monomial],
    mode: ChainMode,
) -> ChainOutcome {
    let norm = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut kept: BTreeSet<(usize, usize)> = pairs.iter().map(|&(a, b)| norm(a, b)).collect();
    let mut removed = Vec::new();
    for c in 1..=leads.len() {
        let snapshot: Vec<(usize, usize)> = kept.iter().copied().collect();
        for (a, b) in snapshot {
            let allowed = match mode {
                ChainMode::Unrestricted => c != a && c != b,
                ChainMode::Lyubeznik(Direction::Forward) => c < a,
                ChainMode::Lyubeznik(Direction::Reverse) => c > b,
            };
            if !allowed || !kept.contains(&norm(c, a)) || !kept.contains(&norm(c, b)) {
                continue;
            }
            if leads[c - 1].divides(&leads[a - 1].lcm(&leads[b - 1])) {
                kept.remove(&(a, b));
                removed.push(((a, b), c));
            }
        }
    }
    ChainOutcome { kept, removed }
}

/// Kept and dropped labels per degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationReport {
    pub direction: Direction,
    pub kept: Vec<Vec<IndexSeq>>,
    pub dropped: Vec<Vec<Eliminated>>,
}

impl EliminationReport {
    pub fn eliminated(&self) -> Vec<Eliminated> {
        self.dropped.iter().flatten().cloned().collect()
    }

    pub fn kept_set(&self) -> BTreeSet<IndexSeq> {
        self.kept.iter().flatten().cloned().collect()
    }

    pub fn kept_ranks(&self) -> Vec<usize> {
        self.kept.iter().map(Vec::len).collect()
    }
}

/// Smallest `i` certifying that `v_k` is dropped, if any.
///
/// Forward: `m_i | m_{k_{>i}}` with `k_{>i}` nonempty. Reverse:
/// `m_i | m_{k_{<i}}` with `k_{<i}` nonempty. `v_∅` is never dropped.
pub fn lyubeznik_witness(monomials: &[Monomial], k: &IndexSeq, dir: Direction) -> Option<usize> {
    let r = monomials.len();
    (1..=r).find(|&i| {
        let part = match dir {
            Direction::Forward => k.above(i),
            Direction::Reverse => k.below(i),
        };
        !part.is_empty() && monomials[i - 1].divides(&crate::algebra::label_lcm(monomials, &part))
    })
}

/// Applies the Lyubeznik condition to every label of `c`.
pub fn lyubeznik_filter(c: &FreeComplex, dir: Direction) -> EliminationReport {
    let mons = c.monomials();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for q in 0..=c.top() {
        let (mut kq, mut dq) = (Vec::new(), Vec::new());
        for l in c.labels(q) {
            match lyubeznik_witness(mons, l, dir) {
                Some(witness) => dq.push(Eliminated {
                    label: l.clone(),
                    witness,
                }),
                None => kq.push(l.clone()),
            }
        }
        kept.push(kq);
        dropped.push(dq);
    }
    EliminationReport {
        direction: dir,
        kept,
        dropped,
    }
}

/// Derives the kept labels by chain-criterion eliminations degree by degree.
///
/// Degree 1 drops `(j)` when a kept `(c)` before it (after it, in reverse)
/// has `m_c | m_j`. In degree `q + 1 ≥ 2` the candidates are the labels
/// whose two faces carrying the leading terms survived; they are grouped
/// by the generator `v_l` on which those leading terms live, and the chain
/// criterion runs on each group in [`ChainMode::Lyubeznik`] mode.
pub fn chain_route(c: &FreeComplex, dir: Direction) -> EliminationReport {
    let mons = c.monomials();
    let top = c.top();
    let mut kept: Vec<Vec<IndexSeq>> = vec![Vec::new(); top + 1];
    let mut dropped: Vec<Vec<Eliminated>> = vec![Vec::new(); top + 1];
    kept[0] = c.labels(0).cloned().collect();
    if top == 0 {
        return EliminationReport {
            direction: dir,
            kept,
            dropped,
        };
    }

    let ones: Vec<usize> = c.labels(1).map(|l| l.entries()[0]).collect();
    let scan: Vec<usize> = match dir {
        Direction::Forward => ones.clone(),
        Direction::Reverse => ones.iter().rev().copied().collect(),
    };
    let mut kept1: Vec<usize> = Vec::new();
    for &j in &scan {
        match kept1.iter().find(|&&w| mons[w - 1].divides(&mons[j - 1])) {
            Some(&w) => dropped[1].push(Eliminated {
                label: IndexSeq::single(j),
                witness: w,
            }),
            None => kept1.push(j),
        }
    }
    kept1.sort_unstable();
    kept[1] = kept1.into_iter().map(IndexSeq::single).collect();
    dropped[1].sort_by(|a, b| a.label.cmp(&b.label));

    for q in 2..=top {
        let prev: BTreeSet<&IndexSeq> = kept[q - 1].iter().collect();
        // component label -> pairs (a, b)
        let mut groups: BTreeMap<IndexSeq, BTreeSet<(usize, usize)>> = BTreeMap::new();
        let split = |k: &IndexSeq| -> (IndexSeq, usize, usize) {
            match dir {
                Direction::Forward => (
                    k.without_position(0).without_position(0),
                    k.entries()[0],
                    k.entries()[1],
                ),
                Direction::Reverse => (
                    k.without_position(q - 1).without_position(q - 2),
                    k.entries()[q - 2],
                    k.entries()[q - 1],
                ),
            }
        };
        let mut not_candidates = Vec::new();
        for k in c.labels(q) {
            let (comp, a, b) = split(k);
            let faces = [comp.with_entry(a), comp.with_entry(b)];
            if faces.iter().all(|f| prev.contains(f)) {
                groups.entry(comp).or_default().insert((a, b));
            } else {
                not_candidates.push(k.clone());
            }
        }
        let mut kq = Vec::new();
        for (comp, pairs) in &groups {
            let mc = crate::algebra::label_lcm(mons, comp);
            let leads: Vec<Monomial> = mons.iter().map(|m| m.lcm(&mc).div(&mc)).collect();
            let out = chain_criterion_eliminate(pairs, &leads, ChainMode::Lyubeznik(dir));
            kq.extend(
                out.kept
                    .iter()
                    .map(|&(a, b)| comp.with_entry(a).with_entry(b)),
            );
            for ((a, b), w) in out.removed {
                dropped[q].push(Eliminated {
                    label: comp.with_entry(a).with_entry(b),
                    witness: w,
                });
            }
        }
        // labels with an eliminated face: record the face's witness
        for k in not_candidates {
            let (comp, a, b) = split(&k);
            let face = [comp.with_entry(a), comp.with_entry(b)]
                .into_iter()
                .find(|f| !prev.contains(f))
                .unwrap();
            let witness = dropped[q - 1]
                .iter()
                .find(|e| e.label == face)
                .map_or(0, |e| e.witness);
            dropped[q].push(Eliminated { label: k, witness });
        }
        kq.sort();
        dropped[q].sort_by(|a, b| a.label.cmp(&b.label));
        kept[q] = kq;
    }
    EliminationReport {
        direction: dir,
        kept,
        dropped,
    }
}

/// Restriction of `c` to the kept labels of `report`.
pub fn extract_subcomplex(c: &FreeComplex, report: &EliminationReport) -> Result<FreeComplex> {
    let keep = report.kept_set();
    let kind = match (c.kind(), report.direction) {
        (ComplexKind::Taylor, Direction::Forward) => ComplexKind::Lyubeznik,
        (ComplexKind::Taylor, Direction::Reverse) => ComplexKind::LyubeznikReverse,
        _ => ComplexKind::Custom,
    };
    c.restrict(kind, |l| keep.contains(l), report.eliminated())
}

/// Restriction of `c` to an arbitrary label set, which must be closed under `δ`.
pub fn restrict_to_labels(c: &FreeComplex, keep: &BTreeSet<IndexSeq>) -> Result<FreeComplex> {
    let eliminated = c
        .all_labels()
        .filter(|l| !keep.contains(*l))
        .map(|l| Eliminated {
            label: l.clone(),
            witness: 0,
        })
        .collect();
    c.restrict(ComplexKind::Custom, |l| keep.contains(l), eliminated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{scalar, VarContext};
    use crate::division::is_groebner;
    use crate::orders::{BaseOrder, SchreyerOrder, TaylorOrder};
    use crate::taylor::{build_taylor, LabelOrder};
    use proptest::prelude::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial::new(e.iter().copied())
    }

    fn seq(e: &[usize]) -> IndexSeq {
        IndexSeq::new(e.iter().copied()).unwrap()
    }

    fn xy_xz_yz() -> FreeComplex {
        build_taylor(
            &VarContext::numbered(3),
            &[m(&[1, 1, 0]), m(&[1, 0, 1]), m(&[0, 1, 1])],
            12,
        )
        .unwrap()
    }

    fn xx_xy_yy() -> FreeComplex {
        build_taylor(
            &VarContext::numbered(2),
            &[m(&[2, 0]), m(&[1, 1]), m(&[0, 2])],
            12,
        )
        .unwrap()
    }

    #[test]
    fn syzygy_of_monomials() {
        let t = xx_xy_yy();
        let g: Vec<_> = t
            .delta_set(0, LabelOrder::Ascending)
            .unwrap()
            .into_iter()
            .map(|(_, d)| d)
            .collect();
        let syz = schreyer_syzygy(&g, 2, 1, &BaseOrder::lex(2), SPolyNormalization::Monic)
            .unwrap()
            .unwrap();
        let labels: Vec<_> = (1..=3).map(IndexSeq::single).collect();
        assert_eq!(
            &syz.relabel(&labels),
            t.differential(&seq(&[1, 2])).unwrap()
        );
        assert!(apply_syzygy(&g, &syz.element).unwrap().is_zero());
    }

    #[test]
    fn syzygy_reports_non_groebner_input() {
        let p = |ts: &[&[u32]]| {
            ModuleElement::from_terms(
                0,
                ts.iter().map(|e| ModuleTerm::unit(m(e), IndexSeq::empty())),
            )
            .unwrap()
        };
        let g = [p(&[&[2, 0], &[0, 1]]), p(&[&[1, 1]])];
        let err = schreyer_syzygy(&g, 1, 2, &BaseOrder::lex(2), SPolyNormalization::Monic);
        assert!(matches!(err, Err(Error::NotGroebner(_))));
        let a = ModuleElement::from_term(ModuleTerm::unit(m(&[1, 0]), IndexSeq::single(1)));
        let b = ModuleElement::from_term(ModuleTerm::unit(m(&[1, 0]), IndexSeq::single(2)));
        assert_eq!(
            schreyer_syzygy(&[a, b], 1, 2, &BaseOrder::lex(2), SPolyNormalization::Monic).unwrap(),
            None
        );
    }

    #[test]
    fn chain_criterion_examples() {
        let all: BTreeSet<_> = [(1, 2), (1, 3), (2, 3)].into_iter().collect();
        let out = chain_criterion_eliminate(
            &all,
            &[m(&[1, 1, 0]), m(&[1, 0, 1]), m(&[0, 1, 1])],
            ChainMode::Unrestricted,
        );
        assert_eq!(out.kept, [(1, 2), (1, 3)].into_iter().collect());
        assert_eq!(out.removed, vec![((2, 3), 1)]);

        let out = chain_criterion_eliminate(
            &all,
            &[m(&[2, 0]), m(&[1, 1]), m(&[0, 2])],
            ChainMode::Unrestricted,
        );
        assert_eq!(out.removed, vec![((1, 3), 2)]);
        let out = chain_criterion_eliminate(
            &all,
            &[m(&[2, 0]), m(&[1, 1]), m(&[0, 2])],
            ChainMode::Lyubeznik(Direction::Forward),
        );
        assert!(out.removed.is_empty());

        let coprime = [m(&[1, 0, 0]), m(&[0, 1, 0]), m(&[0, 0, 1])];
        let out = chain_criterion_eliminate(&all, &coprime, ChainMode::Unrestricted);
        assert_eq!(out.kept, all);
    }

    #[test]
    fn lyubeznik_examples() {
        let t = xy_xz_yz();
        let fwd = lyubeznik_filter(&t, Direction::Forward);
        assert_eq!(
            fwd.eliminated(),
            vec![
                Eliminated {
                    label: seq(&[2, 3]),
                    witness: 1
                },
                Eliminated {
                    label: seq(&[1, 2, 3]),
                    witness: 1
                },
            ]
        );
        assert_eq!(fwd.kept[2], vec![seq(&[1, 2]), seq(&[1, 3])]);
        let l = extract_subcomplex(&t, &fwd).unwrap();
        assert_eq!(l.ranks(), vec![1, 3, 2, 0]);
        assert_eq!(l.kind(), ComplexKind::Lyubeznik);

        let rev = lyubeznik_filter(&t, Direction::Reverse);
        assert_eq!(
            rev.eliminated(),
            vec![
                Eliminated {
                    label: seq(&[1, 2]),
                    witness: 3
                },
                Eliminated {
                    label: seq(&[1, 2, 3]),
                    witness: 3
                },
            ]
        );

        let t2 = xx_xy_yy();
        for dir in [Direction::Forward, Direction::Reverse] {
            let rep = lyubeznik_filter(&t2, dir);
            assert!(rep.eliminated().is_empty());
            assert_eq!(
                extract_subcomplex(&t2, &rep).unwrap().ranks(),
                vec![1, 3, 3, 1]
            );
        }

        let one = build_taylor(&VarContext::numbered(1), &[m(&[3])], 12).unwrap();
        assert!(lyubeznik_filter(&one, Direction::Forward)
            .eliminated()
            .is_empty());
    }

    #[test]
    fn unit_generator_does_not_drop_the_empty_tail() {
        // M = {1, x}: dropping v_(2) via an empty tail would break exactness
        let t = build_taylor(&VarContext::numbered(1), &[m(&[0]), m(&[1])], 12).unwrap();
        let rep = lyubeznik_filter(&t, Direction::Forward);
        assert_eq!(
            rep.eliminated(),
            vec![
                Eliminated {
                    label: seq(&[2]),
                    witness: 1
                },
                Eliminated {
                    label: seq(&[1, 2]),
                    witness: 1
                },
            ]
        );
    }

    #[test]
    fn extract_full_and_illegal() {
        let t = xy_xz_yz();
        let all: BTreeSet<IndexSeq> = t.all_labels().cloned().collect();
        let same = restrict_to_labels(&t, &all).unwrap();
        assert_eq!(same.ranks(), t.ranks());
        let mut bad = all.clone();
        bad.remove(&seq(&[1, 2]));
        assert!(matches!(
            restrict_to_labels(&t, &bad),
            Err(Error::NotASubcomplex { .. })
        ));
    }

    #[test]
    fn chain_route_on_fixtures() {
        for t in [xy_xz_yz(), xx_xy_yy()] {
            for dir in [Direction::Forward, Direction::Reverse] {
                let a = chain_route(&t, dir);
                let b = lyubeznik_filter(&t, dir);
                assert_eq!(a.kept, b.kept);
            }
        }
    }

    fn arb_monomials() -> impl Strategy<Value = Vec<Monomial>> {
        (1usize..=4, 1usize..=6).prop_flat_map(|(n, r)| {
            proptest::collection::btree_set(proptest::collection::vec(0u32..=3, n), 1..=r)
                .prop_map(|s| s.into_iter().map(Monomial::new).collect::<Vec<_>>())
                .prop_shuffle()
        })
    }

    proptest! {
        #[test]
        fn chain_route_matches_filter(mons in arb_monomials()) {
            let t = build_taylor(&VarContext::numbered(mons[0].n()), &mons, 12).unwrap();
            for dir in [Direction::Forward, Direction::Reverse] {
                let a = chain_route(&t, dir);
                let b = lyubeznik_filter(&t, dir);
                prop_assert_eq!(&a.kept, &b.kept);
                prop_assert!(extract_subcomplex(&t, &b).is_ok());
            }
        }

        #[test]
        fn syzygies_vanish_and_form_groebner_basis(mons in arb_monomials()) {
            let n = mons[0].n();
            let t = build_taylor(&VarContext::numbered(n), &mons, 12).unwrap();
            for q in 0..t.top().min(3) {
                let g: Vec<_> = t.delta_set(q, LabelOrder::Descending).unwrap().into_iter().map(|(_, d)| d).collect();
                let o = TaylorOrder::forward(BaseOrder::lex(n), mons.clone());
                let basis = schreyer_basis(&g, &o).unwrap();
                for s in &basis {
                    prop_assert!(apply_syzygy(&g, &s.element).unwrap().is_zero());
                    let lead = apply_syzygy(&g, &s.lead_syzygy).unwrap();
                    // lead syzygy kills the leading terms only
                    prop_assert!(lead.is_zero() || crate::orders::leading_term(&lead, &o).is_ok());
                }
                if !basis.is_empty() {
                    let elems: Vec<_> = basis.iter().map(|s| s.element.clone()).collect();
                    let so = SchreyerOrder::new(g.clone(), o.clone()).unwrap();
                    prop_assert!(is_groebner(&elems, &so).unwrap().is_groebner());
                }
            }
        }
    }

    #[test]
    fn lead_syzygy_shape() {
        let t = xx_xy_yy();
        let g: Vec<_> = t
            .delta_set(0, LabelOrder::Ascending)
            .unwrap()
            .into_iter()
            .map(|(_, d)| d)
            .collect();
        let s = schreyer_syzygy(&g, 1, 3, &BaseOrder::lex(2), SPolyNormalization::Monic)
            .unwrap()
            .unwrap();
        let expect = ModuleElement::from_terms(
            1,
            [
                basis_term(scalar(1), m(&[0, 2]), 1),
                basis_term(scalar(-1), m(&[2, 0]), 3),
            ],
        )
        .unwrap();
        assert_eq!(s.lead_syzygy, expect);
    }
}
