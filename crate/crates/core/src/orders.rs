//! Term orders on polynomials and on labelled free-module terms.
//!
//! * [`BaseOrder`]: lex / graded lex / graded reverse lex on `k[x_1,…,x_n]`.
//! * [`TaylorOrder`]: the recursive orders on the Taylor components `T_q`,
//!   forward (`≺_q`) and reverse (`≺_q^r`).
//! * [`SchreyerOrder`]: the order on `P^s` induced by an ordered basis.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::algebra::{label_lcm, IndexSeq, ModuleElement, ModuleTerm, Monomial};
use crate::error::{Error, Result};

/// A total order on the terms `x^μ·v_k` of one free-module component.
pub trait TermOrder: Sync {
    fn cmp_terms(&self, am: &Monomial, al: &IndexSeq, bm: &Monomial, bl: &IndexSeq) -> Ordering;

    fn cmp(&self, a: &ModuleTerm, b: &ModuleTerm) -> Ordering {
        self.cmp_terms(&a.mono, &a.label, &b.mono, &b.label)
    }
}

impl<T: TermOrder + ?Sized> TermOrder for &T {
    fn cmp_terms(&self, am: &Monomial, al: &IndexSeq, bm: &Monomial, bl: &IndexSeq) -> Ordering {
        (**self).cmp_terms(am, al, bm, bl)
    }
}

/// Order on index sequences: decided at the first position where they
/// differ; a proper prefix is smaller.
pub fn seq_compare(k: &IndexSeq, l: &IndexSeq) -> Ordering {
    k.cmp(l)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaseKind {
    Lex,
    GrLex,
    GrevLex,
}

impl std::str::FromStr for BaseKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "lex" => Ok(BaseKind::Lex),
            "grlex" | "deglex" => Ok(BaseKind::GrLex),
            "grevlex" | "degrevlex" => Ok(BaseKind::GrevLex),
            other => Err(format!(
                "unknown term order `{other}` (expected lex, grlex or grevlex)"
            )),
        }
    }
}

/// Monomial order with a variable precedence: `precedence[0]` is the most
/// significant variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseOrder {
    kind: BaseKind,
    precedence: Vec<usize>,
}

impl BaseOrder {
    pub fn new(kind: BaseKind, n: usize) -> Self {
        BaseOrder {
            kind,
            precedence: (0..n).collect(),
        }
    }

    pub fn lex(n: usize) -> Self {
        Self::new(BaseKind::Lex, n)
    }

    pub fn grlex(n: usize) -> Self {
        Self::new(BaseKind::GrLex, n)
    }

    pub fn grevlex(n: usize) -> Self {
        Self::new(BaseKind::GrevLex, n)
    }

    /// `precedence` must be a permutation of `0..n`.
    pub fn with_precedence(kind: BaseKind, precedence: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; precedence.len()];
        for &p in &precedence {
            if p >= seen.len() || seen[p] {
                return Err(Error::InvalidContext(format!(
                    "{precedence:?} is not a variable permutation"
                )));
            }
            seen[p] = true;
        }
        Ok(BaseOrder { kind, precedence })
    }

    pub fn kind(&self) -> BaseKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.precedence.len()
    }

    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Ordering {
        let (ea, eb) = (a.exponents(), b.exponents());
        let lex = || {
            for &v in &self.precedence {
                match ea[v].cmp(&eb[v]) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        };
        match self.kind {
            BaseKind::Lex => lex(),
            BaseKind::GrLex => a.total_degree().cmp(&b.total_degree()).then_with(lex),
            BaseKind::GrevLex => a.total_degree().cmp(&b.total_degree()).then_with(|| {
                for &v in self.precedence.iter().rev() {
                    match ea[v].cmp(&eb[v]) {
                        Ordering::Equal => continue,
                        o => return o.reverse(),
                    }
                }
                Ordering::Equal
            }),
        }
    }
}

impl TermOrder for BaseOrder {
    fn cmp_terms(&self, am: &Monomial, al: &IndexSeq, bm: &Monomial, bl: &IndexSeq) -> Ordering {
        self.compare(am, bm).then_with(|| seq_compare(al, bl))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Reverse,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Reverse => "reverse",
        }
    }
}

/// The Taylor orders `≺_q` (forward) and `≺_q^r` (reverse) on `T_q`.
///
/// Comparison descends through the leading terms of the differential:
/// `lt(s·δv_k) = s·(m_k/m_{k'})·v_{k'}` where `k'` drops the first entry
/// (forward) or the last entry (reverse). At the bottom both terms have
/// reached `T_0` with monomials `s·m_k` and `t·m_l`, compared under the base
/// order. Ties are then broken level by level, starting from the length-one
/// sub-labels, by comparing sequences: forward puts the smaller sequence
/// below, reverse the larger one.
#[derive(Clone, Debug)]
pub struct TaylorOrder {
    base: BaseOrder,
    direction: Direction,
    monomials: Arc<[Monomial]>,
}

impl TaylorOrder {
    pub fn new(
        base: BaseOrder,
        direction: Direction,
        monomials: impl Into<Arc<[Monomial]>>,
    ) -> Self {
        TaylorOrder {
            base,
            direction,
            monomials: monomials.into(),
        }
    }

    pub fn forward(base: BaseOrder, monomials: impl Into<Arc<[Monomial]>>) -> Self {
        Self::new(base, Direction::Forward, monomials)
    }

    pub fn reverse(base: BaseOrder, monomials: impl Into<Arc<[Monomial]>>) -> Self {
        Self::new(base, Direction::Reverse, monomials)
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn base(&self) -> &BaseOrder {
        &self.base
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    /// Checked comparison of two terms of the same form degree.
    pub fn compare(&self, a: &ModuleTerm, b: &ModuleTerm) -> Result<Ordering> {
        if a.label.len() != b.label.len() {
            return Err(Error::Degree {
                expected: a.label.len(),
                found: b.label.len(),
            });
        }
        let r = self.monomials.len();
        for l in [&a.label, &b.label] {
            if l.max_entry() > r {
                return Err(Error::Index {
                    index: l.max_entry(),
                    len: r,
                });
            }
        }
        Ok(self.cmp_terms(&a.mono, &a.label, &b.mono, &b.label))
    }

    /// Leading term of `s·δv_k` one level down.
    pub fn lead_of_boundary(&self, s: &Monomial, k: &IndexSeq) -> Option<ModuleTerm> {
        lead_of_boundary(&self.monomials, self.direction, s, k)
    }
}

/// `lt(s·δv_k)` under the forward or reverse Taylor order, including the
/// sign of the differential. `None` for `k = ∅`.
pub fn lead_of_boundary(
    monomials: &[Monomial],
    dir: Direction,
    s: &Monomial,
    k: &IndexSeq,
) -> Option<ModuleTerm> {
    if k.is_empty() {
        return None;
    }
    let q = k.len();
    let pos = match dir {
        Direction::Forward => 0,
        Direction::Reverse => q - 1,
    };
    let sub = k.without_position(pos);
    let mono = s.mul(&label_lcm(monomials, k).div(&label_lcm(monomials, &sub)));
    let coeff = if pos % 2 == 0 {
        crate::algebra::scalar(1)
    } else {
        crate::algebra::scalar(-1)
    };
    Some(ModuleTerm::new(coeff, mono, sub))
}

impl TermOrder for TaylorOrder {
    fn cmp_terms(&self, am: &Monomial, al: &IndexSeq, bm: &Monomial, bl: &IndexSeq) -> Ordering {
        debug_assert_eq!(al.len(), bl.len());
        if al.len() != bl.len() {
            return al.len().cmp(&bl.len());
        }
        let a0 = am.mul(&label_lcm(&self.monomials, al));
        let b0 = bm.mul(&label_lcm(&self.monomials, bl));
        match self.base.compare(&a0, &b0) {
            Ordering::Equal => {}
            o => return o,
        }
        let (ka, kb) = (al.entries(), bl.entries());
        let q = ka.len();
        for level in 1..=q {
            match self.direction {
                // suffixes of growing length; they can only differ in their first entry
                Direction::Forward => {
                    let p = q - level;
                    if ka[p] != kb[p] {
                        return ka[p].cmp(&kb[p]);
                    }
                }
                // prefixes of growing length; larger sequence is the smaller term
                Direction::Reverse => {
                    let p = level - 1;
                    if ka[p] != kb[p] {
                        return kb[p].cmp(&ka[p]);
                    }
                }
            }
        }
        Ordering::Equal
    }
}

/// Maximal term of `u` under `order`.
pub fn leading_term<O: TermOrder + ?Sized>(u: &ModuleElement, order: &O) -> Result<ModuleTerm> {
    let mut best: Option<(&IndexSeq, &Monomial, &crate::algebra::Scalar)> = None;
    for (l, m, c) in u.iter() {
        best = match best {
            Some((bl, bm, _)) if order.cmp_terms(m, l, bm, bl) != Ordering::Greater => best,
            _ => Some((l, m, c)),
        };
    }
    best.map(|(l, m, c)| ModuleTerm::new(c.clone(), m.clone(), l.clone()))
        .ok_or(Error::ZeroElement)
}

/// Order on the free module with basis `e_1,…,e_s` induced by an ordered
/// list `G = (g_1,…,g_s)`: compare `lt(s·g_α)` with `lt(t·g_β)`; on a tie
/// the term on the generator with the larger index is the smaller one.
///
/// Terms of this module carry single-entry labels `(α)`, 1-based.
#[derive(Clone, Debug)]
pub struct SchreyerOrder<O> {
    generators: Vec<ModuleElement>,
    leads: Vec<ModuleTerm>,
    underlying: O,
}

impl<O: TermOrder> SchreyerOrder<O> {
    pub fn new(generators: Vec<ModuleElement>, underlying: O) -> Result<Self> {
        let leads = generators
            .iter()
            .map(|g| leading_term(g, &underlying))
            .collect::<Result<_>>()?;
        Ok(SchreyerOrder {
            generators,
            leads,
            underlying,
        })
    }

    pub fn generators(&self) -> &[ModuleElement] {
        &self.generators
    }

    pub fn leads(&self) -> &[ModuleTerm] {
        &self.leads
    }

    pub fn underlying(&self) -> &O {
        &self.underlying
    }

    fn position(&self, l: &IndexSeq) -> Result<usize> {
        let s = self.generators.len();
        match l.entries() {
            [a] if (1..=s).contains(a) => Ok(*a),
            [a] => Err(Error::Index { index: *a, len: s }),
            _ => Err(Error::Degree {
                expected: 1,
                found: l.len(),
            }),
        }
    }

    pub fn compare(&self, a: &ModuleTerm, b: &ModuleTerm) -> Result<Ordering> {
        self.position(&a.label)?;
        self.position(&b.label)?;
        Ok(self.cmp_terms(&a.mono, &a.label, &b.mono, &b.label))
    }
}

impl<O: TermOrder> TermOrder for SchreyerOrder<O> {
    fn cmp_terms(&self, am: &Monomial, al: &IndexSeq, bm: &Monomial, bl: &IndexSeq) -> Ordering {
        let alpha = al.entries()[0];
        let beta = bl.entries()[0];
        let la = &self.leads[alpha - 1];
        let lb = &self.leads[beta - 1];
        self.underlying
            .cmp_terms(&am.mul(&la.mono), &la.label, &bm.mul(&lb.mono), &lb.label)
            .then_with(|| beta.cmp(&alpha))
    }
}
