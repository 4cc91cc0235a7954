//! Exact arithmetic for monomials, polynomials and free-module elements
//! over the rationals.
//!
//! Free-module terms carry an [`IndexSeq`] label. In the Taylor complex the
//! label of degree `q` is a strictly increasing sequence `k = (k_1,…,k_q)`
//! naming the wedge generator `v_k`; in a generic free module of rank `s`
//! the label is a single index `(α)` naming the basis vector `e_α`.
//! Indices are 1-based throughout.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Coefficient field: exact rationals, always in lowest terms.
pub type Scalar = BigRational;

pub fn scalar(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// Ordered list of variable names for `k[x_1,…,x_n]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarContext {
    names: Vec<String>,
}

impl VarContext {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::InvalidContext(
                "at least one variable is required".into(),
            ));
        }
        for (i, a) in names.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::InvalidContext(format!(
                    "variable {} has an empty name",
                    i + 1
                )));
            }
            if names[..i].contains(a) {
                return Err(Error::InvalidContext(format!(
                    "variable `{a}` declared twice"
                )));
            }
        }
        Ok(VarContext { names })
    }

    /// Variables `x1,…,xn`.
    pub fn numbered(n: usize) -> Self {
        VarContext {
            names: (1..=n).map(|i| format!("x{i}")).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|v| v == name)
    }

    pub fn check(&self, m: &Monomial) -> Result<()> {
        if m.n() != self.n() {
            return Err(Error::Context {
                expected: self.n(),
                found: m.n(),
            });
        }
        Ok(())
    }

    pub fn display<'a>(&'a self, m: &'a Monomial) -> MonomialDisplay<'a> {
        MonomialDisplay { ctx: self, mono: m }
    }
}

/// A monomial `x^μ`, stored as a dense exponent vector.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    exps: SmallVec<[u32; 8]>,
}

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial {
            exps: SmallVec::from_elem(0, n),
        }
    }

    pub fn new(exps: impl IntoIterator<Item = u32>) -> Self {
        Monomial {
            exps: exps.into_iter().collect(),
        }
    }

    pub fn var(n: usize, i: usize, e: u32) -> Self {
        let mut m = Monomial::one(n);
        m.exps[i] = e;
        m
    }

    pub fn n(&self) -> usize {
        self.exps.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn total_degree(&self) -> u64 {
        self.exps.iter().map(|&e| e as u64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.n(), other.n());
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(&a, &b)| a.max(b))
                .collect(),
        }
    }

    /// `self | other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        debug_assert_eq!(self.n(), other.n());
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.n(), other.n());
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    /// `self / other`, if `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        debug_assert_eq!(self.n(), other.n());
        let mut exps = SmallVec::with_capacity(self.n());
        for (&a, &b) in self.exps.iter().zip(&other.exps) {
            exps.push(a.checked_sub(b)?);
        }
        Some(Monomial { exps })
    }

    /// `self / other`; panics when `other` does not divide `self`.
    pub fn div(&self, other: &Monomial) -> Monomial {
        self.checked_div(other)
            .expect("monomial quotient of non-divisible pair")
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{:?}", self.exps.as_slice())
    }
}

pub struct MonomialDisplay<'a> {
    ctx: &'a VarContext,
    mono: &'a Monomial,
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mono.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (name, &e) in self.ctx.names.iter().zip(self.mono.exponents()) {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
        Ok(())
    }
}

/// lcm of a nonempty list of monomials sharing one context.
pub fn lcm_of(ms: &[Monomial]) -> Result<Monomial> {
    let (first, rest) = ms.split_first().ok_or(Error::ZeroElement)?;
    let mut out = first.clone();
    for m in rest {
        if m.n() != first.n() {
            return Err(Error::Context {
                expected: first.n(),
                found: m.n(),
            });
        }
        out = out.lcm(m);
    }
    Ok(out)
}

pub fn divides(a: &Monomial, b: &Monomial) -> Result<bool> {
    if a.n() != b.n() {
        return Err(Error::Context {
            expected: a.n(),
            found: b.n(),
        });
    }
    Ok(a.divides(b))
}

/// `m_k = lcm{m_{k_1},…,m_{k_q}}`, with `m_∅ = 1`.
pub fn label_lcm(monomials: &[Monomial], k: &IndexSeq) -> Monomial {
    let n = monomials.first().map_or(0, Monomial::n);
    k.iter()
        .fold(Monomial::one(n), |acc, i| acc.lcm(&monomials[i - 1]))
}

/// Strictly increasing sequence of 1-based generator indices.
///
/// The derived `Ord` is lexicographic with a proper prefix comparing smaller,
/// which on equal-length sequences is exactly the order that decides at the
/// first position of disagreement.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct IndexSeq(SmallVec<[usize; 6]>);

impl IndexSeq {
    pub fn empty() -> Self {
        IndexSeq(SmallVec::new())
    }

    pub fn new(entries: impl IntoIterator<Item = usize>) -> Result<Self> {
        let v: SmallVec<[usize; 6]> = entries.into_iter().collect();
        let ok = v.first().is_none_or(|&e| e >= 1) && v.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(Error::InvalidIndexSeq(v.to_vec()));
        }
        Ok(IndexSeq(v))
    }

    /// Constructor for sequences already known to be valid.
    pub(crate) fn from_sorted(v: impl IntoIterator<Item = usize>) -> Self {
        let s = IndexSeq(v.into_iter().collect());
        debug_assert!(s.0.windows(2).all(|w| w[0] < w[1]));
        s
    }

    pub fn single(i: usize) -> Self {
        IndexSeq(SmallVec::from_slice(&[i]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn max_entry(&self) -> usize {
        self.last().unwrap_or(0)
    }

    /// The sequence with the entry at 0-based position `pos` removed.
    pub fn without_position(&self, pos: usize) -> IndexSeq {
        let mut v = self.0.clone();
        v.remove(pos);
        IndexSeq(v)
    }

    /// Insert `i` (not already present) keeping the sequence increasing.
    pub fn with_entry(&self, i: usize) -> IndexSeq {
        let mut v = self.0.clone();
        match v.binary_search(&i) {
            Ok(_) => panic!("index {i} already present in {self}"),
            Err(p) => v.insert(p, i),
        }
        IndexSeq(v)
    }

    /// `k_{>i}`: entries strictly greater than `i`.
    pub fn above(&self, i: usize) -> IndexSeq {
        IndexSeq(self.0.iter().copied().filter(|&e| e > i).collect())
    }

    /// `k_{<i}`: entries strictly less than `i`.
    pub fn below(&self, i: usize) -> IndexSeq {
        IndexSeq(self.0.iter().copied().filter(|&e| e < i).collect())
    }
}

impl fmt::Display for IndexSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (p, e) in self.0.iter().enumerate() {
            if p > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for IndexSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{self}")
    }
}

/// A polynomial: finite map monomial → nonzero coefficient.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, coeff: &Scalar, mono: &Monomial) {
        add_coeff(&mut self.terms, mono.clone(), coeff);
    }
}

fn add_coeff<K: Ord>(map: &mut BTreeMap<K, Scalar>, key: K, c: &Scalar) {
    use std::collections::btree_map::Entry;
    if c.is_zero() {
        return;
    }
    match map.entry(key) {
        Entry::Vacant(e) => {
            e.insert(c.clone());
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// One term `c · x^μ · v_k` of a free-module element.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModuleTerm {
    pub coeff: Scalar,
    pub mono: Monomial,
    pub label: IndexSeq,
}

impl ModuleTerm {
    pub fn new(coeff: Scalar, mono: Monomial, label: IndexSeq) -> Self {
        ModuleTerm { coeff, mono, label }
    }

    pub fn unit(mono: Monomial, label: IndexSeq) -> Self {
        ModuleTerm {
            coeff: Scalar::one(),
            mono,
            label,
        }
    }
}

/// Element of a free module component whose generators are labelled by
/// index sequences of one fixed length (the form degree).
///
/// Terms are kept keyed by `(label, monomial)` in structural order, so equal
/// elements have equal representations. Ordering under a term order is
/// obtained on demand with [`ModuleElement::sorted_terms`].
#[derive(Clone, PartialEq, Eq)]
pub struct ModuleElement {
    degree: usize,
    terms: BTreeMap<(IndexSeq, Monomial), Scalar>,
}

impl ModuleElement {
    pub fn zero(degree: usize) -> Self {
        ModuleElement {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_term(t: ModuleTerm) -> Self {
        let mut u = ModuleElement::zero(t.label.len());
        add_coeff(&mut u.terms, (t.label, t.mono), &t.coeff);
        u
    }

    /// The generator `v_k` itself, with monomial 1 in `n` variables.
    pub fn generator(n: usize, label: IndexSeq) -> Self {
        ModuleElement::from_term(ModuleTerm::unit(Monomial::one(n), label))
    }

    /// Sums up the given terms, merging repeated `(label, monomial)` pairs
    /// and dropping zeros.
    pub fn from_terms(degree: usize, terms: impl IntoIterator<Item = ModuleTerm>) -> Result<Self> {
        let mut u = ModuleElement::zero(degree);
        for t in terms {
            if t.label.len() != degree {
                return Err(Error::Degree {
                    expected: degree,
                    found: t.label.len(),
                });
            }
            add_coeff(&mut u.terms, (t.label, t.mono), &t.coeff);
        }
        Ok(u)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = ModuleTerm> + '_ {
        self.terms.iter().map(|((l, m), c)| ModuleTerm {
            coeff: c.clone(),
            mono: m.clone(),
            label: l.clone(),
        })
    }

    /// Borrowing iterator over `(label, monomial, coefficient)`.
    pub fn iter(&self) -> impl Iterator<Item = (&IndexSeq, &Monomial, &Scalar)> {
        self.terms.iter().map(|((l, m), c)| (l, m, c))
    }

    pub fn coefficient(&self, label: &IndexSeq, mono: &Monomial) -> Scalar {
        self.terms
            .get(&(label.clone(), mono.clone()))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn labels(&self) -> impl Iterator<Item = &IndexSeq> {
        self.terms.keys().map(|(l, _)| l)
    }

    /// Terms sorted strictly descending under `order`.
    pub fn sorted_terms<O: crate::orders::TermOrder + ?Sized>(&self, order: &O) -> Vec<ModuleTerm> {
        let mut ts: Vec<ModuleTerm> = self.terms().collect();
        ts.sort_by(|a, b| order.cmp_terms(&b.mono, &b.label, &a.mono, &a.label));
        ts
    }

    fn check_degree(&self, other: &ModuleElement) -> Result<()> {
        if self.degree != other.degree {
            return Err(Error::Degree {
                expected: self.degree,
                found: other.degree,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &ModuleElement) -> Result<ModuleElement> {
        let mut out = self.clone();
        out.add_scaled(&Scalar::one(), None, other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &ModuleElement) -> Result<ModuleElement> {
        let mut out = self.clone();
        out.add_scaled(&-Scalar::one(), None, other)?;
        Ok(out)
    }

    pub fn neg(&self) -> ModuleElement {
        ModuleElement {
            degree: self.degree,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }

    /// `self += coeff · mono · other` (`mono = None` meaning 1).
    pub fn add_scaled(
        &mut self,
        coeff: &Scalar,
        mono: Option<&Monomial>,
        other: &ModuleElement,
    ) -> Result<()> {
        self.check_degree(other)?;
        if coeff.is_zero() {
            return Ok(());
        }
        for ((l, m), c) in &other.terms {
            let m = match mono {
                Some(s) => s.mul(m),
                None => m.clone(),
            };
            add_coeff(&mut self.terms, (l.clone(), m), &(coeff * c));
        }
        Ok(())
    }

    pub fn add_term(&mut self, t: &ModuleTerm) -> Result<()> {
        if t.label.len() != self.degree {
            return Err(Error::Degree {
                expected: self.degree,
                found: t.label.len(),
            });
        }
        add_coeff(&mut self.terms, (t.label.clone(), t.mono.clone()), &t.coeff);
        Ok(())
    }

    /// `coeff · mono · self`.
    pub fn scale(&self, coeff: &Scalar, mono: &Monomial) -> ModuleElement {
        if coeff.is_zero() {
            return ModuleElement::zero(self.degree);
        }
        ModuleElement {
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|((l, m), c)| ((l.clone(), mono.mul(m)), coeff * c))
                .collect(),
        }
    }

    /// `p · self` for a polynomial `p`.
    pub fn mul_poly(&self, p: &Polynomial) -> ModuleElement {
        let mut out = ModuleElement::zero(self.degree);
        for (m, c) in p.terms() {
            out.add_scaled(c, Some(m), self).expect("same degree");
        }
        out
    }

    /// Keeps only the terms whose label satisfies `keep`.
    pub fn filter_labels(&self, mut keep: impl FnMut(&IndexSeq) -> bool) -> ModuleElement {
        ModuleElement {
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .filter(|((l, _), _)| keep(l))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Relabels every term; the map must be injective on the labels present.
    pub fn relabel(
        &self,
        degree: usize,
        mut map: impl FnMut(&IndexSeq) -> IndexSeq,
    ) -> ModuleElement {
        let mut out = ModuleElement::zero(degree);
        for ((l, m), c) in &self.terms {
            add_coeff(&mut out.terms, (map(l), m.clone()), c);
        }
        out
    }
}

impl fmt::Debug for ModuleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0[q={}]", self.degree);
        }
        for (p, ((l, m), c)) in self.terms.iter().enumerate() {
            if p > 0 {
                write!(f, " + ")?;
            }
            if c.is_negative() {
                write!(f, "({c})")?;
            } else {
                write!(f, "{c}")?;
            }
            write!(f, "·{m:?}·{l:?}")?;
        }
        Ok(())
    }
}
