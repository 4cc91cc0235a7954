//! The Taylor complex `T = P ⊗ ΛV` of a monomial set and labelled
//! subcomplexes of it.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use itertools::Itertools;

use crate::algebra::{
    label_lcm, scalar, IndexSeq, ModuleElement, ModuleTerm, Monomial, VarContext,
};
use crate::error::{Error, Result};

/// Default bound on the number of generators (the complex has `2^r` of them).
pub const DEFAULT_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ComplexKind {
    Taylor,
    Lyubeznik,
    LyubeznikReverse,
    /// Anything assembled by hand or by a retract.
    Custom,
}

impl ComplexKind {
    pub fn name(self) -> &'static str {
        match self {
            ComplexKind::Taylor => "taylor",
            ComplexKind::Lyubeznik => "lyubeznik",
            ComplexKind::LyubeznikReverse => "lyubeznik-reverse",
            ComplexKind::Custom => "custom",
        }
    }
}

impl fmt::Display for ComplexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ComplexKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "taylor" => Ok(ComplexKind::Taylor),
            "lyubeznik" => Ok(ComplexKind::Lyubeznik),
            "lyubeznik-reverse" => Ok(ComplexKind::LyubeznikReverse),
            "custom" => Ok(ComplexKind::Custom),
            other => Err(format!("unknown complex kind `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelOrder {
    Ascending,
    Descending,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub label: IndexSeq,
    pub multidegree: Monomial,
}

/// A label removed from the Taylor complex together with the index `i`
/// whose monomial witnessed the removal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eliminated {
    pub label: IndexSeq,
    pub witness: usize,
}

/// Graded free complex whose generators are labelled by index sequences into
/// a fixed monomial list, with `multidegree(v_k) = m_k`.
///
/// Degree `q` holds labels of length `q`, sorted ascending. There is always
/// a degree for every `q = 0..=r`, possibly empty.
#[derive(Clone, PartialEq, Eq)]
pub struct FreeComplex {
    context: VarContext,
    monomials: Vec<Monomial>,
    kind: ComplexKind,
    degrees: Vec<Vec<Generator>>,
    index: Vec<HashMap<IndexSeq, usize>>,
    // diff[q][p] = δ of the p-th generator of degree q; diff[0] is empty
    diff: Vec<Vec<ModuleElement>>,
    eliminated: Vec<Eliminated>,
}

/// Taylor differential `δv_k = Σ_ℓ (−1)^{ℓ−1} (m_k/m_{k_ℓ}) v_{k_ℓ}`.
pub fn taylor_differential(monomials: &[Monomial], k: &IndexSeq) -> ModuleElement {
    let q = k.len();
    if q == 0 {
        return ModuleElement::zero(0);
    }
    let mk = label_lcm(monomials, k);
    let terms = (0..q).map(|p| {
        let sub = k.without_position(p);
        let c = if p % 2 == 0 { scalar(1) } else { scalar(-1) };
        ModuleTerm::new(c, mk.div(&label_lcm(monomials, &sub)), sub)
    });
    ModuleElement::from_terms(q - 1, terms).expect("faces have length q-1")
}

fn validate_monomials(context: &VarContext, monomials: &[Monomial]) -> Result<()> {
    if monomials.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut seen: HashMap<&Monomial, usize> = HashMap::new();
    for (p, m) in monomials.iter().enumerate() {
        context.check(m)?;
        if let Some(&first) = seen.get(m) {
            return Err(Error::Duplicate {
                first,
                second: p + 1,
            });
        }
        seen.insert(m, p + 1);
    }
    Ok(())
}

/// Builds the full Taylor complex of `monomials` (in the given order).
pub fn build_taylor(
    context: &VarContext,
    monomials: &[Monomial],
    cap: usize,
) -> Result<FreeComplex> {
    validate_monomials(context, monomials)?;
    let r = monomials.len();
    if r > cap {
        return Err(Error::Capacity { r, cap });
    }
    let labels: Vec<Vec<IndexSeq>> = (0..=r)
        .map(|q| (1..=r).combinations(q).map(IndexSeq::from_sorted).collect())
        .collect();
    let diff = labels
        .iter()
        .map(|ls| {
            if ls.first().is_some_and(|l| !l.is_empty()) {
                ls.iter()
                    .map(|k| taylor_differential(monomials, k))
                    .collect()
            } else {
                Vec::new()
            }
        })
        .collect();
    Ok(FreeComplex::assemble(
        context.clone(),
        monomials.to_vec(),
        ComplexKind::Taylor,
        labels,
        diff,
        Vec::new(),
    ))
}

impl FreeComplex {
    fn assemble(
        context: VarContext,
        monomials: Vec<Monomial>,
        kind: ComplexKind,
        labels: Vec<Vec<IndexSeq>>,
        diff: Vec<Vec<ModuleElement>>,
        eliminated: Vec<Eliminated>,
    ) -> Self {
        let index = labels
            .iter()
            .map(|ls| {
                ls.iter()
                    .cloned()
                    .enumerate()
                    .map(|(p, l)| (l, p))
                    .collect()
            })
            .collect();
        let degrees = labels
            .into_iter()
            .map(|ls| {
                ls.into_iter()
                    .map(|label| Generator {
                        multidegree: label_lcm(&monomials, &label),
                        label,
                    })
                    .collect()
            })
            .collect();
        FreeComplex {
            context,
            monomials,
            kind,
            degrees,
            index,
            diff,
            eliminated,
        }
    }

    /// Assembles a complex from explicit generators and differentials.
    ///
    /// `differential` must contain an entry for every generator of degree
    /// `q ≥ 1`, living in degree `q − 1` and only referencing generators
    /// present there. Nothing else is checked; in particular `δ² = 0` is
    /// left to [`crate::verify::check_d_squared`].
    pub fn from_parts(
        context: VarContext,
        monomials: Vec<Monomial>,
        kind: ComplexKind,
        generators: Vec<Vec<IndexSeq>>,
        mut differential: BTreeMap<IndexSeq, ModuleElement>,
        eliminated: Vec<Eliminated>,
    ) -> Result<Self> {
        validate_monomials(&context, &monomials)?;
        let r = monomials.len();
        let mut labels = generators;
        if labels.len() > r + 1 {
            return Err(Error::Malformed(format!(
                "{} degrees for {r} generators",
                labels.len()
            )));
        }
        labels.resize(r + 1, Vec::new());
        for (q, ls) in labels.iter_mut().enumerate() {
            for l in ls.iter() {
                if l.len() != q {
                    return Err(Error::Degree {
                        expected: q,
                        found: l.len(),
                    });
                }
                if l.max_entry() > r {
                    return Err(Error::Index {
                        index: l.max_entry(),
                        len: r,
                    });
                }
            }
            ls.sort();
            if let Some(w) = ls.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::Malformed(format!("generator {} listed twice", w[0])));
            }
        }
        let mut diff = vec![Vec::new(); r + 1];
        for q in 1..=r {
            for l in &labels[q] {
                let d = differential
                    .remove(l)
                    .ok_or_else(|| Error::Malformed(format!("no differential for {l}")))?;
                if d.degree() != q - 1 {
                    return Err(Error::Degree {
                        expected: q - 1,
                        found: d.degree(),
                    });
                }
                if let Some(bad) = d.labels().find(|t| labels[q - 1].binary_search(t).is_err()) {
                    return Err(Error::NotASubcomplex {
                        label: l.clone(),
                        missing: bad.clone(),
                    });
                }
                diff[q].push(d);
            }
        }
        if let Some(extra) = differential.keys().next() {
            return Err(Error::Label(extra.clone()));
        }
        Ok(Self::assemble(
            context, monomials, kind, labels, diff, eliminated,
        ))
    }

    /// Restriction to `kept` labels, which must be closed under `δ`.
    pub(crate) fn restrict(
        &self,
        kind: ComplexKind,
        mut keep: impl FnMut(&IndexSeq) -> bool,
        eliminated: Vec<Eliminated>,
    ) -> Result<Self> {
        let labels: Vec<Vec<IndexSeq>> = self
            .degrees
            .iter()
            .map(|gs| {
                gs.iter()
                    .map(|g| g.label.clone())
                    .filter(|l| keep(l))
                    .collect()
            })
            .collect();
        let mut diff = vec![Vec::new(); labels.len()];
        for q in 1..labels.len() {
            for l in &labels[q] {
                let d = self.differential(l)?;
                if let Some(bad) = d.labels().find(|t| labels[q - 1].binary_search(t).is_err()) {
                    return Err(Error::NotASubcomplex {
                        label: l.clone(),
                        missing: bad.clone(),
                    });
                }
                diff[q].push(d.clone());
            }
        }
        Ok(Self::assemble(
            self.context.clone(),
            self.monomials.clone(),
            kind,
            labels,
            diff,
            eliminated,
        ))
    }

    /// Copy with one differential replaced; used to build corrupted complexes.
    pub fn with_differential(&self, label: &IndexSeq, d: ModuleElement) -> Result<Self> {
        let q = label.len();
        let p = self.position(label)?;
        if q == 0 || d.degree() != q - 1 {
            return Err(Error::Degree {
                expected: q.saturating_sub(1),
                found: d.degree(),
            });
        }
        let mut out = self.clone();
        out.diff[q][p] = d;
        out.kind = ComplexKind::Custom;
        Ok(out)
    }

    pub fn context(&self) -> &VarContext {
        &self.context
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn n(&self) -> usize {
        self.context.n()
    }

    pub fn r(&self) -> usize {
        self.monomials.len()
    }

    pub fn kind(&self) -> ComplexKind {
        self.kind
    }

    /// Highest degree index (always `r`; higher degrees may be empty).
    pub fn top(&self) -> usize {
        self.degrees.len() - 1
    }

    pub fn generators(&self, q: usize) -> &[Generator] {
        self.degrees.get(q).map_or(&[], Vec::as_slice)
    }

    pub fn labels(&self, q: usize) -> impl Iterator<Item = &IndexSeq> {
        self.generators(q).iter().map(|g| &g.label)
    }

    pub fn all_labels(&self) -> impl Iterator<Item = &IndexSeq> {
        self.degrees.iter().flatten().map(|g| &g.label)
    }

    pub fn rank(&self, q: usize) -> usize {
        self.generators(q).len()
    }

    /// Ranks of degrees `0..=r`.
    pub fn ranks(&self) -> Vec<usize> {
        self.degrees.iter().map(Vec::len).collect()
    }

    /// Ranks with trailing zeros removed.
    pub fn ranks_trimmed(&self) -> Vec<usize> {
        let mut v = self.ranks();
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }

    pub fn eliminated(&self) -> &[Eliminated] {
        &self.eliminated
    }

    pub fn contains(&self, label: &IndexSeq) -> bool {
        self.index
            .get(label.len())
            .is_some_and(|m| m.contains_key(label))
    }

    fn position(&self, label: &IndexSeq) -> Result<usize> {
        self.index
            .get(label.len())
            .and_then(|m| m.get(label))
            .copied()
            .ok_or_else(|| Error::Label(label.clone()))
    }

    pub fn multidegree(&self, label: &IndexSeq) -> Result<&Monomial> {
        let p = self.position(label)?;
        Ok(&self.degrees[label.len()][p].multidegree)
    }

    /// `δv_k` for a generator `k` of degree `≥ 1`; the zero element of
    /// degree 0 for `v_∅`.
    pub fn differential(&self, label: &IndexSeq) -> Result<&ModuleElement> {
        static EMPTY: std::sync::OnceLock<ModuleElement> = std::sync::OnceLock::new();
        let p = self.position(label)?;
        if label.is_empty() {
            return Ok(EMPTY.get_or_init(|| ModuleElement::zero(0)));
        }
        Ok(&self.diff[label.len()][p])
    }

    /// `P`-linear extension of the differential. Degree-0 input maps to the
    /// zero element of degree 0 (the augmentation is not represented).
    pub fn delta(&self, u: &ModuleElement) -> Result<ModuleElement> {
        let q = u.degree();
        if q == 0 {
            return Ok(ModuleElement::zero(0));
        }
        let mut out = ModuleElement::zero(q - 1);
        for (l, m, c) in u.iter() {
            out.add_scaled(c, Some(m), self.differential(l)?)?;
        }
        Ok(out)
    }

    /// `Δ_q = {δv_k : |k| = q + 1}` with the labels `k`, in the requested order.
    pub fn delta_set(&self, q: usize, order: LabelOrder) -> Result<Vec<(IndexSeq, ModuleElement)>> {
        if q >= self.top() {
            return Err(Error::DegreeOutOfRange { q, top: self.top() });
        }
        let mut out: Vec<_> = self.degrees[q + 1]
            .iter()
            .zip(&self.diff[q + 1])
            .map(|(g, d)| (g.label.clone(), d.clone()))
            .collect();
        if order == LabelOrder::Descending {
            out.reverse();
        }
        Ok(out)
    }

    /// The generator `v_k` as a module element.
    pub fn generator(&self, label: &IndexSeq) -> ModuleElement {
        ModuleElement::generator(self.n(), label.clone())
    }
}

impl fmt::Debug for FreeComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} complex on {:?}, ranks {:?}",
            self.kind,
            self.monomials,
            self.ranks()
        )?;
        for q in 1..self.degrees.len() {
            for (g, d) in self.degrees[q].iter().zip(&self.diff[q]) {
                writeln!(f, "  δ{:?} = {:?}", g.label, d)?;
            }
        }
        Ok(())
    }
}
