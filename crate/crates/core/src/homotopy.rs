//! Contracting homotopies of the Taylor complex, the projection `f` onto
//! the subcomplex spanned by generators outside the leading modules, the
//! splitting homotopy `φ` and strong deformation retracts.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::One;

use crate::algebra::{label_lcm, scalar, IndexSeq, ModuleElement, ModuleTerm, Monomial, Scalar};
use crate::division::{is_groebner, Divider};
use crate::error::{Error, Result};
use crate::orders::{leading_term, BaseOrder, Direction, TaylorOrder, TermOrder};
use crate::reduction::restrict_to_labels;
use crate::taylor::{FreeComplex, LabelOrder};
use crate::verify::lcm_lattice;

/// A degree `+1` map on a labelled free complex.
pub trait Homotopy: Send + Sync {
    fn apply(&self, u: &ModuleElement) -> Result<ModuleElement>;
}

/// Minimal (forward) or maximal (reverse) `i` with `m_i | x^μ·m_k`.
pub fn iota_index(
    mono: &Monomial,
    label: &IndexSeq,
    monomials: &[Monomial],
    dir: Direction,
) -> Option<usize> {
    let target = mono.mul(&label_lcm(monomials, label));
    let hit = |i: &usize| monomials[*i - 1].divides(&target);
    match dir {
        Direction::Forward => (1..=monomials.len()).find(hit),
        Direction::Reverse => (1..=monomials.len()).rev().find(hit),
    }
}

/// The explicit homotopy of the Taylor complex:
///
/// * forward `ψ(x^μ v_k) = [ι < k_1]·(x^μ m_k / m_{(ι,k)})·v_{(ι,k)}`,
/// * reverse `ψ_r(x^μ v_k) = (−1)^{|k|}·[ι > k_q]·(x^μ m_k / m_{(k,ι)})·v_{(k,ι)}`,
///
/// where the bracket is true for `k = ∅`, and both vanish when no `m_i`
/// divides `x^μ·m_k`.
#[derive(Clone, Debug)]
pub struct FrobergHomotopy {
    monomials: Vec<Monomial>,
    direction: Direction,
}

impl FrobergHomotopy {
    pub fn new(monomials: &[Monomial], direction: Direction) -> Self {
        FrobergHomotopy {
            monomials: monomials.to_vec(),
            direction,
        }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn psi_term(&self, mono: &Monomial, label: &IndexSeq) -> Option<ModuleTerm> {
        let iota = iota_index(mono, label, &self.monomials, self.direction)?;
        let admissible = match self.direction {
            Direction::Forward => label.first().is_none_or(|k1| iota < k1),
            Direction::Reverse => label.last().is_none_or(|kq| iota > kq),
        };
        if !admissible {
            return None;
        }
        let up = label.with_entry(iota);
        let m = mono
            .mul(&label_lcm(&self.monomials, label))
            .div(&label_lcm(&self.monomials, &up));
        let sign = match self.direction {
            Direction::Reverse if label.len() % 2 == 1 => scalar(-1),
            _ => Scalar::one(),
        };
        Some(ModuleTerm::new(sign, m, up))
    }
}

impl Homotopy for FrobergHomotopy {
    fn apply(&self, u: &ModuleElement) -> Result<ModuleElement> {
        let mut out = ModuleElement::zero(u.degree() + 1);
        for (l, m, c) in u.iter() {
            if let Some(mut t) = self.psi_term(m, l) {
                t.coeff *= c;
                out.add_term(&t)?;
            }
        }
        Ok(out)
    }
}

/// The same homotopy read off from leading terms: `ψ(x^μ v_k) = 0` unless
/// `x^μ v_k` lies in the leading module of `Δ_q`; otherwise it is the term
/// `c·x^ν·v_l` with `lt(c·x^ν·δv_l) = x^μ v_k`, choosing among the
/// candidate `l` the first (forward) or last (reverse) label.
pub struct PsiCharacterization {
    direction: Direction,
    // per degree q: (label l of degree q+1, lt(δv_l))
    leads: Vec<Vec<(IndexSeq, ModuleTerm)>>,
}

impl PsiCharacterization {
    pub fn new(c: &FreeComplex, order: &TaylorOrder) -> Result<Self> {
        let mut leads = Vec::new();
        for q in 0..c.top() {
            let set = c.delta_set(q, LabelOrder::Ascending)?;
            leads.push(
                set.into_iter()
                    .map(|(l, d)| Ok((l, leading_term(&d, order)?)))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        Ok(PsiCharacterization {
            direction: order.direction(),
            leads,
        })
    }

    pub fn psi_term(&self, mono: &Monomial, label: &IndexSeq) -> Option<ModuleTerm> {
        let cands = self
            .leads
            .get(label.len())?
            .iter()
            .filter(|(_, lt)| &lt.label == label && lt.mono.divides(mono));
        let (l, lt) = match self.direction {
            Direction::Forward => cands.min_by(|a, b| a.0.cmp(&b.0))?,
            Direction::Reverse => cands.max_by(|a, b| a.0.cmp(&b.0))?,
        };
        Some(ModuleTerm::new(
            Scalar::one() / &lt.coeff,
            mono.div(&lt.mono),
            l.clone(),
        ))
    }
}

impl Homotopy for PsiCharacterization {
    fn apply(&self, u: &ModuleElement) -> Result<ModuleElement> {
        let mut out = ModuleElement::zero(u.degree() + 1);
        for (l, m, c) in u.iter() {
            if let Some(mut t) = self.psi_term(m, l) {
                t.coeff *= c;
                out.add_term(&t)?;
            }
        }
        Ok(out)
    }
}

/// Contracting homotopy obtained from Gröbner bases `Δ_q` of the images:
/// divide `u` by `Δ_q`, lift the quotients `u = Σ P_l·δv_l + û` to
/// `Σ P_l·v_l`, and return its normal form with respect to `Δ_{q+1}`.
pub struct GroebnerHomotopy<O> {
    dividers: Vec<Divider<O>>,
    labels: Vec<Vec<IndexSeq>>,
}

impl<O: TermOrder + Clone> GroebnerHomotopy<O> {
    /// Fails with `NotGroebner` unless every `Δ_q` is a Gröbner basis for `order`.
    pub fn new(c: &FreeComplex, order: O) -> Result<Self> {
        let mut dividers = Vec::new();
        let mut labels = Vec::new();
        for q in 0..c.top() {
            let (ls, gs): (Vec<IndexSeq>, Vec<ModuleElement>) =
                c.delta_set(q, LabelOrder::Ascending)?.into_iter().unzip();
            let cert = is_groebner(&gs, &order)?;
            if let Some((i, j, nf)) = cert.failure {
                return Err(Error::NotGroebner(format!(
                    "in degree {q}, S-polynomial of δv{} and δv{} reduces to {nf:?}",
                    ls[i], ls[j]
                )));
            }
            dividers.push(Divider::new(&gs, order.clone())?);
            labels.push(ls);
        }
        Ok(GroebnerHomotopy { dividers, labels })
    }

    /// Lift of `u` through the division quotients, before normalisation.
    pub fn lift(&self, u: &ModuleElement) -> Result<ModuleElement> {
        let q = u.degree();
        let mut out = ModuleElement::zero(q + 1);
        let Some(div) = self.dividers.get(q) else {
            return Ok(out);
        };
        let res = div.divide(u)?;
        for (p, l) in res.quotients.iter().zip(&self.labels[q]) {
            for (m, c) in p.terms() {
                out.add_term(&ModuleTerm::new(c.clone(), m.clone(), l.clone()))?;
            }
        }
        Ok(out)
    }

    pub fn normal_form(&self, u: &ModuleElement) -> Result<ModuleElement> {
        match self.dividers.get(u.degree()) {
            Some(d) => d.normal_form(u),
            None => Ok(u.clone()),
        }
    }
}

impl<O: TermOrder + Clone + Send> Homotopy for GroebnerHomotopy<O> {
    fn apply(&self, u: &ModuleElement) -> Result<ModuleElement> {
        let lift = self.lift(u)?;
        self.normal_form(&lift)
    }
}

/// `f(v_∅) = v_∅`, `f(v_k) = ψ(f(δv_k))`, extended `P`-linearly.
pub struct FMap {
    n: usize,
    values: BTreeMap<IndexSeq, ModuleElement>,
}

impl FMap {
    pub fn new(c: &FreeComplex, psi: &dyn Homotopy) -> Result<Self> {
        let mut values: BTreeMap<IndexSeq, ModuleElement> = BTreeMap::new();
        for q in 0..=c.top() {
            for l in c.labels(q) {
                let v = if q == 0 {
                    c.generator(l)
                } else {
                    let mut fd = ModuleElement::zero(q - 1);
                    for (k, m, coeff) in c.differential(l)?.iter() {
                        fd.add_scaled(coeff, Some(m), &values[k])?;
                    }
                    psi.apply(&fd)?
                };
                values.insert(l.clone(), v);
            }
        }
        Ok(FMap { n: c.n(), values })
    }

    pub fn on_generator(&self, label: &IndexSeq) -> Result<&ModuleElement> {
        self.values
            .get(label)
            .ok_or_else(|| Error::Label(label.clone()))
    }

    pub fn apply(&self, u: &ModuleElement) -> Result<ModuleElement> {
        let mut out = ModuleElement::zero(u.degree());
        for (l, m, c) in u.iter() {
            out.add_scaled(c, Some(m), self.on_generator(l)?)?;
        }
        Ok(out)
    }

    /// Labels occurring in some `f(v_k)`.
    pub fn image_labels(&self) -> BTreeSet<IndexSeq> {
        self.values
            .values()
            .flat_map(|v| v.labels().cloned())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.values
            .iter()
            .all(|(l, v)| *v == ModuleElement::generator(self.n, l.clone()))
    }
}

/// How `φ(u) = ψ(u − φ(δu) − f(u))` is extended beyond generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PhiVariant {
    /// The recursion is evaluated on generators and extended `P`-linearly.
    /// All retract identities are then `P`-linear and hold once they hold
    /// on generators.
    #[default]
    Linear,
    /// The recursion is evaluated on every term `x^μ v_k` separately, so
    /// `φ` is only linear over the coefficient field, like `ψ`.
    Termwise,
}

/// The splitting homotopy `φ`, zero on degree 0.
pub struct SplittingHomotopy {
    complex: FreeComplex,
    psi: Arc<dyn Homotopy>,
    f: Arc<FMap>,
    variant: PhiVariant,
    linear: BTreeMap<IndexSeq, ModuleElement>,
    memo: Mutex<HashMap<(IndexSeq, Monomial), ModuleElement>>,
}

impl SplittingHomotopy {
    pub fn new(
        c: &FreeComplex,
        psi: Arc<dyn Homotopy>,
        f: Arc<FMap>,
        variant: PhiVariant,
    ) -> Result<Self> {
        let mut phi = SplittingHomotopy {
            complex: c.clone(),
            psi,
            f,
            variant,
            linear: BTreeMap::new(),
            memo: Mutex::new(HashMap::new()),
        };
        if variant == PhiVariant::Linear {
            for q in 1..=c.top() {
                for l in c.labels(q) {
                    let v = phi.rhs(&Monomial::one(c.n()), l)?;
                    let value = phi.psi.apply(&v)?;
                    phi.linear.insert(l.clone(), value);
                }
            }
        }
        Ok(phi)
    }

    pub fn variant(&self) -> PhiVariant {
        self.variant
    }

    /// `x^μ v_k − φ(δ(x^μ v_k)) − f(x^μ v_k)`.
    fn rhs(&self, mono: &Monomial, label: &IndexSeq) -> Result<ModuleElement> {
        let t = ModuleElement::from_term(ModuleTerm::unit(mono.clone(), label.clone()));
        let d = self.complex.delta(&t)?;
        let mut v = t.sub(&self.f.apply(&t)?)?;
        if label.len() >= 2 {
            v = v.sub(&self.apply(&d)?)?;
        }
        Ok(v)
    }

    fn phi_term(&self, mono: &Monomial, label: &IndexSeq) -> Result<ModuleElement> {
        if label.is_empty() {
            return Ok(ModuleElement::zero(1));
        }
        let key = (label.clone(), mono.clone());
        if let Some(v) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(v.clone());
        }
        let value = self.psi.apply(&self.rhs(mono, label)?)?;
        self.memo
            .lock()
            .expect("memo lock")
            .insert(key, value.clone());
        Ok(value)
    }

    pub fn apply(&self, u: &ModuleElement) -> Result<ModuleElement> {
        let mut out = ModuleElement::zero(u.degree() + 1);
        if u.degree() == 0 {
            return Ok(out);
        }
        for (l, m, c) in u.iter() {
            match self.variant {
                PhiVariant::Termwise => out.add_scaled(c, None, &self.phi_term(m, l)?)?,
                PhiVariant::Linear => {
                    let g = self.linear.get(l).ok_or_else(|| Error::Label(l.clone()))?;
                    out.add_scaled(c, Some(m), g)?;
                }
            }
        }
        Ok(out)
    }
}

impl Homotopy for SplittingHomotopy {
    fn apply(&self, u: &ModuleElement) -> Result<ModuleElement> {
        SplittingHomotopy::apply(self, u)
    }
}

/// `u − δh(u) − hδ(u)`; the `hδ` part is absent in degree 0.
pub fn deviation(c: &FreeComplex, h: &dyn Homotopy, u: &ModuleElement) -> Result<ModuleElement> {
    let mut out = u.sub(&c.delta(&h.apply(u)?)?)?;
    if u.degree() > 0 {
        out = out.sub(&h.apply(&c.delta(u)?)?)?;
    }
    Ok(out)
}

/// The terms `(μ/m_k)·v_k` for every `μ` in the lcm lattice and every
/// label `k` of `c` with `m_k | μ`. These include all generators.
pub fn lattice_terms(c: &FreeComplex) -> Vec<ModuleElement> {
    let lattice = lcm_lattice(c.monomials());
    let mut out = Vec::new();
    for mu in &lattice {
        for q in 0..=c.top() {
            for g in c.generators(q) {
                if g.multidegree.divides(mu) {
                    out.push(ModuleElement::from_term(ModuleTerm::unit(
                        mu.div(&g.multidegree),
                        g.label.clone(),
                    )));
                }
            }
        }
    }
    out
}

/// Failures of `δψ + ψδ = 1` (degrees `≥ 1`) and `ψ² = 0` on `samples`.
pub fn check_contracting(
    c: &FreeComplex,
    psi: &dyn Homotopy,
    samples: &[ModuleElement],
) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    for u in samples {
        if u.degree() >= 1 {
            let dev = deviation(c, psi, u)?;
            if !dev.is_zero() {
                failures.push(format!("δψ+ψδ differs from 1 on {u:?} by {dev:?}"));
            }
        }
        let p = psi.apply(u)?;
        let pp = psi.apply(&p)?;
        if !pp.is_zero() {
            failures.push(format!("ψ² ≠ 0 on {u:?}"));
        }
    }
    Ok(failures)
}

/// Which projection the retract uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectionKind {
    /// Retract onto `P/J`: `π` is the normal form modulo `M` in degree 0 and
    /// zero elsewhere, `φ = ψ`.
    Epsilon,
    /// Retract onto the image of `f`, with `φ` the splitting homotopy.
    F,
}

/// A strong deformation retract of `big` with projection `π` and splitting
/// homotopy `φ`, `π = 1 − δφ − φδ`.
pub struct Sdr {
    big: FreeComplex,
    kind: ProjectionKind,
    small: Option<FreeComplex>,
    psi: Arc<dyn Homotopy>,
    f: Option<Arc<FMap>>,
    phi: Option<SplittingHomotopy>,
    residue: Divider<BaseOrder>,
}

impl Sdr {
    pub fn big(&self) -> &FreeComplex {
        &self.big
    }

    /// `None` for the `P/J` retract.
    pub fn small(&self) -> Option<&FreeComplex> {
        self.small.as_ref()
    }

    pub fn kind(&self) -> ProjectionKind {
        self.kind
    }

    pub fn f_map(&self) -> Option<&FMap> {
        self.f.as_deref()
    }

    /// The canonical representative modulo `J` of a degree-0 element.
    pub fn canonical(&self, u: &ModuleElement) -> Result<ModuleElement> {
        self.residue.normal_form(u)
    }

    pub fn project(&self, u: &ModuleElement) -> Result<ModuleElement> {
        match self.kind {
            ProjectionKind::Epsilon if u.degree() == 0 => self.canonical(u),
            ProjectionKind::Epsilon => Ok(ModuleElement::zero(u.degree())),
            ProjectionKind::F => self.f.as_ref().expect("f variant").apply(u),
        }
    }

    pub fn split(&self, u: &ModuleElement) -> Result<ModuleElement> {
        match &self.phi {
            Some(phi) => phi.apply(u),
            None => self.psi.apply(u),
        }
    }

    fn split_h(&self) -> &dyn Homotopy {
        match &self.phi {
            Some(phi) => phi,
            None => self.psi.as_ref(),
        }
    }

    /// Checks the retract identities on `samples`, returning a description
    /// of every violation.
    pub fn violations(&self, samples: &[ModuleElement]) -> Result<Vec<String>> {
        let mut out = Vec::new();
        let h = self.split_h();
        for u in samples {
            let p = self.project(u)?;
            if deviation(&self.big, h, u)? != p {
                out.push(format!("π ≠ 1 − δφ − φδ on {u:?}"));
            }
            let s = self.split(u)?;
            if !self.split(&s)?.is_zero() {
                out.push(format!("φ² ≠ 0 on {u:?}"));
            }
            if s.degree() <= self.big.top() && self.split(&self.big.delta(&s)?)? != s {
                out.push(format!("φδφ ≠ φ on {u:?}"));
            }
            if self.project(&p)? != p {
                out.push(format!("π² ≠ π on {u:?}"));
            }
            if let Some(small) = &self.small {
                if let Some(l) = p.labels().find(|l| !small.contains(l)) {
                    out.push(format!("π({u:?}) leaves the retract through {l}"));
                }
                if u.labels().all(|l| small.contains(l)) && p != *u {
                    out.push(format!("π does not fix {u:?}"));
                }
            }
        }
        Ok(out)
    }
}

/// Builds the retract of the Taylor complex `c` for the homotopy `psi` and
/// checks all identities on [`lattice_terms`].
pub fn build_sdr(
    c: &FreeComplex,
    psi: Arc<dyn Homotopy>,
    kind: ProjectionKind,
    variant: PhiVariant,
) -> Result<Sdr> {
    let n = c.n();
    let m0: Vec<ModuleElement> = c
        .monomials()
        .iter()
        .map(|m| ModuleElement::from_term(ModuleTerm::unit(m.clone(), IndexSeq::empty())))
        .collect();
    let residue = Divider::new(&m0, BaseOrder::lex(n))?;
    let sdr = match kind {
        ProjectionKind::Epsilon => Sdr {
            big: c.clone(),
            kind,
            small: None,
            psi,
            f: None,
            phi: None,
            residue,
        },
        ProjectionKind::F => {
            let f = Arc::new(FMap::new(c, psi.as_ref())?);
            let small = restrict_to_labels(c, &f.image_labels())
                .map_err(|e| Error::SdrInvariant(format!("image of f is not a subcomplex: {e}")))?;
            let phi = SplittingHomotopy::new(c, psi.clone(), f.clone(), variant)?;
            Sdr {
                big: c.clone(),
                kind,
                small: Some(small),
                psi,
                f: Some(f),
                phi: Some(phi),
                residue,
            }
        }
    };
    let bad = sdr.violations(&lattice_terms(c))?;
    if let Some(first) = bad.first() {
        return Err(Error::SdrInvariant(format!(
            "{first} ({} violations)",
            bad.len()
        )));
    }
    Ok(sdr)
}

/// Forward or reverse explicit homotopy for the Taylor complex `c`.
pub fn froberg(c: &FreeComplex, dir: Direction) -> Arc<dyn Homotopy> {
    Arc::new(FrobergHomotopy::new(c.monomials(), dir))
}
