//! Randomised self-test: generates monomial sets from a seed and runs the
//! invariant checks of every module on them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{scalar, IndexSeq, ModuleTerm, Monomial, VarContext};
use crate::division::{is_groebner, Divider, SPolyNormalization};
use crate::error::Result;
use crate::homotopy::{
    build_sdr, check_contracting, froberg, lattice_terms, FMap, FrobergHomotopy, GroebnerHomotopy,
    Homotopy, PhiVariant, ProjectionKind,
};
use crate::orders::{
    lead_of_boundary, leading_term, BaseOrder, Direction, SchreyerOrder, TaylorOrder,
};
use crate::reduction::{
    apply_syzygy, chain_route, extract_subcomplex, lyubeznik_filter, schreyer_syzygy_with,
};
use crate::taylor::{build_taylor, FreeComplex, LabelOrder};
use crate::verify::{betti_numbers, check_d_squared, check_exactness, StrandSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SelftestConfig {
    pub trials: usize,
    /// Maximal number of generators.
    pub r: usize,
    pub n: usize,
    /// Maximal exponent.
    pub maxdeg: u32,
    pub seed: u64,
}

/// Between 1 and `r` distinct monomials `≠ 1` in `n` variables with
/// exponents at most `maxdeg`, in random order. Fewer are returned when
/// there are not enough such monomials.
pub fn random_monomials(rng: &mut impl Rng, r: usize, n: usize, maxdeg: u32) -> Vec<Monomial> {
    let target = rng.gen_range(1..=r.max(1));
    let mut out: Vec<Monomial> = Vec::with_capacity(target);
    let mut attempts = 0;
    while out.len() < target && attempts < 100 * target {
        attempts += 1;
        let m = Monomial::new((0..n).map(|_| rng.gen_range(0..=maxdeg)));
        if !m.is_one() && !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        out.push(Monomial::var(n, 0, maxdeg.max(1)));
    }
    out
}

/// The monomial sets of a self-test run; trial `t` uses its own stream
/// derived from `seed`.
pub fn instances(config: &SelftestConfig) -> Vec<Vec<Monomial>> {
    (0..config.trials)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(t as u64);
            random_monomials(&mut rng, config.r, config.n.max(1), config.maxdeg)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub monomials: Vec<Monomial>,
    pub failures: Vec<String>,
}

impl TrialOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs [`run_checks`] on every instance in parallel.
pub fn run(config: &SelftestConfig) -> Vec<TrialOutcome> {
    instances(config)
        .into_par_iter()
        .enumerate()
        .map(|(trial, monomials)| {
            let failures = match run_checks(&monomials) {
                Ok(f) => f,
                Err(e) => vec![format!("error: {e}")],
            };
            TrialOutcome {
                trial,
                monomials,
                failures,
            }
        })
        .collect()
}

/// The full invariant suite for one generating set.
pub fn run_checks(monomials: &[Monomial]) -> Result<Vec<String>> {
    let n = monomials[0].n();
    let t = build_taylor(
        &VarContext::numbered(n),
        monomials,
        crate::taylor::DEFAULT_CAP,
    )?;
    let mut failures = Vec::new();
    if !check_d_squared(&t) {
        failures.push("δ² ≠ 0 on the Taylor complex".into());
    }
    failures.extend(check_leading_terms(&t)?);
    failures.extend(check_groebner(&t)?);
    failures.extend(check_syzygy_identity(&t)?);
    let mut rng = ChaCha8Rng::seed_from_u64(monomials.len() as u64);
    failures.extend(check_schreyer_order(&t, 200, &mut rng)?);
    failures.extend(check_chain_route(&t));
    failures.extend(check_homotopies(&t)?);
    failures.extend(check_retracts(&t)?);
    failures.extend(check_resolutions(&t)?);
    Ok(failures)
}

fn bases(n: usize) -> [BaseOrder; 2] {
    [BaseOrder::lex(n), BaseOrder::grevlex(n)]
}

/// `lt(δv_k)` is the term dropping `k_1` (forward) or `k_q` (reverse), for
/// every generator, under lex and grevlex.
pub fn check_leading_terms(t: &FreeComplex) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    let one = Monomial::one(t.n());
    for base in bases(t.n()) {
        for dir in [Direction::Forward, Direction::Reverse] {
            let order = TaylorOrder::new(base.clone(), dir, t.monomials().to_vec());
            for q in 1..=t.top() {
                for k in t.labels(q) {
                    let lt = leading_term(t.differential(k)?, &order)?;
                    let (pos, sign) = match dir {
                        Direction::Forward => (0, 1),
                        Direction::Reverse => (q - 1, if q % 2 == 1 { 1 } else { -1 }),
                    };
                    let face = k.without_position(pos);
                    let expected = ModuleTerm::new(
                        scalar(sign),
                        t.multidegree(k)?.div(t.multidegree(&face)?),
                        face,
                    );
                    if lt != expected
                        || lead_of_boundary(t.monomials(), dir, &one, k).as_ref() != Some(&lt)
                    {
                        failures.push(format!(
                            "{} {:?}: lt(δv{k}) = {lt:?}",
                            dir.name(),
                            base.kind()
                        ));
                    }
                }
            }
        }
    }
    Ok(failures)
}

/// `Δ_q` is a Gröbner basis for the forward and reverse orders, all `q`.
pub fn check_groebner(t: &FreeComplex) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    for dir in [Direction::Forward, Direction::Reverse] {
        let order = TaylorOrder::new(BaseOrder::grevlex(t.n()), dir, t.monomials().to_vec());
        for q in 0..t.top() {
            let g: Vec<_> = t
                .delta_set(q, LabelOrder::Ascending)?
                .into_iter()
                .map(|(_, d)| d)
                .collect();
            if !is_groebner(&g, &order)?.is_groebner() {
                failures.push(format!(
                    "Δ_{q} is not a Gröbner basis for the {} order",
                    dir.name()
                ));
            }
        }
    }
    Ok(failures)
}

/// Divider for `Δ_{q−1}` (labels of length `q`) with the labels selected
/// by `first` moved to the front.
fn divider_with_priority(
    t: &FreeComplex,
    q: usize,
    order: &TaylorOrder,
    first: impl Fn(&IndexSeq) -> bool,
) -> Result<(Vec<IndexSeq>, Divider<TaylorOrder>)> {
    let set = t.delta_set(q - 1, LabelOrder::Ascending)?;
    let (front, back): (Vec<_>, Vec<_>) = set.into_iter().partition(|(l, _)| first(l));
    let (labels, g): (Vec<IndexSeq>, Vec<_>) = front.into_iter().chain(back).unzip();
    Ok((labels, Divider::new(&g, order.clone())?))
}

/// The Schreyer syzygy of `δv_{(j,k)}, δv_{(i,k)}` is `δv_{(i,j,k)}`
/// (forward), and that of `δv_{(k,i)}, δv_{(k,j)}` is `(−1)^{q+1}·δv_{(k,i,j)}`
/// with `q = |(k,i,j)|` (reverse). Every syzygy also vanishes on `Δ` in the
/// plain ascending generator order.
pub fn check_syzygy_identity(t: &FreeComplex) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    let n = t.n();
    for dir in [Direction::Forward, Direction::Reverse] {
        let order = TaylorOrder::new(BaseOrder::grevlex(n), dir, t.monomials().to_vec());
        for q in 1..t.top() {
            let plain = divider_with_priority(t, q, &order, |_| false)?;
            for top in t.labels(q + 1) {
                let (a, b, pivot) = match dir {
                    Direction::Forward => (
                        top.without_position(0),
                        top.without_position(1),
                        top.entries()[0],
                    ),
                    Direction::Reverse => (
                        top.without_position(q),
                        top.without_position(q - 1),
                        top.entries()[q],
                    ),
                };
                // a = (j,k) resp. (k,i); b = (i,k) resp. (k,j)
                let (labels, div) = match dir {
                    Direction::Forward => {
                        divider_with_priority(t, q, &order, |l| l.first() == Some(pivot))?
                    }
                    Direction::Reverse => {
                        divider_with_priority(t, q, &order, |l| l.last() == Some(pivot))?
                    }
                };
                let pos =
                    |l: &IndexSeq| labels.iter().position(|x| x == l).expect("face present") + 1;
                let Some(s) =
                    schreyer_syzygy_with(&div, pos(&a), pos(&b), SPolyNormalization::LeadMonomial)?
                else {
                    failures.push(format!("{}: no S-pair for the faces of {top}", dir.name()));
                    continue;
                };
                let mut expected = t.differential(top)?.clone();
                if dir == Direction::Reverse && q % 2 == 1 {
                    expected = expected.neg();
                }
                if s.relabel(&labels) != expected {
                    failures.push(format!(
                        "{}: syzygy of the faces of {top} is {:?}",
                        dir.name(),
                        s.relabel(&labels)
                    ));
                }
                let (plabels, pdiv) = &plain;
                let ppos =
                    |l: &IndexSeq| plabels.iter().position(|x| x == l).expect("face present") + 1;
                if let Some(s) = schreyer_syzygy_with(
                    pdiv,
                    ppos(&a),
                    ppos(&b),
                    SPolyNormalization::LeadMonomial,
                )? {
                    if !apply_syzygy(pdiv.generators(), &s.element)?.is_zero() {
                        failures.push(format!(
                            "{}: syzygy of the faces of {top} does not vanish",
                            dir.name()
                        ));
                    }
                }
            }
        }
    }
    Ok(failures)
}

/// The Schreyer order of `Δ_{q−1}` listed by descending label agrees with
/// the forward order on `T_q`, on `samples` random pairs per degree.
pub fn check_schreyer_order(
    t: &FreeComplex,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    let n = t.n();
    for base in bases(n) {
        let lower = TaylorOrder::forward(base.clone(), t.monomials().to_vec());
        for q in 1..=t.top() {
            let set = t.delta_set(q - 1, LabelOrder::Descending)?;
            let (labels, g): (Vec<IndexSeq>, Vec<_>) = set.into_iter().unzip();
            let schreyer = SchreyerOrder::new(g, lower.clone())?;
            for _ in 0..samples {
                let pick = |rng: &mut dyn rand::RngCore| {
                    let a = rng.gen_range(0..labels.len());
                    let m = Monomial::new((0..n).map(|_| rng.gen_range(0..=2u32)));
                    (a, m)
                };
                let (a, am) = pick(rng);
                let (b, bm) = if rng.gen_bool(0.25) {
                    // a tie in the underlying order unless labels coincide
                    let b = rng.gen_range(0..labels.len());
                    let target = am.mul(t.multidegree(&labels[a])?);
                    match target.checked_div(t.multidegree(&labels[b])?) {
                        Some(bm) => (b, bm),
                        None => pick(rng),
                    }
                } else {
                    pick(rng)
                };
                let ta = ModuleTerm::unit(am.clone(), labels[a].clone());
                let tb = ModuleTerm::unit(bm.clone(), labels[b].clone());
                let via_schreyer = schreyer.compare(
                    &ModuleTerm::unit(am, IndexSeq::single(a + 1)),
                    &ModuleTerm::unit(bm, IndexSeq::single(b + 1)),
                )?;
                let taylor = lower.compare(&ta, &tb)?;
                if via_schreyer != taylor {
                    failures.push(format!(
                        "Schreyer order disagrees with the forward order on {ta:?} vs {tb:?}"
                    ));
                }
            }
        }
    }
    Ok(failures)
}

/// Chain-criterion route and Lyubeznik's rule keep the same labels.
pub fn check_chain_route(t: &FreeComplex) -> Vec<String> {
    let mut failures = Vec::new();
    for dir in [Direction::Forward, Direction::Reverse] {
        if chain_route(t, dir).kept != lyubeznik_filter(t, dir).kept {
            failures.push(format!(
                "{}: chain criterion and Lyubeznik rule differ",
                dir.name()
            ));
        }
    }
    failures
}

/// Contracting identities for `ψ` and `ψ_r`, agreement with the generic
/// Gröbner homotopy, `ψδ = NF_{Δ_q}` and `ψ(L) ⊆ L`.
pub fn check_homotopies(t: &FreeComplex) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    let samples = lattice_terms(t);
    for dir in [Direction::Forward, Direction::Reverse] {
        let psi = FrobergHomotopy::new(t.monomials(), dir);
        failures.extend(
            check_contracting(t, &psi, &samples)?
                .into_iter()
                .map(|f| format!("{}: {f}", dir.name())),
        );
        let order = TaylorOrder::new(BaseOrder::grevlex(t.n()), dir, t.monomials().to_vec());
        let generic = GroebnerHomotopy::new(t, order)?;
        let kept = lyubeznik_filter(t, dir).kept_set();
        for u in &samples {
            let p = psi.apply(u)?;
            if generic.apply(u)? != p {
                failures.push(format!(
                    "{}: generic homotopy differs from ψ on {u:?}",
                    dir.name()
                ));
            }
            if u.degree() >= 1 && psi.apply(&t.delta(u)?)? != generic.normal_form(u)? {
                failures.push(format!(
                    "{}: ψδ is not the normal form on {u:?}",
                    dir.name()
                ));
            }
            if u.labels().all(|l| kept.contains(l)) && !p.labels().all(|l| kept.contains(l)) {
                failures.push(format!(
                    "{}: ψ leaves the Lyubeznik complex on {u:?}",
                    dir.name()
                ));
            }
        }
    }
    Ok(failures)
}

/// Both retracts build, and the image of `f` is the Lyubeznik complex.
pub fn check_retracts(t: &FreeComplex) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    for dir in [Direction::Forward, Direction::Reverse] {
        for (kind, variant) in [
            (ProjectionKind::F, PhiVariant::Linear),
            (ProjectionKind::F, PhiVariant::Termwise),
            (ProjectionKind::Epsilon, PhiVariant::Linear),
        ] {
            if let Err(e) = build_sdr(t, froberg(t, dir), kind, variant) {
                failures.push(format!("{} {kind:?}/{variant:?} retract: {e}", dir.name()));
            }
        }
    }
    for dir in [Direction::Forward, Direction::Reverse] {
        let f = FMap::new(t, froberg(t, dir).as_ref())?;
        if f.image_labels() != lyubeznik_filter(t, dir).kept_set() {
            failures.push(format!(
                "{}: image of f differs from the Lyubeznik complex",
                dir.name()
            ));
        }
    }
    Ok(failures)
}

/// Taylor and both Lyubeznik complexes are exact resolutions with the same
/// Betti numbers, bounded by their ranks.
pub fn check_resolutions(t: &FreeComplex) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    let mut complexes = vec![t.clone()];
    for dir in [Direction::Forward, Direction::Reverse] {
        complexes.push(extract_subcomplex(t, &lyubeznik_filter(t, dir))?);
    }
    let betti = betti_numbers(t);
    for c in &complexes {
        let report = check_exactness(c, StrandSet::Lcm);
        if !report.exact() {
            failures.push(format!("{} complex is not exact", c.kind()));
        }
        if report.betti != betti {
            failures.push(format!(
                "{} complex has Betti numbers {:?}, expected {betti:?}",
                c.kind(),
                report.betti
            ));
        }
        if betti.iter().zip(c.ranks()).any(|(b, r)| *b > r) {
            failures.push(format!(
                "{} complex has ranks below the Betti numbers",
                c.kind()
            ));
        }
    }
    Ok(failures)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_deterministic() {
        let cfg = SelftestConfig {
            trials: 5,
            r: 4,
            n: 3,
            maxdeg: 3,
            seed: 7,
        };
        assert_eq!(instances(&cfg), instances(&cfg));
        for mons in instances(&cfg) {
            assert!(!mons.is_empty() && mons.len() <= 4);
            assert!(mons
                .iter()
                .all(|m| !m.is_one() && m.exponents().iter().all(|&e| e <= 3)));
        }
        let other = SelftestConfig { seed: 8, ..cfg };
        assert_ne!(instances(&cfg), instances(&other));
    }

    #[test]
    fn tiny_space_terminates() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mons = random_monomials(&mut rng, 10, 1, 1);
        assert_eq!(mons, vec![Monomial::new([1])]);
    }

    #[test]
    fn fixtures_pass() {
        for mons in [
            vec![
                Monomial::new([1, 1, 0]),
                Monomial::new([1, 0, 1]),
                Monomial::new([0, 1, 1]),
            ],
            vec![
                Monomial::new([2, 0]),
                Monomial::new([1, 1]),
                Monomial::new([0, 2]),
            ],
        ] {
            assert_eq!(run_checks(&mons).unwrap(), Vec::<String>::new());
        }
    }

    #[test]
    fn small_run_passes() {
        let cfg = SelftestConfig {
            trials: 12,
            r: 4,
            n: 3,
            maxdeg: 3,
            seed: 42,
        };
        for o in run(&cfg) {
            assert!(o.passed(), "{:?}: {:?}", o.monomials, o.failures);
        }
    }
}
