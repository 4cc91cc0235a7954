//! Division algorithm, normal forms and S-polynomials in a labelled free
//! module, plus a Gröbner-basis check.

use std::collections::HashMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::algebra::{IndexSeq, ModuleElement, ModuleTerm, Monomial, Polynomial, Scalar};
use crate::error::{Error, Result};
use crate::orders::{leading_term, TermOrder};

/// `input = Σ quotients[α]·G[α] + remainder`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisionResult {
    pub quotients: Vec<Polynomial>,
    pub remainder: ModuleElement,
}

/// How an S-polynomial scales its two summands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SPolyNormalization {
    /// `(m/(lc_i·m_i))·g_i − (m/(lc_j·m_j))·g_j`: both leading terms become
    /// the monic term `m`.
    #[default]
    Monic,
    /// `(m/m_i)·g_i − (lc_i/lc_j)·(m/m_j)·g_j`: only monomial factors on the
    /// first summand. Agrees with the plain monomial-quotient form whenever
    /// the two leading coefficients coincide.
    LeadMonomial,
}

/// `spoly = left·g_i − right·g_j`, or the zero sentinel when the leading
/// terms lie on different generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SPair {
    pub i: usize,
    pub j: usize,
    /// `m_ij`, the lcm of the two leading monomials; `None` for the sentinel.
    pub lcm: Option<Monomial>,
    pub left: (Scalar, Monomial),
    pub right: (Scalar, Monomial),
    pub spoly: ModuleElement,
}

impl SPair {
    pub fn is_sentinel(&self) -> bool {
        self.lcm.is_none()
    }
}

/// A fixed ordered list `G` prepared for repeated division.
///
/// Reducers are selected first-match: among the elements whose leading
/// term divides the current leading term, the one earliest in `G` wins.
#[derive(Clone, Debug)]
pub struct Divider<O> {
    generators: Vec<ModuleElement>,
    leads: Vec<ModuleTerm>,
    by_label: HashMap<IndexSeq, Vec<usize>>,
    order: O,
}

impl<O: TermOrder> Divider<O> {
    pub fn new(generators: &[ModuleElement], order: O) -> Result<Self> {
        let mut leads = Vec::with_capacity(generators.len());
        let mut by_label: HashMap<IndexSeq, Vec<usize>> = HashMap::new();
        let degree = generators.first().map(ModuleElement::degree);
        for (p, g) in generators.iter().enumerate() {
            if Some(g.degree()) != degree {
                return Err(Error::Degree {
                    expected: degree.unwrap_or(0),
                    found: g.degree(),
                });
            }
            let lt = leading_term(g, &order)?;
            by_label.entry(lt.label.clone()).or_default().push(p);
            leads.push(lt);
        }
        Ok(Divider {
            generators: generators.to_vec(),
            leads,
            by_label,
            order,
        })
    }

    pub fn generators(&self) -> &[ModuleElement] {
        &self.generators
    }

    pub fn leads(&self) -> &[ModuleTerm] {
        &self.leads
    }

    pub fn order(&self) -> &O {
        &self.order
    }

    /// Position of the first element whose leading term divides `x^μ·v_k`.
    pub fn reducer(&self, mono: &Monomial, label: &IndexSeq) -> Option<usize> {
        self.by_label
            .get(label)?
            .iter()
            .copied()
            .find(|&p| self.leads[p].mono.divides(mono))
    }

    fn check(&self, u: &ModuleElement) -> Result<()> {
        match self.generators.first() {
            Some(g) if g.degree() != u.degree() => Err(Error::Degree {
                expected: g.degree(),
                found: u.degree(),
            }),
            _ => Ok(()),
        }
    }

    pub fn divide(&self, u: &ModuleElement) -> Result<DivisionResult> {
        self.check(u)?;
        let mut quotients = vec![Polynomial::zero(); self.generators.len()];
        let mut remainder = ModuleElement::zero(u.degree());
        let mut p = u.clone();
        while !p.is_zero() {
            let lt = leading_term(&p, &self.order)?;
            match self.reducer(&lt.mono, &lt.label) {
                Some(g) => {
                    let lead = &self.leads[g];
                    let c = &lt.coeff / &lead.coeff;
                    let s = lt.mono.div(&lead.mono);
                    quotients[g].add_term(&c, &s);
                    p.add_scaled(&-c, Some(&s), &self.generators[g])?;
                }
                None => {
                    remainder.add_term(&lt)?;
                    p.add_term(&ModuleTerm::new(-lt.coeff.clone(), lt.mono, lt.label))?;
                }
            }
        }
        Ok(DivisionResult {
            quotients,
            remainder,
        })
    }

    pub fn normal_form(&self, u: &ModuleElement) -> Result<ModuleElement> {
        self.check(u)?;
        let mut remainder = ModuleElement::zero(u.degree());
        let mut p = u.clone();
        while !p.is_zero() {
            let lt = leading_term(&p, &self.order)?;
            match self.reducer(&lt.mono, &lt.label) {
                Some(g) => {
                    let lead = &self.leads[g];
                    let c = &lt.coeff / &lead.coeff;
                    p.add_scaled(&-c, Some(&lt.mono.div(&lead.mono)), &self.generators[g])?;
                }
                None => {
                    remainder.add_term(&lt)?;
                    p.add_term(&ModuleTerm::new(-lt.coeff.clone(), lt.mono, lt.label))?;
                }
            }
        }
        Ok(remainder)
    }

    /// S-pair of the elements at 0-based positions `i`, `j`.
    pub fn s_pair(&self, i: usize, j: usize, norm: SPolyNormalization) -> Result<SPair> {
        for p in [i, j] {
            if p >= self.generators.len() {
                return Err(Error::Index {
                    index: p + 1,
                    len: self.generators.len(),
                });
            }
        }
        let mut out = s_pair_with_leads(
            (&self.generators[i], &self.leads[i]),
            (&self.generators[j], &self.leads[j]),
            norm,
        )?;
        out.i = i;
        out.j = j;
        Ok(out)
    }

    /// Pairs of positions `i < j` whose leading terms share a label.
    pub fn critical_pairs(&self) -> Vec<(usize, usize)> {
        let mut buckets: Vec<&Vec<usize>> = self.by_label.values().collect();
        buckets.sort_by_key(|b| b[0]);
        buckets
            .into_iter()
            .flat_map(|b| {
                b.iter()
                    .enumerate()
                    .flat_map(move |(x, &i)| b[x + 1..].iter().map(move |&j| (i, j)))
            })
            .collect()
    }
}

fn s_pair_with_leads(
    (gi, li): (&ModuleElement, &ModuleTerm),
    (gj, lj): (&ModuleElement, &ModuleTerm),
    norm: SPolyNormalization,
) -> Result<SPair> {
    if gi.degree() != gj.degree() {
        return Err(Error::Degree {
            expected: gi.degree(),
            found: gj.degree(),
        });
    }
    let n = li.mono.n();
    if li.label != lj.label {
        let unit = (Scalar::zero(), Monomial::one(n));
        return Ok(SPair {
            i: 0,
            j: 0,
            lcm: None,
            left: unit.clone(),
            right: unit,
            spoly: ModuleElement::zero(gi.degree()),
        });
    }
    let m = li.mono.lcm(&lj.mono);
    let (a, b) = (m.div(&li.mono), m.div(&lj.mono));
    let (ca, cb) = match norm {
        SPolyNormalization::Monic => (Scalar::one() / &li.coeff, Scalar::one() / &lj.coeff),
        SPolyNormalization::LeadMonomial => (Scalar::one(), &li.coeff / &lj.coeff),
    };
    let mut spoly = gi.scale(&ca, &a);
    spoly.add_scaled(&-cb.clone(), Some(&b), gj)?;
    Ok(SPair {
        i: 0,
        j: 0,
        lcm: Some(m),
        left: (ca, a),
        right: (cb, b),
        spoly,
    })
}

/// Divides `u` by the ordered list `G`.
pub fn divide<O: TermOrder + ?Sized>(
    u: &ModuleElement,
    g: &[ModuleElement],
    order: &O,
) -> Result<DivisionResult> {
    Divider::new(g, order)?.divide(u)
}

pub fn normal_form<O: TermOrder + ?Sized>(
    u: &ModuleElement,
    g: &[ModuleElement],
    order: &O,
) -> Result<ModuleElement> {
    Divider::new(g, order)?.normal_form(u)
}

/// S-pair of two single elements (positions reported as 0 and 1).
pub fn s_pair<O: TermOrder + ?Sized>(
    gi: &ModuleElement,
    gj: &ModuleElement,
    order: &O,
    norm: SPolyNormalization,
) -> Result<SPair> {
    let li = leading_term(gi, order)?;
    let lj = leading_term(gj, order)?;
    let mut out = s_pair_with_leads((gi, &li), (gj, &lj), norm)?;
    out.j = 1;
    Ok(out)
}

/// Outcome of a Gröbner-basis check. `failure` holds the first failing
/// pair (0-based positions) with the nonzero normal form of its S-polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerCertificate {
    pub pairs_checked: usize,
    pub failure: Option<(usize, usize, ModuleElement)>,
}

impl GroebnerCertificate {
    pub fn is_groebner(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks that every S-polynomial of `G` reduces to zero.
///
/// Only pairs whose leading terms share a generator are reduced; all others
/// have the zero sentinel as S-polynomial.
pub fn is_groebner<O: TermOrder + ?Sized>(
    g: &[ModuleElement],
    order: &O,
) -> Result<GroebnerCertificate> {
    let div = Divider::new(g, order)?;
    let pairs = div.critical_pairs();
    let failure = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<Option<(usize, usize, ModuleElement)>> {
            let sp = div.s_pair(i, j, SPolyNormalization::Monic)?;
            let nf = div.normal_form(&sp.spoly)?;
            Ok((!nf.is_zero()).then_some((i, j, nf)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .next();
    Ok(GroebnerCertificate {
        pairs_checked: pairs.len(),
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{scalar, VarContext};
    use crate::orders::{BaseOrder, Direction, TaylorOrder};
    use crate::taylor::{build_taylor, LabelOrder};
    use proptest::prelude::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial::new(e.iter().copied())
    }

    fn poly0(e: &[u32]) -> ModuleElement {
        ModuleElement::from_term(ModuleTerm::unit(m(e), IndexSeq::empty()))
    }

    fn delta0() -> Vec<ModuleElement> {
        vec![poly0(&[2, 0]), poly0(&[1, 1]), poly0(&[0, 2])]
    }

    #[test]
    fn divide_examples() {
        let lex = BaseOrder::lex(2);
        let res = divide(&poly0(&[2, 1]), &delta0(), &lex).unwrap();
        assert!(res.remainder.is_zero());
        let mut q0 = Polynomial::zero();
        q0.add_term(&scalar(1), &m(&[0, 1]));
        assert_eq!(
            res.quotients,
            vec![q0, Polynomial::zero(), Polynomial::zero()]
        );

        let u = poly0(&[1, 0]).add(&poly0(&[0, 1])).unwrap();
        let res = divide(&u, &delta0(), &lex).unwrap();
        assert!(res.quotients.iter().all(Polynomial::is_zero));
        assert_eq!(res.remainder, u);

        let res = divide(&ModuleElement::zero(0), &delta0(), &lex).unwrap();
        assert!(res.remainder.is_zero() && res.quotients.iter().all(Polynomial::is_zero));

        let wrong = ModuleElement::from_term(ModuleTerm::unit(m(&[0, 0]), IndexSeq::single(1)));
        assert!(matches!(
            divide(&wrong, &delta0(), &lex),
            Err(Error::Degree { .. })
        ));
    }

    #[test]
    fn normal_form_examples() {
        let lex = BaseOrder::lex(2);
        for g in delta0() {
            assert!(normal_form(&g, &delta0(), &lex).unwrap().is_zero());
        }
        assert_eq!(
            normal_form(&poly0(&[1, 0]), &delta0(), &lex).unwrap(),
            poly0(&[1, 0])
        );

        let mons = vec![m(&[2, 0]), m(&[1, 1]), m(&[0, 2])];
        let t = build_taylor(&VarContext::numbered(2), &mons, 12).unwrap();
        let d1: Vec<_> = t
            .delta_set(1, LabelOrder::Ascending)
            .unwrap()
            .into_iter()
            .map(|(_, d)| d)
            .collect();
        let o = TaylorOrder::forward(lex, mons);
        assert!(normal_form(&d1[0], &d1, &o).unwrap().is_zero());
    }

    #[test]
    fn s_pair_examples() {
        let lex = BaseOrder::lex(2);
        let sp = s_pair(
            &poly0(&[2, 0]),
            &poly0(&[1, 1]),
            &lex,
            SPolyNormalization::Monic,
        )
        .unwrap();
        assert!(sp.spoly.is_zero());
        assert_eq!(sp.lcm, Some(m(&[2, 1])));
        assert_eq!(sp.left.1, m(&[0, 1]));
        assert_eq!(sp.right.1, m(&[1, 0]));

        let a = ModuleElement::from_term(ModuleTerm::unit(m(&[1, 0]), IndexSeq::single(1)));
        let b = ModuleElement::from_term(ModuleTerm::unit(m(&[1, 0]), IndexSeq::single(2)));
        assert!(s_pair(&a, &b, &lex, SPolyNormalization::Monic)
            .unwrap()
            .is_sentinel());
        assert_eq!(
            s_pair(
                &ModuleElement::zero(0),
                &poly0(&[1, 0]),
                &lex,
                SPolyNormalization::Monic
            ),
            Err(Error::ZeroElement)
        );
    }

    #[test]
    fn s_pair_normalizations() {
        // g1 = 2x v1 + y v2, g2 = -3y v1: leads 2x v1 and -3y v1 under lex
        let lex = BaseOrder::lex(2);
        let t = |c: i64, e: &[u32], l: usize| ModuleTerm::new(scalar(c), m(e), IndexSeq::single(l));
        let g1 = ModuleElement::from_terms(1, [t(2, &[1, 0], 1), t(1, &[0, 1], 2)]).unwrap();
        let g2 = ModuleElement::from_terms(1, [t(-3, &[0, 1], 1)]).unwrap();
        let monic = s_pair(&g1, &g2, &lex, SPolyNormalization::Monic).unwrap();
        let lead = s_pair(&g1, &g2, &lex, SPolyNormalization::LeadMonomial).unwrap();
        // (y/2)·g1 + (x/3)·g2 = (1/2) y² v2
        let half = ModuleElement::from_terms(
            1,
            [ModuleTerm::new(
                scalar(1) / scalar(2),
                m(&[0, 2]),
                IndexSeq::single(2),
            )],
        )
        .unwrap();
        assert_eq!(monic.spoly, half);
        assert_eq!(lead.spoly, half.scale(&scalar(2), &m(&[0, 0])));
    }

    #[test]
    fn groebner_examples() {
        let lex = BaseOrder::lex(2);
        assert!(is_groebner(&delta0(), &lex).unwrap().is_groebner());
        let single = ModuleElement::from_terms(
            1,
            [
                ModuleTerm::unit(m(&[1, 0]), IndexSeq::single(1)),
                ModuleTerm::unit(m(&[0, 1]), IndexSeq::single(2)),
            ],
        )
        .unwrap();
        let cert = is_groebner(&[single], &lex).unwrap();
        assert!(cert.is_groebner());
        assert_eq!(cert.pairs_checked, 0);
        // {x + y, y}: fine; {x^2 + y, x y}: S = y·(x²+y) − x·(xy) = y² not reducible
        let p = |ts: &[&[u32]]| {
            ModuleElement::from_terms(
                0,
                ts.iter().map(|e| ModuleTerm::unit(m(e), IndexSeq::empty())),
            )
            .unwrap()
        };
        let cert = is_groebner(&[p(&[&[2, 0], &[0, 1]]), p(&[&[1, 1]])], &lex).unwrap();
        assert_eq!(cert.failure.map(|f| f.2), Some(p(&[&[0, 2]])));
    }

    fn arb_case() -> impl Strategy<Value = (Vec<Monomial>, ModuleElement, usize)> {
        proptest::collection::btree_set(proptest::collection::vec(0u32..=3, 3), 2..=5)
            .prop_flat_map(|set| {
                let mons: Vec<Monomial> = set.into_iter().map(Monomial::new).collect();
                let r = mons.len();
                let q = 0..r;
                (Just(mons), q).prop_flat_map(move |(mons, q)| {
                    let labels = proptest::sample::subsequence((1..=r).collect::<Vec<_>>(), q);
                    let terms = proptest::collection::vec(
                        (-3i64..=3, proptest::collection::vec(0u32..=3, 3), labels),
                        0..6,
                    );
                    let u = terms.prop_map(move |ts| {
                        ModuleElement::from_terms(
                            q,
                            ts.into_iter().map(|(c, e, l)| {
                                ModuleTerm::new(
                                    scalar(c),
                                    Monomial::new(e),
                                    IndexSeq::new(l).unwrap(),
                                )
                            }),
                        )
                        .unwrap()
                    });
                    (Just(mons), u, Just(q))
                })
            })
    }

    proptest! {
        #[test]
        fn division_invariants((mons, u, q) in arb_case(), seed in any::<u64>()) {
            let t = build_taylor(&VarContext::numbered(3), &mons, 12).unwrap();
            let g: Vec<_> = t.delta_set(q, LabelOrder::Ascending).unwrap().into_iter().map(|(_, d)| d).collect();
            for dir in [Direction::Forward, Direction::Reverse] {
                let o = TaylorOrder::new(BaseOrder::grevlex(3), dir, mons.clone());
                let res = divide(&u, &g, &o).unwrap();
                let mut back = res.remainder.clone();
                for (qt, gi) in res.quotients.iter().zip(&g) {
                    back = back.add(&gi.mul_poly(qt)).unwrap();
                    if !u.is_zero() {
                        let top = leading_term(&u, &o).unwrap();
                        let lg = leading_term(gi, &o).unwrap();
                        for (s, _) in qt.terms() {
                            prop_assert_ne!(o.cmp_terms(&s.mul(&lg.mono), &lg.label, &top.mono, &top.label), std::cmp::Ordering::Greater);
                        }
                    }
                }
                prop_assert_eq!(&back, &u);
                let div = Divider::new(&g, &o).unwrap();
                for (l, mo, _) in res.remainder.iter() {
                    prop_assert!(div.reducer(mo, l).is_none());
                }
                let nf = &res.remainder;
                prop_assert_eq!(&div.normal_form(nf).unwrap(), nf);

                // Gröbner basis: the normal form ignores the list order
                let mut shuffled = g.clone();
                let k = shuffled.len();
                shuffled.rotate_left((seed as usize) % k);
                shuffled.reverse();
                prop_assert_eq!(&normal_form(&u, &shuffled, &o).unwrap(), nf);
            }
        }
    }
}
