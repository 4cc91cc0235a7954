//! Ideal input formats and the JSON form of a complex.
//!
//! An ideal is given either as JSON,
//! `{"variables": ["x","y"], "monomials": [[2,0],[1,1]], "order": [2,1]}`,
//! or as a comma (or newline) separated list of monomials such as
//! `x^2*y, y*z`, optionally preceded by a line `vars: x, y, z`. Without that
//! line the variables are taken in order of first appearance.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    label_lcm, IndexSeq, ModuleElement, ModuleTerm, Monomial, Scalar, VarContext,
};
use crate::error::{Error, Result};
use crate::taylor::{ComplexKind, Eliminated, FreeComplex};

/// A parsed generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealInput {
    pub context: VarContext,
    pub monomials: Vec<Monomial>,
    /// 1-based permutation: position `p` of the working list holds
    /// `monomials[order[p] - 1]`.
    pub order: Option<Vec<usize>>,
}

impl IdealInput {
    /// The generators in the order given by `order`, if any.
    pub fn ordered_monomials(&self) -> Vec<Monomial> {
        match &self.order {
            Some(p) => p.iter().map(|&i| self.monomials[i - 1].clone()).collect(),
            None => self.monomials.clone(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct IdealJson {
    variables: Vec<String>,
    monomials: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<Vec<usize>>,
}

/// Parses either input syntax; JSON is recognised by a leading `{`.
pub fn parse_ideal(text: &str) -> Result<IdealInput> {
    if text.trim_start().starts_with('{') {
        parse_ideal_json(text)
    } else {
        parse_ideal_human(text, None)
    }
}

pub fn parse_ideal_json(text: &str) -> Result<IdealInput> {
    let raw: IdealJson = serde_json::from_str(text).map_err(|e| Error::Parse {
        pos: json_pos(text, &e),
        msg: e.to_string(),
    })?;
    let context = VarContext::new(raw.variables).map_err(|e| Error::Parse {
        pos: 0,
        msg: e.to_string(),
    })?;
    let mut monomials = Vec::with_capacity(raw.monomials.len());
    for (i, row) in raw.monomials.into_iter().enumerate() {
        if row.len() != context.n() {
            return Err(Error::Parse {
                pos: 0,
                msg: format!(
                    "monomial {} has {} exponents, expected {}",
                    i + 1,
                    row.len(),
                    context.n()
                ),
            });
        }
        let m = Monomial::new(row);
        if let Some(j) = monomials.iter().position(|p| *p == m) {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("monomial {} duplicates monomial {}", i + 1, j + 1),
            });
        }
        monomials.push(m);
    }
    if let Some(p) = &raw.order {
        check_permutation(p, monomials.len())?;
    }
    Ok(IdealInput {
        context,
        monomials,
        order: raw.order,
    })
}

fn json_pos(text: &str, e: &serde_json::Error) -> usize {
    if e.line() == 0 {
        return 0;
    }
    let line_start: usize = text
        .split_inclusive('\n')
        .take(e.line() - 1)
        .map(str::len)
        .sum();
    line_start + e.column().saturating_sub(1)
}

fn check_permutation(p: &[usize], r: usize) -> Result<()> {
    let mut seen = vec![false; r];
    for &i in p {
        if i == 0 || i > r || std::mem::replace(&mut seen[i - 1], true) {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("order {p:?} is not a permutation of 1..={r}"),
            });
        }
    }
    if p.len() != r {
        return Err(Error::Parse {
            pos: 0,
            msg: format!("order {p:?} is not a permutation of 1..={r}"),
        });
    }
    Ok(())
}

/// Human syntax. With `context` given, a `vars:` line is not allowed to
/// contradict it and unknown variables are errors.
pub fn parse_ideal_human(text: &str, context: Option<&VarContext>) -> Result<IdealInput> {
    let mut body_start = 0;
    let mut declared: Option<VarContext> = context.cloned();
    if let Some((line_end, rest)) = header(text) {
        let names: Vec<&str> = rest
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        for (i, name) in names.iter().enumerate() {
            if !is_identifier(name) {
                return Err(Error::Parse {
                    pos: 0,
                    msg: format!("`{name}` is not a variable name"),
                });
            }
            if names[..i].contains(name) {
                return Err(Error::Parse {
                    pos: 0,
                    msg: format!("variable `{name}` declared twice"),
                });
            }
        }
        let ctx = VarContext::new(names.iter().copied()).map_err(|e| Error::Parse {
            pos: 0,
            msg: e.to_string(),
        })?;
        if declared.as_ref().is_some_and(|d| *d != ctx) {
            return Err(Error::Parse {
                pos: 0,
                msg: "variable header contradicts the given variables".into(),
            });
        }
        declared = Some(ctx);
        body_start = line_end;
    }

    let mut parser = Parser {
        text,
        pos: body_start,
    };
    let mut terms: Vec<(usize, Vec<(String, usize, u32)>)> = Vec::new();
    parser.skip_ws();
    while !parser.at_end() {
        let start = parser.pos;
        terms.push((start, parser.term()?));
        parser.skip_inline_ws();
        if parser.at_end() {
            break;
        }
        parser.expect_separator()?;
        parser.skip_ws();
    }
    if terms.is_empty() {
        return Err(Error::Parse {
            pos: parser.pos,
            msg: "no monomials given".into(),
        });
    }

    let context = match declared {
        Some(c) => c,
        None => {
            let mut names: Vec<String> = Vec::new();
            for (name, _, _) in terms.iter().flat_map(|(_, fs)| fs) {
                if !names.contains(name) {
                    names.push(name.clone());
                }
            }
            VarContext::new(names).map_err(|e| Error::Parse {
                pos: 0,
                msg: e.to_string(),
            })?
        }
    };
    let mut monomials: Vec<Monomial> = Vec::with_capacity(terms.len());
    for (start, factors) in terms {
        let mut exps = vec![0u32; context.n()];
        for (name, pos, e) in factors {
            let v = context.position(&name).ok_or_else(|| Error::Parse {
                pos,
                msg: format!("unknown variable `{name}`"),
            })?;
            exps[v] = exps[v].checked_add(e).ok_or_else(|| Error::Parse {
                pos,
                msg: "exponent overflow".into(),
            })?;
        }
        let m = Monomial::new(exps);
        if let Some(j) = monomials.iter().position(|p| *p == m) {
            return Err(Error::Parse {
                pos: start,
                msg: format!("duplicate monomial (same as monomial {})", j + 1),
            });
        }
        monomials.push(m);
    }
    Ok(IdealInput {
        context,
        monomials,
        order: None,
    })
}

/// `vars:` or `variables:` header line; returns the byte offset after it
/// and its payload.
fn header(text: &str) -> Option<(usize, &str)> {
    let lead = text.len() - text.trim_start().len();
    let rest = &text[lead..];
    let line = rest.split('\n').next().unwrap_or("");
    let (key, payload) = line.split_once(':')?;
    matches!(key.trim(), "vars" | "variables").then(|| (lead + line.len(), payload))
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.text.len()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek().filter(|c| c.is_whitespace()) {
            self.pos += c.len_utf8();
        }
    }

    fn skip_inline_ws(&mut self) {
        while let Some(c) = self.peek().filter(|c| c.is_whitespace() && *c != '\n') {
            self.pos += c.len_utf8();
        }
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn expect_separator(&mut self) -> Result<()> {
        match self.peek() {
            Some(',') | Some('\n') | Some(';') => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => self.error(format!("expected `,` between monomials, found `{c}`")),
            None => Ok(()),
        }
    }

    fn term(&mut self) -> Result<Vec<(String, usize, u32)>> {
        let mut factors = vec![self.factor()?];
        loop {
            self.skip_inline_ws();
            if self.peek() != Some('*') {
                return Ok(factors);
            }
            self.pos += 1;
            self.skip_inline_ws();
            factors.push(self.factor()?);
        }
    }

    fn factor(&mut self) -> Result<(String, usize, u32)> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            Some(c) => return self.error(format!("expected a variable, found `{c}`")),
            None => return self.error("expected a variable, found end of input"),
        }
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            self.pos += 1;
        }
        let name = self.text[start..self.pos].to_string();
        self.skip_inline_ws();
        if self.peek() != Some('^') {
            return Ok((name, start, 1));
        }
        self.pos += 1;
        self.skip_inline_ws();
        let digits = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let raw = &self.text[digits..self.pos];
        match raw.parse::<u32>() {
            Ok(0) => Err(Error::Parse {
                pos: digits,
                msg: "exponent must be positive".into(),
            }),
            Ok(e) => Ok((name, start, e)),
            Err(_) if raw.is_empty() => Err(Error::Parse {
                pos: digits,
                msg: "expected an exponent after `^`".into(),
            }),
            Err(_) => Err(Error::Parse {
                pos: digits,
                msg: format!("exponent `{raw}` out of range"),
            }),
        }
    }
}

#[derive(Serialize, Deserialize, Debug)]
struct ComplexJson {
    variables: Vec<String>,
    monomials: Vec<Vec<u32>>,
    kind: String,
    degrees: Vec<DegreeJson>,
    differential: Vec<DifferentialJson>,
    eliminated: Vec<EliminatedJson>,
}

#[derive(Serialize, Deserialize, Debug)]
struct DegreeJson {
    q: usize,
    generators: Vec<GeneratorJson>,
}

#[derive(Serialize, Deserialize, Debug)]
struct GeneratorJson {
    label: Vec<usize>,
    multidegree: Vec<u32>,
}

#[derive(Serialize, Deserialize, Debug)]
struct DifferentialJson {
    q: usize,
    from: Vec<usize>,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize, Debug)]
struct TermJson {
    coeff_num: i64,
    coeff_den: i64,
    mono: Vec<u32>,
    to: Vec<usize>,
}

#[derive(Serialize, Deserialize, Debug)]
struct EliminatedJson {
    label: Vec<usize>,
    witness: usize,
}

fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| Error::Malformed(format!("coefficient part {x} does not fit in 64 bits")))
}

fn to_json(c: &FreeComplex) -> Result<ComplexJson> {
    let degrees = (0..=c.top())
        .map(|q| DegreeJson {
            q,
            generators: c
                .generators(q)
                .iter()
                .map(|g| GeneratorJson {
                    label: g.label.entries().to_vec(),
                    multidegree: g.multidegree.exponents().to_vec(),
                })
                .collect(),
        })
        .collect();
    let mut differential = Vec::new();
    for q in 1..=c.top() {
        for l in c.labels(q) {
            let terms = c
                .differential(l)?
                .iter()
                .map(|(to, mono, coeff)| {
                    Ok(TermJson {
                        coeff_num: to_i64(coeff.numer())?,
                        coeff_den: to_i64(coeff.denom())?,
                        mono: mono.exponents().to_vec(),
                        to: to.entries().to_vec(),
                    })
                })
                .collect::<Result<_>>()?;
            differential.push(DifferentialJson {
                q,
                from: l.entries().to_vec(),
                terms,
            });
        }
    }
    Ok(ComplexJson {
        variables: c.context().names().to_vec(),
        monomials: c
            .monomials()
            .iter()
            .map(|m| m.exponents().to_vec())
            .collect(),
        kind: c.kind().name().to_string(),
        degrees,
        differential,
        eliminated: c
            .eliminated()
            .iter()
            .map(|e| EliminatedJson {
                label: e.label.entries().to_vec(),
                witness: e.witness,
            })
            .collect(),
    })
}

/// Pretty-printed JSON with deterministic key and entry order.
pub fn complex_to_json(c: &FreeComplex) -> Result<String> {
    let value = to_json(c)?;
    serde_json::to_string_pretty(&value).map_err(|e| Error::Malformed(e.to_string()))
}

/// Parses and validates a complex written by [`complex_to_json`].
pub fn complex_from_json(text: &str) -> Result<FreeComplex> {
    let raw: ComplexJson = serde_json::from_str(text).map_err(|e| Error::Parse {
        pos: json_pos(text, &e),
        msg: e.to_string(),
    })?;
    let context = VarContext::new(raw.variables)?;
    let monomials: Vec<Monomial> = raw.monomials.into_iter().map(Monomial::new).collect();
    let kind: ComplexKind = raw.kind.parse().map_err(Error::Malformed)?;
    let seq = |v: Vec<usize>| IndexSeq::new(v);
    let mut generators: Vec<Vec<IndexSeq>> = Vec::new();
    for d in raw.degrees {
        if d.q >= generators.len() {
            generators.resize(d.q + 1, Vec::new());
        }
        for g in d.generators {
            let label = seq(g.label)?;
            if label.len() != d.q {
                return Err(Error::Degree {
                    expected: d.q,
                    found: label.len(),
                });
            }
            if label.max_entry() > monomials.len() {
                return Err(Error::Index {
                    index: label.max_entry(),
                    len: monomials.len(),
                });
            }
            if label_lcm(&monomials, &label) != Monomial::new(g.multidegree) {
                return Err(Error::Malformed(format!(
                    "multidegree of {label} is not the lcm of its monomials"
                )));
            }
            generators[d.q].push(label);
        }
    }
    let mut differential = BTreeMap::new();
    for d in raw.differential {
        let from = seq(d.from)?;
        if from.len() != d.q || d.q == 0 {
            return Err(Error::Malformed(format!(
                "differential of {from} listed under degree {}",
                d.q
            )));
        }
        let terms = d
            .terms
            .into_iter()
            .map(|t| {
                if t.coeff_den == 0 {
                    return Err(Error::Malformed("zero denominator".into()));
                }
                let coeff = Scalar::new(t.coeff_num.into(), t.coeff_den.into());
                Ok(ModuleTerm::new(coeff, Monomial::new(t.mono), seq(t.to)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let element = ModuleElement::from_terms(d.q - 1, terms)?;
        if differential.insert(from.clone(), element).is_some() {
            return Err(Error::Malformed(format!("two differentials for {from}")));
        }
    }
    let eliminated = raw
        .eliminated
        .into_iter()
        .map(|e| {
            Ok(Eliminated {
                label: seq(e.label)?,
                witness: e.witness,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    FreeComplex::from_parts(
        context,
        monomials,
        kind,
        generators,
        differential,
        eliminated,
    )
}
