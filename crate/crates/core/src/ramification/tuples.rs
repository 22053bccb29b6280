//! The explicit generator tuples, written as words in the datum's symbols.

use serde::Serialize;
use thiserror::Error;

use crate::generators::{GeneratorPortraits, Symbol, Word};
use crate::groupdata::{vector_sum, DatumError, DefiningDatum, GroupKind};
use crate::linalg::{inv_mod, Echelon};
use crate::permgroup::GroupContext;
use crate::tree::Portrait;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TupleCase {
    MultiGgsPeriodic,
    MultiGgsNonPeriodic,
    SymmetricPeriodic,
    SymmetricNonPeriodic,
}

/// Which branch of the construction to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CaseChoice {
    #[default]
    Auto,
    Periodic,
    NonPeriodic,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TupleError {
    #[error("invalid datum: {0:?}")]
    Datum(Vec<DatumError>),
    #[error("GGS data (a single directed generator) are out of scope")]
    Ggs,
    #[error("no explicit tuple is known for {0:?} data")]
    NoExplicitTuple(GroupKind),
    #[error("k = {k} is below the threshold {threshold}")]
    BelowThreshold { k: usize, threshold: usize },
    #[error("the periodic symmetric construction needs p >= 5")]
    PeriodicNeedsLargerPrime,
    #[error("the non-periodic construction needs a vector of nonzero sum")]
    NoNonZeroSum,
    #[error("the periodic construction needs zero-sum vectors")]
    NotPeriodic,
    #[error("change-of-generators matrix must be an invertible {r}x{r} matrix")]
    BadBasis { r: usize },
    #[error("no generating set with the vanishing property at level {level}: {reason}")]
    NotDistinguished { level: usize, reason: String },
    #[error("tuple {tuple} does not generate G_k (order p^{got}, expected p^{expected})")]
    NonGenerating { tuple: u8, got: u32, expected: u32 },
    #[error("tuple {tuple} has a trivial entry at position {index}")]
    TrivialEntry { tuple: u8, index: usize },
    #[error("tuple {tuple}: stored product does not match the entries")]
    ProductMismatch { tuple: u8 },
}

/// A generating tuple `(x_1, ..., x_d)` and its product `x_1 ... x_d`.
#[derive(Clone, Debug)]
pub struct SphericalSystem {
    words: Vec<Word>,
    product: Word,
    elements: Vec<Portrait>,
    product_element: Portrait,
}

impl SphericalSystem {
    pub fn new(words: Vec<Word>, gens: &GeneratorPortraits) -> Self {
        let words: Vec<Word> = words.iter().map(|w| w.reduce_mod(gens.p())).collect();
        let product = Word::product(&words).reduce_mod(gens.p());
        let elements: Vec<Portrait> = words
            .iter()
            .map(|w| gens.eval(w).expect("symbols of the datum"))
            .collect();
        let product_element = gens.eval(&product).expect("symbols of the datum");
        SphericalSystem {
            words,
            product,
            elements,
            product_element,
        }
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn product(&self) -> &Word {
        &self.product
    }

    pub fn elements(&self) -> &[Portrait] {
        &self.elements
    }

    pub fn product_element(&self) -> &Portrait {
        &self.product_element
    }

    /// The entries followed by their product.
    pub fn t_set(&self) -> Vec<(Word, Portrait)> {
        self.words
            .iter()
            .cloned()
            .zip(self.elements.iter().cloned())
            .chain(std::iter::once((
                self.product.clone(),
                self.product_element.clone(),
            )))
            .collect()
    }

    /// The entries followed by the inverse of their product; multiplies to 1.
    pub fn extended(&self) -> Vec<Portrait> {
        let mut out = self.elements.clone();
        out.push(self.product_element.inverse());
        out
    }

    /// Generation, non-triviality and the product identity.
    pub fn validate(&self, ctx: &GroupContext, tuple: u8) -> Result<(), TupleError> {
        if let Some(index) = self.elements.iter().position(Portrait::is_identity) {
            return Err(TupleError::TrivialEntry { tuple, index });
        }
        let product = self
            .elements
            .iter()
            .fold(ctx.identity(), |acc, x| acc.mul(x));
        if product != self.product_element {
            return Err(TupleError::ProductMismatch { tuple });
        }
        let sub = GroupContext::from_generators(ctx.p(), ctx.depth(), self.elements.clone());
        let (got, expected) = (sub.order_exponent(), ctx.order_exponent());
        if got != expected {
            return Err(TupleError::NonGenerating {
                tuple,
                got,
                expected,
            });
        }
        Ok(())
    }
}

/// The two tuples together with the generators `b_1, ..., b_n` they are
/// written in.
#[derive(Clone, Debug)]
pub struct TuplePair {
    pub case: TupleCase,
    /// `b_i` as words in the datum's own symbols.
    pub basis: Vec<Word>,
    pub t1: SphericalSystem,
    pub t2: SphericalSystem,
}

#[derive(Clone, Debug, Default)]
pub struct TupleOptions {
    pub case: CaseChoice,
    /// Rows give the new directed generators as exponent vectors over the
    /// old ones (multi-GGS data only).
    pub basis: Option<Vec<Vec<i64>>>,
}

pub fn build_tuples(
    datum: &DefiningDatum,
    k: usize,
    options: &TupleOptions,
) -> Result<TuplePair, TupleError> {
    let class = datum.classify().map_err(TupleError::Datum)?;
    if class.kind == GroupKind::Ggs {
        return Err(TupleError::Ggs);
    }
    let threshold = datum.threshold_k().map_err(|_| TupleError::Ggs)?;
    if k < threshold {
        return Err(TupleError::BelowThreshold { k, threshold });
    }
    let periodic = match options.case {
        CaseChoice::Auto => class.periodic,
        CaseChoice::Periodic => true,
        CaseChoice::NonPeriodic => false,
    };
    let gens = GeneratorPortraits::new(datum, k);
    let (case, basis, t1, t2) = match class.kind {
        GroupKind::MultiGgs => {
            let basis = multi_ggs_basis(datum, options.basis.as_deref(), periodic)?;
            let (t1, t2) = if periodic {
                multi_ggs_periodic(&basis)
            } else {
                multi_ggs_nonperiodic(&basis)
            };
            let case = if periodic {
                TupleCase::MultiGgsPeriodic
            } else {
                TupleCase::MultiGgsNonPeriodic
            };
            (case, basis, t1, t2)
        }
        GroupKind::SingleSymmetricVector | GroupKind::ConstantVector => {
            if periodic && datum.p() < 5 {
                return Err(TupleError::PeriodicNeedsLargerPrime);
            }
            if periodic != class.periodic {
                return Err(if periodic {
                    TupleError::NotPeriodic
                } else {
                    TupleError::NoNonZeroSum
                });
            }
            let basis = symmetric_basis(datum);
            let (t1, t2) = if periodic {
                symmetric_periodic(&basis)
            } else {
                symmetric_nonperiodic(datum.p(), &basis)
            };
            let case = if periodic {
                TupleCase::SymmetricPeriodic
            } else {
                TupleCase::SymmetricNonPeriodic
            };
            (case, basis, t1, t2)
        }
        other => return Err(TupleError::NoExplicitTuple(other)),
    };
    Ok(TuplePair {
        case,
        basis,
        t1: SphericalSystem::new(t1, &gens),
        t2: SphericalSystem::new(t2, &gens),
    })
}

fn a(e: i64) -> Word {
    Word::a(e)
}

fn cat(parts: &[&Word]) -> Word {
    Word::product(parts.iter().copied())
}

/// `(a^{-1}, a b_1, b_2, ..., b_r)` and `(a b_1^2, b_1^{-2}, b_1^{-1} b_2, ..., b_{r-1}^{-1} b_r)`.
fn multi_ggs_periodic(b: &[Word]) -> (Vec<Word>, Vec<Word>) {
    let mut t1 = vec![a(-1), cat(&[&a(1), &b[0]])];
    t1.extend(b[1..].iter().cloned());
    let mut t2 = vec![cat(&[&a(1), &b[0].pow(2)]), b[0].pow(-2)];
    for i in 0..b.len() - 1 {
        t2.push(cat(&[&b[i].inverse(), &b[i + 1]]));
    }
    (t1, t2)
}

/// `(a^{-1}, a b_1, b_2, ..., b_r)` and `(a b_2, b_1, b_1^{-1} b_2, ..., b_{r-1}^{-1} b_r)`.
fn multi_ggs_nonperiodic(b: &[Word]) -> (Vec<Word>, Vec<Word>) {
    let mut t1 = vec![a(-1), cat(&[&a(1), &b[0]])];
    t1.extend(b[1..].iter().cloned());
    let mut t2 = vec![cat(&[&a(1), &b[1]]), b[0].clone()];
    for i in 0..b.len() - 1 {
        t2.push(cat(&[&b[i].inverse(), &b[i + 1]]));
    }
    (t1, t2)
}

fn symmetric_periodic(b: &[Word]) -> (Vec<Word>, Vec<Word>) {
    let n = b.len();
    let mut t1 = vec![cat(&[&a(1), &b[0]])];
    for i in 0..n - 1 {
        t1.push(cat(&[&b[i].inverse(), &b[i + 1]]));
    }
    t1.push(cat(&[&b[n - 1].inverse(), &a(1)]));
    // signs alternate so that b_{n-1}^{-1} b_n^{-1} comes last
    let even = n.is_multiple_of(2);
    let mut t2 = vec![if even { b[0].clone() } else { b[0].inverse() }];
    for i in 1..n {
        let negative = (i % 2 == 1) == even;
        t2.push(if negative {
            cat(&[&b[i - 1].inverse(), &b[i].inverse()])
        } else {
            cat(&[&b[i - 1], &b[i]])
        });
    }
    t2.push(cat(&[&b[n - 1].pow(3), &a(1)]));
    (t1, t2)
}

fn symmetric_nonperiodic(p: u32, b: &[Word]) -> (Vec<Word>, Vec<Word>) {
    let n = b.len();
    let t1 = if n == 2 {
        vec![
            cat(&[&a(1), &b[0], &b[1].inverse()]),
            b[0].clone(),
            b[1].inverse(),
        ]
    } else {
        let mut t1 = vec![
            cat(&[&a(1), &b[0], &b[1].inverse()]),
            b[1].clone(),
            b[0].inverse(),
        ];
        // b_i b_{i+1}^{-1} a for even i, a^{-1} b_i b_{i+1}^{-1} for odd i
        for i in 2..n {
            let core = cat(&[&b[i - 1], &b[i].inverse()]);
            t1.push(if i % 2 == 0 {
                cat(&[&core, &a(1)])
            } else {
                cat(&[&a(-1), &core])
            });
        }
        t1
    };
    let lambda = (1..i64::from(p))
        .find(|l| (n as i64 - 1 + l).rem_euclid(i64::from(p)) != 0)
        .expect("p >= 3");
    let mut t2 = Vec::new();
    for i in 1..=n {
        let bi = if i == n {
            b[i - 1].pow(lambda)
        } else {
            b[i - 1].clone()
        };
        t2.push(if i % 2 == 1 {
            cat(&[&a(1), &bi])
        } else {
            cat(&[&bi, &a(-1)])
        });
    }
    t2.push(a(1));
    (t1, t2)
}

/// One generator per family, all powered to carry the first family's
/// vector.
fn symmetric_basis(datum: &DefiningDatum) -> Vec<Word> {
    let p = datum.p();
    let symbols = datum.symbols();
    let (j1, i1) = symbols[0];
    let v1 = datum.vector(j1, i1).expect("listed");
    let pivot = v1.iter().position(|&x| x != 0).expect("nonzero vector");
    symbols
        .iter()
        .map(|&(j, i)| {
            let v = datum.vector(j, i).expect("listed");
            let t = u32::from(v1[pivot]) * inv_mod(u32::from(v[pivot]), p) % p;
            Word::b(j, i, i64::from(t))
        })
        .collect()
}

fn combination(p: u32, row: &[u8]) -> Word {
    Word::from_letters(
        row.iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| {
                (
                    Symbol::B {
                        family: 1,
                        index: i + 1,
                    },
                    i64::from(c) % i64::from(p),
                )
            })
            .collect(),
    )
}

fn combined_vector(datum: &DefiningDatum, row: &[u8]) -> Vec<u8> {
    let p = datum.p();
    let mut out = vec![0u8; datum.p() as usize - 1];
    for (i, &c) in row.iter().enumerate() {
        let v = datum.vector(1, i + 1).expect("listed");
        for (o, &x) in out.iter_mut().zip(v) {
            *o = ((u32::from(*o) + u32::from(c) * u32::from(x)) % p) as u8;
        }
    }
    out
}

/// Coefficient rows of the directed generators used by the multi-GGS
/// tuples.
fn multi_ggs_basis(
    datum: &DefiningDatum,
    user: Option<&[Vec<i64>]>,
    periodic: bool,
) -> Result<Vec<Word>, TupleError> {
    let p = datum.p();
    let r = datum.r();
    let mut rows: Vec<Vec<u8>> = match user {
        Some(m) => {
            let rows: Vec<Vec<u8>> = m
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|&x| x.rem_euclid(i64::from(p)) as u8)
                        .collect()
                })
                .collect();
            if rows.len() != r
                || rows.iter().any(|row| row.len() != r)
                || crate::linalg::rank(p, &rows) != r
            {
                return Err(TupleError::BadBasis { r });
            }
            rows
        }
        None => (0..r)
            .map(|i| (0..r).map(|j| u8::from(i == j)).collect())
            .collect(),
    };
    if periodic {
        if rows
            .iter()
            .any(|row| vector_sum(p, &combined_vector(datum, row)) != 0)
        {
            return Err(TupleError::NotPeriodic);
        }
        if user.is_none() && check_vanishing(datum, &rows).is_err() {
            rows = vanishing_basis(datum)?;
        }
        check_vanishing(datum, &rows)?;
    } else {
        let sums: Vec<u32> = rows
            .iter()
            .map(|row| vector_sum(p, &combined_vector(datum, row)))
            .collect();
        let first = sums
            .iter()
            .position(|&s| s != 0)
            .ok_or(TupleError::NoNonZeroSum)?;
        let lead = rows[first].clone();
        let lead_inv = inv_mod(sums[first], p);
        let mut normalized = vec![lead.clone()];
        for (i, row) in rows.iter().enumerate() {
            if i == first {
                continue;
            }
            // subtract (s_i / s_1) times the leading row
            let c = sums[i] * lead_inv % p;
            normalized.push(
                row.iter()
                    .zip(&lead)
                    .map(|(&x, &y)| ((u32::from(x) + (p - c) * u32::from(y)) % p) as u8)
                    .collect(),
            );
        }
        rows = normalized;
    }
    Ok(rows.iter().map(|row| combination(p, row)).collect())
}

/// Requires `b_i` to vanish in `G_n / G_n'` for `i >= n` and `d(G_n) = n`,
/// for `1 <= n <= r`.
fn check_vanishing(datum: &DefiningDatum, rows: &[Vec<u8>]) -> Result<(), TupleError> {
    let p = datum.p();
    for n in 1..=rows.len() {
        let ctx = GroupContext::new(datum, n);
        let gens = GeneratorPortraits::new(datum, n);
        if ctx.frattini_rank() != n as u32 {
            return Err(TupleError::NotDistinguished {
                level: n,
                reason: format!("d(G_{n}) = {}", ctx.frattini_rank()),
            });
        }
        for (i, row) in rows.iter().enumerate().skip(n - 1) {
            let b = gens.eval(&combination(p, row)).expect("symbols");
            if !ctx.derived_subgroup().contains(&b) {
                return Err(TupleError::NotDistinguished {
                    level: n,
                    reason: format!("b_{} is not in the derived subgroup", i + 1),
                });
            }
        }
    }
    Ok(())
}

/// A basis adapted to the flag of kernels `K_n` of `<b_1, ..., b_r> ->
/// G_n / G_n'`: the last `r - n + 1` rows lie in `K_n`.
fn vanishing_basis(datum: &DefiningDatum) -> Result<Vec<Vec<u8>>, TupleError> {
    let p = datum.p();
    let r = datum.r();
    let mut chosen = Echelon::new(p, r);
    let mut picked: Vec<Vec<u8>> = Vec::new();
    for n in (2..=r).rev() {
        let ctx = GroupContext::new(datum, n);
        let gens = GeneratorPortraits::new(datum, n);
        let coords: Vec<Vec<u8>> = (1..=r)
            .map(|i| {
                let b = gens
                    .symbol(Symbol::B {
                        family: 1,
                        index: i,
                    })
                    .expect("symbol");
                ctx.abelian_coords(b).expect("generator lies in the group")
            })
            .collect();
        let dim = coords[0].len();
        let mut image = Echelon::new(p, dim);
        let mut independent = Vec::new();
        for (i, c) in coords.iter().enumerate() {
            match image.insert(c) {
                Ok(_) => independent.push(i),
                Err(rel) => {
                    let mut v = vec![0u8; r];
                    v[i] = 1;
                    for (t, &x) in rel.iter().enumerate() {
                        v[independent[t]] = ((p - u32::from(x)) % p) as u8;
                    }
                    if chosen.insert(&v).is_ok() {
                        picked.push(v);
                    }
                }
            }
        }
        if picked.len() < r - n + 1 {
            return Err(TupleError::NotDistinguished {
                level: n,
                reason: format!("kernel of dimension {} is too small", picked.len()),
            });
        }
    }
    picked.truncate(r - 1);
    let mut span = Echelon::new(p, r);
    for v in &picked {
        span.insert(v).expect("independent");
    }
    for i in 0..r {
        let mut e = vec![0u8; r];
        e[i] = 1;
        if span.insert(&e).is_ok() {
            picked.push(e);
            break;
        }
    }
    // picked = (b_r, b_{r-1}, ..., b_2, b_1)
    picked.reverse();
    Ok(picked)
}
