//! The rooted generator `a`, the directed generators `b_i^(j)` and words in
//! them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::groupdata::DefiningDatum;
use crate::tree::{level_offset, Portrait};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("unknown generator b{0}.{1} for this datum")]
    UnknownSymbol(u32, usize),
    #[error("cannot parse word token {0:?}")]
    Syntax(String),
}

pub fn rooted_a(p: u32, k: usize) -> Portrait {
    Portrait::rooted(p, k, 1)
}

/// Directed generator along the path `(p-j+1)^infinity`. At every vertex of
/// the path, the sibling reached `t` steps after the path child (cyclically)
/// carries the rooted label `e_t`.
pub fn directed_from_vector(p: u32, j: u32, vector: &[u8], k: usize) -> Portrait {
    let mut f = Portrait::identity(p, k);
    let path_child = (p - j) as usize; // zero-based position of letter p-j+1
    let pw = p as usize;
    let labels = f.labels_mut();
    let mut path_rank = 0usize;
    for level in 1..k {
        let base = level_offset(p, level) + path_rank * pw;
        for (t, &e) in vector.iter().enumerate() {
            let child = (path_child + t + 1) % pw;
            labels[base + child] = e;
        }
        path_rank = path_rank * pw + path_child;
    }
    f
}

pub fn directed_generator(
    datum: &DefiningDatum,
    j: u32,
    i: usize,
    k: usize,
) -> Result<Portrait, WordError> {
    let v = datum.vector(j, i).ok_or(WordError::UnknownSymbol(j, i))?;
    Ok(directed_from_vector(datum.p(), j, v, k))
}

/// `[a] ++ [b_i^(j)]` in lexicographic `(j, i)` order.
pub fn standard_generating_set(datum: &DefiningDatum, k: usize) -> Vec<Portrait> {
    std::iter::once(rooted_a(datum.p(), k))
        .chain(
            datum
                .symbols()
                .into_iter()
                .map(|(j, i)| directed_generator(datum, j, i, k).expect("listed symbol")),
        )
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    A,
    /// `b_i^(j)`, written `bj.i`.
    B {
        family: u32,
        index: usize,
    },
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::A => write!(f, "a"),
            Symbol::B { family, index } => write!(f, "b{family}.{index}"),
        }
    }
}

/// A product of generator powers, read left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<(Symbol, i64)>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn from_letters(letters: Vec<(Symbol, i64)>) -> Self {
        let mut w = Word { letters };
        w.normalize();
        w
    }

    pub fn a(exp: i64) -> Self {
        Self::from_letters(vec![(Symbol::A, exp)])
    }

    pub fn b(family: u32, index: usize, exp: i64) -> Self {
        Self::from_letters(vec![(Symbol::B { family, index }, exp)])
    }

    pub fn letters(&self) -> &[(Symbol, i64)] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Merges adjacent powers of the same symbol and drops zero exponents.
    pub fn normalize(&mut self) {
        let mut out: Vec<(Symbol, i64)> = Vec::with_capacity(self.letters.len());
        for &(s, e) in &self.letters {
            match out.last_mut() {
                Some((last, le)) if *last == s => {
                    *le += e;
                    if *le == 0 {
                        out.pop();
                    }
                }
                _ if e != 0 => out.push((s, e)),
                _ => {}
            }
        }
        self.letters = out;
    }

    /// Reduces exponents modulo `p` (every generator has order `p`),
    /// keeping their signs.
    pub fn reduce_mod(&self, p: u32) -> Word {
        let p = i64::from(p);
        let mut w = self.clone();
        loop {
            let next = Self::from_letters(w.letters.iter().map(|&(s, e)| (s, e % p)).collect());
            if next == w {
                return w;
            }
            w = next;
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Self::from_letters(letters)
    }

    pub fn inverse(&self) -> Word {
        Self::from_letters(self.letters.iter().rev().map(|&(s, e)| (s, -e)).collect())
    }

    pub fn pow(&self, n: i64) -> Word {
        let unit = if n < 0 { self.inverse() } else { self.clone() };
        (0..n.unsigned_abs()).fold(Word::empty(), |acc, _| acc.concat(&unit))
    }

    pub fn product<'a>(words: impl IntoIterator<Item = &'a Word>) -> Word {
        words
            .into_iter()
            .fold(Word::empty(), |acc, w| acc.concat(w))
    }

    pub fn check(&self, datum: &DefiningDatum) -> Result<(), WordError> {
        for &(s, _) in &self.letters {
            if let Symbol::B { family, index } = s {
                if datum.vector(family, index).is_none() {
                    return Err(WordError::UnknownSymbol(family, index));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|(s, e)| {
                if *e == 1 {
                    s.to_string()
                } else {
                    format!("{s}^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::new();
        for token in s.split_whitespace() {
            if token == "1" {
                continue;
            }
            let (head, exp) = match token.split_once('^') {
                Some((h, e)) => (
                    h,
                    e.parse::<i64>()
                        .map_err(|_| WordError::Syntax(token.to_string()))?,
                ),
                None => (token, 1),
            };
            let symbol = if head == "a" {
                Symbol::A
            } else {
                let rest = head
                    .strip_prefix('b')
                    .ok_or_else(|| WordError::Syntax(token.to_string()))?;
                let (j, i) = rest
                    .split_once('.')
                    .ok_or_else(|| WordError::Syntax(token.to_string()))?;
                Symbol::B {
                    family: j
                        .parse()
                        .map_err(|_| WordError::Syntax(token.to_string()))?,
                    index: i
                        .parse()
                        .map_err(|_| WordError::Syntax(token.to_string()))?,
                }
            };
            letters.push((symbol, exp));
        }
        Ok(Word::from_letters(letters))
    }
}

/// Generator portraits of a datum at a fixed depth, for evaluating words.
#[derive(Clone, Debug)]
pub struct GeneratorPortraits {
    p: u32,
    depth: usize,
    a: Portrait,
    b: BTreeMap<(u32, usize), Portrait>,
}

impl GeneratorPortraits {
    pub fn new(datum: &DefiningDatum, depth: usize) -> Self {
        let b = datum
            .symbols()
            .into_iter()
            .map(|(j, i)| {
                (
                    (j, i),
                    directed_generator(datum, j, i, depth).expect("listed symbol"),
                )
            })
            .collect();
        GeneratorPortraits {
            p: datum.p(),
            depth,
            a: rooted_a(datum.p(), depth),
            b,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn symbol(&self, s: Symbol) -> Result<&Portrait, WordError> {
        match s {
            Symbol::A => Ok(&self.a),
            Symbol::B { family, index } => self
                .b
                .get(&(family, index))
                .ok_or(WordError::UnknownSymbol(family, index)),
        }
    }

    pub fn eval(&self, w: &Word) -> Result<Portrait, WordError> {
        let mut acc = Portrait::identity(self.p, self.depth);
        for &(s, e) in w.letters() {
            let g = self.symbol(s)?;
            acc = acc.mul(&g.pow(e.rem_euclid(i64::from(self.p))));
        }
        Ok(acc)
    }
}

pub fn eval_word(datum: &DefiningDatum, w: &Word, k: usize) -> Result<Portrait, WordError> {
    w.check(datum)?;
    GeneratorPortraits::new(datum, k).eval(w)
}
