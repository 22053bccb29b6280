//! Automorphisms of the truncated p-adic tree whose labels are powers of the
//! standard cycle `x -> x + 1` on `{1, ..., p}`.
//!
//! Vertices are addressed either as words over `{1, ..., p}` or by their
//! breadth-first index: the root is `0`, level `l` occupies the contiguous
//! range starting at `(p^l - 1) / (p - 1)`, and inside a level vertices are
//! ranked lexicographically. A portrait of depth `k` stores one label per
//! vertex of levels `0..k`, in that same order.

use std::fmt;

use thiserror::Error;

use crate::permgroup::Perm;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("letter {letter} is outside 1..={p}")]
    BadLetter { letter: u32, p: u32 },
    #[error("vertex at level {level} is deeper than portrait depth {depth}")]
    TooDeep { level: usize, depth: usize },
    #[error("portraits disagree: (p={p1}, depth={d1}) vs (p={p2}, depth={d2})")]
    Mismatch {
        p1: u32,
        d1: usize,
        p2: u32,
        d2: usize,
    },
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("label {label} is not reduced mod {p}")]
    BadLabel { label: u32, p: u32 },
    #[error("malformed portrait text: {0}")]
    Parse(String),
}

/// Number of vertices on levels `0..level`, i.e. the breadth-first index of
/// the first vertex on `level`.
pub fn level_offset(p: u32, level: usize) -> usize {
    let p = p as usize;
    let mut off = 0usize;
    let mut width = 1usize;
    for _ in 0..level {
        off += width;
        width *= p;
    }
    off
}

/// Number of vertices on `level`.
pub fn level_width(p: u32, level: usize) -> usize {
    (p as usize).pow(level as u32)
}

/// Level of the vertex with breadth-first index `index`.
pub fn level_of_index(p: u32, index: usize) -> usize {
    let mut level = 0;
    while level_offset(p, level + 1) <= index {
        level += 1;
    }
    level
}

/// A vertex of the p-adic tree, given by its word over `{1, ..., p}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    word: Vec<u32>,
}

impl Vertex {
    pub fn root() -> Self {
        Vertex { word: Vec::new() }
    }

    pub fn new(p: u32, word: Vec<u32>) -> Result<Self, TreeError> {
        if let Some(&letter) = word.iter().find(|&&x| x == 0 || x > p) {
            return Err(TreeError::BadLetter { letter, p });
        }
        Ok(Vertex { word })
    }

    pub fn word(&self) -> &[u32] {
        &self.word
    }

    pub fn level(&self) -> usize {
        self.word.len()
    }

    /// Lexicographic rank inside the vertex's level.
    pub fn rank(&self, p: u32) -> usize {
        self.word
            .iter()
            .fold(0usize, |acc, &x| acc * p as usize + (x - 1) as usize)
    }

    pub fn index(&self, p: u32) -> usize {
        level_offset(p, self.level()) + self.rank(p)
    }

    pub fn from_rank(p: u32, level: usize, mut rank: usize) -> Self {
        let mut word = vec![0; level];
        for slot in word.iter_mut().rev() {
            *slot = (rank % p as usize) as u32 + 1;
            rank /= p as usize;
        }
        Vertex { word }
    }

    pub fn from_index(p: u32, index: usize) -> Self {
        let level = level_of_index(p, index);
        Self::from_rank(p, level, index - level_offset(p, level))
    }

    pub fn child(&self, letter: u32) -> Self {
        let mut word = self.word.clone();
        word.push(letter);
        Vertex { word }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "()");
        }
        let parts: Vec<String> = self.word.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A tree automorphism truncated at depth `k`, stored as its labels.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Portrait {
    p: u32,
    depth: usize,
    labels: Vec<u8>,
}

impl fmt::Debug for Portrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Portrait(p={}, k={}, {:?})",
            self.p, self.depth, self.labels
        )
    }
}

impl Portrait {
    pub fn identity(p: u32, depth: usize) -> Self {
        Portrait {
            p,
            depth,
            labels: vec![0; level_offset(p, depth)],
        }
    }

    pub fn from_labels(p: u32, depth: usize, labels: Vec<u8>) -> Result<Self, TreeError> {
        let expected = level_offset(p, depth);
        if labels.len() != expected {
            return Err(TreeError::LabelCount {
                expected,
                got: labels.len(),
            });
        }
        if let Some(&l) = labels.iter().find(|&&l| u32::from(l) >= p) {
            return Err(TreeError::BadLabel {
                label: u32::from(l),
                p,
            });
        }
        Ok(Portrait { p, depth, labels })
    }

    /// The rooted automorphism `a^exponent`.
    pub fn rooted(p: u32, depth: usize, exponent: u32) -> Self {
        let mut f = Self::identity(p, depth);
        if depth > 0 {
            f.labels[0] = (exponent % p) as u8;
        }
        f
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn labels_mut(&mut self) -> &mut [u8] {
        &mut self.labels
    }

    /// Labels of a single level, in lexicographic vertex order.
    pub fn level_labels(&self, level: usize) -> &[u8] {
        let start = level_offset(self.p, level);
        &self.labels[start..start + level_width(self.p, level)]
    }

    pub fn label(&self, v: &Vertex) -> Result<u8, TreeError> {
        if v.level() >= self.depth {
            return Err(TreeError::TooDeep {
                level: v.level(),
                depth: self.depth,
            });
        }
        Ok(self.labels[v.index(self.p)])
    }

    pub fn is_identity(&self) -> bool {
        self.labels.iter().all(|&l| l == 0)
    }

    fn check_compatible(&self, other: &Portrait) -> Result<(), TreeError> {
        if self.p != other.p || self.depth != other.depth {
            return Err(TreeError::Mismatch {
                p1: self.p,
                d1: self.depth,
                p2: other.p,
                d2: other.depth,
            });
        }
        Ok(())
    }

    /// Lexicographic rank of the image of every vertex on levels `0..=upto`,
    /// indexed by breadth-first index.
    fn image_ranks(&self, upto: usize) -> Vec<u32> {
        let p = self.p as usize;
        let mut img = vec![0u32; level_offset(self.p, upto + 1)];
        for level in 0..upto {
            let off = level_offset(self.p, level);
            let next = level_offset(self.p, level + 1);
            for r in 0..level_width(self.p, level) {
                let shift = self.labels[off + r] as usize;
                let ir = img[off + r] as usize;
                for x in 0..p {
                    img[next + r * p + x] = (ir * p + (x + shift) % p) as u32;
                }
            }
        }
        img
    }

    /// Image ranks of the vertices on `level` (lexicographic order).
    pub fn level_image_ranks(&self, level: usize) -> Vec<u32> {
        let img = self.image_ranks(level);
        img[level_offset(self.p, level)..].to_vec()
    }

    /// Image of a vertex: each letter is shifted by the label at its
    /// (original) parent.
    pub fn act_vertex(&self, v: &Vertex) -> Result<Vertex, TreeError> {
        if v.level() > self.depth {
            return Err(TreeError::TooDeep {
                level: v.level(),
                depth: self.depth,
            });
        }
        let p = self.p;
        let mut word = Vec::with_capacity(v.level());
        let mut prefix_index = 0usize;
        for (i, &x) in v.word().iter().enumerate() {
            let shift = u32::from(self.labels[prefix_index]);
            word.push((x - 1 + shift) % p + 1);
            prefix_index = level_offset(p, i + 1)
                + (prefix_index - level_offset(p, i)) * p as usize
                + (x - 1) as usize;
        }
        Ok(Vertex { word })
    }

    /// Image of the vertex with breadth-first index `index`, as an index.
    pub fn act_index(&self, index: usize) -> usize {
        let p = self.p as usize;
        let level = level_of_index(self.p, index);
        let mut rank = index - level_offset(self.p, level);
        // digits, most significant first
        let mut digits = [0usize; 64];
        for slot in digits[..level].iter_mut().rev() {
            *slot = rank % p;
            rank /= p;
        }
        let mut orig = 0usize;
        let mut image = 0usize;
        for (i, &d) in digits[..level].iter().enumerate() {
            let shift = self.labels[level_offset(self.p, i) + orig] as usize;
            image = image * p + (d + shift) % p;
            orig = orig * p + d;
        }
        level_offset(self.p, level) + image
    }

    /// `self · other`: apply `self` first, then `other`.
    pub fn compose(&self, other: &Portrait) -> Result<Portrait, TreeError> {
        self.check_compatible(other)?;
        Ok(self.mul(other))
    }

    pub(crate) fn mul(&self, other: &Portrait) -> Portrait {
        debug_assert!(self.p == other.p && self.depth == other.depth);
        if self.depth == 0 {
            return self.clone();
        }
        let p = self.p as u8;
        let img = self.image_ranks(self.depth - 1);
        let mut labels = self.labels.clone();
        for level in 0..self.depth {
            let off = level_offset(self.p, level);
            for r in 0..level_width(self.p, level) {
                let j = off + r;
                let l = labels[j] + other.labels[off + img[j] as usize];
                labels[j] = if l >= p { l - p } else { l };
            }
        }
        Portrait {
            p: self.p,
            depth: self.depth,
            labels,
        }
    }

    pub fn inverse(&self) -> Portrait {
        if self.depth == 0 {
            return self.clone();
        }
        let p = self.p as u8;
        let img = self.image_ranks(self.depth - 1);
        let mut labels = vec![0u8; self.labels.len()];
        for level in 0..self.depth {
            let off = level_offset(self.p, level);
            for r in 0..level_width(self.p, level) {
                let j = off + r;
                labels[off + img[j] as usize] = (p - self.labels[j]) % p;
            }
        }
        Portrait {
            p: self.p,
            depth: self.depth,
            labels,
        }
    }

    pub fn pow(&self, mut n: i64) -> Portrait {
        let mut base = if n < 0 {
            n = -n;
            self.inverse()
        } else {
            self.clone()
        };
        let mut acc = Portrait::identity(self.p, self.depth);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }

    /// `g^{-1} self g`.
    pub fn conjugate_by(&self, g: &Portrait) -> Portrait {
        g.inverse().mul(self).mul(g)
    }

    /// `[self, g] = self^{-1} g^{-1} self g`.
    pub fn commutator(&self, g: &Portrait) -> Portrait {
        self.inverse().mul(&g.inverse()).mul(self).mul(g)
    }

    /// The restriction below `v`: labels `w -> label(v w)`, of depth
    /// `depth - level(v)`.
    pub fn section(&self, v: &Vertex) -> Result<Portrait, TreeError> {
        if v.level() >= self.depth {
            return Err(TreeError::TooDeep {
                level: v.level(),
                depth: self.depth,
            });
        }
        Ok(self.section_at(v.level(), v.rank(self.p)))
    }

    /// Section at the vertex of `level` with lexicographic `rank`.
    pub fn section_at(&self, level: usize, rank: usize) -> Portrait {
        let depth = self.depth - level;
        let mut labels = Vec::with_capacity(level_offset(self.p, depth));
        let mut width = 1usize;
        let mut first = rank;
        for l in 0..depth {
            let start = level_offset(self.p, level + l) + first;
            labels.extend_from_slice(&self.labels[start..start + width]);
            width *= self.p as usize;
            first *= self.p as usize;
        }
        Portrait {
            p: self.p,
            depth,
            labels,
        }
    }

    /// Builds a level-1 stabilizing portrait of depth `k + 1` from `p`
    /// sections of depth `k`.
    pub fn from_sections(sections: &[Portrait]) -> Result<Portrait, TreeError> {
        let first = sections
            .first()
            .ok_or_else(|| TreeError::Parse("no sections".into()))?;
        let p = first.p;
        if sections.len() != p as usize {
            return Err(TreeError::LabelCount {
                expected: p as usize,
                got: sections.len(),
            });
        }
        for s in sections {
            first.check_compatible(s)?;
        }
        let depth = first.depth + 1;
        let mut labels = vec![0u8];
        let mut width = 1usize;
        for l in 0..first.depth {
            let off = level_offset(p, l);
            for s in sections {
                labels.extend_from_slice(&s.labels[off..off + width]);
            }
            width *= p as usize;
        }
        Ok(Portrait { p, depth, labels })
    }

    pub fn truncate(&self, m: usize) -> Result<Portrait, TreeError> {
        if m > self.depth {
            return Err(TreeError::TooDeep {
                level: m,
                depth: self.depth,
            });
        }
        Ok(Portrait {
            p: self.p,
            depth: m,
            labels: self.labels[..level_offset(self.p, m)].to_vec(),
        })
    }

    /// Largest `m` such that every label on levels `< m` vanishes; the
    /// portrait lies in `St(m)` exactly when this is at least `m`.
    pub fn stabilizer_depth(&self) -> usize {
        match self.labels.iter().position(|&l| l != 0) {
            None => self.depth,
            Some(i) => level_of_index(self.p, i),
        }
    }

    /// The permutation induced on level `depth`, leaves ranked
    /// lexicographically from `0`.
    pub fn to_leaf_perm(&self) -> Perm {
        let img = self.image_ranks(self.depth);
        let off = level_offset(self.p, self.depth);
        Perm::from_images_unchecked(img[off..].to_vec())
    }

    /// Number of fixed vertices on each level `1..=depth`.
    pub fn fixed_counts(&self) -> Vec<usize> {
        let img = self.image_ranks(self.depth);
        (1..=self.depth)
            .map(|level| {
                let off = level_offset(self.p, level);
                (0..level_width(self.p, level))
                    .filter(|&r| img[off + r] as usize == r)
                    .count()
            })
            .collect()
    }

    /// Compact hashable key: two labels per byte (p <= 15).
    pub fn packed(&self) -> Vec<u8> {
        self.labels
            .chunks(2)
            .map(|c| c[0] | (c.get(1).copied().unwrap_or(0) << 4))
            .collect()
    }

    /// Inverse of [`Portrait::packed`].
    pub fn from_packed(p: u32, depth: usize, packed: &[u8]) -> Portrait {
        let n = level_offset(p, depth);
        let labels = (0..n)
            .map(|i| (packed[i / 2] >> (4 * (i % 2))) & 0x0f)
            .collect();
        Portrait { p, depth, labels }
    }

    pub fn to_text(&self) -> String {
        let labels: Vec<String> = self.labels.iter().map(u8::to_string).collect();
        format!("{} {}\n{}\n", self.p, self.depth, labels.join(" "))
    }

    pub fn from_text(text: &str) -> Result<Portrait, TreeError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| TreeError::Parse("missing header".into()))?;
        let nums: Vec<&str> = header.split_whitespace().collect();
        if nums.len() != 2 {
            return Err(TreeError::Parse(format!("bad header {header:?}")));
        }
        let p: u32 = nums[0]
            .parse()
            .map_err(|_| TreeError::Parse(format!("bad p {:?}", nums[0])))?;
        let depth: usize = nums[1]
            .parse()
            .map_err(|_| TreeError::Parse(format!("bad depth {:?}", nums[1])))?;
        let labels = lines
            .flat_map(str::split_whitespace)
            .map(|t| {
                t.parse::<u8>()
                    .map_err(|_| TreeError::Parse(format!("bad label {t:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Portrait::from_labels(p, depth, labels)
    }
}
