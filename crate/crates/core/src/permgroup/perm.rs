use std::fmt;

use super::GroupElement;

/// A permutation of `{0, ..., n-1}`, stored as its image list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm {
            images: (0..n as u32).collect(),
        }
    }

    /// Returns `None` unless `images` is a bijection of `0..len`.
    pub fn from_images(images: Vec<u32>) -> Option<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            let slot = seen.get_mut(i as usize)?;
            if *slot {
                return None;
            }
            *slot = true;
        }
        Some(Perm { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(Self::from_images(images.clone()).is_some());
        Perm { images }
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.images.len()];
        let mut out = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] || self.images[start] as usize == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x as u32);
                x = self.images[x] as usize;
            }
            out.push(cycle);
        }
        out
    }

    /// Order as the lcm of the cycle lengths.
    pub fn order(&self) -> u64 {
        fn gcd(a: u64, b: u64) -> u64 {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        self.cycles().iter().fold(1u64, |acc, c| {
            let l = c.len() as u64;
            acc / gcd(acc, l) * l
        })
    }
}

impl GroupElement for Perm {
    fn degree(&self) -> usize {
        self.images.len()
    }

    fn image(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    fn mul(&self, other: &Self) -> Self {
        Perm {
            images: self
                .images
                .iter()
                .map(|&i| other.images[i as usize])
                .collect(),
        }
    }

    fn inverse(&self) -> Self {
        let mut images = vec![0u32; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j as usize] = i as u32;
        }
        Perm { images }
    }

    fn identity_like(&self) -> Self {
        Perm::identity(self.images.len())
    }

    fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, &j)| i == j as usize)
    }
}

/// Cycle notation on `1..=n`.
impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{}", self)
    }
}
