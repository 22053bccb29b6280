use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::One;

use super::GroupElement;

/// How new base points are chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasePolicy {
    /// The smallest point moved by the element that needs a new level.
    Greedy,
    /// A fixed, complete base: one level per listed point, in order. Every
    /// point moved by the group must appear in the list.
    Prescribed(Vec<usize>),
}

#[derive(Clone, Debug)]
struct Level<E> {
    point: usize,
    gens: Vec<E>,
    orbit: Vec<usize>,
    transversal: Vec<E>,
    inverse_transversal: Vec<E>,
    position: HashMap<usize, usize>,
    // number of generators already checked against each orbit point
    tested: Vec<usize>,
}

impl<E: GroupElement> Level<E> {
    fn new(point: usize, identity: &E) -> Self {
        let mut position = HashMap::new();
        position.insert(point, 0);
        Level {
            point,
            gens: Vec::new(),
            orbit: vec![point],
            transversal: vec![identity.clone()],
            inverse_transversal: vec![identity.clone()],
            position,
            tested: vec![0],
        }
    }

    fn add_generator(&mut self, g: E) {
        self.gens.push(g);
        let newest = self.gens.len() - 1;
        // old points only need the new generator; new points need all of them
        let old_len = self.orbit.len();
        let mut cursor = 0;
        while cursor < self.orbit.len() {
            let from = if cursor < old_len { newest } else { 0 };
            for gi in from..self.gens.len() {
                let x = self.orbit[cursor];
                let y = self.gens[gi].image(x);
                if !self.position.contains_key(&y) {
                    let t = self.transversal[cursor].mul(&self.gens[gi]);
                    self.position.insert(y, self.orbit.len());
                    self.orbit.push(y);
                    self.inverse_transversal.push(t.inverse());
                    self.transversal.push(t);
                    self.tested.push(0);
                }
            }
            cursor += 1;
        }
    }
}

/// Base and strong generating set built by deterministic Schreier–Sims.
#[derive(Clone, Debug)]
pub struct StabilizerChain<E> {
    identity: E,
    policy: BasePolicy,
    levels: Vec<Level<E>>,
}

impl<E: GroupElement> StabilizerChain<E> {
    /// The trivial group acting like `identity`.
    pub fn trivial(identity: E, policy: BasePolicy) -> Self {
        let levels = match &policy {
            BasePolicy::Greedy => Vec::new(),
            BasePolicy::Prescribed(points) => {
                points.iter().map(|&pt| Level::new(pt, &identity)).collect()
            }
        };
        StabilizerChain {
            identity,
            policy,
            levels,
        }
    }

    pub fn build(identity: E, policy: BasePolicy, generators: &[E]) -> Self {
        let mut chain = Self::trivial(identity, policy);
        for g in generators {
            chain.extend(g.clone());
        }
        chain
    }

    pub fn identity(&self) -> &E {
        &self.identity
    }

    pub fn policy(&self) -> &BasePolicy {
        &self.policy
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    /// Strong generators of the pointwise stabilizer of the first `level`
    /// base points; `level = 0` gives generators of the whole group.
    pub fn level_generators(&self, level: usize) -> &[E] {
        self.levels.get(level).map_or(&[], |l| l.gens.as_slice())
    }

    /// All strong generators (those of the top level).
    pub fn strong_generators(&self) -> &[E] {
        self.level_generators(0)
    }

    /// Strips `g` starting at `from`; returns the residue and the level at
    /// which stripping stopped (`len()` when every level was passed).
    pub fn strip_from(&self, mut g: E, from: usize) -> (E, usize) {
        for (i, level) in self.levels.iter().enumerate().skip(from) {
            let x = g.image(level.point);
            if x == level.point {
                continue;
            }
            match level.position.get(&x) {
                Some(&pos) => g = g.mul(&level.inverse_transversal[pos]),
                None => return (g, i),
            }
        }
        (g, self.levels.len())
    }

    pub fn contains(&self, g: &E) -> bool {
        self.strip_from(g.clone(), 0).0.is_identity()
    }

    /// Adds `g` to the group and restores the chain invariants. Returns
    /// whether the group grew.
    pub fn extend(&mut self, g: E) -> bool {
        let (residue, j) = self.strip_from(g, 0);
        if residue.is_identity() {
            return false;
        }
        let j = self.ensure_level(j, &residue);
        for l in 0..=j {
            self.levels[l].add_generator(residue.clone());
        }
        self.saturate(j);
        true
    }

    /// Makes sure level `j` exists for a residue that fixed every earlier
    /// base point; returns the level the residue must be added to.
    fn ensure_level(&mut self, j: usize, residue: &E) -> usize {
        if j < self.levels.len() {
            return j;
        }
        match &self.policy {
            BasePolicy::Greedy => {
                let point = (0..residue.degree())
                    .find(|&x| residue.image(x) != x)
                    .expect("non-identity element moves a point");
                self.levels.push(Level::new(point, &self.identity));
                self.levels.len() - 1
            }
            BasePolicy::Prescribed(_) => {
                panic!("element moves a point outside the prescribed base")
            }
        }
    }

    fn saturate(&mut self, top: usize) {
        let mut i = top as isize;
        'outer: while i >= 0 {
            let li = i as usize;
            let mut idx = 0;
            while idx < self.levels[li].orbit.len() {
                while self.levels[li].tested[idx] < self.levels[li].gens.len() {
                    let gi = self.levels[li].tested[idx];
                    self.levels[li].tested[idx] += 1;
                    let level = &self.levels[li];
                    if level.orbit.len() == 1 {
                        // generators fixing the base point already sit one level down
                        continue;
                    }
                    let s = &level.gens[gi];
                    let y = s.image(level.orbit[idx]);
                    let h = level.transversal[idx]
                        .mul(s)
                        .mul(&level.inverse_transversal[level.position[&y]]);
                    let (residue, j) = self.strip_from(h, li + 1);
                    if !residue.is_identity() {
                        let j = self.ensure_level(j, &residue);
                        for l in li + 1..=j {
                            self.levels[l].add_generator(residue.clone());
                        }
                        i = j as isize;
                        continue 'outer;
                    }
                }
                idx += 1;
            }
            i -= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::Perm;
    use super::*;

    fn perm(images: &[u32]) -> Perm {
        Perm::from_images(images.to_vec()).unwrap()
    }

    #[test]
    fn trivial_group_has_order_one() {
        let chain = StabilizerChain::build(Perm::identity(4), BasePolicy::Greedy, &[]);
        assert_eq!(chain.order(), BigUint::one());
        assert!(chain.contains(&Perm::identity(4)));
    }

    #[test]
    fn symmetric_group_orders() {
        for n in 2..7u32 {
            let cycle: Vec<u32> = (0..n).map(|i| (i + 1) % n).collect();
            let mut swap: Vec<u32> = (0..n).collect();
            swap.swap(0, 1);
            let chain = StabilizerChain::build(
                Perm::identity(n as usize),
                BasePolicy::Greedy,
                &[perm(&cycle), perm(&swap)],
            );
            let fact: u64 = (1..=n as u64).product();
            assert_eq!(chain.order(), BigUint::from(fact));
        }
    }

    #[test]
    fn alternating_membership() {
        let c1 = perm(&[1, 2, 0, 3, 4]);
        let c2 = perm(&[0, 2, 3, 1, 4]);
        let c3 = perm(&[0, 1, 3, 4, 2]);
        let chain = StabilizerChain::build(Perm::identity(5), BasePolicy::Greedy, &[c1, c2, c3]);
        assert_eq!(chain.order(), BigUint::from(60u32));
        assert!(!chain.contains(&perm(&[1, 0, 2, 3, 4])));
        assert!(chain.contains(&perm(&[1, 0, 3, 2, 4])));
    }

    #[test]
    fn prescribed_base_order_matches_greedy() {
        let gens = [perm(&[1, 2, 3, 0, 5, 4]), perm(&[1, 0, 2, 3, 4, 5])];
        let greedy = StabilizerChain::build(Perm::identity(6), BasePolicy::Greedy, &gens);
        let fixed = StabilizerChain::build(
            Perm::identity(6),
            BasePolicy::Prescribed((0..6).rev().collect()),
            &gens,
        );
        assert_eq!(greedy.order(), fixed.order());
        assert_eq!(fixed.base(), vec![5, 4, 3, 2, 1, 0]);
    }
}
