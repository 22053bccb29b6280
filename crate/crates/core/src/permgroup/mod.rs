//! Permutation-group machinery over portraits and leaf permutations:
//! stabilizer chains, the level quotient `G_k` of a defining datum, its
//! derived and Frattini subgroups, abelianization coordinates and bounded
//! conjugacy-orbit search.

mod chain;
mod conjugacy;
mod perm;

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};

pub use chain::{BasePolicy, StabilizerChain};
pub use conjugacy::{CentralizerLift, LiftOutcome};
pub use perm::Perm;

use crate::generators::standard_generating_set;
use crate::groupdata::DefiningDatum;
use crate::tree::{level_offset, Portrait};

/// What a stabilizer chain needs from its elements: a right action on
/// `0..degree()` and the group operations, with `a.mul(b)` acting as `a`
/// first and then `b`.
pub trait GroupElement: Clone {
    fn degree(&self) -> usize;
    fn image(&self, point: usize) -> usize;
    fn mul(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;
    fn identity_like(&self) -> Self;
    fn is_identity(&self) -> bool;
}

/// Portraits act on every vertex of levels `0..=depth`, by breadth-first
/// index.
impl GroupElement for Portrait {
    fn degree(&self) -> usize {
        level_offset(self.p(), self.depth() + 1)
    }

    fn image(&self, point: usize) -> usize {
        self.act_index(point)
    }

    fn mul(&self, other: &Self) -> Self {
        Portrait::mul(self, other)
    }

    fn inverse(&self) -> Self {
        Portrait::inverse(self)
    }

    fn identity_like(&self) -> Self {
        Portrait::identity(self.p(), self.depth())
    }

    fn is_identity(&self) -> bool {
        Portrait::is_identity(self)
    }
}

/// The breadth-first base `1, 2, ...` over every non-root vertex. With it,
/// chain level `level_offset(p, m + 1) - 1` is the level-`m` stabilizer.
pub fn vertex_base(p: u32, depth: usize) -> BasePolicy {
    BasePolicy::Prescribed((1..level_offset(p, depth + 1)).collect())
}

pub fn portrait_chain(p: u32, depth: usize, generators: &[Portrait]) -> StabilizerChain<Portrait> {
    StabilizerChain::build(
        Portrait::identity(p, depth),
        vertex_base(p, depth),
        generators,
    )
}

/// Schreier–Sims on leaf permutations with greedily chosen base points.
pub fn build_chain(degree: usize, generators: &[Perm]) -> StabilizerChain<Perm> {
    StabilizerChain::build(Perm::identity(degree), BasePolicy::Greedy, generators)
}

/// Writes `n` as `p^e` when it is a power of `p`.
pub fn p_exponent(n: &BigUint, p: u32) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let mut e = 0;
    let mut m = n.clone();
    let bp = BigUint::from(p);
    while !m.is_one() {
        if !(&m % &bp).is_zero() {
            return None;
        }
        m /= &bp;
        e += 1;
    }
    Some(e)
}

/// Order of a portrait; always a power of `p`.
pub fn element_order(g: &Portrait) -> u64 {
    let mut order = 1u64;
    let mut x = g.clone();
    while !x.is_identity() {
        x = x.pow(i64::from(g.p()));
        order *= u64::from(g.p());
    }
    order
}

/// The normal closure of `seeds` under conjugation by `generators`.
pub fn normal_closure(
    p: u32,
    depth: usize,
    generators: &[Portrait],
    seeds: &[Portrait],
) -> StabilizerChain<Portrait> {
    let mut chain = StabilizerChain::trivial(Portrait::identity(p, depth), vertex_base(p, depth));
    close_normally(&mut chain, generators, seeds.iter().cloned());
    chain
}

fn close_normally(
    chain: &mut StabilizerChain<Portrait>,
    generators: &[Portrait],
    seeds: impl IntoIterator<Item = Portrait>,
) {
    let mut queue: VecDeque<Portrait> = VecDeque::new();
    for s in seeds {
        if chain.extend(s.clone()) {
            queue.push_back(s);
        }
    }
    let inverses: Vec<Portrait> = generators.iter().map(Portrait::inverse).collect();
    while let Some(x) = queue.pop_front() {
        for (g, gi) in generators.iter().zip(&inverses) {
            let y = gi.mul(&x).mul(g);
            if chain.extend(y.clone()) {
                queue.push_back(y);
            }
        }
    }
}

/// Coordinates in the elementary abelian quotient `G / G'`, read off a
/// tower `G' = H_0 < H_1 < ... < H_d = G` with `H_{j+1} = <H_j, s_j>`.
#[derive(Clone, Debug)]
struct AbelianMap {
    basis: Vec<Portrait>,
    basis_inverses: Vec<Portrait>,
    tower: Vec<StabilizerChain<Portrait>>,
}

impl AbelianMap {
    fn new(derived: &StabilizerChain<Portrait>, generators: &[Portrait]) -> Self {
        let mut tower = vec![derived.clone()];
        let mut basis = Vec::new();
        for g in generators {
            let mut next = tower.last().expect("non-empty").clone();
            if next.extend(g.clone()) {
                basis.push(g.clone());
                tower.push(next);
            }
        }
        let basis_inverses = basis.iter().map(Portrait::inverse).collect();
        AbelianMap {
            basis,
            basis_inverses,
            tower,
        }
    }

    fn coords(&self, x: &Portrait) -> Option<Vec<u8>> {
        let p = x.p();
        let d = self.basis.len();
        if !self.tower[d].contains(x) {
            return None;
        }
        let mut out = vec![0u8; d];
        let mut x = x.clone();
        for j in (0..d).rev() {
            let mut c = 0;
            while !self.tower[j].contains(&x) {
                x = x.mul(&self.basis_inverses[j]);
                c += 1;
                if c >= p {
                    return None;
                }
            }
            out[j] = c as u8;
        }
        Some(out)
    }
}

/// The level quotient `G_k`, given by generator portraits of depth `k`.
#[derive(Debug)]
pub struct GroupContext {
    p: u32,
    depth: usize,
    generators: Vec<Portrait>,
    chain: StabilizerChain<Portrait>,
    derived: OnceLock<StabilizerChain<Portrait>>,
    frattini: OnceLock<StabilizerChain<Portrait>>,
    abelian: OnceLock<AbelianMap>,
}

impl GroupContext {
    pub fn new(datum: &DefiningDatum, depth: usize) -> Self {
        Self::from_generators(datum.p(), depth, standard_generating_set(datum, depth))
    }

    pub fn from_generators(p: u32, depth: usize, generators: Vec<Portrait>) -> Self {
        let chain = portrait_chain(p, depth, &generators);
        GroupContext {
            p,
            depth,
            generators,
            chain,
            derived: OnceLock::new(),
            frattini: OnceLock::new(),
            abelian: OnceLock::new(),
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn generators(&self) -> &[Portrait] {
        &self.generators
    }

    pub fn leaf_generators(&self) -> Vec<Perm> {
        self.generators.iter().map(Portrait::to_leaf_perm).collect()
    }

    pub fn chain(&self) -> &StabilizerChain<Portrait> {
        &self.chain
    }

    pub fn identity(&self) -> Portrait {
        Portrait::identity(self.p, self.depth)
    }

    pub fn order(&self) -> BigUint {
        self.chain.order()
    }

    pub fn order_exponent(&self) -> u32 {
        p_exponent(&self.order(), self.p).expect("p-group")
    }

    pub fn contains(&self, g: &Portrait) -> bool {
        g.p() == self.p && g.depth() == self.depth && self.chain.contains(g)
    }

    /// Generators of `St_G(m)` inside `G_k`.
    pub fn level_stabilizer_generators(&self, m: usize) -> &[Portrait] {
        self.chain.level_generators(level_offset(self.p, m + 1) - 1)
    }

    pub fn level_stabilizer_order(&self, m: usize) -> BigUint {
        let from = level_offset(self.p, m + 1) - 1;
        self.chain.orbit_sizes()[from..]
            .iter()
            .fold(BigUint::one(), |acc, &s| acc * BigUint::from(s))
    }

    pub fn normal_closure(&self, seeds: &[Portrait]) -> StabilizerChain<Portrait> {
        normal_closure(self.p, self.depth, &self.generators, seeds)
    }

    pub fn derived_subgroup(&self) -> &StabilizerChain<Portrait> {
        self.derived.get_or_init(|| {
            let mut seeds = Vec::new();
            for (i, x) in self.generators.iter().enumerate() {
                for y in &self.generators[i + 1..] {
                    seeds.push(x.commutator(y));
                }
            }
            self.normal_closure(&seeds)
        })
    }

    /// `log_p |G_k : G_k'|`.
    pub fn abelianization_rank(&self) -> u32 {
        self.order_exponent()
            - p_exponent(&self.derived_subgroup().order(), self.p).expect("p-group")
    }

    /// `<G_k', p-th powers of the generators>`.
    pub fn frattini_subgroup(&self) -> &StabilizerChain<Portrait> {
        self.frattini.get_or_init(|| {
            let mut chain = self.derived_subgroup().clone();
            for g in &self.generators {
                chain.extend(g.pow(i64::from(self.p)));
            }
            chain
        })
    }

    /// The minimal number of generators `d(G_k)`.
    pub fn frattini_rank(&self) -> u32 {
        self.order_exponent()
            - p_exponent(&self.frattini_subgroup().order(), self.p).expect("p-group")
    }

    /// Whether `x` and `y` have the same image modulo `subgroup`.
    pub fn coset_equal(x: &Portrait, y: &Portrait, subgroup: &StabilizerChain<Portrait>) -> bool {
        subgroup.contains(&x.mul(&y.inverse()))
    }

    /// Coordinates of the image of `x` in `G_k / G_k'` over a basis of
    /// generator images; `None` when `x` is not in `G_k`.
    pub fn abelian_coords(&self, x: &Portrait) -> Option<Vec<u8>> {
        if x.p() != self.p || x.depth() != self.depth {
            return None;
        }
        self.abelian
            .get_or_init(|| AbelianMap::new(self.derived_subgroup(), &self.generators))
            .coords(x)
    }

    /// Breadth-first closure of `{z}` under conjugation by the generators.
    pub fn conj_orbit_bfs(&self, z: &Portrait, cap: usize) -> OrbitOutcome {
        match self.orbit_walk(z, &[], cap) {
            Walk::Complete(keys) => OrbitOutcome::Complete(
                keys.iter()
                    .map(|k| Portrait::from_packed(self.p, self.depth, k))
                    .collect(),
            ),
            Walk::CapExceeded(explored) => OrbitOutcome::CapExceeded { explored },
            Walk::Found(..) => unreachable!("no targets"),
        }
    }

    /// Walks the conjugacy class of `z` looking for any of `targets`; on a
    /// hit returns `g` with `z^g = targets[index]`.
    pub fn search_conjugates(&self, z: &Portrait, targets: &[Portrait], cap: usize) -> BfsSearch {
        match self.orbit_walk(z, targets, cap) {
            Walk::Found(index, conjugator) => BfsSearch::Found { index, conjugator },
            Walk::Complete(keys) => BfsSearch::Absent {
                orbit_size: keys.len(),
            },
            Walk::CapExceeded(explored) => BfsSearch::CapExceeded { explored },
        }
    }

    fn orbit_walk(&self, z: &Portrait, targets: &[Portrait], cap: usize) -> Walk {
        let wanted: HashMap<Vec<u8>, usize> = targets
            .iter()
            .enumerate()
            .rev()
            .map(|(i, t)| (t.packed(), i))
            .collect();
        if let Some(&index) = wanted.get(&z.packed()) {
            return Walk::Found(index, self.identity());
        }
        // elements are kept packed; parent index and generator per element
        let mut keys: Vec<Box<[u8]>> = vec![z.packed().into_boxed_slice()];
        let mut parents: Vec<(u32, u16)> = vec![(u32::MAX, 0)];
        let mut seen: HashSet<Box<[u8]>> = HashSet::new();
        seen.insert(keys[0].clone());
        let inverses: Vec<Portrait> = self.generators.iter().map(Portrait::inverse).collect();
        let mut cursor = 0;
        while cursor < keys.len() {
            let x = Portrait::from_packed(self.p, self.depth, &keys[cursor]);
            for (gi, (g, ginv)) in self.generators.iter().zip(&inverses).enumerate() {
                let key = ginv.mul(&x).mul(g).packed().into_boxed_slice();
                if seen.contains(&key) {
                    continue;
                }
                parents.push((cursor as u32, gi as u16));
                if let Some(&index) = wanted.get(&key[..]) {
                    let mut path = Vec::new();
                    let mut node = parents.len() - 1;
                    while parents[node].0 != u32::MAX {
                        path.push(parents[node].1);
                        node = parents[node].0 as usize;
                    }
                    let conjugator = path.iter().rev().fold(self.identity(), |acc, &gi| {
                        acc.mul(&self.generators[gi as usize])
                    });
                    return Walk::Found(index, conjugator);
                }
                seen.insert(key.clone());
                keys.push(key);
                if keys.len() > cap {
                    return Walk::CapExceeded(keys.len());
                }
            }
            cursor += 1;
        }
        Walk::Complete(keys)
    }
}

enum Walk {
    Found(usize, Portrait),
    Complete(Vec<Box<[u8]>>),
    CapExceeded(usize),
}

#[derive(Clone, Debug)]
pub enum OrbitOutcome {
    Complete(Vec<Portrait>),
    CapExceeded { explored: usize },
}

#[derive(Clone, Debug)]
pub enum BfsSearch {
    Found { index: usize, conjugator: Portrait },
    Absent { orbit_size: usize },
    CapExceeded { explored: usize },
}

/// Contexts for `G_1, ..., G_k` of one datum.
#[derive(Debug)]
pub struct Tower {
    contexts: Vec<GroupContext>,
}

impl Tower {
    pub fn new(datum: &DefiningDatum, k: usize) -> Self {
        Tower {
            contexts: (0..=k).map(|m| GroupContext::new(datum, m)).collect(),
        }
    }

    pub fn depth(&self) -> usize {
        self.contexts.len() - 1
    }

    /// The context of depth `m`.
    pub fn at(&self, m: usize) -> &GroupContext {
        &self.contexts[m]
    }

    pub fn top(&self) -> &GroupContext {
        self.contexts.last().expect("depth 0 is always present")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{directed_from_vector, rooted_a};

    fn gupta_sidki(k: usize) -> GroupContext {
        GroupContext::new(&DefiningDatum::multi_ggs(3, vec![vec![1, 2]]), k)
    }

    fn closure(gens: &[Portrait]) -> Vec<Portrait> {
        let mut seen = std::collections::BTreeSet::new();
        let id = gens[0].identity_like();
        seen.insert(id.clone());
        let mut queue = vec![id];
        while let Some(x) = queue.pop() {
            for g in gens {
                let y = x.mul(g);
                if seen.insert(y.clone()) {
                    queue.push(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    #[test]
    fn gupta_sidki_orders_match_closure() {
        for k in 1..=3 {
            let ctx = gupta_sidki(k);
            assert_eq!(ctx.order(), BigUint::from(closure(ctx.generators()).len()));
        }
        assert_eq!(gupta_sidki(3).order_exponent(), 7);
    }

    #[test]
    fn leaf_chain_agrees_with_portrait_chain() {
        let ctx = gupta_sidki(3);
        let leaf = build_chain(27, &ctx.leaf_generators());
        assert_eq!(leaf.order(), ctx.order());
    }

    #[test]
    fn level_stabilizers() {
        let ctx = gupta_sidki(3);
        assert_eq!(ctx.level_stabilizer_order(0), ctx.order());
        assert_eq!(ctx.level_stabilizer_order(3), BigUint::one());
        // |G_3| / |G_1| = |St(1)|
        assert_eq!(ctx.level_stabilizer_order(1), BigUint::from(3u32.pow(6)));
        for g in ctx.level_stabilizer_generators(2) {
            assert!(g.stabilizer_depth() >= 2);
        }
    }

    #[test]
    fn derived_and_frattini() {
        let ctx = gupta_sidki(2);
        assert_eq!(ctx.abelianization_rank(), 2);
        assert_eq!(ctx.frattini_rank(), 2);
        let g1 = gupta_sidki(1);
        assert_eq!(g1.derived_subgroup().order(), BigUint::one());
        assert_eq!(g1.frattini_rank(), 1);
    }

    #[test]
    fn abelian_coords_are_additive() {
        let ctx = gupta_sidki(3);
        let a = rooted_a(3, 3);
        let b = directed_from_vector(3, 1, &[1, 2], 3);
        let x = a.mul(&b).mul(&b).mul(&a);
        assert_eq!(ctx.abelian_coords(&x), Some(vec![2, 2]));
        assert_eq!(ctx.abelian_coords(&a.commutator(&b)), Some(vec![0, 0]));
    }

    #[test]
    fn orbit_of_central_element() {
        let ctx = gupta_sidki(2);
        match ctx.conj_orbit_bfs(&ctx.identity(), 10) {
            OrbitOutcome::Complete(o) => assert_eq!(o.len(), 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn search_returns_valid_witness() {
        let ctx = gupta_sidki(3);
        let b = ctx.generators()[1].clone();
        let g = ctx.generators()[0].mul(&b).mul(&ctx.generators()[0]);
        let target = b.conjugate_by(&g);
        match ctx.search_conjugates(&b, std::slice::from_ref(&target), 1000) {
            BfsSearch::Found { conjugator, .. } => assert_eq!(b.conjugate_by(&conjugator), target),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn element_orders() {
        let a = rooted_a(3, 3);
        let b = directed_from_vector(3, 1, &[1, 2], 3);
        assert_eq!(element_order(&a), 3);
        assert_eq!(element_order(&a.mul(&b)), 9);
        assert_eq!(element_order(&Portrait::identity(3, 3)), 1);
    }
}
