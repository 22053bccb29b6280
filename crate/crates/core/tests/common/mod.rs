//! Shared fixtures for the integration tests: the data used across the
//! suites and a brute-force oracle that enumerates a group element by
//! element, independent of the stabilizer-chain code.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};

use multiegs::permgroup::GroupElement;
use multiegs::{DefiningDatum, Portrait};

pub fn gupta_sidki() -> DefiningDatum {
    DefiningDatum::multi_ggs(3, vec![vec![1, 2]])
}

pub fn constant_p3() -> DefiningDatum {
    DefiningDatum::single_vector(3, vec![1, 1], &[1, 2])
}

pub fn nonperiodic_p5() -> DefiningDatum {
    DefiningDatum::multi_ggs(5, vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0]])
}

pub fn periodic_p5() -> DefiningDatum {
    DefiningDatum::multi_ggs(5, vec![vec![1, 4, 0, 0], vec![0, 1, 4, 0]])
}

pub fn symmetric_p5() -> DefiningDatum {
    DefiningDatum::single_vector(5, vec![1, 4, 4, 1], &[1, 2])
}

/// Every datum the oracle suites walk through.
pub fn corpus() -> Vec<(&'static str, DefiningDatum)> {
    vec![
        ("gupta-sidki", gupta_sidki()),
        ("constant-p3", constant_p3()),
        (
            "multi-ggs-p3",
            DefiningDatum::multi_ggs(3, vec![vec![1, 0], vec![0, 1]]),
        ),
        (
            "two-families-p3",
            DefiningDatum::single_vector(3, vec![1, 2], &[1, 3]),
        ),
        ("nonperiodic-p5", nonperiodic_p5()),
        ("periodic-p5", periodic_p5()),
        ("symmetric-p5", symmetric_p5()),
    ]
}

/// The full group as a set of label vectors, or `None` once it grows past
/// `limit`. Elements are reached as products `g_1 g_2 ... g_n` of
/// generators.
pub fn closure(generators: &[Portrait], limit: usize) -> Option<Vec<Portrait>> {
    let id = generators[0].identity_like();
    let mut seen: HashSet<Vec<u8>> = HashSet::from([id.labels().to_vec()]);
    let mut elements = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = x.mul(g);
            if seen.insert(y.labels().to_vec()) {
                if seen.len() > limit {
                    return None;
                }
                elements.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Some(elements)
}

/// The smallest subgroup containing `seeds` that is normalized by
/// `generators`, by repeated closure.
pub fn normal_closure(generators: &[Portrait], seeds: Vec<Portrait>) -> HashSet<Vec<u8>> {
    let mut gens = seeds;
    loop {
        let members: HashSet<Vec<u8>> = closure_set(&gens);
        let fresh: Vec<Portrait> = gens
            .iter()
            .flat_map(|h| generators.iter().map(move |g| g.inverse().mul(h).mul(g)))
            .filter(|c| !members.contains(c.labels()))
            .collect();
        if fresh.is_empty() {
            return members;
        }
        gens.extend(fresh);
    }
}

fn closure_set(gens: &[Portrait]) -> HashSet<Vec<u8>> {
    closure(gens, usize::MAX)
        .expect("no limit")
        .into_iter()
        .map(|g| g.labels().to_vec())
        .collect()
}

/// `|G : G'|` with `G'` the normal closure of the generator commutators.
pub fn derived_index(generators: &[Portrait], order: usize) -> usize {
    let mut seeds = Vec::new();
    for x in generators {
        for y in generators {
            seeds.push(x.inverse().mul(&y.inverse()).mul(x).mul(y));
        }
    }
    order / normal_closure(generators, seeds).len()
}

/// One representative and the size of every conjugacy class, by
/// partitioning the element list under conjugation.
pub fn classes(generators: &[Portrait], elements: &[Portrait]) -> Vec<(Portrait, usize)> {
    let mut class_of: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut sizes = Vec::new();
    for e in elements {
        if class_of.contains_key(e.labels()) {
            continue;
        }
        let id = sizes.len();
        class_of.insert(e.labels().to_vec(), id);
        let mut queue = VecDeque::from([e.clone()]);
        let mut size = 1;
        while let Some(x) = queue.pop_front() {
            for g in generators {
                let y = g.inverse().mul(&x).mul(g);
                if !class_of.contains_key(y.labels()) {
                    class_of.insert(y.labels().to_vec(), id);
                    size += 1;
                    queue.push_back(y);
                }
            }
        }
        sizes.push((e.clone(), size));
    }
    sizes
}
