//! Exact conjugacy testing by lifting through the level filtration.
//!
//! With `K_m = St_G(m)` and `N_m = K_m / K_{m+1}` (an `F_p`-space of
//! level-`m` labels), suppose `C_m` is the subgroup of elements conjugating
//! `w` into `w K_m`. Writing elements of `w K_m` as `w n`, the group `C_m`
//! acts affinely on `N_m / U` with `U = { n - n^w }`, where `K_m` acts
//! trivially. The stabilizer of the point of `w` gives `C_{m+1}` after
//! correcting each Schreier generator by a solution of `n - n^w = delta`
//! and adjoining the lifts of `C_{N_m}(w)`. A candidate `z` is pulled back
//! onto `w` one level at a time.

use std::collections::HashMap;

use num_bigint::BigUint;

use super::{portrait_chain, GroupContext};
use crate::linalg::Echelon;
use crate::tree::{level_offset, Portrait};

#[derive(Clone, Debug)]
struct Stage {
    level: usize,
    u: Echelon,
    // U input index -> N input index
    u_to_n: Vec<usize>,
    n_vecs: Vec<Vec<u8>>,
    n_lifts: Vec<Portrait>,
    orbit: HashMap<Vec<u8>, usize>,
    transversal: Vec<Portrait>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiftOutcome {
    /// `z^g = w`.
    Conjugate(Portrait),
    NotConjugate,
}

/// The centralizer of `w` in `G_k`, built level by level, together with
/// the orbit data needed to decide conjugacy to `w`.
#[derive(Clone, Debug)]
pub struct CentralizerLift {
    w: Portrait,
    w_inv: Portrait,
    stages: Vec<Stage>,
    centralizer: Vec<Portrait>,
    largest_orbit: usize,
}

fn permute(v: &[u8], images: &[u32]) -> Vec<u8> {
    let mut out = vec![0u8; v.len()];
    for (x, &i) in v.iter().zip(images) {
        out[i as usize] = *x;
    }
    out
}

fn add(p: u32, a: &[u8], b: &[u8]) -> Vec<u8> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| ((u32::from(x) + u32::from(y)) % p) as u8)
        .collect()
}

fn sub(p: u32, a: &[u8], b: &[u8]) -> Vec<u8> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| ((u32::from(x) + p - u32::from(y)) % p) as u8)
        .collect()
}

impl Stage {
    fn solve(&self, delta: &[u8]) -> Option<Portrait> {
        let (residue, coeffs) = self.u.reduce(delta);
        if residue.iter().any(|&x| x != 0) {
            return None;
        }
        let first = self.n_lifts.first()?;
        let mut acc = Portrait::identity(first.p(), first.depth());
        for (t, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                acc = acc.mul(&self.n_lifts[self.u_to_n[t]].pow(i64::from(c)));
            }
        }
        Some(acc)
    }

    fn solve_vector(&self, delta: &[u8]) -> Option<Vec<u8>> {
        let p = self.u.p();
        let (residue, coeffs) = self.u.reduce(delta);
        if residue.iter().any(|&x| x != 0) {
            return None;
        }
        let mut n = vec![0u8; delta.len()];
        for (t, &c) in coeffs.iter().enumerate() {
            for (o, &x) in n.iter_mut().zip(&self.n_vecs[self.u_to_n[t]]) {
                *o = ((u32::from(*o) + u32::from(c) * u32::from(x)) % p) as u8;
            }
        }
        Some(n)
    }

    fn point(&self, v: &[u8]) -> Vec<u8> {
        self.u.reduce(v).0
    }
}

impl CentralizerLift {
    /// Fails with `(level, orbit size)` once some orbit outgrows `cap`.
    pub fn build(ctx: &GroupContext, w: &Portrait, cap: usize) -> Result<Self, (usize, usize)> {
        let p = ctx.p();
        let mut lift = CentralizerLift {
            w: w.clone(),
            w_inv: w.inverse(),
            stages: Vec::new(),
            centralizer: Vec::new(),
            largest_orbit: 1,
        };
        let mut cgens: Vec<Portrait> = Vec::new();
        for m in 0..ctx.depth() {
            let width = (p as usize).pow(m as u32);
            let w_img = w.level_image_ranks(m);
            let mut n_ech = Echelon::new(p, width);
            let mut n_vecs = Vec::new();
            let mut n_lifts = Vec::new();
            for g in ctx.level_stabilizer_generators(m) {
                let v = g.level_labels(m).to_vec();
                if n_ech.insert(&v).is_ok() {
                    n_vecs.push(v);
                    n_lifts.push(g.clone());
                }
            }
            let mut u = Echelon::new(p, width);
            let mut u_to_n = Vec::new();
            let mut candidates = Vec::new();
            for (i, n) in n_vecs.iter().enumerate() {
                let d = sub(p, n, &permute(n, &w_img));
                match u.insert(&d) {
                    Ok(_) => u_to_n.push(i),
                    Err(coeffs) => {
                        let mut c = n_lifts[i].clone();
                        for (t, &x) in coeffs.iter().enumerate() {
                            if x != 0 {
                                c = c.mul(&n_lifts[u_to_n[t]].pow(-i64::from(x)));
                            }
                        }
                        candidates.push(c);
                    }
                }
            }
            let mut stage = Stage {
                level: m,
                u,
                u_to_n,
                n_vecs,
                n_lifts,
                orbit: HashMap::new(),
                transversal: Vec::new(),
            };
            let origin = stage.point(&vec![0u8; width]);
            stage.orbit.insert(origin.clone(), 0);
            stage.transversal.push(ctx.identity());
            let mut points = vec![origin];
            let shifts: Vec<(Vec<u8>, Vec<u32>)> = cgens
                .iter()
                .map(|s| {
                    let ws = w.conjugate_by(s);
                    (lift.coords(&ws, m), s.level_image_ranks(m))
                })
                .collect();
            // images[q][s] = orbit index of point q under generator s
            let mut images: Vec<Vec<usize>> = Vec::new();
            let mut cursor = 0;
            while cursor < points.len() {
                let mut row = Vec::with_capacity(cgens.len());
                for (si, (c, img)) in shifts.iter().enumerate() {
                    let q = stage.point(&add(p, c, &permute(&points[cursor], img)));
                    let idx = match stage.orbit.get(&q) {
                        Some(&idx) => idx,
                        None => {
                            let idx = points.len();
                            stage.orbit.insert(q.clone(), idx);
                            points.push(q);
                            let t = stage.transversal[cursor].mul(&cgens[si]);
                            stage.transversal.push(t);
                            if points.len() > cap {
                                return Err((m, points.len()));
                            }
                            idx
                        }
                    };
                    row.push(idx);
                }
                images.push(row);
                cursor += 1;
            }
            lift.largest_orbit = lift.largest_orbit.max(points.len());
            // The corrected stabilizer has a known order modulo St(m + 1), so
            // Schreier generators are only drawn until it is reached.
            let trunc = |x: &Portrait| x.truncate(m + 1).expect("depth");
            let mut hbar = portrait_chain(p, m + 1, &[]);
            for g in cgens.iter().chain(ctx.level_stabilizer_generators(m)) {
                hbar.extend(trunc(g));
            }
            let target_order = hbar.order()
                / (BigUint::from(points.len()) * BigUint::from(p).pow(stage.u.rank() as u32));
            let mut seen = portrait_chain(p, m + 1, &[]);
            let mut kept = Vec::new();
            for c in candidates {
                if seen.extend(trunc(&c)) {
                    kept.push(c);
                }
            }
            let mut seen_order = seen.order();
            let w_t = trunc(w);
            let w_t_inv = w_t.inverse();
            let cgens_t: Vec<Portrait> = cgens.iter().map(trunc).collect();
            let trans_t: Vec<Portrait> = stage.transversal.iter().map(trunc).collect();
            let trans_t_inv: Vec<Portrait> = trans_t.iter().map(Portrait::inverse).collect();
            'schreier: for (qi, row) in images.iter().enumerate() {
                for (si, &target) in row.iter().enumerate() {
                    if seen_order >= target_order {
                        break 'schreier;
                    }
                    let sigma_t = trans_t[qi].mul(&cgens_t[si]).mul(&trans_t_inv[target]);
                    if sigma_t.is_identity() {
                        continue;
                    }
                    let delta = w_t_inv
                        .mul(&w_t.conjugate_by(&sigma_t))
                        .level_labels(m)
                        .to_vec();
                    let n = stage
                        .solve_vector(&delta)
                        .expect("stabilizer elements move w inside U");
                    let neg: Vec<u8> = n.iter().map(|&x| ((p - u32::from(x)) % p) as u8).collect();
                    let mut shift = Portrait::identity(p, m + 1);
                    shift.labels_mut()[level_offset(p, m)..].copy_from_slice(&neg);
                    if seen.extend(sigma_t.mul(&shift)) {
                        seen_order = seen.order();
                        let sigma = stage.transversal[qi]
                            .mul(&cgens[si])
                            .mul(&stage.transversal[target].inverse());
                        let lift_n = stage.solve(&delta).expect("solvable");
                        kept.push(sigma.mul(&lift_n.inverse()));
                    }
                }
            }
            debug_assert_eq!(seen_order, target_order);
            cgens = kept;
            lift.stages.push(stage);
        }
        lift.centralizer = cgens;
        Ok(lift)
    }

    /// Level-`m` labels of `w^{-1} x`, for `x` congruent to `w` modulo
    /// `St(m)`.
    fn coords(&self, x: &Portrait, m: usize) -> Vec<u8> {
        let n = self.w_inv.mul(x);
        debug_assert!(n.stabilizer_depth() >= m);
        n.level_labels(m).to_vec()
    }

    pub fn element(&self) -> &Portrait {
        &self.w
    }

    /// Generators of the centralizer of `w` in `G_k`.
    pub fn centralizer_generators(&self) -> &[Portrait] {
        &self.centralizer
    }

    pub fn largest_orbit(&self) -> usize {
        self.largest_orbit
    }

    /// Decides whether `z` is conjugate to `w`, with a conjugator `g`
    /// satisfying `z^g = w` when it is.
    pub fn conjugator_to(&self, z: &Portrait) -> LiftOutcome {
        if z.p() != self.w.p() || z.depth() != self.w.depth() {
            return LiftOutcome::NotConjugate;
        }
        let mut g = Portrait::identity(z.p(), z.depth());
        for stage in &self.stages {
            let m = stage.level;
            let zg = z.conjugate_by(&g);
            if self.w_inv.mul(&zg).stabilizer_depth() < m {
                return LiftOutcome::NotConjugate;
            }
            let Some(&idx) = stage.orbit.get(&stage.point(&self.coords(&zg, m))) else {
                return LiftOutcome::NotConjugate;
            };
            let t_inv = stage.transversal[idx].inverse();
            let y = zg.conjugate_by(&t_inv);
            let Some(n) = stage.solve(&self.coords(&y, m)) else {
                return LiftOutcome::NotConjugate;
            };
            g = g.mul(&t_inv).mul(&n.inverse());
        }
        if z.conjugate_by(&g) == self.w {
            LiftOutcome::Conjugate(g)
        } else {
            LiftOutcome::NotConjugate
        }
    }
}
