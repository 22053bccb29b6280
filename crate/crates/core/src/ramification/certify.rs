//! Deciding whether some conjugate of `<y>` meets `<x>` nontrivially.

use serde::Serialize;
use serde_json::{json, Value};

use crate::permgroup::{
    element_order, portrait_chain, BfsSearch, CentralizerLift, GroupContext, LiftOutcome, Tower,
};
use crate::tree::{level_width, Portrait};

pub const DEFAULT_CAP: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum CertificateKind {
    Depth,
    Fixpoints,
    Abelianization,
    SectionProfile,
    OrbitExact,
    LevelLifting,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PairVerdict {
    Disjoint,
    Intersect,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairOutcome {
    pub verdict: PairVerdict,
    pub certificate: Option<CertificateKind>,
    pub details: Value,
}

impl PairOutcome {
    fn disjoint(certificate: CertificateKind, details: Value) -> Self {
        PairOutcome {
            verdict: PairVerdict::Disjoint,
            certificate: Some(certificate),
            details,
        }
    }

    fn intersect(certificate: CertificateKind, u: u32, g: &Portrait) -> Self {
        PairOutcome {
            verdict: PairVerdict::Intersect,
            certificate: Some(certificate),
            details: json!({ "u": u, "conjugator": g.labels() }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CertifyOptions {
    pub cap: usize,
    /// Use the invariant rungs (depth, fixpoints, abelianization, section
    /// profile) before any orbit search.
    pub invariants: bool,
    /// Fall back to level-by-level lifting when breadth-first search caps out.
    pub lifting: bool,
    /// Try the exact search in smaller quotients `G_m` first.
    pub quotients: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            cap: DEFAULT_CAP,
            invariants: true,
            lifting: true,
            quotients: true,
        }
    }
}

/// `x^{o(x)/p}`, the generator of the unique subgroup of order `p` in `<x>`.
pub fn socle(x: &Portrait) -> Option<Portrait> {
    if x.is_identity() {
        return None;
    }
    let o = element_order(x);
    Some(x.pow((o / u64::from(x.p())) as i64))
}

fn powers(z: &Portrait) -> Vec<Portrait> {
    (1..z.p()).map(|u| z.pow(i64::from(u))).collect()
}

fn inv_mod_p(u: u32, p: u32) -> u32 {
    (1..p).find(|v| u * v % p == 1).expect("unit")
}

/// Abelianization images of the sections of `z` at `level`, in the
/// quotient of depth `k - level`. Level one keeps positions up to
/// rotation; deeper levels keep only the multiset.
pub fn section_profile(tower: &Tower, z: &Portrait, level: usize) -> Option<Vec<Vec<u8>>> {
    let ctx = tower.at(z.depth() - level);
    let mut images = (0..level_width(z.p(), level))
        .map(|r| ctx.abelian_coords(&z.section_at(level, r)))
        .collect::<Option<Vec<_>>>()?;
    if level == 1 {
        let best = (0..images.len())
            .map(|s| {
                let mut rotated = images.clone();
                rotated.rotate_left(s);
                rotated
            })
            .min()
            .expect("p >= 1");
        images = best;
    } else {
        images.sort();
    }
    Some(images)
}

/// Levels at which section profiles are conjugacy invariants of `z`.
fn profile_levels(z: &Portrait) -> std::ops::RangeInclusive<usize> {
    1..=z.stabilizer_depth().min(z.depth().saturating_sub(1))
}

fn invariant_rungs(tower: &Tower, zx: &Portrait, zy: &Portrait) -> Option<PairOutcome> {
    let ctx = tower.top();
    let (dx, dy) = (zx.stabilizer_depth(), zy.stabilizer_depth());
    if dx != dy {
        return Some(PairOutcome::disjoint(
            CertificateKind::Depth,
            json!({ "x_depth": dx, "y_depth": dy }),
        ));
    }
    let (fx, fy) = (zx.fixed_counts(), zy.fixed_counts());
    if fx != fy {
        return Some(PairOutcome::disjoint(
            CertificateKind::Fixpoints,
            json!({ "x_fixed": fx, "y_fixed": fy }),
        ));
    }
    let targets = powers(zx);
    let cy = ctx.abelian_coords(zy)?;
    let cx: Vec<Vec<u8>> = targets
        .iter()
        .map(|t| ctx.abelian_coords(t))
        .collect::<Option<_>>()?;
    if cx.iter().all(|c| *c != cy) {
        return Some(PairOutcome::disjoint(
            CertificateKind::Abelianization,
            json!({ "x_image": cx[0], "y_image": cy }),
        ));
    }
    // for each power u of the x-socle, the first level whose profile differs
    let mut separating = Vec::new();
    for t in &targets {
        let level = profile_levels(zy).find(|&m| {
            let (a, b) = (section_profile(tower, t, m), section_profile(tower, zy, m));
            a.is_some() && b.is_some() && a != b
        })?;
        separating.push(level);
    }
    Some(PairOutcome::disjoint(
        CertificateKind::SectionProfile,
        json!({ "levels": separating }),
    ))
}

/// Decides whether `z_y^g` generates the same subgroup as `z_x` for some
/// `g`, where `z_x`, `z_y` are the socles of `x` and `y`.
pub fn certify_pair(
    tower: &Tower,
    x: &Portrait,
    y: &Portrait,
    options: &CertifyOptions,
) -> PairOutcome {
    let (Some(zx), Some(zy)) = (socle(x), socle(y)) else {
        return PairOutcome {
            verdict: PairVerdict::Disjoint,
            certificate: None,
            details: json!({ "reason": "trivial element" }),
        };
    };
    if options.invariants {
        if let Some(out) = invariant_rungs(tower, &zx, &zy) {
            return out;
        }
    }
    let top = tower.depth();
    // a conjugacy in G_k survives in every quotient, so non-conjugate images
    // in a smaller quotient already separate
    let first = if options.quotients {
        (zx.stabilizer_depth().max(zy.stabilizer_depth()) + 1).min(top)
    } else {
        top
    };
    let mut skipped = Vec::new();
    for m in first..=top {
        let (ix, iy) = (truncated(&zx, m), truncated(&zy, m));
        if ix.is_identity() && iy.is_identity() {
            continue;
        }
        let out = exact_at(tower.at(m), &ix, &iy, options);
        if m == top || out.verdict == PairVerdict::Disjoint {
            let mut out = out;
            if let Value::Object(map) = &mut out.details {
                if !skipped.is_empty() {
                    map.insert("lower_levels".into(), json!(skipped));
                }
            }
            return out;
        }
        skipped.push(json!({ "depth": m, "verdict": out.verdict }));
    }
    unreachable!("the top level always returns")
}

fn truncated(z: &Portrait, m: usize) -> Portrait {
    z.truncate(m).expect("m is at most the depth")
}

/// Exact decision in `ctx` by breadth-first search and, when the class is
/// too large, by lifting centralizers level by level.
fn exact_at(
    ctx: &GroupContext,
    zx: &Portrait,
    zy: &Portrait,
    options: &CertifyOptions,
) -> PairOutcome {
    let p = ctx.p();
    let mut details = serde_json::Map::new();
    details.insert("depth".into(), json!(ctx.depth()));
    let finish = |mut out: PairOutcome, details: &serde_json::Map<String, Value>| {
        if let Value::Object(map) = &mut out.details {
            for (key, value) in details {
                map.entry(key.clone()).or_insert_with(|| value.clone());
            }
        }
        out
    };
    if zx.is_identity() || zy.is_identity() {
        // exactly one image is trivial
        return finish(
            PairOutcome::disjoint(CertificateKind::Depth, json!({ "trivial_image": true })),
            &details,
        );
    }
    let x_powers = powers(zx);
    let lift = if options.lifting {
        match CentralizerLift::build(ctx, zx, options.cap) {
            Ok(lift) => Some(lift),
            Err((level, size)) => {
                details.insert(
                    "lifting_capped".into(),
                    json!({ "level": level, "orbit": size }),
                );
                None
            }
        }
    } else {
        None
    };
    let class_size = lift
        .as_ref()
        .map(|l| ctx.order() / portrait_chain(p, ctx.depth(), l.centralizer_generators()).order());
    let bfs_feasible = class_size
        .as_ref()
        .is_none_or(|c| *c <= num_bigint::BigUint::from(options.cap));
    if bfs_feasible {
        match ctx.search_conjugates(zy, &x_powers, options.cap) {
            BfsSearch::Found { index, conjugator } => {
                let out = PairOutcome::intersect(
                    CertificateKind::OrbitExact,
                    index as u32 + 1,
                    &conjugator,
                );
                return finish(out, &details);
            }
            BfsSearch::Absent { orbit_size } => {
                details.insert("orbit".into(), json!(orbit_size));
                return PairOutcome::disjoint(CertificateKind::OrbitExact, Value::Object(details));
            }
            BfsSearch::CapExceeded { explored } => {
                details.insert("y_orbit_capped".into(), json!(explored));
            }
        }
        match ctx.search_conjugates(zx, &powers(zy), options.cap) {
            BfsSearch::Found { index, conjugator } => {
                let u = inv_mod_p(index as u32 + 1, p);
                let out =
                    PairOutcome::intersect(CertificateKind::OrbitExact, u, &conjugator.inverse());
                return finish(out, &details);
            }
            BfsSearch::Absent { orbit_size } => {
                details.insert("orbit".into(), json!(orbit_size));
                return PairOutcome::disjoint(CertificateKind::OrbitExact, Value::Object(details));
            }
            BfsSearch::CapExceeded { explored } => {
                details.insert("x_orbit_capped".into(), json!(explored));
            }
        }
    }
    if let (Some(lift), Some(class)) = (lift, class_size) {
        for (v, zyv) in powers(zy).iter().enumerate() {
            if let LiftOutcome::Conjugate(g) = lift.conjugator_to(zyv) {
                let u = inv_mod_p(v as u32 + 1, p);
                return finish(
                    PairOutcome::intersect(CertificateKind::LevelLifting, u, &g),
                    &details,
                );
            }
        }
        details.insert("class_size".into(), json!(class.to_string()));
        details.insert("largest_orbit".into(), json!(lift.largest_orbit()));
        return PairOutcome::disjoint(CertificateKind::LevelLifting, Value::Object(details));
    }
    PairOutcome {
        verdict: PairVerdict::Undecided,
        certificate: None,
        details: Value::Object(details),
    }
}

/// Re-derives an outcome from the stored pair: the named invariant must
/// still separate, or the stored conjugator must still work.
pub fn replay(
    tower: &Tower,
    x: &Portrait,
    y: &Portrait,
    outcome: &PairOutcome,
    cap: usize,
) -> bool {
    let ctx: &GroupContext = tower.top();
    let (Some(zx), Some(zy)) = (socle(x), socle(y)) else {
        return outcome.verdict == PairVerdict::Disjoint;
    };
    match (outcome.verdict, outcome.certificate) {
        (PairVerdict::Intersect, Some(_)) => {
            let u = outcome.details["u"].as_u64().unwrap_or(0);
            let labels: Option<Vec<u8>> = outcome.details["conjugator"].as_array().map(|a| {
                a.iter()
                    .filter_map(|v| v.as_u64().map(|x| x as u8))
                    .collect()
            });
            let Some(g) = labels.and_then(|l| Portrait::from_labels(ctx.p(), ctx.depth(), l).ok())
            else {
                return false;
            };
            ctx.contains(&g) && zy.conjugate_by(&g) == zx.pow(u as i64)
        }
        (PairVerdict::Disjoint, Some(kind)) => match kind {
            CertificateKind::OrbitExact | CertificateKind::LevelLifting
                if outcome.details.get("depth").is_some() =>
            {
                let Some(m) = outcome.details["depth"].as_u64().map(|m| m as usize) else {
                    return false;
                };
                if m > tower.depth() {
                    return false;
                }
                let options = CertifyOptions {
                    cap,
                    invariants: false,
                    lifting: kind == CertificateKind::LevelLifting,
                    quotients: false,
                };
                let (ix, iy) = (truncated(&zx, m), truncated(&zy, m));
                let rerun = exact_at(tower.at(m), &ix, &iy, &options);
                rerun.verdict == PairVerdict::Disjoint && rerun.certificate == Some(kind)
            }
            CertificateKind::Depth if outcome.details.get("depth").is_some() => {
                let Some(m) = outcome.details["depth"].as_u64().map(|m| m as usize) else {
                    return false;
                };
                m <= tower.depth()
                    && truncated(&zx, m).is_identity() != truncated(&zy, m).is_identity()
            }
            _ => invariant_rungs(tower, &zx, &zy).map(|o| o.certificate) == Some(Some(kind)),
        },
        (PairVerdict::Undecided, _) => true,
        _ => false,
    }
}
