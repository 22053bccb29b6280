//! Explicit generator tuples for the level quotients, validation of the
//! resulting spherical systems, and certified checks that the unions of
//! conjugates of their cyclic subgroups meet trivially.

mod certify;
mod lemmas;
mod tuples;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

pub use certify::{
    certify_pair, replay, section_profile, socle, CertificateKind, CertifyOptions, PairOutcome,
    PairVerdict, DEFAULT_CAP,
};
pub use lemmas::{
    check_family_products, check_power_order, check_socle_separation, lemma_suite, Check,
    LemmaError, LemmaReport,
};
pub use tuples::{
    build_tuples, CaseChoice, SphericalSystem, TupleCase, TupleError, TupleOptions, TuplePair,
};

use crate::generators::{GeneratorPortraits, Word};
use crate::groupdata::{Classification, DefiningDatum};
use crate::permgroup::Tower;
use crate::tree::Portrait;

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub tuples: TupleOptions,
    pub certify: CertifyOptions,
    /// Worker threads for the pair certifications; 0 and 1 both mean
    /// sequential.
    pub threads: usize,
    /// Record wall time in the report (breaks byte-identical output).
    pub timing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairRecord {
    pub x: String,
    pub y: String,
    pub verdict: PairVerdict,
    pub certificate: Option<CertificateKind>,
    pub details: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Verified,
    Refuted {
        x: String,
        y: String,
        u: u64,
        conjugator: Vec<u8>,
    },
    Undecided {
        pairs: Vec<(String, String)>,
    },
}

impl Verdict {
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Verified => 0,
            Verdict::Refuted { .. } => 1,
            Verdict::Undecided { .. } => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Verified => "VERIFIED",
            Verdict::Refuted { .. } => "REFUTED",
            Verdict::Undecided { .. } => "UNDECIDED",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub pairs: usize,
    pub disjoint: usize,
    pub intersect: usize,
    pub undecided: usize,
    pub by_certificate: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DisjointnessReport {
    pub datum: Value,
    pub k: usize,
    pub order_exponent: u32,
    pub classification: Classification,
    pub case: TupleCase,
    pub basis: Vec<String>,
    pub t1: Vec<String>,
    pub t2: Vec<String>,
    pub cap: usize,
    pub pairs: Vec<PairRecord>,
    pub totals: Totals,
    pub largest_orbit: usize,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
}

impl DisjointnessReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "datum {}\nk = {}, |G_k| = {}^{}\ncase {}\nT1: {}\nT2: {}\n",
            self.datum,
            self.k,
            self.classification_p(),
            self.order_exponent,
            serde_json::to_value(self.case)
                .expect("enum")
                .as_str()
                .unwrap_or(""),
            self.t1.join(", "),
            self.t2.join(", "),
        );
        for rec in &self.pairs {
            let cert = rec
                .certificate
                .map(|c| {
                    serde_json::to_value(c)
                        .expect("enum")
                        .as_str()
                        .unwrap_or("")
                        .to_string()
                })
                .unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "  ({}) vs ({}): {:?} [{}]\n",
                rec.x, rec.y, rec.verdict, cert
            ));
        }
        out.push_str(&format!(
            "{} pairs: {} disjoint, {} intersect, {} undecided\n{}\n",
            self.totals.pairs,
            self.totals.disjoint,
            self.totals.intersect,
            self.totals.undecided,
            self.verdict.name()
        ));
        out
    }

    fn classification_p(&self) -> u64 {
        self.datum["p"].as_u64().unwrap_or(0)
    }
}

fn word_list(system: &SphericalSystem) -> Vec<String> {
    system.t_set().iter().map(|(w, _)| w.to_string()).collect()
}

/// Builds both tuples, validates them in `G_k` and certifies every pair of
/// the two T-sets.
pub fn verify_ramification(
    datum: &DefiningDatum,
    k: usize,
    options: &VerifyOptions,
) -> Result<DisjointnessReport, TupleError> {
    let start = Instant::now();
    let classification = datum.classify().map_err(TupleError::Datum)?;
    let tuples = build_tuples(datum, k, &options.tuples)?;
    let tower = Tower::new(datum, k);
    tuples.t1.validate(tower.top(), 1)?;
    tuples.t2.validate(tower.top(), 2)?;
    for m in 0..=k {
        let ctx = tower.at(m);
        ctx.abelian_coords(&ctx.identity());
    }

    let t1 = tuples.t1.t_set();
    let t2 = tuples.t2.t_set();
    let jobs: Vec<(usize, usize)> = (0..t1.len())
        .flat_map(|i| (0..t2.len()).map(move |j| (i, j)))
        .collect();
    let outcomes = run_jobs(&jobs, options.threads, |&(i, j)| {
        certify_pair(&tower, &t1[i].1, &t2[j].1, &options.certify)
    });

    let pairs: Vec<PairRecord> = jobs
        .iter()
        .zip(outcomes)
        .map(|(&(i, j), out)| PairRecord {
            x: t1[i].0.to_string(),
            y: t2[j].0.to_string(),
            verdict: out.verdict,
            certificate: out.certificate,
            details: out.details,
        })
        .collect();
    let totals = totals(&pairs);
    let verdict = aggregate(&pairs);
    let largest_orbit = pairs
        .iter()
        .filter_map(|r| {
            ["orbit", "largest_orbit"]
                .iter()
                .filter_map(|key| r.details.get(*key).and_then(Value::as_u64))
                .max()
        })
        .max()
        .unwrap_or(0) as usize;
    Ok(DisjointnessReport {
        datum: datum.to_json(),
        k,
        order_exponent: tower.top().order_exponent(),
        classification,
        case: tuples.case,
        basis: tuples.basis.iter().map(Word::to_string).collect(),
        t1: word_list(&tuples.t1),
        t2: word_list(&tuples.t2),
        cap: options.certify.cap,
        pairs,
        totals,
        largest_orbit,
        verdict,
        wall_time_ms: options.timing.then(|| start.elapsed().as_millis()),
    })
}

/// Applies `f` to every job, in parallel when `threads > 1`, keeping the
/// job order in the result.
fn run_jobs<J: Sync, T: Send>(jobs: &[J], threads: usize, f: impl Fn(&J) -> T + Sync) -> Vec<T> {
    if threads <= 1 {
        return jobs.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<T>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..threads.min(jobs.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let out = f(&jobs[i]);
                results.lock().expect("no panics while held")[i] = Some(out);
            });
        }
    });
    results
        .into_inner()
        .expect("workers joined")
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect()
}

fn totals(pairs: &[PairRecord]) -> Totals {
    let mut t = Totals {
        pairs: pairs.len(),
        ..Totals::default()
    };
    for rec in pairs {
        match rec.verdict {
            PairVerdict::Disjoint => t.disjoint += 1,
            PairVerdict::Intersect => t.intersect += 1,
            PairVerdict::Undecided => t.undecided += 1,
        }
        let name = rec
            .certificate
            .map(|c| {
                serde_json::to_value(c)
                    .expect("enum")
                    .as_str()
                    .unwrap_or("")
                    .to_string()
            })
            .unwrap_or_else(|| "NONE".into());
        *t.by_certificate.entry(name).or_default() += 1;
    }
    t
}

fn aggregate(pairs: &[PairRecord]) -> Verdict {
    if let Some(rec) = pairs.iter().find(|r| r.verdict == PairVerdict::Intersect) {
        return Verdict::Refuted {
            x: rec.x.clone(),
            y: rec.y.clone(),
            u: rec.details["u"].as_u64().unwrap_or(0),
            conjugator: rec.details["conjugator"]
                .as_array()
                .map(|a| {
                    a.iter()
                        .filter_map(|v| v.as_u64().map(|x| x as u8))
                        .collect()
                })
                .unwrap_or_default(),
        };
    }
    let undecided: Vec<(String, String)> = pairs
        .iter()
        .filter(|r| r.verdict == PairVerdict::Undecided)
        .map(|r| (r.x.clone(), r.y.clone()))
        .collect();
    if undecided.is_empty() {
        Verdict::Verified
    } else {
        Verdict::Undecided { pairs: undecided }
    }
}

/// Re-checks every stored pair outcome from the words in the report and
/// confirms that they aggregate to the stored verdict.
pub fn replay_report(datum: &DefiningDatum, report: &DisjointnessReport) -> bool {
    let tower = Tower::new(datum, report.k);
    let gens = GeneratorPortraits::new(datum, report.k);
    let eval = |s: &str| -> Option<Portrait> { gens.eval(&s.parse::<Word>().ok()?).ok() };
    let pairs_ok = report.pairs.iter().all(|rec| {
        let (Some(x), Some(y)) = (eval(&rec.x), eval(&rec.y)) else {
            return false;
        };
        let outcome = PairOutcome {
            verdict: rec.verdict,
            certificate: rec.certificate,
            details: rec.details.clone(),
        };
        replay(&tower, &x, &y, &outcome, report.cap)
    });
    pairs_ok && aggregate(&report.pairs) == report.verdict && totals(&report.pairs) == report.totals
}
