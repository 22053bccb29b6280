//! Order, depth and socle facts about specific elements, checked on
//! concrete data.

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use super::certify::{certify_pair, CertifyOptions, PairVerdict};
use crate::generators::{GeneratorPortraits, Symbol, Word, WordError};
use crate::groupdata::{vector_sum, DefiningDatum, GroupKind};
use crate::permgroup::{element_order, Tower};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LemmaError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("word {0} must be a nontrivial product of directed generators of one family")]
    NotDirected(String),
    #[error("word {word} has combined vector of sum {sum}, not 0")]
    NonZeroSum { word: String, sum: u32 },
    #[error("exponent j = {j} must lie in 1..p-1")]
    BadExponent { j: u32 },
    #[error(
        "needs a periodic single-symmetric-vector datum with p >= 5 and at least two families"
    )]
    NotPeriodicSymmetric,
    #[error("index i = {i} must lie in 1..n-1 for n = {n} families")]
    BadIndex { i: usize, n: usize },
    #[error("depth k = {k} must be at least 3")]
    DepthTooSmall { k: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: Value,
    pub observed: Value,
    pub pass: bool,
}

impl Check {
    fn equal(name: impl Into<String>, expected: impl Serialize, observed: impl Serialize) -> Self {
        let (expected, observed) = (json!(expected), json!(observed));
        Check {
            name: name.into(),
            pass: expected == observed,
            expected,
            observed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub subject: String,
    pub depth: usize,
    pub checks: Vec<Check>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl LemmaReport {
    fn new(lemma: &str, subject: String, depth: usize, checks: Vec<Check>) -> Self {
        LemmaReport {
            lemma: lemma.into(),
            subject,
            depth,
            pass: checks.iter().all(|c| c.pass),
            checks,
            note: None,
        }
    }
}

/// The family of a word made only of directed generators from one family,
/// and the sum of its combined defining vector.
fn directed_family(datum: &DefiningDatum, d: &Word) -> Result<(u32, u32), LemmaError> {
    d.check(datum)?;
    let p = datum.p();
    let mut family = None;
    let mut combined = vec![0u32; p as usize - 1];
    for &(s, e) in d.letters() {
        let Symbol::B { family: j, index } = s else {
            return Err(LemmaError::NotDirected(d.to_string()));
        };
        if family.is_some_and(|f| f != j) {
            return Err(LemmaError::NotDirected(d.to_string()));
        }
        family = Some(j);
        let e = e.rem_euclid(i64::from(p)) as u32;
        for (c, &v) in combined
            .iter_mut()
            .zip(datum.vector(j, index).expect("checked"))
        {
            *c = (*c + e * u32::from(v)) % p;
        }
    }
    let family = family.ok_or_else(|| LemmaError::NotDirected(d.to_string()))?;
    if combined.iter().all(|&c| c == 0) {
        return Err(LemmaError::NotDirected(d.to_string()));
    }
    let bytes: Vec<u8> = combined.iter().map(|&c| c as u8).collect();
    Ok((family, vector_sum(p, &bytes)))
}

fn zero_sum_family(datum: &DefiningDatum, d: &Word) -> Result<u32, LemmaError> {
    let (family, sum) = directed_family(datum, d)?;
    if sum != 0 {
        return Err(LemmaError::NonZeroSum {
            word: d.to_string(),
            sum,
        });
    }
    Ok(family)
}

/// For `d` of zero vector sum: `a^j d` has order `p^2` in `G_3`, and its
/// `p`-th power fixes level 1 but not level 2.
pub fn check_power_order(
    datum: &DefiningDatum,
    d: &Word,
    j: u32,
) -> Result<LemmaReport, LemmaError> {
    let p = datum.p();
    if j == 0 || j >= p {
        return Err(LemmaError::BadExponent { j });
    }
    zero_sum_family(datum, d)?;
    let gens = GeneratorPortraits::new(datum, 3);
    let x = Word::a(i64::from(j)).concat(d);
    let g = gens.eval(&x)?;
    let checks = vec![
        Check::equal("order", p * p, element_order(&g)),
        Check::equal(
            "stabilizer_depth(x^p)",
            2,
            g.pow(i64::from(p)).stabilizer_depth(),
        ),
    ];
    Ok(LemmaReport::new("order-of-a^j-d", x.to_string(), 3, checks))
}

fn periodic_symmetric_families(datum: &DefiningDatum) -> Result<Vec<u32>, LemmaError> {
    let symmetric = matches!(datum.kind(), GroupKind::SingleSymmetricVector);
    if !symmetric || !datum.is_periodic() || datum.p() < 5 || datum.n_families() < 2 {
        return Err(LemmaError::NotPeriodicSymmetric);
    }
    Ok(datum.families().keys().copied().collect())
}

/// For consecutive families `j_i < j_{i+1}` of a periodic symmetric datum,
/// each of `b b'`, `b^{-1} b'`, `b^{-1} b'^{-1}` has order `p^2` in `G_4`
/// with `p`-th power in `St(3) \ St(4)`.
pub fn check_family_products(
    datum: &DefiningDatum,
    i: usize,
) -> Result<Vec<LemmaReport>, LemmaError> {
    let families = periodic_symmetric_families(datum)?;
    let n = families.len();
    if i == 0 || i >= n {
        return Err(LemmaError::BadIndex { i, n });
    }
    let p = datum.p();
    let gens = GeneratorPortraits::new(datum, 4);
    let (u, v) = (families[i - 1], families[i]);
    let forms = [(1, 1), (-1, 1), (-1, -1)];
    forms
        .iter()
        .map(|&(eu, ev)| {
            let x = Word::b(u, 1, eu).concat(&Word::b(v, 1, ev));
            let g = gens.eval(&x)?;
            let checks = vec![
                Check::equal("order", p * p, element_order(&g)),
                Check::equal(
                    "stabilizer_depth(x^p)",
                    3,
                    g.pow(i64::from(p)).stabilizer_depth(),
                ),
            ];
            Ok(LemmaReport::new("order-of-b-b'", x.to_string(), 4, checks))
        })
        .collect()
}

/// For zero-sum directed words `d_1 != d_2`, certifies in `G_k` that
/// `<(a d_1)^p>` and `<(a d_2)^p>` are not conjugate. Equal words carry no
/// claim.
pub fn check_socle_separation(
    datum: &DefiningDatum,
    k: usize,
    pairs: &[(Word, Word)],
) -> Result<Vec<LemmaReport>, LemmaError> {
    if k < 3 {
        return Err(LemmaError::DepthTooSmall { k });
    }
    for (d1, d2) in pairs {
        zero_sum_family(datum, d1)?;
        zero_sum_family(datum, d2)?;
    }
    let tower = Tower::new(datum, k);
    let gens = GeneratorPortraits::new(datum, k);
    let mut out = Vec::new();
    for (d1, d2) in pairs {
        let (x, y) = (Word::a(1).concat(d1), Word::a(1).concat(d2));
        let subject = format!("({x})^p vs ({y})^p");
        let (gx, gy) = (gens.eval(&x)?, gens.eval(&y)?);
        if gx == gy {
            let mut report = LemmaReport::new("socle-separation", subject, k, Vec::new());
            report.note = Some("equal words: conjugate by g = 1, no claim".into());
            out.push(report);
            continue;
        }
        let outcome = certify_pair(&tower, &gx, &gy, &CertifyOptions::default());
        let certificate = outcome.certificate.map(|c| json!(c)).unwrap_or(Value::Null);
        let mut report = LemmaReport::new(
            "socle-separation",
            subject,
            k,
            vec![Check::equal(
                "verdict",
                PairVerdict::Disjoint,
                outcome.verdict,
            )],
        );
        report.note = Some(format!("certificate {certificate}"));
        out.push(report);
    }
    Ok(out)
}

/// Every check above that applies to `datum`.
pub fn lemma_suite(datum: &DefiningDatum) -> Vec<LemmaReport> {
    let p = datum.p();
    let mut out = Vec::new();
    let zero_sum: Vec<Word> = datum
        .symbols()
        .into_iter()
        .map(|(j, i)| Word::b(j, i, 1))
        .filter(|d| zero_sum_family(datum, d).is_ok())
        .collect();
    for d in &zero_sum {
        for j in 1..p {
            out.extend(check_power_order(datum, d, j).ok());
        }
    }
    if let Ok(families) = periodic_symmetric_families(datum) {
        for i in 1..families.len() {
            out.extend(check_family_products(datum, i).into_iter().flatten());
        }
        let pair = (Word::b(families[0], 1, 1), Word::b(families[1], 1, 2));
        out.extend(
            check_socle_separation(datum, 3, &[pair])
                .into_iter()
                .flatten(),
        );
    } else if let Some(d) = zero_sum.first() {
        let pair = (d.clone(), d.pow(2));
        out.extend(
            check_socle_separation(datum, 3, &[pair])
                .into_iter()
                .flatten(),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn symmetric() -> DefiningDatum {
        DefiningDatum::single_vector(5, vec![1, 4, 4, 1], &[1, 2])
    }

    #[test]
    fn gupta_sidki_ab_has_order_nine() {
        let gs = DefiningDatum::multi_ggs(3, vec![vec![1, 2]]);
        let r = check_power_order(&gs, &Word::b(1, 1, 1), 1).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.checks[0].observed, json!(9));
    }

    #[test]
    fn symmetric_a2_b_has_order_25() {
        let r = check_power_order(&symmetric(), &Word::b(1, 1, 1), 2).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.checks[0].observed, json!(25));
    }

    #[test]
    fn nonzero_sum_is_refused() {
        let d = DefiningDatum::multi_ggs(5, vec![vec![1, 0, 0, 0]]);
        assert!(matches!(
            check_power_order(&d, &Word::b(1, 1, 1), 1),
            Err(LemmaError::NonZeroSum { .. })
        ));
        assert!(matches!(
            check_power_order(&symmetric(), &Word::b(1, 1, 1), 5),
            Err(LemmaError::BadExponent { .. })
        ));
    }

    #[test]
    fn three_forms_in_g4() {
        let reports = check_family_products(&symmetric(), 1).unwrap();
        assert_eq!(reports.len(), 3);
        for r in &reports {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn family_product_guards() {
        let constant = DefiningDatum::single_vector(3, vec![1, 1], &[1, 2]);
        assert_eq!(
            check_family_products(&constant, 1),
            Err(LemmaError::NotPeriodicSymmetric)
        );
        assert!(matches!(
            check_family_products(&symmetric(), 2),
            Err(LemmaError::BadIndex { .. })
        ));
    }

    #[test]
    fn separated_socles() {
        let multi = DefiningDatum::multi_ggs(5, vec![vec![1, 4, 0, 0], vec![0, 1, 4, 0]]);
        let r = check_socle_separation(&multi, 3, &[(Word::b(1, 1, 1), Word::b(1, 1, 2))]).unwrap();
        assert!(r[0].pass, "{r:?}");
        let r = check_socle_separation(&symmetric(), 3, &[(Word::b(1, 1, 1), Word::b(2, 1, 2))])
            .unwrap();
        assert!(r[0].pass, "{r:?}");
    }

    #[test]
    fn equal_words_make_no_claim() {
        let d = Word::b(1, 1, 1);
        let r = check_socle_separation(&symmetric(), 3, &[(d.clone(), d)]).unwrap();
        assert!(r[0].checks.is_empty());
        assert!(r[0].note.as_deref().unwrap().contains("no claim"));
    }
}
