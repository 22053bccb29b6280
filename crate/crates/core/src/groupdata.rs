//! Defining data of multi-EGS groups: parsing, validation and the
//! classification that decides which ramification construction applies.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;

pub const DEFAULT_MAX_P: u32 = 13;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DatumError {
    #[error("p = {0} is not an odd prime")]
    NotOddPrime(u32),
    #[error("p = {p} exceeds the configured maximum {max}")]
    PrimeTooLarge { p: u32, max: u32 },
    #[error("all families are empty")]
    NoFamilies,
    #[error("family index {0} is outside 1..=p")]
    BadFamily(u32),
    #[error("family {family} has {count} vectors, more than p - 1")]
    FamilyTooLarge { family: u32, count: usize },
    #[error("family {family}, vector {index}: length {len}, expected p - 1 = {expected}")]
    BadLength {
        family: u32,
        index: usize,
        len: usize,
        expected: usize,
    },
    #[error("family {family}, vector {index} is the zero vector")]
    ZeroVector { family: u32, index: usize },
    #[error("dependent family {family}: its vectors are linearly dependent mod p")]
    DependentFamily { family: u32 },
    #[error("malformed datum: {0}")]
    Malformed(String),
    #[error("GGS datum (r = 1): GGS groups are out of scope")]
    OutOfScope,
}

/// A prime `p` together with the families `E^(1), ..., E^(p)` of defining
/// vectors. Only non-empty families are stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DefiningDatum {
    p: u32,
    families: BTreeMap<u32, Vec<Vec<u8>>>,
}

pub fn is_prime(n: u32) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

impl DefiningDatum {
    /// Builds a datum without checking it; see [`DefiningDatum::validate`].
    /// Entries are reduced mod `p` and empty families are dropped.
    pub fn new(p: u32, families: BTreeMap<u32, Vec<Vec<i64>>>) -> Self {
        let families = families
            .into_iter()
            .filter(|(_, vs)| !vs.is_empty())
            .map(|(j, vs)| {
                let vs = vs
                    .into_iter()
                    .map(|v| {
                        v.into_iter()
                            .map(|x| x.rem_euclid(i64::from(p.max(1))) as u8)
                            .collect()
                    })
                    .collect();
                (j, vs)
            })
            .collect();
        DefiningDatum { p, families }
    }

    /// A multi-GGS datum: all vectors in family 1.
    pub fn multi_ggs(p: u32, vectors: Vec<Vec<i64>>) -> Self {
        Self::new(p, BTreeMap::from([(1, vectors)]))
    }

    /// The same vector in each listed family.
    pub fn single_vector(p: u32, vector: Vec<i64>, families: &[u32]) -> Self {
        Self::new(
            p,
            families
                .iter()
                .map(|&j| (j, vec![vector.clone()]))
                .collect(),
        )
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn families(&self) -> &BTreeMap<u32, Vec<Vec<u8>>> {
        &self.families
    }

    pub fn family(&self, j: u32) -> &[Vec<u8>] {
        self.families.get(&j).map_or(&[], Vec::as_slice)
    }

    /// `r = r_1 + ... + r_p`.
    pub fn r(&self) -> usize {
        self.families.values().map(Vec::len).sum()
    }

    pub fn n_families(&self) -> usize {
        self.families.len()
    }

    pub fn vectors(&self) -> impl Iterator<Item = &Vec<u8>> {
        self.families.values().flatten()
    }

    /// Generator symbols `(j, i)` in lexicographic order.
    pub fn symbols(&self) -> Vec<(u32, usize)> {
        self.families
            .iter()
            .flat_map(|(&j, vs)| (1..=vs.len()).map(move |i| (j, i)))
            .collect()
    }

    pub fn vector(&self, j: u32, i: usize) -> Option<&[u8]> {
        self.families
            .get(&j)
            .and_then(|vs| vs.get(i.checked_sub(1)?))
            .map(Vec::as_slice)
    }

    /// Dimension of the span of all defining vectors.
    pub fn dim_v(&self) -> usize {
        let all: Vec<Vec<u8>> = self.vectors().cloned().collect();
        linalg::rank(self.p, &all)
    }

    pub fn validate(&self) -> Result<(), Vec<DatumError>> {
        self.validate_with_max(DEFAULT_MAX_P)
    }

    /// Checks every invariant and reports all violations found.
    pub fn validate_with_max(&self, max_p: u32) -> Result<(), Vec<DatumError>> {
        let p = self.p;
        let mut errors = Vec::new();
        if p == 2 || !is_prime(p) {
            errors.push(DatumError::NotOddPrime(p));
            return Err(errors);
        }
        if p > max_p {
            errors.push(DatumError::PrimeTooLarge { p, max: max_p });
        }
        if self.families.is_empty() {
            errors.push(DatumError::NoFamilies);
        }
        let expected = (p - 1) as usize;
        for (&family, vs) in &self.families {
            if family == 0 || family > p {
                errors.push(DatumError::BadFamily(family));
            }
            if vs.len() > expected {
                errors.push(DatumError::FamilyTooLarge {
                    family,
                    count: vs.len(),
                });
            }
            let mut lengths_ok = true;
            for (index, v) in vs.iter().enumerate() {
                if v.len() != expected {
                    lengths_ok = false;
                    errors.push(DatumError::BadLength {
                        family,
                        index: index + 1,
                        len: v.len(),
                        expected,
                    });
                } else if v.iter().all(|&x| x == 0) {
                    errors.push(DatumError::ZeroVector {
                        family,
                        index: index + 1,
                    });
                }
            }
            if lengths_ok && linalg::rank(p, vs) < vs.len() {
                errors.push(DatumError::DependentFamily { family });
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }

    pub fn parse(text: &str) -> Result<Self, DatumError> {
        let raw: RawDatum =
            serde_json::from_str(text).map_err(|e| DatumError::Malformed(e.to_string()))?;
        let p = u32::try_from(raw.p).map_err(|_| DatumError::NotOddPrime(0))?;
        if p < 3 {
            return Err(DatumError::NotOddPrime(p));
        }
        let families = match (raw.families, raw.vectors) {
            (Some(_), Some(_)) => {
                return Err(DatumError::Malformed(
                    "give either \"families\" or \"vectors\", not both".into(),
                ))
            }
            (None, None) => {
                return Err(DatumError::Malformed(
                    "missing \"families\" or \"vectors\"".into(),
                ))
            }
            (None, Some(vectors)) => BTreeMap::from([(1u32, vectors)]),
            (Some(fams), None) => {
                let mut out = BTreeMap::new();
                for (key, vs) in fams {
                    let j: u32 = key
                        .trim()
                        .parse()
                        .map_err(|_| DatumError::Malformed(format!("family key {key:?}")))?;
                    if j == 0 || j > p {
                        return Err(DatumError::BadFamily(j));
                    }
                    out.insert(j, vs);
                }
                out
            }
        };
        for (&family, vs) in &families {
            for (index, v) in vs.iter().enumerate() {
                if v.len() != (p - 1) as usize {
                    return Err(DatumError::BadLength {
                        family,
                        index: index + 1,
                        len: v.len(),
                        expected: (p - 1) as usize,
                    });
                }
            }
        }
        Ok(Self::new(p, families))
    }

    pub fn serialize(&self) -> String {
        let raw = RawDatum {
            p: u64::from(self.p),
            families: Some(
                self.families
                    .iter()
                    .map(|(j, vs)| {
                        (
                            j.to_string(),
                            vs.iter()
                                .map(|v| v.iter().map(|&x| i64::from(x)).collect())
                                .collect(),
                        )
                    })
                    .collect(),
            ),
            vectors: None,
        };
        serde_json::to_string(&raw).expect("datum serializes")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::from_str(&self.serialize()).expect("round trip")
    }

    /// Every defining vector has zero coordinate sum mod p.
    pub fn is_periodic(&self) -> bool {
        self.vectors().all(|v| vector_sum(self.p, v) == 0)
    }

    pub fn branch_class(&self) -> BranchClass {
        let p = self.p;
        if self.vectors().any(|v| !is_symmetric(v)) || self.dim_v() >= 2 {
            return BranchClass::RegularBranchOverDerived;
        }
        let v = self.vectors().next().expect("validated datum");
        if is_constant_direction(p, v) {
            BranchClass::WeaklyBranchOnly
        } else {
            BranchClass::RegularBranchOverGamma3
        }
    }

    /// The smallest level at which tuples can be built.
    pub fn threshold_k(&self) -> Result<usize, DatumError> {
        if self.r() == 1 {
            return Err(DatumError::OutOfScope);
        }
        Ok(match self.branch_class() {
            BranchClass::RegularBranchOverDerived => self.r() + 1,
            _ if self.is_periodic() => 4,
            _ => 3,
        })
    }

    pub fn kind(&self) -> GroupKind {
        if self.r() == 1 {
            return GroupKind::Ggs;
        }
        if self.dim_v() == 1 && self.vectors().all(|v| is_symmetric(v)) {
            let v = self.vectors().next().expect("non-empty");
            return if is_constant_direction(self.p, v) {
                GroupKind::ConstantVector
            } else {
                GroupKind::SingleSymmetricVector
            };
        }
        if self.families.len() == 1 && self.families.contains_key(&1) {
            GroupKind::MultiGgs
        } else {
            GroupKind::MultiEgs
        }
    }

    pub fn classify(&self) -> Result<Classification, Vec<DatumError>> {
        self.validate_with_max(u32::MAX)?;
        let branch = self.branch_class();
        let periodic = self.is_periodic();
        Ok(Classification {
            kind: self.kind(),
            periodic,
            branch,
            threshold_k: self.threshold_k().ok(),
            n_families: self.n_families(),
            r: self.r(),
            dim_v: self.dim_v(),
        })
    }
}

impl fmt::Display for DefiningDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.serialize())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDatum {
    p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    families: Option<BTreeMap<String, Vec<Vec<i64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vectors: Option<Vec<Vec<i64>>>,
}

pub fn vector_sum(p: u32, v: &[u8]) -> u32 {
    v.iter().map(|&x| u32::from(x)).sum::<u32>() % p
}

/// `e_k = e_{p-k}` for every coordinate.
pub fn is_symmetric(v: &[u8]) -> bool {
    v.iter().eq(v.iter().rev())
}

/// Constant vectors up to scaling, i.e. multiples of `(1, ..., 1)`.
fn is_constant_direction(_p: u32, v: &[u8]) -> bool {
    v.iter().all(|&x| x == v[0])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupKind {
    Ggs,
    MultiGgs,
    #[serde(rename = "multi-egs-general")]
    MultiEgs,
    SingleSymmetricVector,
    /// Every family carries a multiple of the constant vector `(1, ..., 1)`.
    #[serde(rename = "constant-vector")]
    ConstantVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchClass {
    #[serde(rename = "regular-branch-over-derived")]
    RegularBranchOverDerived,
    #[serde(rename = "regular-branch-over-gamma3")]
    RegularBranchOverGamma3,
    #[serde(rename = "weakly-branch-only")]
    WeaklyBranchOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub kind: GroupKind,
    pub periodic: bool,
    pub branch: BranchClass,
    /// `None` for GGS data, which are out of scope.
    pub threshold_k: Option<usize>,
    pub n_families: usize,
    pub r: usize,
    pub dim_v: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(entries: &[(u32, Vec<Vec<i64>>)]) -> BTreeMap<u32, Vec<Vec<i64>>> {
        entries.iter().cloned().collect()
    }

    #[test]
    fn validation_examples() {
        assert!(DefiningDatum::multi_ggs(3, vec![vec![1, 2]])
            .validate()
            .is_ok());
        let dep = DefiningDatum::multi_ggs(3, vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(
            dep.validate().unwrap_err(),
            vec![DatumError::DependentFamily { family: 1 }]
        );
        let empty = DefiningDatum::new(3, BTreeMap::new());
        assert_eq!(empty.validate().unwrap_err(), vec![DatumError::NoFamilies]);
    }

    #[test]
    fn validation_reports_every_violation() {
        let d = DefiningDatum::new(
            5,
            fam(&[(1, vec![vec![0, 0, 0, 0]]), (6, vec![vec![1, 0, 0, 0]])]),
        );
        let errs = d.validate().unwrap_err();
        assert!(errs.contains(&DatumError::ZeroVector {
            family: 1,
            index: 1
        }));
        assert!(errs.contains(&DatumError::BadFamily(6)));
        assert!(DefiningDatum::multi_ggs(9, vec![vec![1; 8]])
            .validate()
            .is_err());
        assert!(DefiningDatum::multi_ggs(17, vec![vec![1; 16]])
            .validate()
            .is_err());
        assert!(DefiningDatum::multi_ggs(17, vec![vec![1; 16]])
            .validate_with_max(17)
            .is_ok());
    }

    #[test]
    fn periodicity() {
        assert!(DefiningDatum::multi_ggs(3, vec![vec![1, 2]]).is_periodic());
        assert!(!DefiningDatum::multi_ggs(5, vec![vec![1, 0, 0, 0]]).is_periodic());
        assert!(
            DefiningDatum::multi_ggs(5, vec![vec![1, 4, 0, 0], vec![0, 1, 4, 0]]).is_periodic()
        );
    }

    #[test]
    fn branch_classes() {
        let d = DefiningDatum::multi_ggs(5, vec![vec![1, 4, 0, 0], vec![0, 1, 4, 0]]);
        assert_eq!(d.branch_class(), BranchClass::RegularBranchOverDerived);
        let s = DefiningDatum::single_vector(5, vec![1, 4, 4, 1], &[1, 2]);
        assert_eq!(s.branch_class(), BranchClass::RegularBranchOverGamma3);
        let c = DefiningDatum::multi_ggs(3, vec![vec![1, 1]]);
        assert_eq!(c.branch_class(), BranchClass::WeaklyBranchOnly);
    }

    #[test]
    fn thresholds_follow_the_case_split() {
        let d = DefiningDatum::multi_ggs(5, vec![vec![1, 4, 0, 0], vec![0, 1, 4, 0]]);
        assert_eq!(d.threshold_k(), Ok(3));
        let s = DefiningDatum::single_vector(5, vec![1, 4, 4, 1], &[1, 2]);
        assert_eq!(s.threshold_k(), Ok(4));
        let c = DefiningDatum::single_vector(3, vec![1, 1], &[1, 2]);
        assert_eq!(c.threshold_k(), Ok(3));
        let ggs = DefiningDatum::multi_ggs(3, vec![vec![1, 2]]);
        assert_eq!(ggs.threshold_k(), Err(DatumError::OutOfScope));
        // non-periodic single symmetric vector
        let n = DefiningDatum::single_vector(5, vec![1, 2, 2, 1], &[1, 3]);
        assert_eq!(n.threshold_k(), Ok(3));
        // r + 1 with r = 3
        let big = DefiningDatum::multi_ggs(
            5,
            vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0]],
        );
        assert_eq!(big.threshold_k(), Ok(4));
    }

    #[test]
    fn classification_fields() {
        let c = DefiningDatum::single_vector(3, vec![1, 1], &[1, 2])
            .classify()
            .unwrap();
        assert_eq!(c.kind, GroupKind::ConstantVector);
        assert!(!c.periodic);
        assert_eq!(c.threshold_k, Some(3));
        assert_eq!((c.n_families, c.r, c.dim_v), (2, 2, 1));
        let g = DefiningDatum::multi_ggs(3, vec![vec![1, 2]])
            .classify()
            .unwrap();
        assert_eq!(g.kind, GroupKind::Ggs);
        assert_eq!(g.threshold_k, None);
    }

    #[test]
    fn parse_and_serialize() {
        let text = r#"{ "p": 5, "families": { "1": [[1,4,0,0],[0,1,4,0]] } }"#;
        let d = DefiningDatum::parse(text).unwrap();
        assert_eq!(DefiningDatum::parse(&d.serialize()).unwrap(), d);
        let short =
            DefiningDatum::parse(r#"{ "p": 5, "vectors": [[1,-1,0,0],[0,1,4,0]] }"#).unwrap();
        assert_eq!(short, d);
        assert!(matches!(
            DefiningDatum::parse(r#"{ "p": 5, "vectors": [[1,4,0]] }"#),
            Err(DatumError::BadLength { .. })
        ));
        assert!(DefiningDatum::parse(r#"{ "p": 5 }"#).is_err());
        assert!(DefiningDatum::parse("not json").is_err());
        assert!(DefiningDatum::parse(r#"{ "p": 5, "families": { "7": [[1,0,0,0]] } }"#).is_err());
    }
}
