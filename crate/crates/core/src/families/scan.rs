//! Parallel seeded scan over the six-dimensional families.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{instance_report, random, FamilyParams, InstanceReport};
use crate::lie::{target_algebra, Fingerprint, Params};
use crate::Tol;

/// Named six-dimensional algebras the scan should reach: (label, target expression).
pub const SIX_DIM_TARGETS: &[(&str, &str)] = &[
    ("R^6", "R^6"),
    ("aff+R^4", "aff + R^4"),
    ("h3+R^3", "h3 + R^3"),
    ("2aff+R^2", "2aff + R^2"),
    ("3aff", "3aff"),
    ("aff+h3+R", "aff + h3 + R"),
    ("2h3", "2h3"),
    ("r'3,0+R^3", "r3p(lambda=0) + R^3"),
    ("g5_14(0)+R", "g5_14(alpha=0) + R"),
    ("(0,0,0,0,12,14+23)", "(0,0,0,0,12,14+23)"),
    ("(0,0,0,0,13+42,14+23)", "(0,0,0,0,13+42,14+23)"),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub index: usize,
    pub params: FamilyParams,
    pub report: Option<InstanceReport>,
    pub fingerprint: Option<String>,
    /// Generator rejection, if any.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub fingerprint: String,
    pub count: usize,
    pub families: Vec<String>,
    pub targets: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub samples: usize,
    pub seed: u64,
    pub skt: usize,
    /// Generated instances failing the SKT verdict.
    pub failures: usize,
    /// Parameter draws the generators rejected.
    pub rejected: usize,
    pub per_family: BTreeMap<String, usize>,
    pub buckets: Vec<Bucket>,
    /// (label, hit) for every entry of [`SIX_DIM_TARGETS`].
    pub coverage: Vec<(String, bool)>,
    pub records: Vec<ScanRecord>,
}

impl ScanReport {
    pub fn missed(&self) -> Vec<&str> {
        self.coverage
            .iter()
            .filter(|(_, hit)| !hit)
            .map(|(l, _)| l.as_str())
            .collect()
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix(splitmix(seed) ^ index as u64))
}

fn run_one(index: usize, seed: u64, tol: Tol) -> (ScanRecord, Option<Fingerprint>) {
    let mut rng = sample_rng(seed, index);
    let params = random::six_dim(&mut rng);
    match params.generate(tol) {
        Ok(h) => {
            let fp = h.algebra.fingerprint(tol);
            let rec = ScanRecord {
                index,
                params,
                report: Some(instance_report(&h, tol)),
                fingerprint: Some(fp.compact()),
                error: None,
            };
            (rec, Some(fp))
        }
        Err(e) => (
            ScanRecord {
                index,
                params,
                report: None,
                fingerprint: None,
                error: Some(e.to_string()),
            },
            None,
        ),
    }
}

/// Draws `samples` six-dimensional family members (deterministic in `seed`, independent of the
/// thread count), verifies each, and buckets the results by fingerprint.
pub fn scan_6d(samples: usize, seed: u64, tol: Tol) -> ScanReport {
    let results: Vec<(ScanRecord, Option<Fingerprint>)> =
        (0..samples).into_par_iter().map(|i| run_one(i, seed, tol)).collect();
    let targets: Vec<(&str, Option<Fingerprint>)> = SIX_DIM_TARGETS
        .iter()
        .map(|(label, expr)| {
            (
                *label,
                target_algebra(expr, &Params::new()).ok().map(|l| l.fingerprint(tol)),
            )
        })
        .collect();

    let mut buckets: BTreeMap<Fingerprint, Bucket> = BTreeMap::new();
    let mut per_family = BTreeMap::new();
    let (mut skt, mut failures, mut rejected) = (0, 0, 0);
    for (rec, fp) in &results {
        *per_family.entry(rec.params.name().to_string()).or_insert(0) += 1;
        let (Some(rep), Some(fp)) = (&rec.report, fp) else {
            rejected += 1;
            continue;
        };
        if rep.verdict.is_skt() {
            skt += 1;
        } else {
            failures += 1;
            continue;
        }
        let b = buckets.entry(fp.clone()).or_insert_with(|| Bucket {
            fingerprint: fp.compact(),
            count: 0,
            families: Vec::new(),
            targets: targets
                .iter()
                .filter(|(_, t)| t.as_ref() == Some(fp))
                .map(|(l, _)| l.to_string())
                .collect(),
        });
        b.count += 1;
        let name = rec.params.name().to_string();
        if !b.families.contains(&name) {
            b.families.push(name);
            b.families.sort();
        }
    }
    let coverage = targets
        .iter()
        .map(|(label, t)| (label.to_string(), t.as_ref().is_some_and(|t| buckets.contains_key(t))))
        .collect();
    ScanReport {
        samples,
        seed,
        skt,
        failures,
        rejected,
        per_family,
        buckets: buckets.into_values().collect(),
        coverage,
        records: results.into_iter().map(|(r, _)| r).collect(),
    }
}
