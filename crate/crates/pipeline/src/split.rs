//! Deterministic train/val/test partitioning.
//!
//! Keys are sorted, shuffled with `seeded_permutation(seed, n)` and cut into
//! contiguous blocks. In ratio mode the train and val sizes are
//! `floor(ratio * n)` and test receives the remainder.

use std::collections::{BTreeMap, HashSet};

use eit_core::rng::combine;
use eit_core::{fnv1a64, seeded_permutation};
use serde::{Deserialize, Serialize};

use crate::corpus::class_of;
use crate::error::{Error, Result};

const RATIO_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitSizes {
    Counts {
        train: usize,
        val: usize,
        test: usize,
    },
    Ratios {
        train: f64,
        val: f64,
        test: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub sizes: SplitSizes,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Partition {
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
}

impl Partition {
    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.train.len(), self.val.len(), self.test.len())
    }
}

fn block_sizes(sizes: &SplitSizes, n: usize) -> Result<(usize, usize)> {
    match *sizes {
        SplitSizes::Counts { train, val, test } => {
            let requested = train + val + test;
            if requested != n {
                return Err(Error::CountMismatch {
                    requested,
                    available: n,
                });
            }
            Ok((train, val))
        }
        SplitSizes::Ratios { train, val, test } => {
            let r = [train, val, test];
            let sum: f64 = r.iter().sum();
            if r.iter().any(|v| !v.is_finite() || *v < 0.0) || (sum - 1.0).abs() > RATIO_TOLERANCE {
                return Err(Error::BadRatios(r));
            }
            let n_f = n as f64;
            let t = ((train * n_f + RATIO_TOLERANCE).floor() as usize).min(n);
            let v = ((val * n_f + RATIO_TOLERANCE).floor() as usize).min(n - t);
            Ok((t, v))
        }
    }
}

fn check_keys(keys: &[String]) -> Result<()> {
    if keys.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut seen = HashSet::with_capacity(keys.len());
    for k in keys {
        if !seen.insert(k.as_str()) {
            return Err(Error::DuplicateKey(k.clone()));
        }
    }
    Ok(())
}

fn shuffle_and_cut(keys: &[String], sizes: &SplitSizes, seed: u64) -> Result<Partition> {
    let n = keys.len();
    let (n_train, n_val) = block_sizes(sizes, n)?;
    let mut sorted: Vec<&String> = keys.iter().collect();
    sorted.sort();
    let shuffled: Vec<String> = seeded_permutation(seed, n)
        .into_iter()
        .map(|i| sorted[i].clone())
        .collect();
    let mut rest = shuffled.into_iter();
    Ok(Partition {
        train: rest.by_ref().take(n_train).collect(),
        val: rest.by_ref().take(n_val).collect(),
        test: rest.collect(),
    })
}

/// Splits `keys` into disjoint train/val/test lists.
pub fn split_corpus(keys: &[String], spec: &SplitSpec) -> Result<Partition> {
    check_keys(keys)?;
    shuffle_and_cut(keys, &spec.sizes, spec.seed)
}

/// Per-class variant: each class (parent directory) is split on its own with
/// seed `combine(seed, fnv1a64(class))`, then classes are concatenated in
/// name order. Only ratio mode is meaningful here.
pub fn split_corpus_stratified(keys: &[String], spec: &SplitSpec) -> Result<Partition> {
    check_keys(keys)?;
    if matches!(spec.sizes, SplitSizes::Counts { .. }) {
        return Err(Error::StratifyNeedsRatios);
    }
    let mut classes: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for k in keys {
        classes
            .entry(class_of(k).unwrap_or(""))
            .or_default()
            .push(k.clone());
    }
    let mut out = Partition::default();
    for (class, members) in classes {
        let part = shuffle_and_cut(
            &members,
            &spec.sizes,
            combine(spec.seed, fnv1a64(class.as_bytes())),
        )?;
        out.train.extend(part.train);
        out.val.extend(part.val);
        out.test.extend(part.test);
    }
    Ok(out)
}
