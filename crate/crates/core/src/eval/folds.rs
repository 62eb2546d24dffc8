use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::label::Label;
use crate::seed;

/// Split indices `0..labels.len()` into `k` disjoint folds whose per-class
/// counts differ by at most one. Each fold's indices are sorted.
///
/// Classes are shuffled independently and dealt round-robin; each class
/// starts dealing where the previous one stopped so that fold sizes also
/// stay within one of each other.
pub fn stratified_kfold(labels: &[Label], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 folds, got {k}"
        )));
    }
    let mut by_class: BTreeMap<Label, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    for (&label, members) in &by_class {
        if members.len() < k {
            return Err(Error::TooFewSamples {
                label,
                found: members.len(),
                needed: k,
            });
        }
    }
    let mut rng = seed::rng(seed);
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for members in by_class.values_mut() {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            folds[next].push(i);
            next = (next + 1) % k;
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}
