//! SMOTE oversampling: synthetic points interpolated between a sample and
//! one of its nearest same-class neighbours.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::label::Label;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmoteConfig {
    pub k_neighbors: usize,
    /// Every class below this size is grown to exactly this size. Larger
    /// classes are left as they are.
    pub target_per_class: usize,
    pub seed: u64,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        SmoteConfig {
            k_neighbors: 5,
            target_per_class: 900,
            seed: 0,
        }
    }
}

/// How one synthetic sample was made: `base + u · (neighbor − base)`.
/// Indices refer to the input rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticOrigin {
    pub output_index: usize,
    pub label: Label,
    pub base: usize,
    pub neighbor: usize,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resampled {
    /// Originals first, in input order, then synthetic samples.
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
    pub synthetic: Vec<SyntheticOrigin>,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Indices (into `members`) of the `k` nearest other members of each member.
/// Ties are broken by index.
fn nearest_neighbors(features: &[Vec<f64>], members: &[usize], k: usize) -> Vec<Vec<usize>> {
    members
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let mut by_dist: Vec<(f64, usize)> = members
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(j, &q)| (squared_distance(&features[p], &features[q]), j))
                .collect();
            by_dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            by_dist.into_iter().take(k).map(|(_, j)| j).collect()
        })
        .collect()
}

pub fn smote_oversample(
    features: &[Vec<f64>],
    labels: &[Label],
    cfg: &SmoteConfig,
) -> Result<Resampled> {
    if features.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: features.len(),
            found: labels.len(),
        });
    }
    if cfg.k_neighbors == 0 {
        return Err(Error::InvalidArgument(
            "smote: k_neighbors must be at least 1".into(),
        ));
    }
    if let Some(dim) = features.first().map(Vec::len) {
        if let Some(bad) = features.iter().find(|f| f.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
    }
    let mut by_class: BTreeMap<Label, Vec<usize>> =
        Label::ALL.iter().map(|&l| (l, Vec::new())).collect();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    if let Some((&l, _)) = by_class.iter().find(|(_, m)| m.is_empty()) {
        return Err(Error::MissingClass(l));
    }

    let mut out = Resampled {
        features: features.to_vec(),
        labels: labels.to_vec(),
        synthetic: Vec::new(),
    };
    let mut rng = seed::rng(cfg.seed);
    for (&label, members) in &by_class {
        let needed = cfg.target_per_class.saturating_sub(members.len());
        if needed == 0 {
            continue;
        }
        if members.len() < 2 {
            return Err(Error::TooFewSamples {
                label,
                found: members.len(),
                needed: 2,
            });
        }
        let k = cfg.k_neighbors.min(members.len() - 1);
        let neighbors = nearest_neighbors(features, members, k);
        for _ in 0..needed {
            let i = rng.random_range(0..members.len());
            let j = neighbors[i][rng.random_range(0..k)];
            let u: f64 = rng.random();
            let (p, q) = (&features[members[i]], &features[members[j]]);
            let point = p.iter().zip(q).map(|(a, b)| a + u * (b - a)).collect();
            out.synthetic.push(SyntheticOrigin {
                output_index: out.features.len(),
                label,
                base: members[i],
                neighbor: members[j],
                u,
            });
            out.features.push(point);
            out.labels.push(label);
        }
    }
    Ok(out)
}
