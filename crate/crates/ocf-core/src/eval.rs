//! Classification-based evaluation of a band subset.
//!
//! Repeated stratified splits, a KNN classifier on the selected bands,
//! and overall accuracy. Label 0 marks background pixels and never
//! enters the protocol.

use std::collections::BTreeMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cube::HsiCube;
use crate::error::{Error, Result};
use crate::selection::BandSubset;

/// Protocol knobs for [`knn_overall_accuracy`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Fraction of each class used for training, in (0, 1).
    pub train_fraction: f64,
    /// Number of independent split/classify runs.
    pub n_runs: usize,
    /// Neighbors consulted per test pixel.
    pub knn_k: usize,
    /// Master seed; run r draws from stream r of this seed.
    pub rng_seed: u64,
    /// K values a sweep should evaluate (consumed by callers, not here).
    pub band_counts: Vec<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            train_fraction: 0.10,
            n_runs: 10,
            knn_k: 3,
            rng_seed: 0,
            band_counts: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::InvalidInput(format!(
                "train fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        if self.n_runs == 0 {
            return Err(Error::InvalidInput("need at least one run".into()));
        }
        if self.knn_k == 0 {
            return Err(Error::InvalidInput("knn_k must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-run overall accuracies and their arithmetic mean.
#[derive(Debug, Clone, PartialEq)]
pub struct OaReport {
    runs: Vec<f64>,
    mean: f64,
}

impl OaReport {
    fn new(runs: Vec<f64>) -> Self {
        let mean = runs.iter().sum::<f64>() / runs.len() as f64;
        OaReport { runs, mean }
    }

    pub fn runs(&self) -> &[f64] {
        &self.runs
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }
}

/// Split labeled pixels into train and test sets, stratified by class.
///
/// Per class, `ceil(fraction * count)` pixels train and the rest test;
/// background (label 0) is excluded entirely. Both returned index lists
/// are sorted ascending. Errors if any class has fewer than 2 pixels or
/// no labeled pixels exist.
pub fn stratified_split(
    labels: &[u32],
    train_fraction: f64,
    rng: &mut impl Rng,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidInput(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut by_class: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, &lab) in labels.iter().enumerate() {
        if lab != 0 {
            by_class.entry(lab).or_default().push(i);
        }
    }
    if by_class.is_empty() {
        return Err(Error::InvalidInput("no labeled pixels to split".into()));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (class, mut idx) in by_class {
        if idx.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "class {class} has {} labeled pixel(s), need at least 2",
                idx.len()
            )));
        }
        let n_train = (train_fraction * idx.len() as f64).ceil() as usize;
        idx.shuffle(rng);
        train.extend_from_slice(&idx[..n_train]);
        test.extend_from_slice(&idx[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

fn classify(
    features: &[Vec<f64>],
    labels: &[u32],
    train: &[usize],
    pixel: usize,
    k: usize,
) -> u32 {
    // k nearest training pixels; distance ties keep the earlier pixel.
    let mut near: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
    for &t in train {
        let d: f64 = features[pixel]
            .iter()
            .zip(&features[t])
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        if near.len() < k {
            near.push((d, t));
            near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        } else if d < near[k - 1].0 {
            near[k - 1] = (d, t);
            near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        }
    }
    let mut votes: BTreeMap<u32, usize> = BTreeMap::new();
    for (_, t) in near {
        *votes.entry(labels[t]).or_default() += 1;
    }
    // Vote ties resolve to the lower class id (map iterates id order).
    let mut winner = 0u32;
    let mut count = 0usize;
    for (class, c) in votes {
        if c > count {
            winner = class;
            count = c;
        }
    }
    winner
}

/// Classify the cube's labeled pixels on the subset's bands over repeated
/// stratified splits.
///
/// Each run reseeds from `config.rng_seed` on its own stream, so reports
/// are bit-reproducible regardless of thread count.
pub fn knn_overall_accuracy(
    cube: &HsiCube,
    subset: &BandSubset,
    config: &ExperimentConfig,
) -> Result<OaReport> {
    config.validate()?;
    let labels = cube
        .labels()
        .ok_or_else(|| Error::InvalidInput("cube has no labels to evaluate against".into()))?;
    if subset.is_empty() {
        return Err(Error::InvalidInput("band subset is empty".into()));
    }
    if let Some(&p) = subset.selected().iter().find(|&&p| p < 1 || p > cube.n_bands()) {
        return Err(Error::InvalidInput(format!(
            "selected band position {p} outside 1..={}",
            cube.n_bands()
        )));
    }

    // Pixel-major feature vectors over the selected bands.
    let features: Vec<Vec<f64>> = (0..cube.n_pixels())
        .map(|p| subset.selected().iter().map(|&b| cube.band(b - 1)[p]).collect())
        .collect();

    let mut runs = Vec::with_capacity(config.n_runs);
    for run in 0..config.n_runs {
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        rng.set_stream(run as u64);
        let (train, test) = stratified_split(labels, config.train_fraction, &mut rng)?;
        if test.is_empty() {
            return Err(Error::InvalidInput(
                "train fraction leaves no test pixels".into(),
            ));
        }
        let correct: usize = test
            .par_iter()
            .map(|&p| {
                let predicted = classify(&features, labels, &train, p, config.knn_k);
                usize::from(predicted == labels[p])
            })
            .sum();
        runs.push(correct as f64 / test.len() as f64);
    }
    Ok(OaReport::new(runs))
}
