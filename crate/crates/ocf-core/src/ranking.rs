//! Band importance rankings.
//!
//! Three rankers score each band of a cube; higher scores mean more
//! important. Scores feed interval objectives and the final per-cluster
//! selection step.

use crate::cube::HsiCube;
use crate::error::{Error, Result};
use crate::similarity::band_sq_distances;

/// Default histogram resolution for the entropy ranker.
pub const DEFAULT_HISTOGRAM_BINS: usize = 256;

/// Which ranker produced a score vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankMethod {
    /// Per-band variance.
    Mvpca,
    /// Per-band histogram entropy.
    Entropy,
    /// Density-peak score.
    Efdpc,
}

impl RankMethod {
    /// Short tag used when naming a selection result.
    pub fn descriptor(self) -> &'static str {
        match self {
            RankMethod::Mvpca => "MVPCA",
            RankMethod::Entropy => "IE",
            RankMethod::Efdpc => "FDPC",
        }
    }
}

/// Per-band importance scores, one per band, higher is better.
#[derive(Debug, Clone, PartialEq)]
pub struct RankVector {
    scores: Vec<f64>,
    method: RankMethod,
}

impl RankVector {
    pub fn new(scores: Vec<f64>, method: RankMethod) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::InvalidInput("rank vector must be nonempty".into()));
        }
        if let Some(v) = scores.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite rank score {v}")));
        }
        Ok(RankVector { scores, method })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn method(&self) -> RankMethod {
        self.method
    }
}

/// Rank bands by variance (population form, divisor N).
pub fn rank_mvpca(cube: &HsiCube) -> RankVector {
    let n = cube.n_pixels() as f64;
    let scores = cube
        .bands()
        .map(|band| {
            let mean = band.iter().sum::<f64>() / n;
            band.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
        })
        .collect();
    RankVector { scores, method: RankMethod::Mvpca }
}

/// Rank bands by histogram entropy (natural log).
///
/// Each band is min-max scaled into `n_bins` equal-width bins; a constant
/// band carries no information and scores 0.
pub fn rank_entropy(cube: &HsiCube, n_bins: usize) -> Result<RankVector> {
    if n_bins < 2 {
        return Err(Error::InvalidInput(format!(
            "entropy needs at least 2 histogram bins, got {n_bins}"
        )));
    }
    let n = cube.n_pixels() as f64;
    let mut counts = vec![0usize; n_bins];
    let scores = cube
        .bands()
        .map(|band| {
            let lo = band.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = band.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if lo == hi {
                return 0.0;
            }
            counts.iter_mut().for_each(|c| *c = 0);
            for &v in band {
                let idx = (((v - lo) / (hi - lo)) * n_bins as f64) as usize;
                counts[idx.min(n_bins - 1)] += 1;
            }
            -counts
                .iter()
                .filter(|&&c| c > 0)
                .map(|&c| {
                    let p = c as f64 / n;
                    p * p.ln()
                })
                .sum::<f64>()
        })
        .collect();
    RankVector::new(scores, RankMethod::Entropy)
}

/// Rank bands by density-peak score.
///
/// Pairwise band distances are Euclidean, normalized by the largest pair
/// distance. The cutoff `d_c` is the t-th smallest pair distance with
/// `t = ceil(0.02 * k_prime)` (at least 1); a zero cutoff (duplicate
/// bands) falls back to the smallest positive pair distance. Each band
/// gets a local density `rho` (Gaussian kernel at the cutoff) and a
/// separation `delta` (distance to the nearest denser band, or the
/// largest distance for the global peak); the score is `rho * delta^2`.
/// Denser-band ties resolve toward the lower band index, so an exact
/// duplicate of an earlier band scores 0.
pub fn rank_efdpc(cube: &HsiCube, k_prime: usize) -> Result<RankVector> {
    let l = cube.n_bands();
    if l < 2 {
        return Err(Error::InvalidInput(
            "density-peak ranking needs at least 2 bands".into(),
        ));
    }
    if k_prime == 0 {
        return Err(Error::InvalidInput("k_prime must be at least 1".into()));
    }

    let mut d = band_sq_distances(cube);
    d.iter_mut().for_each(|v| *v = v.sqrt());
    let max = d.iter().cloned().fold(0.0f64, f64::max);
    if max == 0.0 {
        return Err(Error::Degenerate("all bands are identical".into()));
    }
    d.iter_mut().for_each(|v| *v /= max);

    let mut pairs: Vec<f64> = (0..l)
        .flat_map(|i| ((i + 1)..l).map(move |j| (i, j)))
        .map(|(i, j)| d[i * l + j])
        .collect();
    pairs.sort_by(f64::total_cmp);
    let t = ((0.02 * k_prime as f64).ceil() as usize).clamp(1, pairs.len());
    let mut d_c = pairs[t - 1];
    if d_c == 0.0 {
        // Duplicate bands collapse the small quantiles; use the smallest
        // informative distance instead.
        d_c = pairs.iter().cloned().find(|&v| v > 0.0).unwrap();
    }

    let rho: Vec<f64> = (0..l)
        .map(|i| {
            (0..l)
                .filter(|&j| j != i)
                .map(|j| {
                    let r = d[i * l + j] / d_c;
                    (-(r * r)).exp()
                })
                .sum()
        })
        .collect();

    // j is denser than i when rho is larger, with exact ties resolved
    // toward the lower index so duplicates separate deterministically.
    let denser = |j: usize, i: usize| rho[j] > rho[i] || (rho[j] == rho[i] && j < i);

    let scores = (0..l)
        .map(|i| {
            let above: Option<f64> = (0..l)
                .filter(|&j| denser(j, i))
                .map(|j| d[i * l + j])
                .min_by(f64::total_cmp);
            let delta = above.unwrap_or_else(|| {
                (0..l)
                    .filter(|&j| j != i)
                    .map(|j| d[i * l + j])
                    .fold(0.0, f64::max)
            });
            rho[i] * delta * delta
        })
        .collect();
    RankVector::new(scores, RankMethod::Efdpc)
}
