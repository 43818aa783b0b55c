//! Band similarity with local scaling.
//!
//! Bands are compared as N-dimensional pixel vectors. The similarity
//! between bands i and j is
//!
//! ```text
//! w_ij = exp(-||x_i - x_j||^2 / (sigma_i * sigma_j))
//! ```
//!
//! where `sigma_i` is the squared Euclidean distance from band i to its
//! m-th nearest band (self excluded, distance ties broken toward the lower
//! band index). The per-band scale adapts the kernel to the local density
//! of the band cloud instead of a single global bandwidth.

use rayon::prelude::*;

use crate::cube::HsiCube;
use crate::error::{Error, Result};

/// Default m for the local scaling neighbor.
pub const DEFAULT_SCALING_NEIGHBOR: usize = 7;

/// Symmetric L x L band similarity matrix with unit diagonal and strictly
/// positive entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl SimilarityMatrix {
    /// Wrap a row-major L x L entry buffer, validating the invariants:
    /// finite, strictly positive, symmetric, unit diagonal.
    pub fn from_entries(size: usize, entries: Vec<f64>) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidInput("similarity matrix must be nonempty".into()));
        }
        if entries.len() != size * size {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {size}x{size} matrix, got {}",
                size * size,
                entries.len()
            )));
        }
        for i in 0..size {
            for j in 0..size {
                let w = entries[i * size + j];
                if !w.is_finite() || w <= 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "similarity ({},{}) = {w} is not strictly positive and finite",
                        i + 1,
                        j + 1
                    )));
                }
                if w != entries[j * size + i] {
                    return Err(Error::InvalidInput(format!(
                        "similarity matrix is not symmetric at ({},{})",
                        i + 1,
                        j + 1
                    )));
                }
            }
            if entries[i * size + i] != 1.0 {
                return Err(Error::InvalidInput(format!(
                    "similarity diagonal ({0},{0}) must be 1",
                    i + 1
                )));
            }
        }
        Ok(SimilarityMatrix { size, entries })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Entry at 0-based (i, j).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    /// 0-based row i as a slice.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }

    /// Flat row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

/// Squared Euclidean distances between all band pairs, flat row-major
/// L x L. Exactly symmetric and zero on the diagonal.
pub(crate) fn band_sq_distances(cube: &HsiCube) -> Vec<f64> {
    let l = cube.n_bands();
    let upper: Vec<Vec<f64>> = (0..l)
        .into_par_iter()
        .map(|i| {
            let xi = cube.band(i);
            ((i + 1)..l)
                .map(|j| {
                    xi.iter()
                        .zip(cube.band(j))
                        .map(|(a, b)| {
                            let t = a - b;
                            t * t
                        })
                        .sum()
                })
                .collect()
        })
        .collect();
    let mut d = vec![0.0; l * l];
    for (i, row) in upper.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            let j = i + 1 + off;
            d[i * l + j] = v;
            d[j * l + i] = v;
        }
    }
    d
}

/// Build the local-scaling similarity matrix for a cube.
///
/// `m` is the scaling neighbor (1-based, at least 1); it is clamped to
/// L - 1 when the cube has fewer than m + 1 bands. A band whose m-th
/// neighbor distance is zero (duplicate bands) has no usable scale and
/// yields [`Error::Degenerate`]. Entries that underflow to zero are
/// clamped to the smallest positive f64 so strict positivity holds.
pub fn local_scaling_similarity(cube: &HsiCube, m: usize) -> Result<SimilarityMatrix> {
    if m == 0 {
        return Err(Error::InvalidInput("scaling neighbor m must be at least 1".into()));
    }
    let l = cube.n_bands();
    if l == 1 {
        return SimilarityMatrix::from_entries(1, vec![1.0]);
    }
    let m_eff = m.min(l - 1);
    let d = band_sq_distances(cube);

    let mut sigma = vec![0.0; l];
    let mut order: Vec<usize> = Vec::with_capacity(l - 1);
    for i in 0..l {
        order.clear();
        order.extend((0..l).filter(|&j| j != i));
        order.sort_by(|&a, &b| {
            d[i * l + a].total_cmp(&d[i * l + b]).then(a.cmp(&b))
        });
        let s = d[i * l + order[m_eff - 1]];
        if s == 0.0 {
            return Err(Error::Degenerate(format!(
                "band {} is identical to its {m_eff} nearest band(s); local scale is zero",
                i + 1
            )));
        }
        sigma[i] = s;
    }

    let mut entries = vec![0.0; l * l];
    for i in 0..l {
        entries[i * l + i] = 1.0;
        for j in (i + 1)..l {
            let w = (-(d[i * l + j] / (sigma[i] * sigma[j]))).exp();
            let w = if w == 0.0 { f64::MIN_POSITIVE } else { w };
            entries[i * l + j] = w;
            entries[j * l + i] = w;
        }
    }
    SimilarityMatrix::from_entries(l, entries)
}
