//! Band selection on top of a partition, and band-count estimation.

use crate::cube::HsiCube;
use crate::dp::{solve, Cbiv};
use crate::error::{Error, Result};
use crate::objectives::{build_na_scorer, ObjectiveKind};
use crate::ranking::{rank_mvpca, RankMethod, RankVector};
use crate::similarity::{local_scaling_similarity, DEFAULT_SCALING_NEIGHBOR};

/// One selected band per cluster, in cluster order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandSubset {
    selected: Vec<usize>,
    band_ids: Vec<u32>,
    method: String,
}

impl BandSubset {
    /// Build a subset from explicit 1-based band positions (e.g. a user
    /// supplied list). Positions must be distinct; order is kept.
    pub fn from_positions(positions: Vec<usize>, method: impl Into<String>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidInput("band subset must be nonempty".into()));
        }
        if positions.contains(&0) {
            return Err(Error::InvalidInput("band positions are 1-based".into()));
        }
        let mut seen = positions.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!(
                "duplicate band position in {positions:?}"
            )));
        }
        let band_ids = positions.iter().map(|&p| p as u32).collect();
        Ok(BandSubset { selected: positions, band_ids, method: method.into() })
    }

    /// Selected bands as 1-based positions on the working band axis.
    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    /// Original ids of the selected bands. Defaults to the positions
    /// until resolved against a cube via [`BandSubset::resolve_ids`].
    pub fn band_ids(&self) -> &[u32] {
        &self.band_ids
    }

    /// Descriptor of how the subset was produced, e.g. "NC-OC-IE".
    pub fn method(&self) -> &str {
        &self.method
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    /// Replace the method descriptor.
    pub fn with_method(mut self, method: impl Into<String>) -> Self {
        self.method = method.into();
        self
    }

    /// Map selected positions to the cube's original band ids (the ids
    /// survive band removal, positions do not).
    pub fn resolve_ids(mut self, cube: &HsiCube) -> Result<Self> {
        if let Some(&p) = self.selected.iter().find(|&&p| p > cube.n_bands()) {
            return Err(Error::Dimension(format!(
                "selected position {p} exceeds the cube's {} bands",
                cube.n_bands()
            )));
        }
        self.band_ids = self.selected.iter().map(|&p| cube.band_ids()[p - 1]).collect();
        Ok(self)
    }
}

/// Compose a selection descriptor from the objective and ranking tags,
/// e.g. "NC-OC-" + "IE".
pub fn method_name(kind: ObjectiveKind, rank: RankMethod) -> String {
    format!("{}{}", kind.descriptor_prefix(), rank.descriptor())
}

/// Pick the highest-ranked band in each cluster (ties toward the lower
/// band index). This maximizes the summed rank over all one-band-per-
/// cluster choices, since the clusters choose independently.
pub fn rcs_select(cbiv: &Cbiv, ranks: &RankVector) -> Result<BandSubset> {
    if ranks.len() != cbiv.n_bands() {
        return Err(Error::Dimension(format!(
            "{} rank scores for a partition of {} bands",
            ranks.len(),
            cbiv.n_bands()
        )));
    }
    let r = ranks.scores();
    let selected: Vec<usize> = cbiv
        .clusters()
        .map(|c| {
            let mut best = c.lo();
            for b in c.lo()..=c.hi() {
                if r[b - 1] > r[best - 1] {
                    best = b;
                }
            }
            best
        })
        .collect();
    let band_ids = selected.iter().map(|&p| p as u32).collect();
    Ok(BandSubset {
        selected,
        band_ids,
        method: ranks.method().descriptor().to_string(),
    })
}

/// Share of total band power captured by the k highest-variance bands:
/// top-k variance sum over the whole spectrum's variance sum.
pub fn variance_power_ratio(cube: &HsiCube, k: usize) -> Result<f64> {
    let l = cube.n_bands();
    if k == 0 || k > l {
        return Err(Error::InvalidInput(format!(
            "band count {k} out of range for {l} bands"
        )));
    }
    let curve = cumulative_ratio_curve(rank_mvpca(cube).scores())?;
    Ok(curve[k - 1])
}

/// Cumulative share curve of a variance spectrum: entry k-1 is the sum of
/// the k largest values over the total. The last entry is exactly 1.
pub fn cumulative_ratio_curve(variances: &[f64]) -> Result<Vec<f64>> {
    let mut sorted = variances.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let cums: Vec<f64> = sorted
        .iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect();
    let total = *cums.last().ok_or_else(|| {
        Error::InvalidInput("variance spectrum must be nonempty".into())
    })?;
    if total <= 0.0 {
        return Err(Error::Degenerate(
            "all bands are constant; band power is zero".into(),
        ));
    }
    Ok(cums.iter().map(|c| c / total).collect())
}

/// Smallest 1-based k whose ratio strictly exceeds `r_star` (the curve's
/// value at k 0 is taken as 0). The last ratio is 1, so any threshold
/// below 1 crosses.
pub fn crossing_index(ratios: &[f64], r_star: f64) -> usize {
    ratios
        .iter()
        .position(|&r| r > r_star)
        .map(|i| i + 1)
        .unwrap_or(ratios.len())
}

/// Result of [`estimate_band_count`].
#[derive(Debug, Clone, PartialEq)]
pub struct BandCountEstimate {
    /// Estimated number of required bands.
    pub k_star: usize,
    /// Cumulative decorrelated power ratios for k = 1..=M.
    pub ratios: Vec<f64>,
    /// The M candidate bands the ratios are computed from.
    pub subset: BandSubset,
}

/// Estimate how many bands the cube needs.
///
/// The band axis is partitioned into M = ceil(lambda * L) clusters under
/// the normalized-association objective and one band per cluster is kept
/// by variance rank; clustering first removes near-duplicate bands so the
/// kept variances are roughly decorrelated. The estimate K* is where the
/// cumulative share of the kept variances (sorted descending) first
/// strictly exceeds `r_star`.
pub fn estimate_band_count(
    cube: &HsiCube,
    lambda: f64,
    r_star: f64,
) -> Result<BandCountEstimate> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "lambda must lie in (0, 1], got {lambda}"
        )));
    }
    if !(r_star > 0.0 && r_star < 1.0) {
        return Err(Error::InvalidInput(format!(
            "r_star must lie in (0, 1), got {r_star}"
        )));
    }
    let l = cube.n_bands();
    let m = ((lambda * l as f64).ceil() as usize).clamp(1, l);

    let w = local_scaling_similarity(cube, DEFAULT_SCALING_NEIGHBOR)?;
    let ranks = rank_mvpca(cube);
    let table = build_na_scorer(&w, m)?;
    let (cbiv, _) = solve(&table, m)?;
    let subset = rcs_select(&cbiv, &ranks)?
        .with_method(method_name(ObjectiveKind::NormalizedAssociation, RankMethod::Mvpca))
        .resolve_ids(cube)?;

    let kept: Vec<f64> = subset.selected().iter().map(|&p| ranks.scores()[p - 1]).collect();
    let ratios = cumulative_ratio_curve(&kept)?;
    let k_star = crossing_index(&ratios, r_star);
    Ok(BandCountEstimate { k_star, ratios, subset })
}
