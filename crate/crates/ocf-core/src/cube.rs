//! Hyperspectral cube data model.
//!
//! A cube holds `L` band images over `N = rows * cols` pixels, stored
//! band-major: one `Vec<f64>` of length `N` per band. Pixels are
//! linearized row-major (the row index varies slowest), which fixes the
//! alignment between band data and the optional per-pixel class labels.
//! Bands keep their original 1-based acquisition ids so that selections
//! reported after noisy-band removal still refer to sensor band numbers.

use crate::error::{Error, Result};

/// A hyperspectral image: `L` bands of `N` pixels each, with optional
/// per-pixel class labels (0 = background/unlabeled) and per-band
/// wavelengths in micrometers.
#[derive(Debug, Clone, PartialEq)]
pub struct HsiCube {
    n_rows: usize,
    n_cols: usize,
    band_data: Vec<Vec<f64>>,
    band_ids: Vec<u32>,
    labels: Option<Vec<u32>>,
    wavelengths: Option<Vec<f64>>,
}

impl HsiCube {
    /// Build a cube from band-major data, validating all structural
    /// invariants. `band_ids` must be strictly increasing; labels, when
    /// present, must have one entry per pixel.
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        band_data: Vec<Vec<f64>>,
        band_ids: Vec<u32>,
        labels: Option<Vec<u32>>,
        wavelengths: Option<Vec<f64>>,
    ) -> Result<Self> {
        let n = n_rows * n_cols;
        let l = band_data.len();
        if n == 0 {
            return Err(Error::Dimension("cube must have at least one pixel".into()));
        }
        if l == 0 {
            return Err(Error::Dimension("cube must have at least one band".into()));
        }
        if let Some(bad) = band_data.iter().position(|b| b.len() != n) {
            return Err(Error::Dimension(format!(
                "band {} has {} values, expected {} (rows*cols)",
                bad + 1,
                band_data[bad].len(),
                n
            )));
        }
        if band_ids.len() != l {
            return Err(Error::Dimension(format!(
                "{} band ids for {} bands",
                band_ids.len(),
                l
            )));
        }
        if !band_ids.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(
                "band ids must be strictly increasing".into(),
            ));
        }
        if let Some(ref lab) = labels {
            if lab.len() != n {
                return Err(Error::Dimension(format!(
                    "{} labels for {} pixels",
                    lab.len(),
                    n
                )));
            }
        }
        if let Some(ref wl) = wavelengths {
            if wl.len() != l {
                return Err(Error::Dimension(format!(
                    "{} wavelengths for {} bands",
                    wl.len(),
                    l
                )));
            }
        }
        Ok(HsiCube {
            n_rows,
            n_cols,
            band_data,
            band_ids,
            labels,
            wavelengths,
        })
    }

    /// Convenience constructor for synthetic cubes: band ids 1..=L, no
    /// labels or wavelengths.
    pub fn from_bands(n_rows: usize, n_cols: usize, band_data: Vec<Vec<f64>>) -> Result<Self> {
        let ids = (1..=band_data.len() as u32).collect();
        Self::new(n_rows, n_cols, band_data, ids, None, None)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Number of pixels per band, `N`.
    pub fn n_pixels(&self) -> usize {
        self.n_rows * self.n_cols
    }

    /// Number of bands, `L`.
    pub fn n_bands(&self) -> usize {
        self.band_data.len()
    }

    /// Pixel values of one band (0-based band position).
    pub fn band(&self, idx: usize) -> &[f64] {
        &self.band_data[idx]
    }

    /// All bands in axis order.
    pub fn bands(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.band_data.iter().map(Vec::as_slice)
    }

    /// Original 1-based acquisition ids, one per current band.
    pub fn band_ids(&self) -> &[u32] {
        &self.band_ids
    }

    pub fn labels(&self) -> Option<&[u32]> {
        self.labels.as_deref()
    }

    pub fn wavelengths(&self) -> Option<&[f64]> {
        self.wavelengths.as_deref()
    }

    /// `true` if every reflectance value is finite.
    pub fn is_finite(&self) -> bool {
        self.band_data
            .iter()
            .all(|b| b.iter().all(|v| v.is_finite()))
    }
}

/// A contiguous, inclusive run of bands, in 1-based band positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandInterval {
    lo: usize,
    hi: usize,
}

impl BandInterval {
    /// `lo..=hi`, 1-based, `1 <= lo <= hi`.
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo == 0 || lo > hi {
            return Err(Error::InvalidInput(format!(
                "band interval must satisfy 1 <= lo <= hi, got [{lo}, {hi}]"
            )));
        }
        Ok(BandInterval { lo, hi })
    }

    pub fn lo(&self) -> usize {
        self.lo
    }

    pub fn hi(&self) -> usize {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// 0-based index range covering the interval.
    pub fn range0(&self) -> std::ops::Range<usize> {
        (self.lo - 1)..self.hi
    }
}

/// Remove bands by their *original* 1-based acquisition ids (e.g. water
/// absorption bands). Every requested id must be present; duplicates in
/// the request are tolerated. Survivors keep their order, data, ids and
/// wavelengths; labels are untouched (pixel count does not change).
pub fn remove_bands(cube: &HsiCube, indexes: &[u32]) -> Result<HsiCube> {
    let mut to_remove: Vec<u32> = indexes.to_vec();
    to_remove.sort_unstable();
    to_remove.dedup();

    for id in &to_remove {
        if !cube.band_ids.contains(id) {
            return Err(Error::InvalidInput(format!(
                "band id {id} not present in cube"
            )));
        }
    }
    if to_remove.len() == cube.n_bands() {
        return Err(Error::InvalidInput(
            "removal would leave zero bands".into(),
        ));
    }

    let keep: Vec<usize> = (0..cube.n_bands())
        .filter(|&i| to_remove.binary_search(&cube.band_ids[i]).is_err())
        .collect();

    let band_data = keep.iter().map(|&i| cube.band_data[i].clone()).collect();
    let band_ids = keep.iter().map(|&i| cube.band_ids[i]).collect();
    let wavelengths = cube
        .wavelengths
        .as_ref()
        .map(|wl| keep.iter().map(|&i| wl[i]).collect());

    HsiCube::new(
        cube.n_rows,
        cube.n_cols,
        band_data,
        band_ids,
        cube.labels.clone(),
        wavelengths,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube_l(l: usize) -> HsiCube {
        let bands = (0..l).map(|i| vec![i as f64, i as f64 + 0.5]).collect();
        HsiCube::from_bands(1, 2, bands).unwrap()
    }

    #[test]
    fn constructor_validates_lengths() {
        let bad = HsiCube::from_bands(2, 2, vec![vec![0.0; 4], vec![0.0; 3]]);
        assert!(matches!(bad, Err(Error::Dimension(_))));

        let bad = HsiCube::new(1, 2, vec![vec![0.0; 2]], vec![2, 1], None, None);
        assert!(bad.is_err());

        let bad = HsiCube::new(
            1,
            2,
            vec![vec![0.0; 2]],
            vec![1],
            Some(vec![1, 2, 3]),
            None,
        );
        assert!(matches!(bad, Err(Error::Dimension(_))));

        assert!(HsiCube::from_bands(0, 5, vec![]).is_err());
    }

    #[test]
    fn remove_bands_indian_pines_and_salinas_counts() {
        // 220-band cube minus water absorption ids 104-108, 150-163, 220.
        let cube = cube_l(220);
        let mut ids: Vec<u32> = (104..=108).collect();
        ids.extend(150..=163);
        ids.push(220);
        let reduced = remove_bands(&cube, &ids).unwrap();
        assert_eq!(reduced.n_bands(), 200);
        assert!(!reduced.band_ids().contains(&104));
        assert!(reduced.band_ids().contains(&103));
        assert!(reduced.band_ids().contains(&109));

        // 224-band cube minus 108-112, 154-167, 224.
        let cube = cube_l(224);
        let mut ids: Vec<u32> = (108..=112).collect();
        ids.extend(154..=167);
        ids.push(224);
        let reduced = remove_bands(&cube, &ids).unwrap();
        assert_eq!(reduced.n_bands(), 204);
    }

    #[test]
    fn remove_bands_empty_set_is_identity() {
        let cube = cube_l(7);
        let same = remove_bands(&cube, &[]).unwrap();
        assert_eq!(same, cube);
    }

    #[test]
    fn remove_bands_preserves_order_and_ids() {
        let cube = cube_l(6);
        let reduced = remove_bands(&cube, &[2, 5]).unwrap();
        assert_eq!(reduced.band_ids(), &[1, 3, 4, 6]);
        assert_eq!(reduced.band(1), cube.band(2));
        // Duplicate ids in the request behave like the deduplicated set.
        let dup = remove_bands(&cube, &[2, 5, 2, 5]).unwrap();
        assert_eq!(dup, reduced);
    }

    #[test]
    fn remove_bands_filters_wavelengths_keeps_labels() {
        let bands = vec![vec![0.0, 1.0], vec![2.0, 3.0], vec![4.0, 5.0]];
        let cube = HsiCube::new(
            1,
            2,
            bands,
            vec![1, 2, 3],
            Some(vec![0, 4]),
            Some(vec![0.4, 0.5, 0.6]),
        )
        .unwrap();
        let reduced = remove_bands(&cube, &[2]).unwrap();
        assert_eq!(reduced.wavelengths().unwrap(), &[0.4, 0.6]);
        assert_eq!(reduced.labels().unwrap(), &[0, 4]);
    }

    #[test]
    fn remove_bands_errors() {
        let cube = cube_l(3);
        assert!(matches!(
            remove_bands(&cube, &[9]),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            remove_bands(&cube, &[1, 2, 3]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn band_interval_bounds() {
        assert!(BandInterval::new(0, 3).is_err());
        assert!(BandInterval::new(4, 3).is_err());
        let iv = BandInterval::new(2, 5).unwrap();
        assert_eq!(iv.len(), 4);
        assert_eq!(iv.range0(), 1..5);
    }
}
