//! Band selection for hyperspectral images by optimal contiguous
//! clustering.
//!
//! A hyperspectral cube's bands vary smoothly with wavelength, so bands
//! worth grouping sit next to each other on the spectral axis. This crate
//! exploits that: it builds a band similarity graph, scores every
//! contiguous band interval under a clustering objective, finds the
//! exactly optimal contiguous partition by dynamic programming, and keeps
//! the highest-ranked band of each cluster.
//!
//! The pieces compose left to right:
//!
//! ```text
//! HsiCube -> SimilarityMatrix -> IntervalScoreTable -> Cbiv -> BandSubset
//!                 RankVector ----------^                 ^
//!                 RankVector -----------------------------
//! ```
//!
//! * [`similarity`] builds a locally scaled Gaussian band graph.
//! * [`ranking`] scores band importance (variance, entropy, density
//!   peaks).
//! * [`objectives`] turns the graph (and optionally ranks) into interval
//!   scores: normalized association (sum, maximize) or top-rank
//!   connection (max, minimize).
//! * [`dp`] finds the optimal contiguous partition for any such table.
//! * [`selection`] picks one band per cluster and estimates how many
//!   bands a cube needs.
//! * [`eval`] checks a subset with a KNN / overall-accuracy harness.
//! * [`oracle`] re-solves small instances exhaustively for testing.
//!
//! # Example
//!
//! ```
//! use ocf_core::{
//!     build_na_scorer, local_scaling_similarity, rank_mvpca, rcs_select,
//!     solve, HsiCube,
//! };
//!
//! // 6 one-pixel-row bands in two obvious groups.
//! let bands = vec![
//!     vec![0.0, 0.1, 0.2],
//!     vec![0.1, 0.2, 0.3],
//!     vec![0.0, 0.2, 0.1],
//!     vec![5.0, 5.1, 5.2],
//!     vec![5.1, 5.2, 5.3],
//!     vec![5.0, 5.2, 5.1],
//! ];
//! let cube = HsiCube::from_bands(1, 3, bands)?;
//! let w = local_scaling_similarity(&cube, 2)?;
//! let table = build_na_scorer(&w, 2)?;
//! let (partition, _value) = solve(&table, 2)?;
//! assert_eq!(partition.boundaries(), &[3, 6]);
//!
//! let subset = rcs_select(&partition, &rank_mvpca(&cube))?;
//! assert_eq!(subset.len(), 2);
//! # Ok::<(), ocf_core::Error>(())
//! ```

pub mod cube;
pub mod dp;
pub mod error;
pub mod eval;
pub mod io;
pub mod objectives;
pub mod oracle;
pub mod ranking;
pub mod selection;
pub mod similarity;

pub use cube::{remove_bands, BandInterval, HsiCube};
pub use dp::{evaluate, solve, Cbiv, DpTables};
pub use error::{Error, Result};
pub use eval::{knn_overall_accuracy, stratified_split, ExperimentConfig, OaReport};
pub use io::{load_cube, load_csv, load_hsib, write_csv, write_hsib, CubeFormat, Dtype};
pub use objectives::{
    build_na_scorer, build_trc_scorer, Combiner, Direction, IntervalScoreTable, ObjectiveKind,
};
pub use oracle::{brute_force_solve, partition_count, BruteForceResult};
pub use ranking::{
    rank_efdpc, rank_entropy, rank_mvpca, RankMethod, RankVector, DEFAULT_HISTOGRAM_BINS,
};
pub use selection::{
    estimate_band_count, method_name, rcs_select, variance_power_ratio, BandCountEstimate,
    BandSubset,
};
pub use similarity::{local_scaling_similarity, SimilarityMatrix, DEFAULT_SCALING_NEIGHBOR};
