//! Interval objectives for contiguous band clustering.
//!
//! A partition objective is the fold of a per-interval score f over the
//! clusters, either summed or maxed, then maximized or minimized over
//! partitions. Both objectives here precompute every interval's score
//! into an L x L table so the optimizer can read them in O(1).

use crate::error::{Error, Result};
use crate::ranking::RankVector;
use crate::similarity::SimilarityMatrix;

/// How per-cluster scores fold into a partition score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combiner {
    Sum,
    Max,
}

impl Combiner {
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            Combiner::Sum => a + b,
            Combiner::Max => a.max(b),
        }
    }
}

/// Whether larger or smaller partition scores win.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

impl Direction {
    /// True when `a` strictly improves on `b`.
    pub fn improves(self, a: f64, b: f64) -> bool {
        match self {
            Direction::Maximize => a > b,
            Direction::Minimize => a < b,
        }
    }
}

/// Which interval score the table holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    /// Within-interval association normalized by total association.
    NormalizedAssociation,
    /// Similarity mass the interval's top-ranked band leaks outside it.
    TopRankConnection,
}

impl ObjectiveKind {
    /// Prefix used when naming a selection result.
    pub fn descriptor_prefix(self) -> &'static str {
        match self {
            ObjectiveKind::NormalizedAssociation => "NC-OC-",
            ObjectiveKind::TopRankConnection => "TRC-OC-",
        }
    }
}

/// Precomputed score for every contiguous band interval, plus the fold
/// semantics the optimizer must use with it.
///
/// Entries are laid out so that scanning all start points of an interval
/// with a fixed endpoint is a contiguous read.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalScoreTable {
    size: usize,
    scores: Vec<f64>,
    combiner: Combiner,
    direction: Direction,
    kind: ObjectiveKind,
}

impl IntervalScoreTable {
    /// Wrap a raw table. `scores` is indexed by `(hi-1)*size + (lo-1)`;
    /// entries with `lo > hi` are ignored. Every used entry must be
    /// finite.
    pub fn from_scores(
        size: usize,
        scores: Vec<f64>,
        combiner: Combiner,
        direction: Direction,
        kind: ObjectiveKind,
    ) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidInput("interval table must be nonempty".into()));
        }
        if scores.len() != size * size {
            return Err(Error::Dimension(format!(
                "expected {} interval scores, got {}",
                size * size,
                scores.len()
            )));
        }
        for hi in 1..=size {
            for lo in 1..=hi {
                let v = scores[(hi - 1) * size + (lo - 1)];
                if !v.is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "interval [{lo},{hi}] has non-finite score {v}"
                    )));
                }
            }
        }
        Ok(IntervalScoreTable { size, scores, combiner, direction, kind })
    }

    /// Number of bands the table covers.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Score of the 1-based inclusive interval `[lo, hi]`.
    pub fn score(&self, lo: usize, hi: usize) -> f64 {
        assert!(
            1 <= lo && lo <= hi && hi <= self.size,
            "interval [{lo},{hi}] out of range for {} bands",
            self.size
        );
        self.scores[(hi - 1) * self.size + (lo - 1)]
    }

    pub fn combiner(&self) -> Combiner {
        self.combiner
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn kind(&self) -> ObjectiveKind {
        self.kind
    }
}

/// Normalized-association interval scores.
///
/// For interval `[i, j]` the score is the similarity mass inside the
/// interval's square block divided by the total mass of its rows, scaled
/// by `1/k` where `k` is the intended cluster count:
///
/// ```text
/// f(i, j) = (1/k) * assoc(i..j, i..j) / assoc(i..j, 1..L)
/// ```
///
/// Scores are summed and maximized. The whole-axis interval scores
/// exactly `1/k`, and the per-interval scores of any partition pair with
/// its normalized-cut complement to sum to 1.
pub fn build_na_scorer(w: &SimilarityMatrix, k: usize) -> Result<IntervalScoreTable> {
    let l = w.size();
    if k == 0 || k > l {
        return Err(Error::InvalidInput(format!(
            "cluster count {k} out of range for {l} bands"
        )));
    }
    // 2-D prefix sums, (l+1) x (l+1): pre[i][j] = mass of the first i
    // rows and first j columns.
    let stride = l + 1;
    let mut pre = vec![0.0f64; stride * stride];
    for i in 1..=l {
        let row = w.row(i - 1);
        for j in 1..=l {
            pre[i * stride + j] = row[j - 1] + pre[(i - 1) * stride + j]
                + pre[i * stride + (j - 1)]
                - pre[(i - 1) * stride + (j - 1)];
        }
    }
    let block = |i: usize, j: usize| -> f64 {
        pre[j * stride + j] - pre[(i - 1) * stride + j] - pre[j * stride + (i - 1)]
            + pre[(i - 1) * stride + (i - 1)]
    };
    // Row mass comes from the same table's last column, so the full
    // interval divides a value by itself and yields exactly 1/k.
    let rows = |i: usize, j: usize| -> f64 { pre[j * stride + l] - pre[(i - 1) * stride + l] };

    let kf = k as f64;
    let mut scores = vec![0.0f64; l * l];
    for j in 1..=l {
        for i in 1..=j {
            scores[(j - 1) * l + (i - 1)] = block(i, j) / rows(i, j) / kf;
        }
    }
    IntervalScoreTable::from_scores(
        l,
        scores,
        Combiner::Sum,
        Direction::Maximize,
        ObjectiveKind::NormalizedAssociation,
    )
}

/// Top-rank-connection interval scores.
///
/// For interval `[i, j]`, let `p` be its highest-ranked band (score ties
/// resolve toward the lower band index). The interval's score is the
/// similarity mass connecting `p` to bands outside the interval:
///
/// ```text
/// f(i, j) = d_p - sum(w[p][i..=j])    where d_p = sum(w[p][1..=L])
/// ```
///
/// Scores fold by max and are minimized. The whole-axis interval scores
/// exactly 0.
pub fn build_trc_scorer(w: &SimilarityMatrix, ranks: &RankVector) -> Result<IntervalScoreTable> {
    let l = w.size();
    if ranks.len() != l {
        return Err(Error::Dimension(format!(
            "{} rank scores for {} bands",
            ranks.len(),
            l
        )));
    }
    // Per-band row prefix sums, (l+1) wide; the last entry is the band's
    // total degree, so the full interval subtracts it from itself.
    let stride = l + 1;
    let mut rowpre = vec![0.0f64; l * stride];
    for p in 0..l {
        let row = w.row(p);
        for j in 1..=l {
            rowpre[p * stride + j] = rowpre[p * stride + (j - 1)] + row[j - 1];
        }
    }

    let r = ranks.scores();
    let mut scores = vec![0.0f64; l * l];
    for i in 1..=l {
        let mut p = i - 1;
        for j in i..=l {
            if r[j - 1] > r[p] {
                p = j - 1;
            }
            let degree = rowpre[p * stride + l];
            let inside = rowpre[p * stride + j] - rowpre[p * stride + (i - 1)];
            scores[(j - 1) * l + (i - 1)] = degree - inside;
        }
    }
    IntervalScoreTable::from_scores(
        l,
        scores,
        Combiner::Max,
        Direction::Minimize,
        ObjectiveKind::TopRankConnection,
    )
}
