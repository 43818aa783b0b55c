//! Optimal contiguous partitioning.
//!
//! Bands 1..=L are split into K contiguous clusters so that the fold of
//! the per-interval scores is optimal. Because clusters are contiguous,
//! the best partition of a prefix decomposes over its last cluster and
//! dynamic programming finds the exact optimum in O(L^2 K) table reads.

use crate::cube::BandInterval;
use crate::error::{Error, Result};
use crate::objectives::IntervalScoreTable;

/// A contiguous band partition: K strictly increasing 1-based cluster
/// right-endpoints, the last equal to the band count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cbiv {
    boundaries: Vec<usize>,
    n_bands: usize,
}

impl Cbiv {
    pub fn new(boundaries: Vec<usize>, n_bands: usize) -> Result<Self> {
        if boundaries.is_empty() {
            return Err(Error::InvalidInput("partition needs at least one cluster".into()));
        }
        if boundaries[0] < 1 || !boundaries.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(format!(
                "cluster endpoints {boundaries:?} are not strictly increasing from 1"
            )));
        }
        if *boundaries.last().unwrap() != n_bands {
            return Err(Error::InvalidInput(format!(
                "last cluster must end at band {n_bands}, got {}",
                boundaries.last().unwrap()
            )));
        }
        Ok(Cbiv { boundaries, n_bands })
    }

    pub fn n_clusters(&self) -> usize {
        self.boundaries.len()
    }

    pub fn n_bands(&self) -> usize {
        self.n_bands
    }

    /// Cluster right-endpoints, 1-based.
    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    /// The clusters in band order.
    pub fn clusters(&self) -> impl Iterator<Item = BandInterval> + '_ {
        std::iter::once(0)
            .chain(self.boundaries.iter().copied())
            .zip(self.boundaries.iter().copied())
            .map(|(prev, hi)| BandInterval::new(prev + 1, hi).unwrap())
    }
}

/// The filled dynamic program: for each prefix length l and cluster count
/// k, the best achievable fold and the split point that achieves it.
#[derive(Debug, Clone)]
pub struct DpTables {
    size: usize,
    k_max: usize,
    // Indexed l * (k_max + 1) + k; cells with l < k are never written.
    m: Vec<f64>,
    q: Vec<usize>,
}

impl DpTables {
    /// Fill the tables for all cluster counts up to `k_max`.
    ///
    /// Ties keep the smallest split point, so the reported partition is
    /// the lexicographically smallest optimum.
    pub fn compute(table: &IntervalScoreTable, k_max: usize) -> Result<Self> {
        let l_max = table.size();
        if k_max == 0 || k_max > l_max {
            return Err(Error::InvalidInput(format!(
                "cluster count {k_max} out of range for {l_max} bands"
            )));
        }
        let combine = table.combiner();
        let direction = table.direction();
        let stride = k_max + 1;
        let mut m = vec![f64::NAN; (l_max + 1) * stride];
        let mut q = vec![0usize; (l_max + 1) * stride];

        for l in 1..=l_max {
            m[l * stride + 1] = table.score(1, l);
        }
        for k in 2..=k_max {
            for l in k..=l_max {
                let mut best_p = k - 1;
                let mut best = combine.apply(m[best_p * stride + (k - 1)], table.score(k, l));
                for p in k..l {
                    let cand = combine.apply(m[p * stride + (k - 1)], table.score(p + 1, l));
                    if direction.improves(cand, best) {
                        best = cand;
                        best_p = p;
                    }
                }
                m[l * stride + k] = best;
                q[l * stride + k] = best_p;
            }
        }
        Ok(DpTables { size: l_max, k_max, m, q })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Best fold over partitions of the first `l` bands into `k` clusters.
    pub fn value(&self, l: usize, k: usize) -> f64 {
        assert!(
            1 <= k && k <= self.k_max && k <= l && l <= self.size,
            "no table cell for l={l}, k={k}"
        );
        self.m[l * (self.k_max + 1) + k]
    }

    /// Best fold over partitions of the whole axis into `k` clusters.
    pub fn best_value(&self, k: usize) -> f64 {
        self.value(self.size, k)
    }

    /// Recover the optimal partition into `k` clusters.
    pub fn backtrack(&self, k: usize) -> Cbiv {
        assert!(1 <= k && k <= self.k_max, "no table for k={k}");
        let stride = self.k_max + 1;
        let mut bounds = vec![0usize; k];
        bounds[k - 1] = self.size;
        for kk in (1..k).rev() {
            bounds[kk - 1] = self.q[bounds[kk] * stride + (kk + 1)];
        }
        Cbiv { boundaries: bounds, n_bands: self.size }
    }
}

/// Find the optimal partition of the table's bands into `k` clusters.
/// Returns the partition and its fold value.
pub fn solve(table: &IntervalScoreTable, k: usize) -> Result<(Cbiv, f64)> {
    let tables = DpTables::compute(table, k)?;
    Ok((tables.backtrack(k), tables.best_value(k)))
}

/// Fold a partition's interval scores in cluster order (left fold, same
/// association order as the optimizer, so optimal values compare
/// bit-exactly).
pub fn evaluate(table: &IntervalScoreTable, cbiv: &Cbiv) -> f64 {
    assert_eq!(
        cbiv.n_bands(),
        table.size(),
        "partition and score table cover different band counts"
    );
    let mut acc = None;
    for c in cbiv.clusters() {
        let f = table.score(c.lo(), c.hi());
        acc = Some(match acc {
            None => f,
            Some(a) => table.combiner().apply(a, f),
        });
    }
    acc.unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{
        build_na_scorer, Combiner, Direction, ObjectiveKind,
    };
    use crate::similarity::local_scaling_similarity;
    use crate::HsiCube;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn table(
        size: usize,
        f: impl Fn(usize, usize) -> f64,
        combiner: Combiner,
        direction: Direction,
    ) -> IntervalScoreTable {
        let mut scores = vec![0.0; size * size];
        for hi in 1..=size {
            for lo in 1..=hi {
                scores[(hi - 1) * size + (lo - 1)] = f(lo, hi);
            }
        }
        IntervalScoreTable::from_scores(
            size,
            scores,
            combiner,
            direction,
            ObjectiveKind::NormalizedAssociation,
        )
        .unwrap()
    }

    #[test]
    fn cbiv_validates_and_iterates() {
        let c = Cbiv::new(vec![2, 5, 9], 9).unwrap();
        assert_eq!(c.n_clusters(), 3);
        let spans: Vec<(usize, usize)> = c.clusters().map(|iv| (iv.lo(), iv.hi())).collect();
        assert_eq!(spans, [(1, 2), (3, 5), (6, 9)]);

        assert!(Cbiv::new(vec![], 4).is_err());
        assert!(Cbiv::new(vec![2, 2, 4], 4).is_err());
        assert!(Cbiv::new(vec![3, 2, 4], 4).is_err());
        assert!(Cbiv::new(vec![2, 3], 4).is_err());
        assert!(Cbiv::new(vec![0, 4], 4).is_err());
    }

    #[test]
    fn single_cluster_is_the_whole_axis() {
        let t = table(6, |lo, hi| (lo * 10 + hi) as f64, Combiner::Sum, Direction::Maximize);
        let (cbiv, val) = solve(&t, 1).unwrap();
        assert_eq!(cbiv.boundaries(), &[6]);
        assert_eq!(val, t.score(1, 6));
    }

    #[test]
    fn l_clusters_are_all_singletons() {
        let t = table(5, |lo, hi| (lo + hi) as f64, Combiner::Sum, Direction::Maximize);
        let (cbiv, val) = solve(&t, 5).unwrap();
        assert_eq!(cbiv.boundaries(), &[1, 2, 3, 4, 5]);
        assert_eq!(val, (1..=5).map(|i| 2.0 * i as f64).sum::<f64>());
    }

    #[test]
    fn maximize_sum_hand_case() {
        // f(1,1)=5 f(1,2)=2 f(1,3)=7 f(2,2)=9 f(2,3)=1 f(3,3)=3
        let f = |lo: usize, hi: usize| match (lo, hi) {
            (1, 1) => 5.0,
            (1, 2) => 2.0,
            (1, 3) => 7.0,
            (2, 2) => 9.0,
            (2, 3) => 1.0,
            (3, 3) => 3.0,
            _ => unreachable!(),
        };
        let t = table(3, f, Combiner::Sum, Direction::Maximize);
        // {1}{2,3} -> 5 + 1 = 6; {1,2}{3} -> 2 + 3 = 5.
        let (cbiv, val) = solve(&t, 2).unwrap();
        assert_eq!(val, 6.0);
        assert_eq!(cbiv.boundaries(), &[1, 3]);
        // And with three clusters every band stands alone.
        let (cbiv3, val3) = solve(&t, 3).unwrap();
        assert_eq!(cbiv3.boundaries(), &[1, 2, 3]);
        assert_eq!(val3, 17.0);
    }

    #[test]
    fn minimize_max_hand_case() {
        let f = |lo: usize, hi: usize| match (lo, hi) {
            (1, 1) => 5.0,
            (1, 2) => 2.0,
            (1, 3) => 7.0,
            (2, 2) => 9.0,
            (2, 3) => 1.0,
            (3, 3) => 3.0,
            _ => unreachable!(),
        };
        let t = table(3, f, Combiner::Max, Direction::Minimize);
        // {1}{2,3} -> max(5,1)=5; {1,2}{3} -> max(2,3)=3.
        let (cbiv, val) = solve(&t, 2).unwrap();
        assert_eq!(val, 3.0);
        assert_eq!(cbiv.boundaries(), &[2, 3]);
    }

    #[test]
    fn constant_scores_give_the_lexicographically_smallest_partition() {
        let t = table(8, |_, _| 1.25, Combiner::Sum, Direction::Maximize);
        for k in 1..=8 {
            let (cbiv, _) = solve(&t, k).unwrap();
            let mut expect: Vec<usize> = (1..k).collect();
            expect.push(8);
            assert_eq!(cbiv.boundaries(), expect.as_slice(), "k={k}");
        }
    }

    #[test]
    fn rejects_out_of_range_cluster_counts() {
        let t = table(4, |lo, hi| (lo + hi) as f64, Combiner::Sum, Direction::Maximize);
        assert!(solve(&t, 0).is_err());
        assert!(solve(&t, 5).is_err());
    }

    #[test]
    fn deterministic_across_runs() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut scores = vec![0.0; 15 * 15];
        for hi in 1..=15 {
            for lo in 1..=hi {
                scores[(hi - 1) * 15 + (lo - 1)] = rng.random_range(-5.0..5.0);
            }
        }
        let t = IntervalScoreTable::from_scores(
            15,
            scores,
            Combiner::Sum,
            Direction::Maximize,
            ObjectiveKind::NormalizedAssociation,
        )
        .unwrap();
        let (c1, v1) = solve(&t, 6).unwrap();
        let (c2, v2) = solve(&t, 6).unwrap();
        assert_eq!(c1, c2);
        assert_eq!(v1.to_bits(), v2.to_bits());
    }

    #[test]
    fn reported_value_matches_refolding_the_partition() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let bands: Vec<Vec<f64>> = (0..18)
            .map(|b| {
                (0..40)
                    .map(|_| rng.random_range(0.0..1.0) + (b / 6) as f64)
                    .collect()
            })
            .collect();
        let cube = HsiCube::from_bands(1, 40, bands).unwrap();
        let w = local_scaling_similarity(&cube, 7).unwrap();
        let t = build_na_scorer(&w, 4).unwrap();
        let (cbiv, val) = solve(&t, 4).unwrap();
        assert_eq!(val.to_bits(), evaluate(&t, &cbiv).to_bits());
    }

    /// With more clusters available, the best within-association sum can
    /// only stay equal or grow on similarity-derived tables.
    #[test]
    fn association_optimum_is_nondecreasing_in_cluster_count() {
        for seed in [7u64, 19, 31] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let bands: Vec<Vec<f64>> = (0..16)
                .map(|_| (0..30).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let cube = HsiCube::from_bands(1, 30, bands).unwrap();
            let w = local_scaling_similarity(&cube, 7).unwrap();
            let t = build_na_scorer(&w, 1).unwrap();
            let tables = DpTables::compute(&t, 16).unwrap();
            for k in 2..=16 {
                assert!(
                    tables.best_value(k) >= tables.best_value(k - 1) - 1e-12,
                    "seed {seed}: k={k} dropped from {} to {}",
                    tables.best_value(k - 1),
                    tables.best_value(k)
                );
            }
        }
    }

    proptest! {
        /// No partition beats the reported optimum, and the reported
        /// value refolds from the reported partition.
        #[test]
        fn optimum_dominates_random_partitions(
            size in 2usize..12,
            seed in 0u64..500,
            sum in proptest::bool::ANY,
            maximize in proptest::bool::ANY,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut scores = vec![0.0; size * size];
            for hi in 1..=size {
                for lo in 1..=hi {
                    scores[(hi - 1) * size + (lo - 1)] = rng.random_range(-10.0..10.0);
                }
            }
            let t = IntervalScoreTable::from_scores(
                size,
                scores,
                if sum { Combiner::Sum } else { Combiner::Max },
                if maximize { Direction::Maximize } else { Direction::Minimize },
                ObjectiveKind::NormalizedAssociation,
            ).unwrap();
            let k = rng.random_range(1..=size);
            let (cbiv, val) = solve(&t, k).unwrap();
            prop_assert_eq!(cbiv.n_clusters(), k);
            prop_assert_eq!(val.to_bits(), evaluate(&t, &cbiv).to_bits());

            // A handful of random rival partitions with the same k.
            for _ in 0..20 {
                let mut cut: Vec<usize> = (1..size).collect();
                let (shuffled, _) = cut.partial_shuffle(&mut rng, k - 1);
                let mut bounds: Vec<usize> = shuffled.to_vec();
                bounds.sort_unstable();
                bounds.push(size);
                let rival = Cbiv::new(bounds, size).unwrap();
                let rv = evaluate(&t, &rival);
                prop_assert!(
                    !t.direction().improves(rv, val),
                    "rival {:?} = {} beats {}",
                    rival.boundaries(), rv, val
                );
            }
        }
    }
}
