//! Exhaustive reference optimizer.
//!
//! Enumerates every contiguous partition and refolds each one through the
//! same evaluator as the dynamic program, so optimizer results can be
//! checked value-for-value on small inputs.

use crate::dp::{evaluate, Cbiv};
use crate::error::{Error, Result};
use crate::objectives::IntervalScoreTable;

/// Hard cap on partitions the exhaustive search will visit.
pub const MAX_VISITED: u64 = 1_000_000;

/// Result of an exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    pub partition: Cbiv,
    pub value: f64,
    /// Number of partitions evaluated; always the full count.
    pub visited: u64,
}

/// Number of contiguous partitions of `n_bands` bands into `k` clusters,
/// i.e. C(n_bands - 1, k - 1). `None` when it exceeds u64.
pub fn partition_count(n_bands: usize, k: usize) -> Option<u64> {
    if k == 0 || k > n_bands {
        return Some(0);
    }
    let n = (n_bands - 1) as u128;
    let mut r = (k - 1) as u128;
    if r > n - r {
        r = n - r;
    }
    let mut acc: u128 = 1;
    for i in 1..=r {
        acc = acc.checked_mul(n - r + i)?;
        acc /= i;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Search every partition of the table's bands into `k` clusters.
///
/// Partitions are visited in lexicographic boundary order and only strict
/// improvements replace the incumbent, so among equal optima the
/// lexicographically smallest boundary vector wins. Refuses inputs with
/// more than [`MAX_VISITED`] partitions.
pub fn brute_force_solve(table: &IntervalScoreTable, k: usize) -> Result<BruteForceResult> {
    let l = table.size();
    if k == 0 || k > l {
        return Err(Error::InvalidInput(format!(
            "cluster count {k} out of range for {l} bands"
        )));
    }
    match partition_count(l, k) {
        Some(c) if c <= MAX_VISITED => {}
        _ => {
            return Err(Error::InvalidInput(format!(
                "too many partitions of {l} bands into {k} clusters to enumerate"
            )))
        }
    }

    let direction = table.direction();
    let mut bounds: Vec<usize> = (1..k).chain(std::iter::once(l)).collect();
    let mut best: Option<(Cbiv, f64)> = None;
    let mut visited = 0u64;
    loop {
        let cand = Cbiv::new(bounds.clone(), l).unwrap();
        let val = evaluate(table, &cand);
        visited += 1;
        let replace = match &best {
            None => true,
            Some((_, incumbent)) => direction.improves(val, *incumbent),
        };
        if replace {
            best = Some((cand, val));
        }

        // Advance the k-1 interior boundaries to the next combination of
        // {1, .., l-1} in lexicographic order.
        let mut pos = k.checked_sub(2);
        loop {
            match pos {
                None => {
                    let (partition, value) = best.unwrap();
                    return Ok(BruteForceResult { partition, value, visited });
                }
                Some(p) => {
                    let limit = l - (k - 1 - p);
                    if bounds[p] < limit {
                        bounds[p] += 1;
                        for i in (p + 1)..(k - 1) {
                            bounds[i] = bounds[i - 1] + 1;
                        }
                        break;
                    }
                    pos = p.checked_sub(1);
                }
            }
        }
    }
}
