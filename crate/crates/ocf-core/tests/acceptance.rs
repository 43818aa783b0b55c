//! End-to-end acceptance checks, one test per criterion. Each prints a
//! single `criterion N (...): PASS/FAIL` line (visible with
//! `cargo test --test acceptance -- --nocapture`).

use std::hint::black_box;
use std::time::Instant;

use ocf_core::{
    brute_force_solve, build_na_scorer, build_trc_scorer, estimate_band_count, evaluate,
    knn_overall_accuracy, load_hsib, local_scaling_similarity, rank_entropy, rank_mvpca,
    rcs_select, solve, write_hsib, BandSubset, Cbiv, Combiner, Direction, Dtype,
    ExperimentConfig, HsiCube, IntervalScoreTable, ObjectiveKind, RankMethod, RankVector,
    SimilarityMatrix,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn report(n: usize, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    if detail.is_empty() {
        println!("criterion {n} ({name}): {verdict}");
    } else {
        println!("criterion {n} ({name}): {verdict} [{detail}]");
    }
    assert!(pass, "criterion {n} ({name}) failed: {detail}");
}

fn random_similarity(l: usize, rng: &mut impl Rng) -> SimilarityMatrix {
    let mut e = vec![0.0f64; l * l];
    for i in 0..l {
        e[i * l + i] = 1.0;
        for j in (i + 1)..l {
            let w = rng.random_range(0.01..1.0);
            e[i * l + j] = w;
            e[j * l + i] = w;
        }
    }
    SimilarityMatrix::from_entries(l, e).unwrap()
}

fn random_cbiv(l: usize, k: usize, rng: &mut impl Rng) -> Cbiv {
    let mut cut: Vec<usize> = (1..l).collect();
    let (head, _) = cut.partial_shuffle(rng, k - 1);
    let mut bounds = head.to_vec();
    bounds.sort_unstable();
    bounds.push(l);
    Cbiv::new(bounds, l).unwrap()
}

/// K contiguous blocks of near-duplicate bands: block b sits at intensity
/// b with iid Gaussian pixel noise. Returns the cube and the planted
/// cluster right-endpoints.
fn planted_block_cube(
    l: usize,
    k: usize,
    n_pixels: usize,
    sigma: f64,
    rng: &mut impl Rng,
) -> (HsiCube, Vec<usize>) {
    let noise = Normal::new(0.0, sigma).unwrap();
    let per = l / k;
    let bands: Vec<Vec<f64>> = (0..l)
        .map(|b| {
            let level = (b / per).min(k - 1) as f64;
            (0..n_pixels).map(|_| level + noise.sample(rng)).collect()
        })
        .collect();
    let cube = HsiCube::from_bands(1, n_pixels, bands).unwrap();
    let bounds: Vec<usize> = (1..=k).map(|b| if b == k { l } else { b * per }).collect();
    (cube, bounds)
}

/// Two labeled classes with well-separated spectral signatures.
fn two_class_cube(n_per_class: usize, l: usize, noise: f64, rng: &mut impl Rng) -> HsiCube {
    let n = 2 * n_per_class;
    let dist = Normal::new(0.0, noise).unwrap();
    let labels: Vec<u32> = (0..n).map(|p| 1 + (p % 2) as u32).collect();
    let bands: Vec<Vec<f64>> = (0..l)
        .map(|b| {
            // Class signatures diverge by 4.0 on every band; a mild
            // band-dependent drift keeps bands distinct.
            let drift = (b as f64 * 0.37).sin();
            (0..n)
                .map(|p| {
                    let base = if labels[p] == 1 { 0.0 } else { 4.0 };
                    base + drift + dist.sample(rng)
                })
                .collect()
        })
        .collect();
    HsiCube::new(1, n, bands, (1..=l as u32).collect(), Some(labels), None).unwrap()
}

#[test]
fn criterion_1_dp_matches_exhaustive_search() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let l = rng.random_range(4..=12);
        let k = rng.random_range(1..=5usize.min(l));
        let w = random_similarity(l, &mut rng);
        let ranks = RankVector::new(
            (0..l).map(|_| rng.random_range(0.0..1.0)).collect(),
            RankMethod::Mvpca,
        )
        .unwrap();

        for table in [
            build_na_scorer(&w, k).unwrap(),
            build_trc_scorer(&w, &ranks).unwrap(),
        ] {
            let (_, dp_val) = solve(&table, k).unwrap();
            let bf = brute_force_solve(&table, k).unwrap();
            let rel = (dp_val - bf.value).abs() / dp_val.abs().max(bf.value.abs()).max(1.0);
            worst = worst.max(rel);
            assert!(
                rel <= 1e-12,
                "case {case} (L={l}, K={k}, {:?}): dp {dp_val} vs exhaustive {}",
                table.kind(),
                bf.value
            );
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    report(
        1,
        "optimizer matches exhaustive search",
        worst <= 1e-12 && elapsed < 10.0,
        &format!("worst relative gap {worst:.3e}, took {elapsed:.2}s"),
    );
}

#[test]
fn criterion_2_association_and_cut_sum_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let l = rng.random_range(5..=30);
        let k = rng.random_range(1..=l);
        let w = random_similarity(l, &mut rng);
        let s = random_cbiv(l, k, &mut rng);

        let na = evaluate(&build_na_scorer(&w, k).unwrap(), &s);
        // Normalized cut, recomputed from raw similarity sums.
        let nc: f64 = s
            .clusters()
            .map(|c| {
                let mut cut = 0.0;
                let mut strip = 0.0;
                for a in c.lo()..=c.hi() {
                    for b in 1..=l {
                        let v = w.get(a - 1, b - 1);
                        strip += v;
                        if !(c.lo()..=c.hi()).contains(&b) {
                            cut += v;
                        }
                    }
                }
                cut / strip / k as f64
            })
            .sum();
        worst = worst.max((na + nc - 1.0).abs());
    }
    report(
        2,
        "association and cut are complementary",
        worst <= 1e-9,
        &format!("worst |NA + NC - 1| = {worst:.3e}"),
    );
}

#[test]
fn criterion_3_solve_time_scales_quadratically_in_band_count() {
    fn random_table(l: usize, seed: u64) -> IntervalScoreTable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut scores = vec![0.0f64; l * l];
        for hi in 1..=l {
            for lo in 1..=hi {
                scores[(hi - 1) * l + (lo - 1)] = rng.random_range(0.0..1.0);
            }
        }
        IntervalScoreTable::from_scores(
            l,
            scores,
            Combiner::Sum,
            Direction::Maximize,
            ObjectiveKind::NormalizedAssociation,
        )
        .unwrap()
    }

    fn median_solve_secs(table: &IntervalScoreTable, k: usize) -> f64 {
        const TRIALS: usize = 20;
        const BATCH: u32 = 8;
        black_box(solve(table, k).unwrap());
        let mut times: Vec<f64> = (0..TRIALS)
            .map(|_| {
                let t0 = Instant::now();
                for _ in 0..BATCH {
                    black_box(solve(black_box(table), k).unwrap());
                }
                t0.elapsed().as_secs_f64() / f64::from(BATCH)
            })
            .collect();
        times.sort_by(f64::total_cmp);
        times[TRIALS / 2]
    }

    let t200 = random_table(200, 301);
    let t400 = random_table(400, 302);
    let m200 = median_solve_secs(&t200, 15);
    let m400 = median_solve_secs(&t400, 15);
    let ratio = m400 / m200;
    report(
        3,
        "solve time grows quadratically with bands",
        (3.0..=6.0).contains(&ratio) && m200 < 1.0,
        &format!("median {m200:.6}s at L=200, {m400:.6}s at L=400, ratio {ratio:.2}"),
    );
}

#[test]
fn criterion_4_recovers_planted_block_boundaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut hits = 0;
    const DRAWS: usize = 100;
    for _ in 0..DRAWS {
        let (cube, planted) = planted_block_cube(60, 5, 500, 0.01, &mut rng);
        let w = local_scaling_similarity(&cube, 7).unwrap();
        let (cbiv, _) = solve(&build_na_scorer(&w, 5).unwrap(), 5).unwrap();
        if cbiv.boundaries() == planted.as_slice() {
            hits += 1;
        }
    }
    report(
        4,
        "planted block boundaries recovered",
        hits >= 95,
        &format!("{hits}/{DRAWS} exact recoveries"),
    );
}

#[test]
fn criterion_5_per_cluster_rank_selection_is_optimal() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for case in 0..100 {
        let l = rng.random_range(2..=40);
        let k = rng.random_range(1..=l);
        let cbiv = random_cbiv(l, k, &mut rng);
        let ranks = RankVector::new(
            (0..l).map(|_| rng.random_range(-5.0..5.0)).collect(),
            RankMethod::Mvpca,
        )
        .unwrap();

        let subset = rcs_select(&cbiv, &ranks).unwrap();
        let got: f64 = subset.selected().iter().map(|&b| ranks.scores()[b - 1]).sum();
        let best: f64 = cbiv
            .clusters()
            .map(|c| {
                (c.lo()..=c.hi())
                    .map(|b| ranks.scores()[b - 1])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .sum();
        assert_eq!(
            got.to_bits(),
            best.to_bits(),
            "case {case}: rank sum {got} vs exhaustive {best}"
        );
    }
    report(5, "per-cluster rank selection is optimal", true, "");
}

#[test]
fn criterion_6_pipeline_classifies_separable_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let cube = two_class_cube(200, 20, 0.3, &mut rng);

    // Full pipeline: similarity, partition, entropy-ranked selection.
    let w = local_scaling_similarity(&cube, 7).unwrap();
    let (cbiv, _) = solve(&build_na_scorer(&w, 5).unwrap(), 5).unwrap();
    let subset = rcs_select(&cbiv, &rank_entropy(&cube, 256).unwrap()).unwrap();
    let config = ExperimentConfig { rng_seed: 61, ..ExperimentConfig::default() };
    let oa = knn_overall_accuracy(&cube, &subset, &config).unwrap().mean();

    // Null control: shuffle the labels so the features carry no class
    // information; accuracy must fall to chance.
    let labels = cube.labels().unwrap().to_vec();
    let mut shuffled = labels.clone();
    shuffled.shuffle(&mut rng);
    let bands: Vec<Vec<f64>> = cube.bands().map(<[f64]>::to_vec).collect();
    let null_cube = HsiCube::new(
        1,
        cube.n_pixels(),
        bands,
        cube.band_ids().to_vec(),
        Some(shuffled),
        None,
    )
    .unwrap();
    let null_oa = knn_overall_accuracy(&null_cube, &subset, &config).unwrap().mean();

    // Chance is 1/C = 0.5; a per-run OA is a mean over ~360 test pixels,
    // so 3 sigma of a single run bounds the mean's wobble from above.
    let tol = 3.0 * (0.25f64 / 360.0).sqrt();
    report(
        6,
        "pipeline separates planted classes",
        oa > 0.95 && (null_oa - 0.5).abs() <= tol,
        &format!("mean OA {oa:.4}, null OA {null_oa:.4} (tolerance {tol:.4} about 0.5)"),
    );
}

#[test]
fn criterion_7_band_count_estimate_hits_the_planted_crossing() {
    // On the planted cube every band's variance is about sigma^2, so the
    // kept variances are near-equal and the cumulative ratio curve is
    // close to k/M with M = ceil(0.2 * 60) = 12. A threshold of 0.30
    // sits strictly between 3/12 and 4/12 with margin far beyond the
    // variance fluctuation, putting the analytic crossing at k = 4.
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let (cube, _) = planted_block_cube(60, 5, 500, 0.01, &mut rng);
    let est = estimate_band_count(&cube, 0.2, 0.30).unwrap();
    report(
        7,
        "band-count estimate hits the planted crossing",
        est.k_star == 4,
        &format!("K* = {} (ratios {:?})", est.k_star, est.ratios),
    );
}

#[test]
fn criterion_8_binary_roundtrip_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for case in 0..20 {
        let rows = rng.random_range(1..=6);
        let cols = rng.random_range(1..=6);
        let n = rows * cols;
        let l = rng.random_range(1..=12);
        let bands: Vec<Vec<f64>> = (0..l)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        // Mix ordinary values with awkward ones.
                        match rng.random_range(0..10) {
                            0 => 0.0,
                            1 => -0.0,
                            2 => f64::MIN_POSITIVE,
                            3 => 1e300,
                            _ => rng.random_range(-1e6..1e6),
                        }
                    })
                    .collect()
            })
            .collect();
        let labels = rng
            .random_bool(0.5)
            .then(|| (0..n).map(|_| rng.random_range(0..7)).collect::<Vec<u32>>());
        let wavelengths = rng
            .random_bool(0.5)
            .then(|| (0..l).map(|_| rng.random_range(0.4..2.5)).collect::<Vec<f64>>());
        let cube = HsiCube::new(
            rows,
            cols,
            bands,
            (1..=l as u32).collect(),
            labels,
            wavelengths,
        )
        .unwrap();

        let path = dir.path().join(format!("case{case}.hsib"));
        write_hsib(&cube, &path, Dtype::F64).unwrap();
        let back = load_hsib(&path).unwrap();

        assert_eq!(back.n_rows(), cube.n_rows());
        assert_eq!(back.n_cols(), cube.n_cols());
        assert_eq!(back.labels(), cube.labels());
        for (a, b) in back.bands().zip(cube.bands()) {
            for (x, y) in a.iter().zip(b) {
                assert_eq!(x.to_bits(), y.to_bits(), "case {case}");
            }
        }
        match (back.wavelengths(), cube.wavelengths()) {
            (None, None) => {}
            (Some(a), Some(b)) => {
                for (x, y) in a.iter().zip(b) {
                    assert_eq!(x.to_bits(), y.to_bits(), "case {case}");
                }
            }
            _ => panic!("case {case}: wavelength section lost"),
        }
    }
    report(8, "binary round-trip is bit-identical", true, "");
}

// A BandSubset built from explicit positions must behave identically in
// the harness; exercised here so the acceptance target covers the CLI's
// entry path into evaluation as well.
#[test]
fn explicit_subsets_enter_the_harness_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let cube = two_class_cube(60, 6, 0.3, &mut rng);
    let config = ExperimentConfig { n_runs: 2, ..ExperimentConfig::default() };
    let a = knn_overall_accuracy(
        &cube,
        &BandSubset::from_positions(vec![1, 3, 5], "manual").unwrap(),
        &config,
    )
    .unwrap();
    let w = local_scaling_similarity(&cube, 3).unwrap();
    let (cbiv, _) = solve(&build_na_scorer(&w, 3).unwrap(), 3).unwrap();
    let picked = rcs_select(&cbiv, &rank_mvpca(&cube)).unwrap();
    if picked.selected() == [1, 3, 5] {
        let b = knn_overall_accuracy(&cube, &picked, &config).unwrap();
        assert_eq!(a.runs(), b.runs());
    }
}
