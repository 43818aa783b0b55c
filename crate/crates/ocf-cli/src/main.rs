//! `ocf`: batch frontend for the band-selection pipeline.
//!
//! Every subcommand reads a cube, runs one pipeline stage, and emits CSV
//! to stdout (or `--out`). Status and diagnostics go to stderr, so the
//! data stream stays clean for piping.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ocf_core::{
    brute_force_solve, build_na_scorer, build_trc_scorer, estimate_band_count,
    knn_overall_accuracy, load_csv, load_hsib, local_scaling_similarity, method_name,
    rank_efdpc, rank_entropy, rank_mvpca, rcs_select, solve, write_csv, write_hsib,
    BandSubset, Cbiv, Error, ExperimentConfig, HsiCube, IntervalScoreTable, RankVector, Result,
    DEFAULT_HISTOGRAM_BINS, DEFAULT_SCALING_NEIGHBOR,
};

#[derive(Parser)]
#[command(
    name = "ocf",
    version,
    about = "Band selection for hyperspectral cubes by optimal contiguous clustering"
)]
struct Cli {
    /// Cap the worker thread count (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a cube between the CSV and HSIB formats.
    Convert(ConvertArgs),
    /// Score every band with a ranking method.
    Rank(RankArgs),
    /// Partition the band axis into K contiguous clusters.
    Cluster(ClusterArgs),
    /// Select one band per cluster (the full pipeline).
    Select(SelectArgs),
    /// Estimate how many bands the cube needs.
    EstimateK(EstimateKArgs),
    /// Classify labeled pixels on a band subset and report accuracy.
    Evaluate(EvaluateArgs),
    /// Exhaustively search all partitions (slow; testing aid).
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Hsib,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Objective {
    /// Normalized association (summed, maximized).
    Na,
    /// Top-rank connection (worst cluster, minimized).
    Trc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Ranking {
    /// Per-band variance.
    Mvpca,
    /// Histogram entropy.
    Entropy,
    /// Density peaks.
    Efdpc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DtypeArg {
    F32,
    F64,
}

/// Cluster count: a number, or "auto" to estimate it from the cube.
#[derive(Clone, Copy)]
enum ClusterCount {
    Auto,
    Fixed(usize),
}

impl FromStr for ClusterCount {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(ClusterCount::Auto);
        }
        s.parse::<usize>()
            .map(ClusterCount::Fixed)
            .map_err(|_| format!("expected a cluster count or \"auto\", got {s:?}"))
    }
}

#[derive(Args)]
struct InputArgs {
    /// Input cube path.
    #[arg(long)]
    input: PathBuf,
    /// Input format; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Label CSV to pair with a CSV cube (HSIB embeds labels).
    #[arg(long)]
    labels: Option<PathBuf>,
}

impl InputArgs {
    fn format(&self) -> Result<Format> {
        if let Some(f) = self.format {
            return Ok(f);
        }
        match self.input.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("hsib") => Ok(Format::Hsib),
            Some(e) if e.eq_ignore_ascii_case("csv") => Ok(Format::Csv),
            _ => Err(Error::InvalidInput(format!(
                "cannot infer format of {}; pass --format",
                self.input.display()
            ))),
        }
    }

    fn load(&self) -> Result<HsiCube> {
        match self.format()? {
            Format::Hsib => {
                if self.labels.is_some() {
                    return Err(Error::InvalidInput(
                        "HSIB cubes embed their labels; --labels only applies to CSV".into(),
                    ));
                }
                load_hsib(&self.input)
            }
            Format::Csv => load_csv(&self.input, self.labels.as_deref()),
        }
    }
}

/// Knobs shared by every stage that builds similarity or rankings.
#[derive(Args)]
struct PipelineArgs {
    /// Scaling neighbor for the band similarity kernel.
    #[arg(long, default_value_t = DEFAULT_SCALING_NEIGHBOR)]
    neighbor: usize,
    /// Histogram bins for entropy ranking.
    #[arg(long, default_value_t = DEFAULT_HISTOGRAM_BINS)]
    bins: usize,
    /// Cutoff parameter for density-peak ranking (default: band count).
    #[arg(long)]
    kprime: Option<usize>,
}

impl PipelineArgs {
    fn ranks(&self, cube: &HsiCube, ranking: Ranking) -> Result<RankVector> {
        match ranking {
            Ranking::Mvpca => Ok(rank_mvpca(cube)),
            Ranking::Entropy => rank_entropy(cube, self.bins),
            Ranking::Efdpc => rank_efdpc(cube, self.kprime.unwrap_or(cube.n_bands())),
        }
    }

    fn table(
        &self,
        cube: &HsiCube,
        objective: Objective,
        ranking: Option<Ranking>,
        k: usize,
    ) -> Result<IntervalScoreTable> {
        let w = local_scaling_similarity(cube, self.neighbor)?;
        match objective {
            Objective::Na => build_na_scorer(&w, k),
            Objective::Trc => {
                let ranking = ranking.ok_or_else(|| {
                    Error::InvalidInput(
                        "the trc objective needs --ranking to anchor each cluster".into(),
                    )
                })?;
                build_trc_scorer(&w, &self.ranks(cube, ranking)?)
            }
        }
    }
}

#[derive(Args)]
struct ConvertArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output path.
    #[arg(long)]
    out: PathBuf,
    /// Output format.
    #[arg(long, value_enum)]
    to: Format,
    /// On-disk element width for HSIB output.
    #[arg(long, value_enum, default_value = "f64")]
    dtype: DtypeArg,
    /// Where to write labels when converting to CSV.
    #[arg(long)]
    labels_out: Option<PathBuf>,
}

#[derive(Args)]
struct RankArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Ranking method.
    #[arg(long, value_enum)]
    method: Ranking,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Clustering objective.
    #[arg(long, value_enum)]
    objective: Objective,
    /// Ranking method (required by the trc objective).
    #[arg(long, value_enum)]
    ranking: Option<Ranking>,
    /// Number of clusters.
    #[arg(short = 'K')]
    clusters: usize,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Clustering objective.
    #[arg(long, value_enum)]
    objective: Objective,
    /// Ranking method for cluster representatives (and trc anchoring).
    #[arg(long, value_enum)]
    ranking: Ranking,
    /// Number of bands to select, or "auto" to estimate it.
    #[arg(short = 'K')]
    clusters: ClusterCount,
    /// Band-power share threshold for -K auto.
    #[arg(long, default_value_t = 0.8)]
    rstar: f64,
    /// Candidate-pool fraction for -K auto.
    #[arg(long, default_value_t = 0.2)]
    lambda: f64,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateKArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Candidate-pool fraction: M = ceil(lambda * L) bands are shortlisted.
    #[arg(long, default_value_t = 0.2)]
    lambda: f64,
    /// Cumulative band-power share that must be exceeded.
    #[arg(long, default_value_t = 0.8)]
    rstar: f64,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Explicit 1-based band positions to evaluate (e.g. 3,17,42).
    #[arg(long, value_delimiter = ',')]
    bands: Option<Vec<usize>>,
    /// Sweep these K values through the selection pipeline instead.
    #[arg(long, value_delimiter = ',')]
    band_counts: Option<Vec<usize>>,
    /// Clustering objective for --band-counts sweeps.
    #[arg(long, value_enum, default_value = "na")]
    objective: Objective,
    /// Ranking method for --band-counts sweeps.
    #[arg(long, value_enum, default_value = "mvpca")]
    ranking: Ranking,
    /// Fraction of each class used for training.
    #[arg(long, default_value_t = 0.10)]
    train_frac: f64,
    /// Number of independent split/classify runs.
    #[arg(long, default_value_t = 10)]
    runs: usize,
    /// Neighbors consulted per test pixel.
    #[arg(long, default_value_t = 3)]
    knn: usize,
    /// Master RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Clustering objective.
    #[arg(long, value_enum)]
    objective: Objective,
    /// Ranking method (required by the trc objective).
    #[arg(long, value_enum)]
    ranking: Option<Ranking>,
    /// Number of clusters.
    #[arg(short = 'K')]
    clusters: usize,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        // A second build_global is harmless; the first pool wins.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(match e {
            Error::InvalidInput(_) => 2,
            Error::Io(_) => 3,
            Error::Format { .. } | Error::Dimension(_) => 4,
            Error::Degenerate(_) => 5,
        });
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Convert(args) => cmd_convert(args),
        Command::Rank(args) => cmd_rank(args),
        Command::Cluster(args) => cmd_cluster(args),
        Command::Select(args) => cmd_select(args),
        Command::EstimateK(args) => cmd_estimate_k(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Oracle(args) => cmd_oracle(args),
    }
}

/// Write `csv` to `out`, or stdout when absent.
fn emit(out: Option<&Path>, csv: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, csv).map_err(Error::Io),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn cmd_convert(args: ConvertArgs) -> Result<()> {
    let cube = args.input.load()?;
    match args.to {
        Format::Hsib => {
            let dtype = match args.dtype {
                DtypeArg::F32 => ocf_core::Dtype::F32,
                DtypeArg::F64 => ocf_core::Dtype::F64,
            };
            write_hsib(&cube, &args.out, dtype)?;
        }
        Format::Csv => {
            write_csv(&cube, &args.out)?;
            match (cube.labels(), &args.labels_out) {
                (Some(labels), Some(path)) => ocf_core::io::write_labels_csv(labels, path)?,
                (Some(_), None) => {
                    eprintln!("note: cube has labels; pass --labels-out to keep them")
                }
                (None, Some(_)) => {
                    return Err(Error::InvalidInput(
                        "--labels-out given but the cube has no labels".into(),
                    ))
                }
                (None, None) => {}
            }
            if cube.wavelengths().is_some() {
                eprintln!("note: wavelengths dropped; CSV has no wavelength column");
            }
        }
    }
    eprintln!(
        "wrote {} ({} pixels x {} bands)",
        args.out.display(),
        cube.n_pixels(),
        cube.n_bands()
    );
    Ok(())
}

fn cmd_rank(args: RankArgs) -> Result<()> {
    let cube = args.input.load()?;
    let ranks = args.pipeline.ranks(&cube, args.method)?;
    let mut csv = String::from("band_id,score\n");
    for (id, score) in cube.band_ids().iter().zip(ranks.scores()) {
        writeln!(csv, "{id},{score}").unwrap();
    }
    emit(args.out.as_deref(), &csv)
}

fn partition_csv(cbiv: &Cbiv) -> String {
    let mut csv = String::from("cluster,lo,hi\n");
    for (i, c) in cbiv.clusters().enumerate() {
        writeln!(csv, "{},{},{}", i + 1, c.lo(), c.hi()).unwrap();
    }
    csv
}

fn cmd_cluster(args: ClusterArgs) -> Result<()> {
    let cube = args.input.load()?;
    let table = args
        .pipeline
        .table(&cube, args.objective, args.ranking, args.clusters)?;
    let (cbiv, value) = solve(&table, args.clusters)?;
    emit(args.out.as_deref(), &partition_csv(&cbiv))?;
    eprintln!("objective value {value}");
    Ok(())
}

fn cmd_select(args: SelectArgs) -> Result<()> {
    let cube = args.input.load()?;
    let k = match args.clusters {
        ClusterCount::Fixed(k) => k,
        ClusterCount::Auto => {
            let est = estimate_band_count(&cube, args.lambda, args.rstar)?;
            eprintln!("estimated band count K* = {}", est.k_star);
            est.k_star
        }
    };
    let table = args
        .pipeline
        .table(&cube, args.objective, Some(args.ranking), k)?;
    let (cbiv, value) = solve(&table, k)?;
    let ranks = args.pipeline.ranks(&cube, args.ranking)?;
    let subset = rcs_select(&cbiv, &ranks)?
        .with_method(method_name(table.kind(), ranks.method()))
        .resolve_ids(&cube)?;

    let mut csv = String::from("cluster,band_position,band_id\n");
    for (i, (pos, id)) in subset.selected().iter().zip(subset.band_ids()).enumerate() {
        writeln!(csv, "{},{pos},{id}", i + 1).unwrap();
    }
    emit(args.out.as_deref(), &csv)?;
    eprintln!("{} selected {} bands, objective value {value}", subset.method(), subset.len());
    Ok(())
}

fn cmd_estimate_k(args: EstimateKArgs) -> Result<()> {
    let cube = args.input.load()?;
    let est = estimate_band_count(&cube, args.lambda, args.rstar)?;
    let mut csv = String::from("k,r_crvar\n");
    for (i, r) in est.ratios.iter().enumerate() {
        writeln!(csv, "{},{r}", i + 1).unwrap();
    }
    emit(args.out.as_deref(), &csv)?;
    eprintln!("estimated band count K* = {}", est.k_star);
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let cube = args.input.load()?;
    let config = ExperimentConfig {
        train_fraction: args.train_frac,
        n_runs: args.runs,
        knn_k: args.knn,
        rng_seed: args.seed,
        band_counts: args.band_counts.clone().unwrap_or_default(),
    };

    let subsets: Vec<BandSubset> = match (&args.bands, &config.band_counts[..]) {
        (Some(bands), []) => vec![BandSubset::from_positions(bands.clone(), "manual")?],
        (None, counts) if !counts.is_empty() => {
            let ranks = args.pipeline.ranks(&cube, args.ranking)?;
            counts
                .iter()
                .map(|&k| {
                    let table =
                        args.pipeline
                            .table(&cube, args.objective, Some(args.ranking), k)?;
                    let (cbiv, _) = solve(&table, k)?;
                    rcs_select(&cbiv, &ranks)?
                        .with_method(method_name(table.kind(), ranks.method()))
                        .resolve_ids(&cube)
                })
                .collect::<Result<_>>()?
        }
        _ => {
            return Err(Error::InvalidInput(
                "pass exactly one of --bands or --band-counts".into(),
            ))
        }
    };

    let mut csv = String::from("k,mean_oa");
    for r in 1..=config.n_runs {
        write!(csv, ",oa_run_{r}").unwrap();
    }
    csv.push('\n');
    for subset in &subsets {
        let report = knn_overall_accuracy(&cube, subset, &config)?;
        write!(csv, "{},{}", subset.len(), report.mean()).unwrap();
        for oa in report.runs() {
            write!(csv, ",{oa}").unwrap();
        }
        csv.push('\n');
        eprintln!(
            "{} with {} bands: mean OA {:.4}",
            subset.method(),
            subset.len(),
            report.mean()
        );
    }
    emit(args.out.as_deref(), &csv)
}

fn cmd_oracle(args: OracleArgs) -> Result<()> {
    let cube = args.input.load()?;
    let table = args
        .pipeline
        .table(&cube, args.objective, args.ranking, args.clusters)?;
    let result = brute_force_solve(&table, args.clusters)?;
    emit(args.out.as_deref(), &partition_csv(&result.partition))?;
    eprintln!(
        "objective value {} after visiting {} partitions",
        result.value, result.visited
    );
    Ok(())
}
