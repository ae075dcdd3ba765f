//! Command-line front end. Every subcommand is a thin layer over a library
//! operation; outputs go through temp-file-and-rename writes.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bases::BasisSpec;
use crate::coders::{Method, SNR_CAP_DB};
use crate::cs::{run_cs_trials, CsTrialConfig};
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::pca::{save_pca, train_pca};
use crate::signal::{load_manifest, Role};
use crate::sweep::synth::{synth_dataset, SynthKind, SynthParams};
use crate::sweep::{
    aggregate, aggregate_csv, envelope, envelope_csv, parse_envelope_csv, parse_results_csv, render_svg, results_csv,
    run_sweep, win_regions, Statistic, SweepOptions, DEFAULT_GRID,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

pub const SEED_ENV: &str = "SPARSECAP_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "sparsecap",
    version,
    about = "Progressive vs. random projection capture, measured in coefficient space"
)]
struct Cli {
    /// Worker threads (0 = all cores). Never changes output bytes.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a seeded synthetic dataset (NDF files + manifest.json)
    Synth(SynthArgs),
    /// Learn a PCA basis from the train split of a dataset
    TrainPca(TrainPcaArgs),
    /// SNR of every test signal for each basis, method and compression factor
    Sweep(SweepArgs),
    /// Best-basis envelope per method from a results CSV
    Envelope(EnvelopeArgs),
    /// Win region of one method over another from an envelope CSV
    Report(ReportArgs),
    /// Empirical check of the M = 4K rule with OMP
    ValidateCs(ValidateCsArgs),
    /// Run the built-in invariant suite
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    kind: SynthKind,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    n_test: usize,
    #[arg(long, default_value_t = 0)]
    n_train: usize,
    #[arg(long, default_value_t = 64)]
    height: usize,
    #[arg(long, default_value_t = 64)]
    width: usize,
    #[arg(long, default_value_t = 8)]
    frames: usize,
    #[arg(long, default_value_t = 8)]
    bands: usize,
    /// Light-field camera grid as ROWS,COLS
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [9, 9])]
    lf_grid: Vec<usize>,
    #[arg(long, default_value_t = 1.0)]
    disparity: f64,
    #[arg(long, default_value_t = 16)]
    cells: usize,
    #[arg(long, default_value_t = 1.5)]
    max_velocity: f64,
    #[arg(long, default_value_t = 0.01)]
    noise: f64,
    #[arg(long, default_value_t = 0.1)]
    spectral_deviation: f64,
    #[arg(long)]
    identical_bands: bool,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TrainPcaArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    n_components: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Comma-separated: dct, dft, haar, db4, pca:<path>
    #[arg(long, value_delimiter = ',', default_value = "dct,dft,haar,db4")]
    bases: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "tc,sc1,sc4")]
    methods: Vec<Method>,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_GRID)]
    grid: Vec<f64>,
    /// Subtract the center view from light fields first
    #[arg(long)]
    center_subtract: bool,
    /// Cap for infinite SNR in the optional aggregate output
    #[arg(long, default_value_t = SNR_CAP_DB)]
    cap_db: f64,
    /// Also write per-(basis, method, C) mean/median SNR here
    #[arg(long)]
    agg_out: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EnvelopeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = SNR_CAP_DB)]
    cap_db: f64,
    #[arg(long, value_enum, default_value_t = StatArg::Mean)]
    stat: StatArg,
    /// Also write the aggregated table the envelope was taken over
    #[arg(long)]
    agg_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum StatArg {
    Mean,
    Median,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    a: Method,
    #[arg(long)]
    b: Method,
    #[arg(long)]
    out: PathBuf,
    /// Optional SVG line chart of the envelope curves
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateCsArgs {
    #[arg(long, default_value_t = 256)]
    n: usize,
    #[arg(long, default_value_t = 8)]
    k: usize,
    #[arg(long, default_value_t = 32)]
    m: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.0)]
    noise_sigma: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
}

enum Failure {
    Usage(String),
    Data(Error),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BadParams(m) | Error::OutOfRange(m) => Failure::Usage(m),
            e => Failure::Data(e),
        }
    }
}

/// Parse `args` (including the program name) and execute. Returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_INTERNAL;
        }
    };
    match pool.install(|| dispatch(cli.command)) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
        Err(Failure::Internal(m)) => {
            eprintln!("error: {m}");
            EXIT_INTERNAL
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Synth(a) => synth(a),
        Command::TrainPca(a) => train(a),
        Command::Sweep(a) => sweep(a),
        Command::Envelope(a) => env(a),
        Command::Report(a) => report(a),
        Command::ValidateCs(a) => validate_cs(a),
        Command::Selftest(a) => selftest(a),
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

fn check_cap(cap_db: f64) -> Result<()> {
    if cap_db.is_finite() && cap_db > 0.0 {
        Ok(())
    } else {
        Err(Error::BadParams(format!(
            "--cap-db must be positive and finite, got {cap_db}"
        )))
    }
}

fn synth(a: SynthArgs) -> Result<(), Failure> {
    let params = SynthParams {
        height: a.height,
        width: a.width,
        frames: a.frames,
        bands: a.bands,
        grid: (a.lf_grid[0], a.lf_grid[1]),
        disparity: a.disparity,
        cells: a.cells,
        max_velocity: a.max_velocity,
        noise: a.noise,
        spectral_deviation: a.spectral_deviation,
        identical_bands: a.identical_bands,
    };
    let m = synth_dataset(a.kind, &params, a.seed, a.n_test, a.n_train, &a.out)?;
    println!(
        "wrote {} signals to {}",
        m.entries.len(),
        a.out.join("manifest.json").display()
    );
    Ok(())
}

fn train(a: TrainPcaArgs) -> Result<(), Failure> {
    let ds = load_manifest(&a.manifest)?;
    let train = ds
        .entries_with(Role::Train)
        .map(|e| ds.load_entry(e))
        .collect::<Result<Vec<_>>>()?;
    let fit = train_pca(&train, a.n_components)?;
    if fit.is_rank_deficient() {
        eprintln!(
            "warning: training data has rank {}, fewer than the {} components requested",
            fit.basis.n_components(),
            fit.requested
        );
    }
    save_pca(&fit.basis, &a.out)?;
    println!(
        "{} components of dimension {}",
        fit.basis.n_components(),
        fit.basis.dim()
    );
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<(), Failure> {
    check_cap(a.cap_db)?;
    let bases = a
        .bases
        .iter()
        .map(|t| BasisSpec::parse(t))
        .collect::<Result<Vec<_>>>()?;
    let ds = load_manifest(&a.manifest)?;
    let opts = SweepOptions {
        center_subtract: a.center_subtract,
    };
    let out = run_sweep(&ds, &bases, &a.methods, &a.grid, &opts)?;
    for (id, err) in &out.failures {
        eprintln!("warning: {id} skipped: {err}");
    }
    write_atomic(&a.out, &results_csv(&out))?;
    if let Some(path) = a.agg_out {
        write_atomic(&path, &aggregate_csv(&aggregate(&out.records, a.cap_db)?))?;
    }
    println!("{} records, {} failed signals", out.records.len(), out.failures.len());
    Ok(())
}

fn env(a: EnvelopeArgs) -> Result<(), Failure> {
    check_cap(a.cap_db)?;
    let records = parse_results_csv(&read(&a.input)?)?;
    let agg = aggregate(&records, a.cap_db)?;
    let stat = match a.stat {
        StatArg::Mean => Statistic::Mean,
        StatArg::Median => Statistic::Median,
    };
    write_atomic(&a.out, &envelope_csv(&envelope(&agg, stat)?))?;
    if let Some(path) = a.agg_out {
        write_atomic(&path, &aggregate_csv(&agg))?;
    }
    Ok(())
}

fn report(a: ReportArgs) -> Result<(), Failure> {
    let env = parse_envelope_csv(&read(&a.input)?)?;
    let w = win_regions(&env, a.a, a.b)?;
    write_atomic(&a.out, w.to_json().as_bytes())?;
    if let Some(path) = a.svg {
        let mut methods: Vec<Method> = Vec::new();
        for r in &env {
            if !methods.contains(&r.method) {
                methods.push(r.method);
            }
        }
        write_atomic(&path, render_svg(&env, &methods).as_bytes())?;
    }
    println!("win region for {} over {}: {:?}", a.a, a.b, w.win_region);
    Ok(())
}

fn validate_cs(a: ValidateCsArgs) -> Result<(), Failure> {
    let cfg = CsTrialConfig {
        n: a.n,
        k: a.k,
        m: a.m,
        trials: a.trials,
        seed: a.seed,
        noise_sigma: a.noise_sigma,
    };
    let rep = run_cs_trials(&cfg)?;
    write_atomic(&a.out, rep.to_json().as_bytes())?;
    println!(
        "success rate {:.3}, mean SNR {:.2} dB",
        rep.summary.success_rate, rep.summary.mean_snr_db
    );
    Ok(())
}

fn selftest(a: SelftestArgs) -> Result<(), Failure> {
    let checks = crate::selftest::run(a.seed);
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Internal(format!("{failed} selftest check(s) failed")))
    }
}
