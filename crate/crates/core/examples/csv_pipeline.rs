//! The file-based pipeline the CLI drives: synthetic dataset on disk, sweep
//! to CSV, envelope CSV, win-region JSON and an SVG chart.

use sparsecap::bases::BasisSpec;
use sparsecap::coders::Method;
use sparsecap::signal::load_manifest;
use sparsecap::sweep::synth::{synth_dataset, SynthKind, SynthParams};
use sparsecap::sweep::{
    aggregate, envelope, envelope_csv, parse_results_csv, render_svg, results_csv, run_sweep, win_regions, Statistic,
    SweepOptions, DEFAULT_GRID,
};

fn main() -> sparsecap::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let root = dir.path();
    let p = SynthParams {
        height: 32,
        width: 32,
        bands: 4,
        ..SynthParams::default()
    };
    synth_dataset(SynthKind::Multispectral, &p, 8, 3, 0, &root.join("ms"))?;
    let ds = load_manifest(root.join("ms/manifest.json"))?;

    let bases = [BasisSpec::Dct, BasisSpec::haar()];
    let out = run_sweep(&ds, &bases, &Method::ALL, &DEFAULT_GRID, &SweepOptions::default())?;
    let csv = results_csv(&out);
    let records = parse_results_csv(&csv)?;
    println!("{} records; first lines:", records.len());
    for line in String::from_utf8_lossy(&csv).lines().take(4) {
        println!("  {line}");
    }

    let env = envelope(&aggregate(&records, 300.0)?, Statistic::Mean)?;
    println!("\nenvelope:\n{}", String::from_utf8_lossy(&envelope_csv(&env)));
    let report = win_regions(&env, Method::Sc4, Method::Tc)?;
    println!("{}", report.to_json());

    let svg = render_svg(&env, &Method::ALL);
    std::fs::write(root.join("envelope.svg"), &svg).expect("write svg");
    println!("svg chart: {} bytes", svg.len());
    Ok(())
}
