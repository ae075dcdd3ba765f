//! Learn a PCA basis from one set of synthetic images and use it to code a
//! disjoint test set, next to the DCT. Random-phase 1/f fields are
//! stationary, so the DCT is already near their ideal basis and PCA trained
//! on 120 samples only roughly ties it.

use sparsecap::bases::BasisSpec;
use sparsecap::coders::Method;
use sparsecap::pca::{decode_pca, encode_pca, train_pca};
use sparsecap::signal::Role;
use sparsecap::sweep::synth::{synth_signals, SynthKind, SynthParams};
use sparsecap::sweep::{aggregate, run_sweep_signals, SweepOptions};

fn main() -> sparsecap::Result<()> {
    let p = SynthParams {
        height: 16,
        width: 16,
        ..SynthParams::default()
    };
    let train: Vec<_> = synth_signals(SynthKind::Image1f, &p, 3, Role::Train, 120)?
        .into_iter()
        .map(|(_, t)| t)
        .collect();
    let test = synth_signals(SynthKind::Image1f, &p, 3, Role::Test, 20)?;

    let fit = train_pca(&train, 64)?;
    let lead: Vec<String> = fit
        .basis
        .eigenvalues()
        .iter()
        .take(5)
        .map(|l| format!("{l:.4}"))
        .collect();
    println!(
        "{} components, leading eigenvalues {}",
        fit.basis.n_components(),
        lead.join(" ")
    );
    let container = encode_pca(&fit.basis);
    assert_eq!(encode_pca(&decode_pca(&container)?), container);
    println!("container {} bytes", container.len());

    let bases = [BasisSpec::pca(fit.basis, "trained"), BasisSpec::Dct];
    let grid = [0.01, 0.05, 0.1, 0.25];
    let out = run_sweep_signals(
        "pca-demo",
        &test,
        &bases,
        &[Method::Tc],
        &grid,
        &SweepOptions::default(),
    )?;
    println!("\nmean TC SNR on held-out signals");
    for row in aggregate(&out.records, 300.0)? {
        println!("  {:<12} C={:<5} {:.2} dB", row.basis, row.c, row.mean_db);
    }
    Ok(())
}
