//! Best-case SC4 SNR at C = 0.05 across synthetic modalities.

use sparsecap::bases::BasisSpec;
use sparsecap::coders::Method;
use sparsecap::signal::Role;
use sparsecap::sweep::synth::{synth_signals, SynthKind, SynthParams};
use sparsecap::sweep::{aggregate, envelope, run_sweep_signals, Statistic, SweepOptions};

fn main() -> sparsecap::Result<()> {
    let bases = [BasisSpec::Dct, BasisSpec::Dft, BasisSpec::haar(), BasisSpec::db4()];
    let small = SynthParams {
        height: 32,
        width: 32,
        ..SynthParams::default()
    };
    let mut rows = Vec::new();
    for kind in SynthKind::ALL {
        let signals = synth_signals(kind, &small, 5, Role::Test, 4)?;
        let out = run_sweep_signals(
            kind.token(),
            &signals,
            &bases,
            &[Method::Sc4],
            &[0.05],
            &SweepOptions::default(),
        )?;
        let env = envelope(&aggregate(&out.records, 300.0)?, Statistic::Mean)?;
        rows.push((
            kind,
            env[0].best_snr_db,
            env[0].best_basis.clone(),
            signals[0].1.dims().to_vec(),
        ));
    }
    rows.sort_by(|a, b| a.1.total_cmp(&b.1));
    for (kind, snr, basis, dims) in rows {
        println!("{:<14} {snr:6.2} dB  best basis {basis:<4} dims {dims:?}", kind.token());
    }
    Ok(())
}
