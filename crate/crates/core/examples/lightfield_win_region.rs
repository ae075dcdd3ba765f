//! Where random projections beat progressive capture: SC4 versus TC
//! envelopes on synthetic light fields, raw and center-view subtracted.

use sparsecap::bases::BasisSpec;
use sparsecap::coders::Method;
use sparsecap::signal::Role;
use sparsecap::sweep::synth::{synth_signals, SynthKind, SynthParams};
use sparsecap::sweep::{aggregate, envelope, run_sweep_signals, win_regions, Statistic, SweepOptions, DEFAULT_GRID};

fn main() -> sparsecap::Result<()> {
    let p = SynthParams {
        height: 16,
        width: 16,
        grid: (9, 9),
        disparity: 1.0,
        ..SynthParams::default()
    };
    let signals = synth_signals(SynthKind::Lightfield, &p, 1, Role::Test, 4)?;
    let bases = [BasisSpec::Dct, BasisSpec::Dft, BasisSpec::haar(), BasisSpec::db4()];
    for center_subtract in [false, true] {
        let opts = SweepOptions { center_subtract };
        let out = run_sweep_signals("lightfield", &signals, &bases, &Method::ALL, &DEFAULT_GRID, &opts)?;
        let env = envelope(&aggregate(&out.records, 300.0)?, Statistic::Mean)?;
        let w = win_regions(&env, Method::Sc4, Method::Tc)?;
        println!("center_subtract={center_subtract}");
        for (c, gap) in w.grid.iter().zip(&w.gaps_db) {
            println!("  C={c:<6} sc4 - tc = {gap:+.2} dB");
        }
        println!(
            "  win region {:?}, max gap {:.2} dB at C={}\n",
            w.win_region, w.max_gap_db, w.argmax_c
        );
    }
    Ok(())
}
