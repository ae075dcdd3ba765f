//! How many Gaussian measurements OMP needs for an 8-sparse vector in 256
//! dimensions, around the M = 4K rule of thumb.

use sparsecap::cs::{run_cs_trials, CsTrialConfig, PROTOCOL};

fn main() -> sparsecap::Result<()> {
    println!("{PROTOCOL}\n");
    let k = 8;
    for m in [2 * k, 3 * k, 4 * k, 6 * k, 8 * k] {
        let cfg = CsTrialConfig {
            n: 256,
            k,
            m,
            trials: 100,
            seed: 0,
            noise_sigma: 0.0,
        };
        let rep = run_cs_trials(&cfg)?;
        println!(
            "m={m:<3} (m/k = {}): exact support {:>5.1}%, mean SNR {:.1} dB",
            m / k,
            100.0 * rep.summary.success_rate,
            rep.summary.mean_snr_db
        );
    }
    Ok(())
}
