//! Forward/inverse transforms for every fixed basis on an 8x8 tensor:
//! Parseval energy, round-trip error and the head of each progressive order.

use sparsecap::bases::{forward, inverse, progressive_order, BasisSpec};
use sparsecap::rng;
use sparsecap::{SignalKind, SignalTensor};

fn main() -> sparsecap::Result<()> {
    let dims = vec![8, 8];
    let x = SignalTensor::new(
        dims.clone(),
        rng::gaussian_vec(&mut rng::stream(42, 0), 64),
        SignalKind::Image,
    )?;
    println!("signal energy {:.6}", x.energy());
    for b in [BasisSpec::Dct, BasisSpec::Dft, BasisSpec::haar(), BasisSpec::db4()] {
        let s = forward(&b, &x)?;
        let y = inverse(&b, &s)?;
        let err: f64 = x.values().iter().zip(y.values()).map(|(a, b)| (a - b).powi(2)).sum();
        let ord = progressive_order(&b, &dims)?;
        let head: Vec<String> = ord
            .groups()
            .iter()
            .take(6)
            .map(|g| match g.second {
                Some(p) => format!("{}+{p}", g.first),
                None => g.first.to_string(),
            })
            .collect();
        println!(
            "{:<5} coef energy {:.6}  round trip err {:.1e}  order {} ...",
            b.token(),
            s.entries.energy(),
            err.sqrt(),
            head.join(" ")
        );
    }
    Ok(())
}
