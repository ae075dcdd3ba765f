//! Fast invariant suite behind `sparsecap selftest`.

use crate::bases::{
    forward, inverse, orthonormality_check, progressive_order, BasisSpec, CoefficientTensor, ProgressiveOrdering,
};
use crate::coders::{measurements_for, Method, Truncator};
use crate::cs::{run_cs_trials, CsTrialConfig};
use crate::pca::{decode_pca, encode_pca, train_pca};
use crate::rng;
use crate::signal::{decode_ndf, encode_ndf, SignalKind, SignalTensor};
use crate::sweep::DEFAULT_GRID;

const SHAPES: [&[usize]; 4] = [&[16], &[8, 8], &[4, 4, 4], &[2, 2, 4, 4]];
const TRIALS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn bases() -> [BasisSpec; 4] {
    [BasisSpec::Dct, BasisSpec::Dft, BasisSpec::haar(), BasisSpec::db4()]
}

fn random(dims: &[usize], seed: u64, id: u64) -> SignalTensor {
    let n = dims.iter().product();
    SignalTensor::new(
        dims.to_vec(),
        rng::gaussian_vec(&mut rng::stream(seed, id), n),
        SignalKind::Generic,
    )
    .expect("finite gaussian tensor")
}

type Outcome = Result<String, String>;
type Probe = fn(u64) -> Outcome;

fn hand_oracles(_seed: u64) -> Outcome {
    let s = CoefficientTensor::from_real(vec![3.0, 1.0, 2.0, 0.0]);
    let ord = ProgressiveOrdering::identity(4);
    let tr = Truncator::new(&s, &ord).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (method, m, want) in [
        (Method::Tc, 2, 5.441),
        (Method::Sc1, 2, 11.461),
        (Method::Sc4, 4, 4.472),
    ] {
        let got = tr.outcome(method, m).map_err(|e| e.to_string())?.snr_db;
        worst = worst.max((got - want).abs());
    }
    if worst <= 1e-3 {
        Ok(format!("max deviation {worst:.2e} dB"))
    } else {
        Err(format!("max deviation {worst:.2e} dB"))
    }
}

fn parseval(seed: u64) -> Outcome {
    let mut worst: f64 = 0.0;
    for dims in SHAPES {
        for b in bases() {
            worst = worst.max(orthonormality_check(&b, dims, TRIALS, seed).map_err(|e| e.to_string())?);
        }
    }
    if worst <= 1e-9 {
        Ok(format!("max relative energy error {worst:.2e}"))
    } else {
        Err(format!("relative energy error {worst:.2e}"))
    }
}

fn round_trip(seed: u64) -> Outcome {
    let mut worst: f64 = 0.0;
    for dims in SHAPES {
        for b in bases() {
            for t in 0..TRIALS {
                let x = random(dims, seed, t as u64);
                let s = forward(&b, &x).map_err(|e| e.to_string())?;
                let y = inverse(&b, &s).map_err(|e| e.to_string())?;
                let err: f64 = x.values().iter().zip(y.values()).map(|(a, b)| (a - b).powi(2)).sum();
                worst = worst.max((err / x.energy()).sqrt());
            }
        }
    }
    if worst <= 1e-9 {
        Ok(format!("max relative error {worst:.2e}"))
    } else {
        Err(format!("relative error {worst:.2e}"))
    }
}

fn domain_agreement(seed: u64) -> Outcome {
    let mut worst: f64 = 0.0;
    for dims in SHAPES {
        let n: usize = dims.iter().product();
        for b in bases() {
            let x = random(dims, seed, 1000);
            let s = forward(&b, &x).map_err(|e| e.to_string())?;
            let ord = progressive_order(&b, dims).map_err(|e| e.to_string())?;
            let tr = Truncator::new(&s, &ord).map_err(|e| e.to_string())?;
            for m in [1, n / 4, n / 2, n - 1] {
                for method in Method::ALL {
                    let r = tr.truncate(method, m).map_err(|e| e.to_string())?;
                    let rec = inverse(&b, &s.masked(&r.kept)).map_err(|e| e.to_string())?;
                    let err: f64 = rec.values().iter().zip(x.values()).map(|(a, b)| (a - b).powi(2)).sum();
                    let direct = 10.0 * (x.energy() / err).log10();
                    worst = worst.max((direct - r.snr_db).abs());
                }
            }
        }
    }
    if worst <= 1e-6 {
        Ok(format!("max disagreement {worst:.2e} dB"))
    } else {
        Err(format!("disagreement {worst:.2e} dB"))
    }
}

fn dominance(seed: u64) -> Outcome {
    let mut checked = 0usize;
    for (i, dims) in SHAPES.iter().enumerate() {
        let n: usize = dims.iter().product();
        for t in 0..TRIALS {
            let x = random(dims, seed, (100 * (i + 1) + t) as u64);
            for b in bases() {
                let s = forward(&b, &x).map_err(|e| e.to_string())?;
                let ord = progressive_order(&b, dims).map_err(|e| e.to_string())?;
                let tr = Truncator::new(&s, &ord).map_err(|e| e.to_string())?;
                let mut prev = [f64::NEG_INFINITY; 3];
                for c in DEFAULT_GRID {
                    let m = measurements_for(c, n).map_err(|e| e.to_string())?;
                    let mut snr = [0.0; 3];
                    for (k, method) in Method::ALL.into_iter().enumerate() {
                        snr[k] = tr.outcome(method, m).map_err(|e| e.to_string())?.snr_db;
                        if snr[k] < prev[k] {
                            return Err(format!("{b} {method} decreases at C={c}"));
                        }
                    }
                    let [tc, sc1, sc4] = snr;
                    if sc1 < tc || sc1 < sc4 {
                        return Err(format!("{b} dominance broken at C={c}: tc {tc} sc1 {sc1} sc4 {sc4}"));
                    }
                    prev = snr;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} grid points"))
}

fn ndf_round_trip(seed: u64) -> Outcome {
    for (i, dims) in SHAPES.iter().enumerate() {
        let x = random(dims, seed, 2000 + i as u64);
        let y = decode_ndf(&encode_ndf(&x)).map_err(|e| e.to_string())?;
        if x.dims() != y.dims()
            || x.values()
                .iter()
                .zip(y.values())
                .any(|(a, b)| a.to_bits() != b.to_bits())
        {
            return Err(format!("NDF round trip changed a {dims:?} tensor"));
        }
    }
    Ok("bit-exact".into())
}

fn pca(seed: u64) -> Outcome {
    let train: Vec<SignalTensor> = (0..20).map(|t| random(&[16], seed, 3000 + t)).collect();
    let fit = train_pca(&train, 6).map_err(|e| e.to_string())?;
    let b = &fit.basis;
    let mut worst: f64 = 0.0;
    for i in 0..b.n_components() {
        for j in 0..=i {
            let dot: f64 = b.component(i).iter().zip(b.component(j)).map(|(p, q)| p * q).sum();
            worst = worst.max((dot - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    if worst > 1e-9 {
        return Err(format!("components deviate from orthonormal by {worst:.2e}"));
    }
    if encode_pca(&decode_pca(&encode_pca(b)).map_err(|e| e.to_string())?) != encode_pca(b) {
        return Err("container round trip changed the basis".into());
    }
    Ok(format!("orthonormal within {worst:.2e}, container round trip exact"))
}

fn cs(seed: u64) -> Outcome {
    let cfg = CsTrialConfig {
        n: 16,
        k: 1,
        m: 16,
        trials: 10,
        seed,
        noise_sigma: 0.0,
    };
    let rep = run_cs_trials(&cfg).map_err(|e| e.to_string())?;
    if rep.summary.success_rate == 1.0 {
        Ok("1-sparse, m = n: all supports recovered".into())
    } else {
        Err(format!("success rate {}", rep.summary.success_rate))
    }
}

pub fn run(seed: u64) -> Vec<Check> {
    let suite: [(&'static str, Probe); 8] = [
        ("hand oracles", hand_oracles),
        ("parseval", parseval),
        ("round trip", round_trip),
        ("coefficient/signal domain", domain_agreement),
        ("dominance and monotonicity", dominance),
        ("ndf round trip", ndf_round_trip),
        ("pca", pca),
        ("cs recovery", cs),
    ];
    suite
        .into_iter()
        .map(|(name, f)| {
            let (passed, detail) = match f(seed) {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            Check { name, passed, detail }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn suite_passes() {
        for c in super::run(1) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
