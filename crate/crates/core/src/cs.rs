//! Desk-scale check of the `M = 4K` recovery rule: seeded Gaussian
//! measurements of planted K-sparse vectors, recovered with orthogonal
//! matching pursuit.
//!
//! Randomness (see [`crate::rng`]): trial `t` gets `trial_seed =
//! derive_seed(seed, t)`. Row `i` of its measurement matrix is drawn
//! sequentially from `stream(trial_seed, i)`; the planted support
//! (`rand::seq::index::sample`), planted values and noise come from
//! `stream(trial_seed, u64::MAX)` in that order.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coders::{cap_snr, SNR_CAP_DB};
use crate::error::{Error, Result};
use crate::rng;

pub const PROTOCOL: &str = "own trial design: column-normalized i.i.d. Gaussian matrix, \
uniform random support, standard-normal nonzeros, OMP with k_max = k";

/// Residual tolerance used by trials, relative to `||y||`.
pub const TRIAL_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsTrialConfig {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    pub noise_sigma: f64,
}

impl CsTrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 || self.k > self.m || self.m > self.n {
            return Err(Error::BadParams(format!(
                "need k <= m <= n with m, n >= 1 (n={}, k={}, m={})",
                self.n, self.k, self.m
            )));
        }
        if self.trials == 0 {
            return Err(Error::BadParams("trials must be >= 1".into()));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::BadParams("noise_sigma must be finite and >= 0".into()));
        }
        Ok(())
    }
}

mod snr_json {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) if t == "-inf" => Ok(f64::NEG_INFINITY),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("bad snr {t:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsTrial {
    pub support_exact: bool,
    #[serde(with = "snr_json")]
    pub snr_db: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsSummary {
    pub success_rate: f64,
    /// Mean over trials with `+inf` capped at 300 dB.
    pub mean_snr_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsReport {
    pub protocol: String,
    pub config: CsTrialConfig,
    pub trials: Vec<CsTrial>,
    pub summary: CsSummary,
}

impl CsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Raw `m x n` standard-normal entries; row `i` is drawn from `stream(seed, i)`.
pub fn gaussian_entries(m: usize, n: usize, seed: u64) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(m, n);
    for i in 0..m {
        let mut r = rng::stream(seed, i as u64);
        for j in 0..n {
            a[(i, j)] = r.sample(StandardNormal);
        }
    }
    a
}

/// [`gaussian_entries`] with every column scaled to unit Euclidean norm.
pub fn gaussian_matrix(m: usize, n: usize, seed: u64) -> DMatrix<f64> {
    let mut a = gaussian_entries(m, n, seed);
    for mut col in a.column_iter_mut() {
        let norm = col.norm();
        col /= norm;
    }
    a
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmpResult {
    pub coefficients: Vec<f64>,
    /// Selected atoms in selection order.
    pub support: Vec<usize>,
}

/// Orthogonal matching pursuit. Stops after `k_max` atoms or once
/// `||r|| <= residual_tol * ||y||`.
pub fn omp(a: &DMatrix<f64>, y: &[f64], k_max: usize, residual_tol: f64) -> Result<OmpResult> {
    let (m, n) = a.shape();
    if y.len() != m {
        return Err(Error::ShapeMismatch(format!(
            "y has {} entries, A has {m} rows",
            y.len()
        )));
    }
    if k_max > m {
        return Err(Error::BadParams(format!("k_max {k_max} exceeds {m} rows")));
    }
    let y = DVector::from_column_slice(y);
    let y_norm = y.norm();
    let mut support: Vec<usize> = Vec::new();
    let mut coef = DVector::zeros(0);
    let mut residual = y.clone();
    while support.len() < k_max && residual.norm() > residual_tol * y_norm {
        let corr = a.tr_mul(&residual);
        let mut best: Option<(usize, f64)> = None;
        for j in (0..n).filter(|j| !support.contains(j)) {
            let c = corr[j].abs();
            if best.is_none_or(|(_, b)| c > b) {
                best = Some((j, c));
            }
        }
        let Some((j, _)) = best else { break };
        support.push(j);
        let sub = a.select_columns(&support);
        let qr = sub.clone().qr();
        let r = qr.r();
        let scale = (0..support.len()).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
        if (0..support.len()).any(|i| r[(i, i)].abs() <= 1e-10 * scale) {
            return Err(Error::SingularSubproblem(support.len()));
        }
        let qty = qr.q().tr_mul(&y);
        coef = r
            .solve_upper_triangular(&qty)
            .ok_or(Error::SingularSubproblem(support.len()))?;
        residual = &y - &sub * &coef;
    }
    let mut coefficients = vec![0.0; n];
    for (&j, &c) in support.iter().zip(coef.iter()) {
        coefficients[j] = c;
    }
    Ok(OmpResult { coefficients, support })
}

fn recovery_snr(x: &[f64], x_hat: &[f64]) -> f64 {
    let signal: f64 = x.iter().map(|v| v * v).sum();
    let err: f64 = x.iter().zip(x_hat).map(|(a, b)| (a - b).powi(2)).sum();
    if err <= crate::coders::LOSSLESS_REL * signal {
        f64::INFINITY
    } else {
        10.0 * (signal / err).log10()
    }
}

fn run_trial(cfg: &CsTrialConfig, t: usize) -> CsTrial {
    let trial_seed = rng::derive_seed(cfg.seed, t as u64);
    let a = gaussian_matrix(cfg.m, cfg.n, trial_seed);
    let mut r = rng::stream(trial_seed, u64::MAX);
    let mut planted: Vec<usize> = rand::seq::index::sample(&mut r, cfg.n, cfg.k).into_vec();
    let mut x = vec![0.0; cfg.n];
    for &j in &planted {
        x[j] = r.sample(StandardNormal);
    }
    let mut y = &a * DVector::from_column_slice(&x);
    if cfg.noise_sigma > 0.0 {
        for v in y.iter_mut() {
            let e: f64 = r.sample(StandardNormal);
            *v += cfg.noise_sigma * e;
        }
    }
    match omp(&a, y.as_slice(), cfg.k, TRIAL_RESIDUAL_TOL) {
        Ok(res) => {
            let mut found = res.support.clone();
            found.sort_unstable();
            planted.sort_unstable();
            CsTrial {
                support_exact: found == planted,
                snr_db: recovery_snr(&x, &res.coefficients),
                error: None,
            }
        }
        Err(e) => CsTrial {
            support_exact: false,
            snr_db: recovery_snr(&x, &vec![0.0; cfg.n]),
            error: Some(e.to_string()),
        },
    }
}

pub fn run_cs_trials(cfg: &CsTrialConfig) -> Result<CsReport> {
    cfg.validate()?;
    let trials: Vec<CsTrial> = (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, t)).collect();
    let successes = trials.iter().filter(|t| t.support_exact).count();
    let mean_snr_db = trials.iter().map(|t| cap_snr(t.snr_db, SNR_CAP_DB)).sum::<f64>() / trials.len() as f64;
    Ok(CsReport {
        protocol: PROTOCOL.into(),
        config: *cfg,
        summary: CsSummary {
            success_rate: successes as f64 / trials.len() as f64,
            mean_snr_db,
        },
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, k: usize, m: usize, trials: usize) -> CsTrialConfig {
        CsTrialConfig {
            n,
            k,
            m,
            trials,
            seed: 11,
            noise_sigma: 0.0,
        }
    }

    #[test]
    fn matrix_determinism_and_norms() {
        let a = gaussian_matrix(8, 20, 3);
        assert_eq!(a, gaussian_matrix(8, 20, 3));
        assert_ne!(a, gaussian_matrix(8, 20, 4));
        for c in a.column_iter() {
            assert!((c.norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn raw_entries_are_centered() {
        let a = gaussian_entries(64, 256, 1);
        let mean = a.iter().sum::<f64>() / a.len() as f64;
        assert!(mean.abs() <= 0.05, "{mean}");
        let var = a.iter().map(|v| v * v).sum::<f64>() / a.len() as f64;
        assert!((var - 1.0).abs() < 0.05, "{var}");
    }

    #[test]
    fn one_sparse_exact() {
        let a = gaussian_matrix(16, 40, 2);
        let y: Vec<f64> = a.column(5).iter().map(|v| 2.0 * v).collect();
        let r = omp(&a, &y, 1, 1e-12).unwrap();
        assert_eq!(r.support, vec![5]);
        assert!((r.coefficients[5] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_measurements() {
        let a = gaussian_matrix(4, 10, 2);
        let r = omp(&a, &[0.0; 4], 3, 1e-12).unwrap();
        assert!(r.support.is_empty());
        assert!(r.coefficients.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dependent_column_is_singular() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, h, 0.0, 1.0, h, 0.0, 0.0, 0.0]);
        // after atom 0 the residual is orthogonal to every column, so ties
        // fall to atom 1 and then to the dependent atom 2
        let err = omp(&a, &[1.0, 0.0, 1.0], 3, 0.0).unwrap_err();
        assert!(matches!(err, Error::SingularSubproblem(3)));
        assert_eq!(omp(&a, &[1.0, 0.0, 1.0], 2, 0.0).unwrap().support, vec![0, 1]);
    }

    #[test]
    fn exact_support_means_high_snr() {
        let rep = run_cs_trials(&cfg(128, 4, 32, 30)).unwrap();
        for t in &rep.trials {
            if t.support_exact {
                assert!(t.snr_db >= 100.0, "{}", t.snr_db);
            }
        }
        assert!(rep.summary.success_rate > 0.5);
    }

    #[test]
    fn overdetermined_one_sparse() {
        let rep = run_cs_trials(&cfg(24, 1, 24, 20)).unwrap();
        assert_eq!(rep.summary.success_rate, 1.0);
    }

    #[test]
    fn zero_sparsity_is_lossless() {
        let rep = run_cs_trials(&cfg(32, 0, 8, 5)).unwrap();
        assert!(rep.trials.iter().all(|t| t.snr_db == f64::INFINITY && t.support_exact));
        let json = rep.to_json();
        assert!(json.contains("\"inf\""));
        assert_eq!(serde_json::from_str::<CsReport>(&json).unwrap(), rep);
    }

    #[test]
    fn report_is_deterministic() {
        let c = CsTrialConfig {
            noise_sigma: 0.01,
            ..cfg(64, 3, 16, 12)
        };
        assert_eq!(
            run_cs_trials(&c).unwrap().to_json(),
            run_cs_trials(&c).unwrap().to_json()
        );
    }

    #[test]
    fn config_validation() {
        assert!(run_cs_trials(&cfg(10, 5, 4, 1)).is_err());
        assert!(run_cs_trials(&cfg(10, 2, 11, 1)).is_err());
        assert!(run_cs_trials(&cfg(10, 2, 4, 0)).is_err());
    }
}
