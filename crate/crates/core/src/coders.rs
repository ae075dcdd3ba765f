//! Coefficient-domain coding oracles and SNR.
//!
//! * TC keeps a prefix of the progressive ordering.
//! * SC1 keeps the highest-energy coefficients the budget allows.
//! * SC4 is SC1 with a quarter of the budget, while still charging the full
//!   budget.
//!
//! Budgets are in real measurements. A conjugate DFT pair costs 2 and is kept
//! or dropped as a unit. With unit and pair costs mixed, SC1 solves the
//! resulting two-cost knapsack exactly; with unit costs only this is plain
//! top-M selection.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bases::{BasisSpec, CoefficientTensor, ProgressiveOrdering};
use crate::error::{Error, Result};

/// Cap applied to SNR values (and to `+inf`) when aggregating.
pub const SNR_CAP_DB: f64 = 300.0;

/// Error energies at or below this fraction of the signal energy read as lossless.
pub const LOSSLESS_REL: f64 = 1e-24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Tc,
    Sc1,
    Sc4,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Tc, Method::Sc1, Method::Sc4];

    pub fn token(self) -> &'static str {
        match self {
            Method::Tc => "tc",
            Method::Sc1 => "sc1",
            Method::Sc4 => "sc4",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tc" => Ok(Method::Tc),
            "sc1" => Ok(Method::Sc1),
            "sc4" => Ok(Method::Sc4),
            _ => Err(Error::Parse(format!("unknown method {s:?}"))),
        }
    }
}

/// `M = round(C * N)`, halves away from zero.
pub fn measurements_for(c: f64, n: usize) -> Result<usize> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::OutOfRange(format!("compression factor {c} outside [0, 1]")));
    }
    Ok(((c * n as f64).round() as usize).min(n))
}

/// SNR in dB from the signal energy and the squared reconstruction error.
/// Zero signal energy gives 0 dB; a vanishing error gives `+inf`.
pub fn snr_from_error(total_signal_energy: f64, error_energy: f64) -> f64 {
    if total_signal_energy == 0.0 {
        return 0.0;
    }
    if error_energy <= LOSSLESS_REL * total_signal_energy {
        return f64::INFINITY;
    }
    10.0 * (total_signal_energy / error_energy).log10()
}

/// SNR from retained energy: `err^2 = max(0, centered - kept)`.
pub fn compute_snr(total_signal_energy: f64, centered_energy: f64, kept_energy: f64) -> Result<f64> {
    for e in [total_signal_energy, centered_energy, kept_energy] {
        if e < 0.0 || e.is_nan() {
            return Err(Error::NegativeEnergy(e));
        }
    }
    if kept_energy > centered_energy * (1.0 + 1e-9) {
        return Err(Error::OutOfRange(format!(
            "kept energy {kept_energy} exceeds centered energy {centered_energy}"
        )));
    }
    Ok(snr_from_error(
        total_signal_energy,
        (centered_energy - kept_energy).max(0.0),
    ))
}

/// Cap `+inf` and anything above `cap` for averaging and plotting.
pub fn cap_snr(snr_db: f64, cap: f64) -> f64 {
    snr_db.min(cap)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationResult {
    /// Kept coefficient indices, ascending.
    pub kept: Vec<usize>,
    /// Measurement budget `M` charged to the capture.
    pub budget: usize,
    /// Real measurements the kept coefficients account for (`<= budget`).
    pub cost: usize,
    /// Kept coefficients with nonzero magnitude.
    pub k_eff: usize,
    pub kept_energy: f64,
    pub error_energy: f64,
    pub snr_db: f64,
}

/// Per-signal state shared by every budget: group energies and the
/// magnitude ranking. Build once, then query many `(method, M)` points.
#[derive(Debug)]
pub struct Truncator<'a> {
    s: &'a CoefficientTensor,
    ord: &'a ProgressiveOrdering,
    group_energy: Vec<f64>,
    /// Group positions of unit-cost groups, by energy desc then position.
    singles: Vec<usize>,
    pairs: Vec<usize>,
    single_prefix: Vec<f64>,
    pair_prefix: Vec<f64>,
    reference_energy: f64,
    outside_energy: f64,
    signal_len: usize,
}

/// Compact outcome used by sweeps (no index list).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub budget: usize,
    pub cost: usize,
    pub k_eff: usize,
    pub kept_energy: f64,
    pub error_energy: f64,
    pub snr_db: f64,
}

fn ranked(positions: Vec<usize>, energy: &[f64]) -> Vec<usize> {
    let mut p = positions;
    p.sort_by(|&a, &b| match energy[b].total_cmp(&energy[a]) {
        Ordering::Equal => a.cmp(&b),
        o => o,
    });
    p
}

fn prefix(positions: &[usize], energy: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(positions.len() + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for &p in positions {
        acc += energy[p];
        out.push(acc);
    }
    out
}

impl<'a> Truncator<'a> {
    pub fn new(s: &'a CoefficientTensor, ord: &'a ProgressiveOrdering) -> Result<Self> {
        let n = s.len();
        if ord.total_cost() != n || ord.groups().iter().flat_map(|g| g.members()).any(|i| i >= n) {
            return Err(Error::ShapeMismatch(format!(
                "ordering covers {} entries, coefficients have {n}",
                ord.total_cost()
            )));
        }
        let group_energy: Vec<f64> = ord
            .groups()
            .iter()
            .map(|g| g.members().map(|i| s.entries.energy_at(i)).sum())
            .collect();
        let (singles, pairs): (Vec<usize>, Vec<usize>) =
            (0..group_energy.len()).partition(|&p| ord.groups()[p].cost() == 1);
        let singles = ranked(singles, &group_energy);
        let pairs = ranked(pairs, &group_energy);
        let coefficient_energy: f64 = group_energy.iter().sum();
        let pca = matches!(s.basis, Some(BasisSpec::Pca { .. }));
        let (reference_energy, outside_energy, signal_len) = match &s.basis {
            Some(BasisSpec::Pca { basis, .. }) => (
                s.source_energy,
                (s.centered_energy - coefficient_energy).max(0.0),
                basis.dim(),
            ),
            _ => (coefficient_energy, 0.0, n),
        };
        debug_assert!(pca || outside_energy == 0.0);
        Ok(Truncator {
            single_prefix: prefix(&singles, &group_energy),
            pair_prefix: prefix(&pairs, &group_energy),
            s,
            ord,
            group_energy,
            singles,
            pairs,
            reference_energy,
            outside_energy,
            signal_len,
        })
    }

    /// Real dimension of the signal (`N` in `C = M / N`).
    pub fn signal_len(&self) -> usize {
        self.signal_len
    }

    fn check_budget(&self, m: usize) -> Result<()> {
        if m > self.signal_len {
            return Err(Error::OutOfRange(format!(
                "budget {m} exceeds signal dimension {}",
                self.signal_len
            )));
        }
        Ok(())
    }

    fn select_prefix(&self, m: usize) -> Vec<bool> {
        let mut keep = vec![false; self.group_energy.len()];
        let mut left = m;
        for (p, g) in self.ord.groups().iter().enumerate() {
            if g.cost() > left {
                break;
            }
            left -= g.cost();
            keep[p] = true;
        }
        keep
    }

    fn select_largest(&self, m: usize) -> Vec<bool> {
        let mut keep = vec![false; self.group_energy.len()];
        let (mut best_pairs, mut best_singles, mut best) = (0, 0, f64::NEG_INFINITY);
        for p in 0..=self.pairs.len().min(m / 2) {
            let s = self.singles.len().min(m - 2 * p);
            let v = self.pair_prefix[p] + self.single_prefix[s];
            if v > best {
                (best_pairs, best_singles, best) = (p, s, v);
            }
        }
        for &p in self.pairs[..best_pairs].iter().chain(&self.singles[..best_singles]) {
            keep[p] = true;
        }
        keep
    }

    fn selection(&self, method: Method, m: usize) -> Vec<bool> {
        match method {
            Method::Tc => self.select_prefix(m),
            Method::Sc1 => self.select_largest(m),
            Method::Sc4 => self.select_largest(m / 4),
        }
    }

    fn score(&self, keep: &[bool], budget: usize) -> Outcome {
        let (mut kept, mut dropped, mut cost, mut k_eff) = (0.0, 0.0, 0, 0);
        for (p, g) in self.ord.groups().iter().enumerate() {
            if keep[p] {
                kept += self.group_energy[p];
                cost += g.cost();
                k_eff += g.members().filter(|&i| self.s.entries.energy_at(i) > 0.0).count();
            } else {
                dropped += self.group_energy[p];
            }
        }
        let error_energy = self.outside_energy + dropped;
        Outcome {
            budget,
            cost,
            k_eff,
            kept_energy: kept,
            error_energy,
            snr_db: snr_from_error(self.reference_energy, error_energy),
        }
    }

    pub fn outcome(&self, method: Method, m: usize) -> Result<Outcome> {
        self.check_budget(m)?;
        Ok(self.score(&self.selection(method, m), m))
    }

    pub fn truncate(&self, method: Method, m: usize) -> Result<TruncationResult> {
        self.check_budget(m)?;
        let keep = self.selection(method, m);
        let o = self.score(&keep, m);
        let mut kept: Vec<usize> = self
            .ord
            .groups()
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .flat_map(|(g, _)| g.members())
            .collect();
        kept.sort_unstable();
        Ok(TruncationResult {
            kept,
            budget: o.budget,
            cost: o.cost,
            k_eff: o.k_eff,
            kept_energy: o.kept_energy,
            error_energy: o.error_energy,
            snr_db: o.snr_db,
        })
    }
}

pub fn truncate_tc(s: &CoefficientTensor, ord: &ProgressiveOrdering, m: usize) -> Result<TruncationResult> {
    Truncator::new(s, ord)?.truncate(Method::Tc, m)
}

pub fn truncate_sc1(s: &CoefficientTensor, ord: &ProgressiveOrdering, m: usize) -> Result<TruncationResult> {
    Truncator::new(s, ord)?.truncate(Method::Sc1, m)
}

pub fn truncate_sc4(s: &CoefficientTensor, ord: &ProgressiveOrdering, m: usize) -> Result<TruncationResult> {
    Truncator::new(s, ord)?.truncate(Method::Sc4, m)
}
