//! Experiment grids over datasets, aggregation, best-basis envelopes and
//! win regions between coding methods.
//!
//! Records come out sorted by signal id, then basis and method in the order
//! they were requested, then compression factor. Parallel execution only
//! changes wall time.

mod svg;
pub mod synth;

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use svg::render_svg;

use crate::bases::{forward, progressive_order, BasisSpec};
use crate::coders::{cap_snr, measurements_for, Method, Truncator, SNR_CAP_DB};
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::signal::{center_view_subtract, DatasetManifest, Role, SignalKind, SignalTensor};

pub const DEFAULT_GRID: [f64; 10] = [0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0];

pub const RESULTS_HEADER: [&str; 8] = ["dataset", "signal_id", "basis", "method", "C", "M", "K_eff", "snr_db"];
pub const ENVELOPE_HEADER: [&str; 4] = ["method", "C", "best_snr_db", "best_basis"];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub dataset: String,
    pub signal_id: String,
    pub basis: String,
    pub method: Method,
    pub c: f64,
    pub m: usize,
    pub k_eff: usize,
    pub snr_db: f64,
}

/// Raw records keep `inf`; the SNR cap is applied by [`aggregate`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SweepOptions {
    /// Subtract the center view from light fields before analysis.
    pub center_subtract: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    /// `(signal_id, error)` for signals that produced no records.
    pub failures: Vec<(String, String)>,
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::BadParams("empty compression grid".into()));
    }
    if grid.iter().any(|c| !(0.0..=1.0).contains(c)) {
        return Err(Error::BadParams(format!("grid values must lie in [0, 1]: {grid:?}")));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadParams(format!("grid must be strictly increasing: {grid:?}")));
    }
    Ok(())
}

fn check_unique<T: PartialEq>(items: &[T], what: &str) -> Result<()> {
    if items.is_empty() {
        return Err(Error::BadParams(format!("no {what} given")));
    }
    for (i, a) in items.iter().enumerate() {
        if items[..i].contains(a) {
            return Err(Error::BadParams(format!("duplicate {what}")));
        }
    }
    Ok(())
}

fn analyze_signal(
    dataset: &str,
    id: &str,
    x: &SignalTensor,
    bases: &[BasisSpec],
    methods: &[Method],
    grid: &[f64],
    opts: &SweepOptions,
) -> Result<Vec<SweepRecord>> {
    let centered;
    let x = if opts.center_subtract && x.kind() == SignalKind::Lightfield {
        centered = center_view_subtract(x)?;
        &centered
    } else {
        x
    };
    let n = x.len();
    let mut out = Vec::with_capacity(bases.len() * methods.len() * grid.len());
    for b in bases {
        let s = forward(b, x)?;
        let ord = progressive_order(b, &s.dims)?;
        let tr = Truncator::new(&s, &ord)?;
        let token = b.token();
        for &method in methods {
            for &c in grid {
                let m = measurements_for(c, n)?;
                let o = tr.outcome(method, m)?;
                out.push(SweepRecord {
                    dataset: dataset.to_string(),
                    signal_id: id.to_string(),
                    basis: token.clone(),
                    method,
                    c,
                    m,
                    k_eff: o.k_eff,
                    snr_db: o.snr_db,
                });
            }
        }
    }
    Ok(out)
}

/// Sweep in-memory signals. A signal that fails is listed in
/// `failures` and contributes no records.
pub fn run_sweep_signals(
    dataset: &str,
    signals: &[(String, SignalTensor)],
    bases: &[BasisSpec],
    methods: &[Method],
    grid: &[f64],
    opts: &SweepOptions,
) -> Result<SweepOutput> {
    validate_grid(grid)?;
    check_unique(bases, "bases")?;
    check_unique(methods, "methods")?;
    let mut order: Vec<usize> = (0..signals.len()).collect();
    order.sort_by(|&a, &b| signals[a].0.cmp(&signals[b].0));
    let results: Vec<Result<Vec<SweepRecord>>> = order
        .par_iter()
        .map(|&i| {
            let (id, x) = &signals[i];
            analyze_signal(dataset, id, x, bases, methods, grid, opts)
        })
        .collect();
    Ok(merge(order.iter().map(|&i| signals[i].0.clone()), results))
}

fn merge(ids: impl Iterator<Item = String>, results: Vec<Result<Vec<SweepRecord>>>) -> SweepOutput {
    let mut out = SweepOutput::default();
    for (id, r) in ids.zip(results) {
        match r {
            Ok(recs) => out.records.extend(recs),
            Err(e) => out.failures.push((id, e.to_string())),
        }
    }
    out
}

/// Sweep every test entry of a dataset. Signals are loaded lazily inside
/// the parallel section; load errors are per-signal failures.
pub fn run_sweep(
    ds: &DatasetManifest,
    bases: &[BasisSpec],
    methods: &[Method],
    grid: &[f64],
    opts: &SweepOptions,
) -> Result<SweepOutput> {
    validate_grid(grid)?;
    check_unique(bases, "bases")?;
    check_unique(methods, "methods")?;
    let mut tests: Vec<_> = ds.entries_with(Role::Test).collect();
    tests.sort_by(|a, b| a.path.cmp(&b.path));
    let results: Vec<Result<Vec<SweepRecord>>> = tests
        .par_iter()
        .map(|e| {
            let x = ds.load_entry(e)?;
            analyze_signal(&ds.name, &e.path, &x, bases, methods, grid, opts)
        })
        .collect();
    Ok(merge(tests.iter().map(|e| e.path.clone()), results))
}

pub fn format_snr(snr_db: f64) -> String {
    if snr_db == f64::INFINITY {
        "inf".into()
    } else {
        format!("{snr_db:.6}")
    }
}

pub fn parse_snr(s: &str) -> Result<f64> {
    match s {
        "inf" => Ok(f64::INFINITY),
        _ => s
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::Parse(format!("bad snr value {s:?}"))),
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn results_csv(out: &SweepOutput) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RESULTS_HEADER).unwrap();
    for r in &out.records {
        w.write_record([
            r.dataset.clone(),
            r.signal_id.clone(),
            r.basis.clone(),
            r.method.to_string(),
            r.c.to_string(),
            r.m.to_string(),
            r.k_eff.to_string(),
            format_snr(r.snr_db),
        ])
        .unwrap();
    }
    let mut bytes = w.into_inner().unwrap();
    for (id, err) in &out.failures {
        writeln!(bytes, "# failed: {id}: {}", err.replace('\n', " ")).unwrap();
    }
    bytes
}

fn csv_reader(bytes: &[u8]) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(bytes)
}

fn check_header(r: &mut csv::Reader<&[u8]>, expected: &[&str]) -> Result<()> {
    let h = r.headers().map_err(csv_err)?;
    if h.iter().ne(expected.iter().copied()) {
        return Err(Error::Parse(format!("unexpected CSV header {h:?}, want {expected:?}")));
    }
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T> {
    rec[i]
        .parse()
        .map_err(|_| Error::Parse(format!("bad field {:?} in column {i}", &rec[i])))
}

pub fn parse_results_csv(bytes: &[u8]) -> Result<Vec<SweepRecord>> {
    let mut r = csv_reader(bytes);
    check_header(&mut r, &RESULTS_HEADER)?;
    r.records()
        .map(|rec| {
            let rec = rec.map_err(csv_err)?;
            Ok(SweepRecord {
                dataset: rec[0].to_string(),
                signal_id: rec[1].to_string(),
                basis: rec[2].to_string(),
                method: rec[3].parse()?,
                c: field(&rec, 4)?,
                m: field(&rec, 5)?,
                k_eff: field(&rec, 6)?,
                snr_db: parse_snr(&rec[7])?,
            })
        })
        .collect()
}

pub fn write_results_csv(out: &SweepOutput, path: &Path) -> Result<()> {
    write_atomic(path, &results_csv(out))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub basis: String,
    pub method: Method,
    pub c: f64,
    /// Mean over signals of capped SNR.
    pub mean_db: f64,
    pub median_db: f64,
    pub count: usize,
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Key positions in order of first appearance.
fn first_seen<K: PartialEq + Clone>(keys: impl Iterator<Item = K>) -> Vec<K> {
    let mut seen = Vec::new();
    for k in keys {
        if !seen.contains(&k) {
            seen.push(k);
        }
    }
    seen
}

/// Mean and median SNR per `(basis, method, C)`; `+inf` and values above
/// `cap_db` count as `cap_db`. Rows follow first-appearance order of basis
/// and method, then ascending C.
pub fn aggregate(records: &[SweepRecord], cap_db: f64) -> Result<Vec<AggregateRow>> {
    let first = records
        .first()
        .ok_or_else(|| Error::EmptyInput("no sweep records".into()))?;
    if let Some(r) = records.iter().find(|r| r.dataset != first.dataset) {
        return Err(Error::BadParams(format!(
            "records mix datasets {:?} and {:?}",
            first.dataset, r.dataset
        )));
    }
    let bases = first_seen(records.iter().map(|r| r.basis.clone()));
    let methods = first_seen(records.iter().map(|r| r.method));
    let mut groups: HashMap<(usize, usize, u64), Vec<f64>> = HashMap::new();
    for r in records {
        let b = bases.iter().position(|x| *x == r.basis).unwrap();
        let m = methods.iter().position(|x| *x == r.method).unwrap();
        groups
            .entry((b, m, r.c.to_bits()))
            .or_default()
            .push(cap_snr(r.snr_db, cap_db));
    }
    let mut keys: Vec<_> = groups.keys().copied().collect();
    keys.sort_by(|a, b| {
        (a.0, a.1)
            .cmp(&(b.0, b.1))
            .then(f64::from_bits(a.2).total_cmp(&f64::from_bits(b.2)))
    });
    Ok(keys
        .into_iter()
        .map(|k| {
            let mut v = groups.remove(&k).unwrap();
            // signal order is fixed by the record order, so the sum is reproducible
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            v.sort_by(f64::total_cmp);
            AggregateRow {
                basis: bases[k.0].clone(),
                method: methods[k.1],
                c: f64::from_bits(k.2),
                mean_db: mean,
                median_db: median(&v),
                count: v.len(),
            }
        })
        .collect())
}

pub fn aggregate_csv(rows: &[AggregateRow]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["basis", "method", "C", "mean_snr_db", "median_snr_db", "count"])
        .unwrap();
    for r in rows {
        w.write_record([
            r.basis.clone(),
            r.method.to_string(),
            r.c.to_string(),
            format_snr(r.mean_db),
            format_snr(r.median_db),
            r.count.to_string(),
        ])
        .unwrap();
    }
    w.into_inner().unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Statistic {
    #[default]
    Mean,
    Median,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeRow {
    pub method: Method,
    pub c: f64,
    pub best_snr_db: f64,
    pub best_basis: String,
}

/// Best basis per `(method, C)`. Ties go to the basis seen first.
pub fn envelope(rows: &[AggregateRow], stat: Statistic) -> Result<Vec<EnvelopeRow>> {
    if rows.is_empty() {
        return Err(Error::EmptyInput("no aggregated rows".into()));
    }
    let methods = first_seen(rows.iter().map(|r| r.method));
    let mut best: Vec<EnvelopeRow> = Vec::new();
    for r in rows {
        let v = match stat {
            Statistic::Mean => r.mean_db,
            Statistic::Median => r.median_db,
        };
        match best
            .iter_mut()
            .find(|e| e.method == r.method && e.c.to_bits() == r.c.to_bits())
        {
            Some(e) if v > e.best_snr_db => {
                e.best_snr_db = v;
                e.best_basis = r.basis.clone();
            }
            Some(_) => {}
            None => best.push(EnvelopeRow {
                method: r.method,
                c: r.c,
                best_snr_db: v,
                best_basis: r.basis.clone(),
            }),
        }
    }
    best.sort_by(|a, b| {
        let pa = methods.iter().position(|m| *m == a.method);
        let pb = methods.iter().position(|m| *m == b.method);
        pa.cmp(&pb).then(a.c.total_cmp(&b.c))
    });
    Ok(best)
}

pub fn envelope_csv(rows: &[EnvelopeRow]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(ENVELOPE_HEADER).unwrap();
    for r in rows {
        w.write_record([
            r.method.to_string(),
            r.c.to_string(),
            format_snr(r.best_snr_db),
            r.best_basis.clone(),
        ])
        .unwrap();
    }
    w.into_inner().unwrap()
}

pub fn parse_envelope_csv(bytes: &[u8]) -> Result<Vec<EnvelopeRow>> {
    let mut r = csv_reader(bytes);
    check_header(&mut r, &ENVELOPE_HEADER)?;
    r.records()
        .map(|rec| {
            let rec = rec.map_err(csv_err)?;
            Ok(EnvelopeRow {
                method: rec[0].parse()?,
                c: field(&rec, 1)?,
                best_snr_db: parse_snr(&rec[2])?,
                best_basis: rec[3].to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinReport {
    pub method_a: Method,
    pub method_b: Method,
    pub grid: Vec<f64>,
    /// `snr_a(C) - snr_b(C)` on capped values.
    pub gaps_db: Vec<f64>,
    /// Grid points where `a` is strictly better.
    pub win_region: Vec<f64>,
    pub max_gap_db: f64,
    #[serde(rename = "argmax_C")]
    pub argmax_c: f64,
}

impl WinReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

fn curve(env: &[EnvelopeRow], m: Method) -> Vec<(f64, f64)> {
    let mut c: Vec<(f64, f64)> = env
        .iter()
        .filter(|r| r.method == m)
        .map(|r| (r.c, cap_snr(r.best_snr_db, SNR_CAP_DB)))
        .collect();
    c.sort_by(|a, b| a.0.total_cmp(&b.0));
    c
}

/// Where method `a`'s envelope beats method `b`'s.
pub fn win_regions(env: &[EnvelopeRow], a: Method, b: Method) -> Result<WinReport> {
    let ca = curve(env, a);
    let cb = curve(env, b);
    if ca.is_empty() || cb.is_empty() {
        return Err(Error::GridMismatch(format!("envelope lacks {a} or {b}")));
    }
    if ca.len() != cb.len() || ca.iter().zip(&cb).any(|(p, q)| p.0 != q.0) {
        return Err(Error::GridMismatch(format!("{a} and {b} use different C grids")));
    }
    let grid: Vec<f64> = ca.iter().map(|p| p.0).collect();
    let gaps: Vec<f64> = ca.iter().zip(&cb).map(|(p, q)| p.1 - q.1).collect();
    let win_region = grid
        .iter()
        .zip(&gaps)
        .filter(|(_, &g)| g > 0.0)
        .map(|(&c, _)| c)
        .collect();
    let (mut arg, mut max) = (0, gaps[0]);
    for (i, &g) in gaps.iter().enumerate() {
        if g > max {
            (arg, max) = (i, g);
        }
    }
    Ok(WinReport {
        method_a: a,
        method_b: b,
        argmax_c: grid[arg],
        grid,
        gaps_db: gaps,
        win_region,
        max_gap_db: max,
    })
}
