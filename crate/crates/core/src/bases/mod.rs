//! Orthonormal and unitary transforms over N-dimensional tensors.
//!
//! All transforms are separable and energy preserving, so truncation error
//! can be read off in the coefficient domain.

mod dct;
mod dft;
pub(crate) mod nd;
mod ordering;
pub mod wavelet;

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;

pub(crate) use dft::dft_nd;
pub use ordering::{CoeffGroup, ProgressiveOrdering};
pub use wavelet::{Wavelet, WaveletLayout};

use crate::error::{Error, Result};
use crate::pca::{load_pca, PcaBasis};
use crate::rng;
use crate::signal::{SignalKind, SignalTensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Dct,
    Dft,
    Haar,
    Db4,
    Pca,
}

#[derive(Debug, Clone)]
pub enum BasisSpec {
    Dct,
    Dft,
    Haar {
        levels: Option<u32>,
    },
    Db4 {
        levels: Option<u32>,
    },
    /// Learned basis; `source` is the token path it was loaded from.
    Pca {
        basis: Arc<PcaBasis>,
        source: String,
    },
}

impl PartialEq for BasisSpec {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (BasisSpec::Pca { basis: a, .. }, BasisSpec::Pca { basis: b, .. }) => Arc::ptr_eq(a, b) || a == b,
            (BasisSpec::Haar { levels: a }, BasisSpec::Haar { levels: b }) => a == b,
            (BasisSpec::Db4 { levels: a }, BasisSpec::Db4 { levels: b }) => a == b,
            _ => self.family() == other.family() && self.family() != Family::Pca,
        }
    }
}

impl BasisSpec {
    pub fn haar() -> Self {
        BasisSpec::Haar { levels: None }
    }

    pub fn db4() -> Self {
        BasisSpec::Db4 { levels: None }
    }

    pub fn pca(basis: PcaBasis, source: impl Into<String>) -> Self {
        BasisSpec::Pca {
            basis: Arc::new(basis),
            source: source.into(),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            BasisSpec::Dct => Family::Dct,
            BasisSpec::Dft => Family::Dft,
            BasisSpec::Haar { .. } => Family::Haar,
            BasisSpec::Db4 { .. } => Family::Db4,
            BasisSpec::Pca { .. } => Family::Pca,
        }
    }

    /// A complete basis spans the whole signal space.
    pub fn is_complete(&self) -> bool {
        match self {
            BasisSpec::Pca { basis, .. } => basis.n_components() == basis.dim(),
            _ => true,
        }
    }

    /// CLI token: `dct`, `dft`, `haar`, `db4` or `pca:<path>`.
    pub fn token(&self) -> String {
        match self {
            BasisSpec::Dct => "dct".into(),
            BasisSpec::Dft => "dft".into(),
            BasisSpec::Haar { .. } => "haar".into(),
            BasisSpec::Db4 { .. } => "db4".into(),
            BasisSpec::Pca { source, .. } => format!("pca:{source}"),
        }
    }

    /// Parse a CLI token, loading the PCA container for `pca:<path>`.
    pub fn parse(token: &str) -> Result<Self> {
        match token {
            "dct" => Ok(BasisSpec::Dct),
            "dft" => Ok(BasisSpec::Dft),
            "haar" => Ok(BasisSpec::haar()),
            "db4" => Ok(BasisSpec::db4()),
            t => match t.strip_prefix("pca:") {
                Some(path) if !path.is_empty() => Ok(BasisSpec::pca(load_pca(path)?, path)),
                _ => Err(Error::Parse(format!("unknown basis {t:?}"))),
            },
        }
    }

    fn wavelet(&self) -> Option<(Wavelet, Option<u32>)> {
        match *self {
            BasisSpec::Haar { levels } => Some((Wavelet::Haar, levels)),
            BasisSpec::Db4 { levels } => Some((Wavelet::Db4, levels)),
            _ => None,
        }
    }
}

impl fmt::Display for BasisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl Coefficients {
    pub fn len(&self) -> usize {
        match self {
            Coefficients::Real(v) => v.len(),
            Coefficients::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `|s_i|^2`
    pub fn energy_at(&self, i: usize) -> f64 {
        match self {
            Coefficients::Real(v) => v[i] * v[i],
            Coefficients::Complex(v) => v[i].norm_sqr(),
        }
    }

    pub fn energy(&self) -> f64 {
        (0..self.len()).map(|i| self.energy_at(i)).sum()
    }

    /// Copy with every entry outside `keep` set to zero.
    pub fn masked(&self, keep: &[usize]) -> Coefficients {
        match self {
            Coefficients::Real(v) => {
                let mut out = vec![0.0; v.len()];
                keep.iter().for_each(|&i| out[i] = v[i]);
                Coefficients::Real(out)
            }
            Coefficients::Complex(v) => {
                let mut out = vec![Complex64::default(); v.len()];
                keep.iter().for_each(|&i| out[i] = v[i]);
                Coefficients::Complex(out)
            }
        }
    }
}

/// Transform-domain representation of a signal.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTensor {
    pub entries: Coefficients,
    /// Source dims, or `[n_components]` for PCA.
    pub dims: Vec<usize>,
    /// `None` for raw coefficient vectors not tied to a transform.
    pub basis: Option<BasisSpec>,
    /// `||x||^2` of the source signal.
    pub source_energy: f64,
    /// `||x - mean||^2`; equals `source_energy` for complete non-PCA bases.
    pub centered_energy: f64,
}

impl CoefficientTensor {
    /// Raw real coefficients; source energy is taken as their own energy.
    pub fn from_real(values: Vec<f64>) -> Self {
        let entries = Coefficients::Real(values);
        let e = entries.energy();
        CoefficientTensor {
            dims: vec![entries.len()],
            entries,
            basis: None,
            source_energy: e,
            centered_energy: e,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.basis.as_ref().is_none_or(BasisSpec::is_complete)
    }

    pub fn masked(&self, keep: &[usize]) -> Self {
        CoefficientTensor {
            entries: self.entries.masked(keep),
            ..self.clone()
        }
    }
}

fn all_axes(dims: &[usize]) -> Vec<usize> {
    (0..dims.len()).collect()
}

pub fn forward(b: &BasisSpec, x: &SignalTensor) -> Result<CoefficientTensor> {
    let dims = x.dims().to_vec();
    let energy = x.energy();
    let (entries, out_dims, centered) = match b {
        BasisSpec::Dct => {
            let mut v = x.values().to_vec();
            dct::dct_nd(&mut v, &dims, &all_axes(&dims), false);
            (Coefficients::Real(v), dims, energy)
        }
        BasisSpec::Dft => {
            let mut v: Vec<Complex64> = x.values().iter().map(|&r| Complex64::new(r, 0.0)).collect();
            dft::dft_nd(&mut v, &dims, &all_axes(&dims), false);
            (Coefficients::Complex(v), dims, energy)
        }
        BasisSpec::Haar { .. } | BasisSpec::Db4 { .. } => {
            let (w, levels) = b.wavelet().unwrap();
            let layout = wavelet::resolve_layout(&dims, levels)?;
            let mut v = x.values().to_vec();
            wavelet::dwt_nd(&mut v, &dims, w, &layout);
            (Coefficients::Real(v), dims, energy)
        }
        BasisSpec::Pca { basis, .. } => {
            let (s, centered) = basis.project(x)?;
            (Coefficients::Real(s), vec![basis.n_components()], centered)
        }
    };
    Ok(CoefficientTensor {
        entries,
        dims: out_dims,
        basis: Some(b.clone()),
        source_energy: energy,
        centered_energy: centered,
    })
}

/// Inverse transform. For a truncated PCA expansion this gives the mean
/// plus the retained components; for DFT the real part is returned.
pub fn inverse(b: &BasisSpec, s: &CoefficientTensor) -> Result<SignalTensor> {
    let n: usize = s.dims.iter().product();
    if n != s.entries.len() {
        return Err(Error::ShapeMismatch(format!(
            "dims {:?} vs {} coefficients",
            s.dims,
            s.entries.len()
        )));
    }
    let dims = s.dims.clone();
    match (b, &s.entries) {
        (BasisSpec::Dct, Coefficients::Real(v)) => {
            let mut v = v.clone();
            dct::dct_nd(&mut v, &dims, &all_axes(&dims), true);
            SignalTensor::new(dims, v, SignalKind::Generic)
        }
        (BasisSpec::Dft, Coefficients::Complex(v)) => {
            let mut v = v.clone();
            dft::dft_nd(&mut v, &dims, &all_axes(&dims), true);
            SignalTensor::new(dims, v.into_iter().map(|c| c.re).collect(), SignalKind::Generic)
        }
        (BasisSpec::Haar { .. } | BasisSpec::Db4 { .. }, Coefficients::Real(v)) => {
            let (w, levels) = b.wavelet().unwrap();
            let layout = wavelet::resolve_layout(&dims, levels)?;
            let mut v = v.clone();
            wavelet::idwt_nd(&mut v, &dims, w, &layout);
            SignalTensor::new(dims, v, SignalKind::Generic)
        }
        (BasisSpec::Pca { basis, .. }, Coefficients::Real(v)) => basis.reconstruct(v),
        _ => Err(Error::ShapeMismatch(format!(
            "coefficient kind does not match basis {b}"
        ))),
    }
}

/// Forward transform visiting axes in a caller-chosen order. Only the
/// separable transforms are affected by this; used to check that axis
/// order does not matter.
pub fn forward_with_axis_order(b: &BasisSpec, x: &SignalTensor, axis_order: &[usize]) -> Result<CoefficientTensor> {
    let dims = x.dims().to_vec();
    let mut sorted = axis_order.to_vec();
    sorted.sort_unstable();
    if sorted != all_axes(&dims) {
        return Err(Error::BadParams(format!("{axis_order:?} is not an axis permutation")));
    }
    let mut out = forward(b, x)?;
    out.entries = match b {
        BasisSpec::Dct => {
            let mut v = x.values().to_vec();
            dct::dct_nd(&mut v, &dims, axis_order, false);
            Coefficients::Real(v)
        }
        BasisSpec::Dft => {
            let mut v: Vec<Complex64> = x.values().iter().map(|&r| Complex64::new(r, 0.0)).collect();
            dft::dft_nd(&mut v, &dims, axis_order, false);
            Coefficients::Complex(v)
        }
        BasisSpec::Haar { .. } | BasisSpec::Db4 { .. } => {
            let (w, levels) = b.wavelet().unwrap();
            let layout = wavelet::resolve_layout(&dims, levels)?;
            let order: Vec<usize> = axis_order.iter().copied().filter(|a| layout.axes.contains(a)).collect();
            let mut v = x.values().to_vec();
            wavelet::dwt_nd_axes(&mut v, &dims, w, &layout, &order);
            Coefficients::Real(v)
        }
        BasisSpec::Pca { .. } => out.entries,
    };
    Ok(out)
}

pub fn progressive_order(b: &BasisSpec, dims: &[usize]) -> Result<ProgressiveOrdering> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::ShapeMismatch(format!("invalid dims {dims:?}")));
    }
    Ok(match b {
        BasisSpec::Dct => ordering::dct_order(dims),
        BasisSpec::Dft => ordering::dft_order(dims),
        BasisSpec::Haar { levels } | BasisSpec::Db4 { levels } => {
            let layout = wavelet::resolve_layout(dims, *levels)?;
            ProgressiveOrdering::new(
                wavelet::progressive_indices(dims, &layout)
                    .into_iter()
                    .map(CoeffGroup::single)
                    .collect(),
            )
        }
        BasisSpec::Pca { basis, .. } => {
            if dims != basis.source_dims() && dims != [basis.n_components()] {
                return Err(Error::ShapeMismatch(format!(
                    "pca basis trained on {:?}, got {dims:?}",
                    basis.source_dims()
                )));
            }
            ProgressiveOrdering::identity(basis.n_components())
        }
    })
}

/// Worst relative Parseval error `| ||Phi x||^2 - ||x||^2 | / ||x||^2` over
/// `trials` seeded Gaussian tensors. PCA compares against the centered energy.
pub fn orthonormality_check(b: &BasisSpec, dims: &[usize], trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::BadParams("trials must be >= 1".into()));
    }
    let n: usize = dims.iter().product();
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let mut r = rng::stream(seed, t as u64);
        let x = SignalTensor::new(dims.to_vec(), rng::gaussian_vec(&mut r, n), SignalKind::Generic)?;
        let s = forward(b, &x)?;
        let reference = s.centered_energy;
        if reference == 0.0 {
            continue;
        }
        worst = worst.max((s.entries.energy() - reference).abs() / reference);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(dims: Vec<usize>, values: Vec<f64>) -> SignalTensor {
        SignalTensor::new(dims, values, SignalKind::Generic).unwrap()
    }

    fn random(dims: &[usize], seed: u64) -> SignalTensor {
        let n = dims.iter().product();
        t(dims.to_vec(), rng::gaussian_vec(&mut rng::stream(seed, 0), n))
    }

    fn all() -> Vec<BasisSpec> {
        vec![BasisSpec::Dct, BasisSpec::Dft, BasisSpec::haar(), BasisSpec::db4()]
    }

    #[test]
    fn dct_constant_to_dc() {
        let s = forward(&BasisSpec::Dct, &t(vec![4], vec![1.0; 4])).unwrap();
        let Coefficients::Real(v) = s.entries else { panic!() };
        assert!((v[0] - 2.0).abs() < 1e-15);
        assert!(v[1..].iter().all(|c| c.abs() < 1e-15));
    }

    #[test]
    fn dft_impulse_is_flat() {
        let s = forward(&BasisSpec::Dft, &t(vec![4], vec![1.0, 0.0, 0.0, 0.0])).unwrap();
        let Coefficients::Complex(v) = s.entries else { panic!() };
        assert!(v.iter().all(|c| (c.norm() - 0.5).abs() < 1e-15));
    }

    #[test]
    fn haar_constant_to_approx() {
        let s = forward(&BasisSpec::haar(), &t(vec![4], vec![1.0; 4])).unwrap();
        let Coefficients::Real(v) = s.entries else { panic!() };
        assert!((v[0] - 2.0).abs() < 1e-15);
        assert!(v[1..].iter().all(|c| c.abs() < 1e-15));
    }

    #[test]
    fn db4_parseval_length_16() {
        let x = random(&[16], 11);
        let s = forward(&BasisSpec::db4(), &x).unwrap();
        assert!((s.entries.energy() - x.energy()).abs() <= 1e-9 * x.energy());
    }

    #[test]
    fn roundtrip_and_zero_inverse() {
        let x = random(&[8, 8], 3);
        for b in all() {
            let back = inverse(&b, &forward(&b, &x).unwrap()).unwrap();
            let err: f64 = back.values().iter().zip(x.values()).map(|(a, b)| (a - b).powi(2)).sum();
            assert!(err.sqrt() <= 1e-9 * x.energy().sqrt(), "{b}");
        }
        let mut z = forward(&BasisSpec::Dct, &x).unwrap();
        z.entries = Coefficients::Real(vec![0.0; 64]);
        assert!(inverse(&BasisSpec::Dct, &z).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn odd_and_mixed_shapes() {
        for dims in [vec![9], vec![3, 6], vec![9, 9, 4, 4], vec![5, 1, 2]] {
            let x = random(&dims, 5);
            for b in all() {
                let s = forward(&b, &x).unwrap();
                assert!(
                    (s.entries.energy() - x.energy()).abs() <= 1e-9 * x.energy(),
                    "{b} {dims:?}"
                );
                let back = inverse(&b, &s).unwrap();
                let err: f64 = back.values().iter().zip(x.values()).map(|(a, b)| (a - b).powi(2)).sum();
                assert!(err.sqrt() <= 1e-9 * x.energy().sqrt(), "{b} {dims:?}");
                assert_eq!(progressive_order(&b, &dims).unwrap().total_cost(), x.len());
            }
        }
    }

    #[test]
    fn wavelet_rejects_bad_length() {
        let x = random(&[12], 1);
        let b = BasisSpec::Haar { levels: Some(3) };
        assert!(matches!(forward(&b, &x), Err(Error::BadWaveletLength { .. })));
    }

    #[test]
    fn separable_in_any_axis_order() {
        let dims = [4, 2, 8];
        let x = random(&dims, 9);
        let orders = [[0, 1, 2], [2, 1, 0], [1, 2, 0]];
        for b in all() {
            let base = forward(&b, &x).unwrap();
            for o in orders {
                let other = forward_with_axis_order(&b, &x, &o).unwrap();
                let diff = match (&base.entries, &other.entries) {
                    (Coefficients::Real(a), Coefficients::Real(c)) => {
                        a.iter().zip(c).map(|(p, q)| (p - q).powi(2)).sum::<f64>()
                    }
                    (Coefficients::Complex(a), Coefficients::Complex(c)) => {
                        a.iter().zip(c).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>()
                    }
                    _ => unreachable!(),
                };
                assert!(diff.sqrt() <= 1e-12 * x.energy().sqrt(), "{b} {o:?}");
            }
        }
    }

    #[test]
    fn linearity() {
        let x = random(&[8, 4], 1);
        let y = random(&[8, 4], 2);
        let (a, c) = (1.5, -0.25);
        let z = t(
            vec![8, 4],
            x.values().iter().zip(y.values()).map(|(p, q)| a * p + c * q).collect(),
        );
        for b in all() {
            let (fx, fy, fz) = (
                forward(&b, &x).unwrap(),
                forward(&b, &y).unwrap(),
                forward(&b, &z).unwrap(),
            );
            let err: f64 = match (&fx.entries, &fy.entries, &fz.entries) {
                (Coefficients::Real(p), Coefficients::Real(q), Coefficients::Real(r)) => {
                    (0..32).map(|i| (a * p[i] + c * q[i] - r[i]).powi(2)).sum()
                }
                (Coefficients::Complex(p), Coefficients::Complex(q), Coefficients::Complex(r)) => {
                    (0..32).map(|i| (p[i] * a + q[i] * c - r[i]).norm_sqr()).sum()
                }
                _ => unreachable!(),
            };
            assert!(err.sqrt() <= 1e-9 * z.energy().sqrt(), "{b}");
        }
    }

    #[test]
    fn orthonormality_checks() {
        assert!(orthonormality_check(&BasisSpec::Dct, &[16, 16], 10, 1).unwrap() <= 1e-9);
        assert!(orthonormality_check(&BasisSpec::haar(), &[8], 10, 1).unwrap() <= 1e-9);
        assert!(orthonormality_check(&BasisSpec::Dct, &[4], 0, 1).is_err());
    }

    #[test]
    fn tokens() {
        for tok in ["dct", "dft", "haar", "db4"] {
            assert_eq!(BasisSpec::parse(tok).unwrap().token(), tok);
        }
        assert!(BasisSpec::parse("fourier").is_err());
        assert!(BasisSpec::parse("pca:").is_err());
        assert!(matches!(
            BasisSpec::parse("pca:/nonexistent/file.pca"),
            Err(Error::Io { .. })
        ));
    }
}
