//! Data-dependent orthonormal basis learned by principal component analysis.
//!
//! When there are fewer samples than dimensions the eigenvectors come from
//! the `n x n` Gram matrix of the centered samples (snapshot method) and are
//! lifted back to signal space.
//!
//! Container layout: three NDF records back to back, namely the mean (with
//! the source dims), the components `[k, N]`, and the eigenvalues `[k]`.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::signal::{decode_ndf_prefix, encode_ndf, SignalKind, SignalTensor};

/// Relative eigenvalue floor below which a direction counts as rank-deficient.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaBasis {
    mean: Vec<f64>,
    /// Row-major `n_components x dim`.
    components: Vec<f64>,
    eigenvalues: Vec<f64>,
    source_dims: Vec<usize>,
}

/// Result of training: the basis plus how many components were asked for.
#[derive(Debug, Clone)]
pub struct PcaFit {
    pub basis: PcaBasis,
    pub requested: usize,
}

impl PcaFit {
    pub fn is_rank_deficient(&self) -> bool {
        self.basis.n_components() < self.requested
    }
}

impl PcaBasis {
    pub fn new(mean: Vec<f64>, components: Vec<f64>, eigenvalues: Vec<f64>, source_dims: Vec<usize>) -> Result<Self> {
        let dim: usize = source_dims.iter().product();
        let k = eigenvalues.len();
        if mean.len() != dim || components.len() != k * dim || k == 0 {
            return Err(Error::ShapeMismatch(format!(
                "mean {} / components {} / eigenvalues {k} inconsistent with dims {source_dims:?}",
                mean.len(),
                components.len()
            )));
        }
        Ok(PcaBasis {
            mean,
            components,
            eigenvalues,
            source_dims,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn n_components(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn component(&self, i: usize) -> &[f64] {
        &self.components[i * self.dim()..(i + 1) * self.dim()]
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn source_dims(&self) -> &[usize] {
        &self.source_dims
    }

    /// Coefficients `<c_i, x - mean>` and the centered energy `||x - mean||^2`.
    pub fn project(&self, x: &SignalTensor) -> Result<(Vec<f64>, f64)> {
        if x.dims() != self.source_dims.as_slice() {
            return Err(Error::ShapeMismatch(format!(
                "pca basis trained on {:?}, got {:?}",
                self.source_dims,
                x.dims()
            )));
        }
        let centered: Vec<f64> = x.values().iter().zip(&self.mean).map(|(a, m)| a - m).collect();
        let energy = centered.iter().map(|v| v * v).sum();
        let s = (0..self.n_components())
            .map(|i| dot(self.component(i), &centered))
            .collect();
        Ok((s, energy))
    }

    /// `mean + sum_i s_i c_i`
    pub fn reconstruct(&self, s: &[f64]) -> Result<SignalTensor> {
        if s.len() != self.n_components() {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients for {} components",
                s.len(),
                self.n_components()
            )));
        }
        let mut out = self.mean.clone();
        for (i, &si) in s.iter().enumerate() {
            if si != 0.0 {
                for (o, c) in out.iter_mut().zip(self.component(i)) {
                    *o += si * c;
                }
            }
        }
        SignalTensor::new(self.source_dims.clone(), out, SignalKind::Generic)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Eigenpairs of a symmetric matrix sorted by eigenvalue, descending.
fn sorted_eigen(m: DMatrix<f64>) -> Vec<(f64, Vec<f64>)> {
    let eig = SymmetricEigen::new(m);
    let mut pairs: Vec<(f64, Vec<f64>)> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .map(|(&l, v)| (l, v.iter().copied().collect()))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs
}

pub fn train_pca(train: &[SignalTensor], n_components: usize) -> Result<PcaFit> {
    let n = train.len();
    if n < 2 {
        return Err(Error::TooFewSamples(n));
    }
    let dims = train[0].dims().to_vec();
    if let Some(bad) = train.iter().find(|t| t.dims() != dims.as_slice()) {
        return Err(Error::DimMismatch(format!("{:?} vs {dims:?}", bad.dims())));
    }
    let dim = train[0].len();
    if n_components == 0 || n_components > dim.min(n) {
        return Err(Error::BadParams(format!(
            "n_components must be in 1..={}, got {n_components}",
            dim.min(n)
        )));
    }

    let mut mean = vec![0.0; dim];
    for t in train {
        for (m, v) in mean.iter_mut().zip(t.values()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let centered = DMatrix::from_fn(n, dim, |i, j| train[i].values()[j] - mean[j]);
    let denom = (n - 1) as f64;

    let (eigenvalues, mut vectors): (Vec<f64>, Vec<Vec<f64>>) = if n < dim {
        let gram = (&centered * centered.transpose()) / denom;
        sorted_eigen(gram)
            .into_iter()
            .map(|(l, v)| {
                let lifted = centered.transpose() * nalgebra::DVector::from_vec(v);
                (l, lifted.iter().copied().collect())
            })
            .unzip()
    } else {
        let cov = (centered.transpose() * &centered) / denom;
        sorted_eigen(cov).into_iter().unzip()
    };

    let top = eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let rank = eigenvalues
        .iter()
        .take_while(|&&l| top > 0.0 && l > RANK_TOL * top)
        .count();
    if rank == 0 {
        return Err(Error::RankDeficient {
            requested: n_components,
            rank: 0,
        });
    }
    let k = n_components.min(rank);
    vectors.truncate(k);

    // two passes of modified Gram-Schmidt, also normalizes lifted snapshots
    for _ in 0..2 {
        for i in 0..k {
            let (done, rest) = vectors.split_at_mut(i);
            let v = &mut rest[0];
            for u in done.iter() {
                let p = dot(u, v);
                v.iter_mut().zip(u).for_each(|(a, b)| *a -= p * b);
            }
            let norm = dot(v, v).sqrt();
            v.iter_mut().for_each(|a| *a /= norm);
        }
    }
    // sign: largest-magnitude entry positive, lowest index on ties
    for v in vectors.iter_mut() {
        let mut best = 0;
        for (j, a) in v.iter().enumerate() {
            if a.abs() > v[best].abs() {
                best = j;
            }
        }
        if v[best] < 0.0 {
            v.iter_mut().for_each(|a| *a = -*a);
        }
    }

    let eigenvalues = eigenvalues[..k].iter().map(|&l| l.max(0.0)).collect();
    let basis = PcaBasis::new(mean, vectors.concat(), eigenvalues, dims)?;
    Ok(PcaFit {
        basis,
        requested: n_components,
    })
}

pub fn encode_pca(b: &PcaBasis) -> Vec<u8> {
    let k = b.n_components();
    let mean =
        SignalTensor::new(b.source_dims.clone(), b.mean.clone(), SignalKind::Generic).expect("basis invariants hold");
    let comps =
        SignalTensor::new(vec![k, b.dim()], b.components.clone(), SignalKind::Generic).expect("basis invariants hold");
    let eig = SignalTensor::new(vec![k], b.eigenvalues.clone(), SignalKind::Generic).expect("basis invariants hold");
    [encode_ndf(&mean), encode_ndf(&comps), encode_ndf(&eig)].concat()
}

pub fn decode_pca(bytes: &[u8]) -> Result<PcaBasis> {
    let (mean, a) = decode_ndf_prefix(bytes)?;
    let (comps, b) = decode_ndf_prefix(&bytes[a..])?;
    let (eig, c) = decode_ndf_prefix(&bytes[a + b..])?;
    let used = a + b + c;
    if used != bytes.len() {
        return Err(Error::TrailingBytes((bytes.len() - used) as u64));
    }
    let k = eig.len();
    if comps.dims() != [k, mean.len()] || eig.dims().len() != 1 {
        return Err(Error::ShapeMismatch(format!(
            "components {:?} vs {k} eigenvalues and mean of length {}",
            comps.dims(),
            mean.len()
        )));
    }
    let dims = mean.dims().to_vec();
    PcaBasis::new(mean.into_values(), comps.into_values(), eig.into_values(), dims)
}

pub fn save_pca(b: &PcaBasis, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &encode_pca(b))
}

pub fn load_pca(path: impl AsRef<Path>) -> Result<PcaBasis> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pca(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{forward, orthonormality_check, BasisSpec};
    use crate::rng;

    fn vec2(a: f64, b: f64) -> SignalTensor {
        SignalTensor::new(vec![2], vec![a, b], SignalKind::Generic).unwrap()
    }

    fn random_set(n: usize, dims: &[usize], seed: u64) -> Vec<SignalTensor> {
        let d: usize = dims.iter().product();
        (0..n)
            .map(|i| {
                let v = rng::gaussian_vec(&mut rng::stream(seed, i as u64), d);
                SignalTensor::new(dims.to_vec(), v, SignalKind::Generic).unwrap()
            })
            .collect()
    }

    #[test]
    fn two_dim_hand_case() {
        // sum x x^T = [[10,10],[10,10]], /(n-1)=3; top eigenpair (20/3, (1,1)/sqrt2)
        let samples = [vec2(1.0, 1.0), vec2(-1.0, -1.0), vec2(2.0, 2.0), vec2(-2.0, -2.0)];
        let fit = train_pca(&samples, 1).unwrap();
        let b = &fit.basis;
        assert_eq!(b.mean(), &[0.0, 0.0]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((b.component(0)[0] - h).abs() < 1e-12);
        assert!((b.component(0)[1] - h).abs() < 1e-12);
        assert!((b.eigenvalues()[0] - 20.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn identical_samples_are_rank_deficient() {
        let samples = vec![vec2(1.0, 2.0); 3];
        assert!(matches!(
            train_pca(&samples, 1),
            Err(Error::RankDeficient { rank: 0, .. })
        ));
    }

    #[test]
    fn partial_rank_is_flagged() {
        let samples = [vec2(1.0, 1.0), vec2(-1.0, -1.0), vec2(3.0, 3.0)];
        let fit = train_pca(&samples, 2).unwrap();
        assert!(fit.is_rank_deficient());
        assert_eq!(fit.basis.n_components(), 1);
    }

    #[test]
    fn contract_errors() {
        assert!(matches!(train_pca(&[vec2(1.0, 0.0)], 1), Err(Error::TooFewSamples(1))));
        let one = SignalTensor::new(vec![3], vec![0.0; 3], SignalKind::Generic).unwrap();
        assert!(matches!(
            train_pca(&[vec2(1.0, 0.0), one], 1),
            Err(Error::DimMismatch(_))
        ));
        assert!(train_pca(&[vec2(1.0, 0.0), vec2(0.0, 1.0)], 3).is_err());
    }

    fn check_orthonormal(b: &PcaBasis) {
        for i in 0..b.n_components() {
            for j in 0..b.n_components() {
                let d = dot(b.component(i), b.component(j));
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((d - e).abs() <= 1e-8, "({i},{j}) {d}");
            }
        }
        assert!(b.eigenvalues().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn components_are_orthonormal() {
        // 6 samples in 8 dims takes the Gram path, 12 in 4 the covariance path
        check_orthonormal(&train_pca(&random_set(6, &[8], 1), 5).unwrap().basis);
        check_orthonormal(&train_pca(&random_set(12, &[4], 2), 4).unwrap().basis);
    }

    #[test]
    fn gram_path_matches_covariance_path() {
        // 3 samples in 3 dims (covariance) vs same samples zero-padded to 4 dims (gram)
        let base = random_set(3, &[3], 4);
        let padded: Vec<_> = base
            .iter()
            .map(|t| {
                let mut v = t.values().to_vec();
                v.push(0.0);
                SignalTensor::new(vec![4], v, SignalKind::Generic).unwrap()
            })
            .collect();
        let a = train_pca(&base, 2).unwrap().basis;
        let b = train_pca(&padded, 2).unwrap().basis;
        for i in 0..2 {
            assert!((a.eigenvalues()[i] - b.eigenvalues()[i]).abs() < 1e-10);
            for j in 0..3 {
                assert!((a.component(i)[j] - b.component(i)[j]).abs() < 1e-9);
            }
            assert!(b.component(i)[3].abs() < 1e-12);
        }
    }

    #[test]
    fn sign_convention() {
        let fit = train_pca(&random_set(10, &[6], 5), 4).unwrap();
        for i in 0..4 {
            let c = fit.basis.component(i);
            let max = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let first = c.iter().find(|v| v.abs() == max).unwrap();
            assert!(*first > 0.0);
        }
    }

    #[test]
    fn zero_coefficients_give_mean() {
        let fit = train_pca(&random_set(5, &[2, 3], 6), 2).unwrap();
        let rec = fit.basis.reconstruct(&[0.0, 0.0]).unwrap();
        assert_eq!(rec.values(), fit.basis.mean());
        assert_eq!(rec.dims(), &[2, 3]);
    }

    #[test]
    fn mean_projects_to_zero() {
        let fit = train_pca(&random_set(9, &[16], 7), 6).unwrap();
        let b = &fit.basis;
        // training mean, centered, is the zero vector
        let m = SignalTensor::new(vec![16], b.mean().to_vec(), SignalKind::Generic).unwrap();
        let (s, _) = b.project(&m).unwrap();
        let norm = dot(b.mean(), b.mean()).sqrt();
        assert!(s.iter().all(|v| v.abs() <= 1e-9 * norm.max(1.0)));
    }

    #[test]
    fn complete_basis_parseval() {
        let fit = train_pca(&random_set(20, &[8], 8), 8).unwrap();
        let spec = BasisSpec::pca(fit.basis, "mem");
        assert!(spec.is_complete());
        assert!(orthonormality_check(&spec, &[8], 10, 3).unwrap() <= 1e-9);
        let x = &random_set(1, &[8], 99)[0];
        let s = forward(&spec, x).unwrap();
        assert!((s.entries.energy() - s.centered_energy).abs() <= 1e-9 * s.centered_energy);
    }

    #[test]
    fn container_roundtrip_and_errors() {
        let b = train_pca(&random_set(6, &[3, 3], 9), 4).unwrap().basis;
        let bytes = encode_pca(&b);
        let back = decode_pca(&bytes).unwrap();
        assert_eq!(back, b);
        assert_eq!(encode_pca(&back), bytes);
        assert!(matches!(
            decode_pca(&bytes[..bytes.len() - 3]),
            Err(Error::TruncatedFile { .. })
        ));
        // eigenvalue record claims 3 components while payload has 4
        let short_eig = PcaBasis {
            eigenvalues: vec![1.0; 3],
            ..b.clone()
        };
        let mut bad = encode_ndf(&SignalTensor::new(vec![3, 3], b.mean.clone(), SignalKind::Generic).unwrap());
        bad.extend(encode_ndf(
            &SignalTensor::new(vec![4, 9], b.components.clone(), SignalKind::Generic).unwrap(),
        ));
        bad.extend(encode_ndf(
            &SignalTensor::new(vec![3], short_eig.eigenvalues, SignalKind::Generic).unwrap(),
        ));
        assert!(matches!(decode_pca(&bad), Err(Error::ShapeMismatch(_))));

        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b.pca");
        save_pca(&b, &p).unwrap();
        assert_eq!(load_pca(&p).unwrap(), b);
    }
}
