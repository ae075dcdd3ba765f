//! Orthonormal DCT-II, applied separably.

use super::nd::for_each_line;

/// Row-major `n x n` orthonormal DCT-II matrix: `C[k][j] = a_k cos(pi (2j+1) k / 2n)`.
pub(crate) fn dct_matrix(n: usize) -> Vec<f64> {
    let nf = n as f64;
    let mut m = vec![0.0; n * n];
    for k in 0..n {
        let scale = if k == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
        for j in 0..n {
            m[k * n + j] = scale * (std::f64::consts::PI * (2 * j + 1) as f64 * k as f64 / (2.0 * nf)).cos();
        }
    }
    m
}

pub(crate) fn dct_nd(data: &mut [f64], dims: &[usize], axes: &[usize], inverse: bool) {
    let mut scratch = Vec::new();
    for &axis in axes {
        let n = dims[axis];
        if n == 1 {
            continue;
        }
        let m = dct_matrix(n);
        scratch.resize(n, 0.0);
        for_each_line(data, dims, dims, axis, |line| {
            for (k, out) in scratch.iter_mut().enumerate() {
                *out = if inverse {
                    (0..n).map(|j| m[j * n + k] * line[j]).sum()
                } else {
                    m[k * n..(k + 1) * n].iter().zip(line.iter()).map(|(a, b)| a * b).sum()
                };
            }
            line.copy_from_slice(&scratch);
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_is_orthonormal() {
        for n in [1, 2, 3, 8, 17] {
            let m = dct_matrix(n);
            for a in 0..n {
                for b in 0..n {
                    let dot: f64 = (0..n).map(|j| m[a * n + j] * m[b * n + j]).sum();
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!((dot - expect).abs() < 1e-13, "n={n} a={a} b={b} dot={dot}");
                }
            }
        }
    }
}
