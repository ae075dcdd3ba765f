//! Multilevel periodic orthonormal wavelet transforms (Haar, Daubechies-4).
//!
//! Axes of odd length are passed through untouched; every even-length axis
//! is split at each level. After `L` levels the coarsest approximation
//! occupies the leading `len / 2^L` block of each transformed axis and each
//! level's detail bands sit in the usual Mallat layout.

use super::nd::for_each_line;
use crate::error::{Error, Result};

pub const MAX_DEFAULT_LEVELS: u32 = 4;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

const HAAR: [f64; 2] = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];

// (1+sqrt3, 3+sqrt3, 3-sqrt3, 1-sqrt3) / (4 sqrt2)
const DB4: [f64; 4] = [
    0.482_962_913_144_534_16,
    0.836_516_303_737_807_9,
    0.224_143_868_042_013_4,
    -0.129_409_522_551_260_37,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wavelet {
    Haar,
    Db4,
}

impl Wavelet {
    pub fn lowpass(self) -> &'static [f64] {
        match self {
            Wavelet::Haar => &HAAR,
            Wavelet::Db4 => &DB4,
        }
    }

    /// Quadrature mirror: `g[k] = (-1)^k h[L-1-k]`.
    pub fn highpass(self) -> Vec<f64> {
        let h = self.lowpass();
        let l = h.len();
        (0..l)
            .map(|k| if k % 2 == 0 { h[l - 1 - k] } else { -h[l - 1 - k] })
            .collect()
    }
}

/// Decomposition depth and the axes it applies to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaveletLayout {
    pub levels: u32,
    pub axes: Vec<usize>,
}

pub fn resolve_layout(dims: &[usize], levels: Option<u32>) -> Result<WaveletLayout> {
    let axes: Vec<usize> = (0..dims.len()).filter(|&a| dims[a].is_multiple_of(2)).collect();
    let levels = match levels {
        Some(0) => return Err(Error::BadParams("wavelet levels must be >= 1".into())),
        Some(l) => {
            if axes.is_empty() {
                return Err(Error::BadWaveletLength {
                    len: dims[0],
                    levels: l,
                });
            }
            for &a in &axes {
                if l >= usize::BITS || !dims[a].is_multiple_of(1usize << l) {
                    return Err(Error::BadWaveletLength {
                        len: dims[a],
                        levels: l,
                    });
                }
            }
            l
        }
        None => axes
            .iter()
            .map(|&a| dims[a].trailing_zeros())
            .min()
            .unwrap_or(0)
            .min(MAX_DEFAULT_LEVELS),
    };
    Ok(WaveletLayout { levels, axes })
}

fn analyze(line: &mut [f64], scratch: &mut [f64], h: &[f64], g: &[f64]) {
    let n = line.len();
    let half = n / 2;
    for i in 0..half {
        let (mut a, mut d) = (0.0, 0.0);
        for k in 0..h.len() {
            let x = line[(2 * i + k) % n];
            a += h[k] * x;
            d += g[k] * x;
        }
        scratch[i] = a;
        scratch[half + i] = d;
    }
    line.copy_from_slice(&scratch[..n]);
}

fn synthesize(line: &mut [f64], scratch: &mut [f64], h: &[f64], g: &[f64]) {
    let n = line.len();
    let half = n / 2;
    scratch[..n].fill(0.0);
    for i in 0..half {
        let (a, d) = (line[i], line[half + i]);
        for k in 0..h.len() {
            scratch[(2 * i + k) % n] += h[k] * a + g[k] * d;
        }
    }
    line.copy_from_slice(&scratch[..n]);
}

fn region_at(dims: &[usize], layout: &WaveletLayout, level: u32) -> Vec<usize> {
    let mut region = dims.to_vec();
    for &a in &layout.axes {
        region[a] = dims[a] >> level;
    }
    region
}

pub(crate) fn dwt_nd(data: &mut [f64], dims: &[usize], wavelet: Wavelet, layout: &WaveletLayout) {
    dwt_nd_axes(data, dims, wavelet, layout, &layout.axes);
}

/// Forward transform with an explicit per-level axis visiting order.
pub(crate) fn dwt_nd_axes(
    data: &mut [f64],
    dims: &[usize],
    wavelet: Wavelet,
    layout: &WaveletLayout,
    axis_order: &[usize],
) {
    let h = wavelet.lowpass();
    let g = wavelet.highpass();
    let mut scratch = vec![0.0; dims.iter().copied().max().unwrap_or(0)];
    for level in 0..layout.levels {
        let region = region_at(dims, layout, level);
        for &axis in axis_order {
            for_each_line(data, dims, &region, axis, |line| analyze(line, &mut scratch, h, &g));
        }
    }
}

pub(crate) fn idwt_nd(data: &mut [f64], dims: &[usize], wavelet: Wavelet, layout: &WaveletLayout) {
    let h = wavelet.lowpass();
    let g = wavelet.highpass();
    let mut scratch = vec![0.0; dims.iter().copied().max().unwrap_or(0)];
    for level in (0..layout.levels).rev() {
        let region = region_at(dims, layout, level);
        for &axis in layout.axes.iter().rev() {
            for_each_line(data, dims, &region, axis, |line| synthesize(line, &mut scratch, h, &g));
        }
    }
}

/// Flat indices in progressive order: coarsest approximation, then detail
/// bands from coarse to fine. Within a level, bands are sorted by number of
/// high-pass axes then by band pattern; entries within a band are row-major.
pub(crate) fn progressive_indices(dims: &[usize], layout: &WaveletLayout) -> Vec<usize> {
    let strides = super::nd::strides(dims);
    let n: usize = dims.iter().product();
    let mut out = Vec::with_capacity(n);

    let t = layout.axes.len();
    let mut patterns: Vec<Vec<bool>> = (1u64..(1u64 << t))
        .map(|bits| (0..t).map(|i| bits >> (t - 1 - i) & 1 == 1).collect())
        .collect();
    patterns.sort_by_key(|p| (p.iter().filter(|&&b| b).count(), p.clone()));

    let mut push_block = |offset: &[usize], size: &[usize]| {
        let mut idx = vec![0usize; dims.len()];
        let total: usize = size.iter().product();
        for _ in 0..total {
            out.push(
                idx.iter()
                    .zip(offset)
                    .zip(&strides)
                    .map(|((i, o), s)| (i + o) * s)
                    .sum(),
            );
            for a in (0..dims.len()).rev() {
                idx[a] += 1;
                if idx[a] < size[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
    };

    let coarse = region_at(dims, layout, layout.levels);
    push_block(&vec![0; dims.len()], &coarse);
    for level in (1..=layout.levels).rev() {
        let size = region_at(dims, layout, level);
        for p in &patterns {
            let mut offset = vec![0; dims.len()];
            for (i, &a) in layout.axes.iter().enumerate() {
                if p[i] {
                    offset[a] = size[a];
                }
            }
            push_block(&offset, &size);
        }
    }
    debug_assert_eq!(out.len(), n);
    out
}
