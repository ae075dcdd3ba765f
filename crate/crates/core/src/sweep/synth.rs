//! Seeded synthetic stand-ins for each signal modality.
//!
//! * `image_1f`: random-phase field with amplitude `1 / (1 + |f|)`, min-max scaled to [0, 1]
//! * `cartoon`: piecewise-constant Voronoi cells
//! * `video`: an `image_1f` frame translated by a constant per-frame velocity, plus noise
//! * `multispectral`: one `image_1f` pattern scaled by a smooth spectral curve, plus
//!   spatially band-limited deviations that vary smoothly across bands
//! * `lightfield`: one periodic texture seen from every grid position, shifted by
//!   `disparity` pixels per view offset (no occlusion)
//!
//! Fractional shifts use the Fourier shift theorem on the periodic texture.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;

use crate::bases::dft_nd;
use crate::error::{Error, Result};
use crate::rng;
use crate::signal::{center_index, write_ndf, DatasetManifest, ManifestEntry, Role, SignalKind, SignalTensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SynthKind {
    Image1f,
    Cartoon,
    Video,
    Multispectral,
    Lightfield,
}

impl SynthKind {
    pub const ALL: [SynthKind; 5] = [
        SynthKind::Image1f,
        SynthKind::Cartoon,
        SynthKind::Video,
        SynthKind::Multispectral,
        SynthKind::Lightfield,
    ];

    pub fn token(self) -> &'static str {
        match self {
            SynthKind::Image1f => "image_1f",
            SynthKind::Cartoon => "cartoon",
            SynthKind::Video => "video",
            SynthKind::Multispectral => "multispectral",
            SynthKind::Lightfield => "lightfield",
        }
    }

    pub fn signal_kind(self) -> SignalKind {
        match self {
            SynthKind::Image1f | SynthKind::Cartoon => SignalKind::Image,
            SynthKind::Video => SignalKind::Video,
            SynthKind::Multispectral => SignalKind::Multispectral,
            SynthKind::Lightfield => SignalKind::Lightfield,
        }
    }
}

impl fmt::Display for SynthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SynthKind::ALL
            .into_iter()
            .find(|k| k.token() == s)
            .ok_or_else(|| Error::Parse(format!("unknown synthetic kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub height: usize,
    pub width: usize,
    /// Video length.
    pub frames: usize,
    /// Multispectral band count.
    pub bands: usize,
    /// Light-field camera grid (rows, cols).
    pub grid: (usize, usize),
    /// Light-field shift in pixels per unit grid offset.
    pub disparity: f64,
    /// Voronoi cell count for cartoons.
    pub cells: usize,
    /// Max per-frame speed in pixels for video.
    pub max_velocity: f64,
    /// Gaussian noise std-dev added to video frames.
    pub noise: f64,
    /// Amplitude of per-band deviations for multispectral data.
    pub spectral_deviation: f64,
    /// Multispectral: every band equals the base pattern.
    pub identical_bands: bool,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            height: 64,
            width: 64,
            frames: 8,
            bands: 8,
            grid: (9, 9),
            disparity: 1.0,
            cells: 16,
            max_velocity: 1.5,
            noise: 0.01,
            spectral_deviation: 0.1,
            identical_bands: false,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::BadParams(m.into()));
        if !(1..=4096).contains(&self.height) || !(1..=4096).contains(&self.width) {
            return bad("height and width must be in 1..=4096");
        }
        if self.frames == 0 || self.bands == 0 || self.cells == 0 {
            return bad("frames, bands and cells must be positive");
        }
        if self.grid.0 == 0 || self.grid.1 == 0 {
            return bad("light-field grid must be at least 1x1");
        }
        if !self.disparity.is_finite() || !self.max_velocity.is_finite() || self.max_velocity < 0.0 {
            return bad("disparity and velocity must be finite, velocity >= 0");
        }
        if !(self.noise >= 0.0 && self.noise.is_finite())
            || !(self.spectral_deviation >= 0.0 && self.spectral_deviation.is_finite())
        {
            return bad("noise and spectral_deviation must be finite and >= 0");
        }
        Ok(())
    }
}

fn signed_freq(k: usize, n: usize) -> f64 {
    if 2 * k <= n {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// Real field with random complex-Gaussian spectrum of amplitude
/// `1 / (1 + |f|)`, zero mean. `cutoff` zeroes frequencies with `|f| > cutoff`.
fn pink_field(rng: &mut ChaCha8Rng, h: usize, w: usize, cutoff: Option<f64>) -> Vec<f64> {
    let mut spec = vec![Complex64::default(); h * w];
    for ky in 0..h {
        for kx in 0..w {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let f = signed_freq(ky, h).hypot(signed_freq(kx, w));
            if (ky, kx) == (0, 0) || cutoff.is_some_and(|c| f > c) {
                continue;
            }
            spec[ky * w + kx] = Complex64::new(re, im) / (1.0 + f);
        }
    }
    dft_nd(&mut spec, &[h, w], &[0, 1], true);
    spec.into_iter().map(|c| c.re).collect()
}

fn rescale_unit(v: &mut [f64]) {
    let (lo, hi) = v
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let span = hi - lo;
    for x in v.iter_mut() {
        *x = if span > 0.0 { (*x - lo) / span } else { 0.5 };
    }
}

fn image_1f(rng: &mut ChaCha8Rng, h: usize, w: usize) -> Vec<f64> {
    let mut v = pink_field(rng, h, w, None);
    rescale_unit(&mut v);
    v
}

/// Periodic texture that can be resampled at fractional offsets.
struct ShiftableTexture {
    h: usize,
    w: usize,
    spectrum: Vec<Complex64>,
}

impl ShiftableTexture {
    fn new(values: &[f64], h: usize, w: usize) -> Self {
        let mut spectrum: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        dft_nd(&mut spectrum, &[h, w], &[0, 1], false);
        ShiftableTexture { h, w, spectrum }
    }

    /// `out(y, x) = texture(y + dy, x + dx)`, periodically.
    fn shifted(&self, dy: f64, dx: f64) -> Vec<f64> {
        let (h, w) = (self.h, self.w);
        let mut s = self.spectrum.clone();
        for ky in 0..h {
            for kx in 0..w {
                let phase = 2.0
                    * std::f64::consts::PI
                    * (signed_freq(ky, h) * dy / h as f64 + signed_freq(kx, w) * dx / w as f64);
                s[ky * w + kx] *= Complex64::from_polar(1.0, phase);
            }
        }
        dft_nd(&mut s, &[h, w], &[0, 1], true);
        s.into_iter().map(|c| c.re).collect()
    }
}

fn cartoon(rng: &mut ChaCha8Rng, h: usize, w: usize, cells: usize) -> Vec<f64> {
    let sites: Vec<(f64, f64, f64)> = (0..cells)
        .map(|_| {
            (
                rng.random::<f64>() * h as f64,
                rng.random::<f64>() * w as f64,
                rng.random::<f64>(),
            )
        })
        .collect();
    let mut out = Vec::with_capacity(h * w);
    for y in 0..h {
        for x in 0..w {
            let (py, px) = (y as f64 + 0.5, x as f64 + 0.5);
            let nearest = sites
                .iter()
                .min_by(|a, b| {
                    let da = (a.0 - py).powi(2) + (a.1 - px).powi(2);
                    let db = (b.0 - py).powi(2) + (b.1 - px).powi(2);
                    da.total_cmp(&db)
                })
                .unwrap();
            out.push(nearest.2);
        }
    }
    out
}

fn video(rng: &mut ChaCha8Rng, p: &SynthParams) -> Vec<f64> {
    let (h, w) = (p.height, p.width);
    let tex = ShiftableTexture::new(&image_1f(rng, h, w), h, w);
    let vy = (rng.random::<f64>() * 2.0 - 1.0) * p.max_velocity;
    let vx = (rng.random::<f64>() * 2.0 - 1.0) * p.max_velocity;
    let mut out = Vec::with_capacity(p.frames * h * w);
    for t in 0..p.frames {
        let frame = tex.shifted(vy * t as f64, vx * t as f64);
        out.extend(frame.into_iter().map(|v| {
            let n: f64 = rng.sample(StandardNormal);
            v + p.noise * n
        }));
    }
    out
}

fn multispectral(rng: &mut ChaCha8Rng, p: &SynthParams) -> Vec<f64> {
    let (h, w, bands) = (p.height, p.width, p.bands);
    let base = image_1f(rng, h, w);
    if p.identical_bands {
        return base.repeat(bands);
    }
    let omega = 0.3 + 0.7 * rng.random::<f64>();
    let theta = rng.random::<f64>() * std::f64::consts::TAU;
    let cutoff = (h.min(w) as f64 / 8.0).max(1.0);
    let deviations: Vec<Vec<f64>> = (0..2)
        .map(|_| {
            let mut d = pink_field(rng, h, w, Some(cutoff));
            let peak = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if peak > 0.0 {
                d.iter_mut().for_each(|v| *v /= peak);
            }
            d
        })
        .collect();
    let mut out = Vec::with_capacity(bands * h * w);
    for b in 0..bands {
        let pos = (b as f64 + 0.5) / bands as f64;
        let gain = 0.6 + 0.3 * (std::f64::consts::TAU * omega * pos + theta).sin();
        let weights: Vec<f64> = (1..=deviations.len())
            .map(|j| p.spectral_deviation * (std::f64::consts::PI * j as f64 * pos).cos())
            .collect();
        for i in 0..h * w {
            let dev: f64 = deviations.iter().zip(&weights).map(|(d, wt)| wt * d[i]).sum();
            out.push(gain * base[i] + dev);
        }
    }
    out
}

fn lightfield(rng: &mut ChaCha8Rng, p: &SynthParams) -> Vec<f64> {
    let (h, w) = (p.height, p.width);
    let (rows, cols) = p.grid;
    let tex = ShiftableTexture::new(&image_1f(rng, h, w), h, w);
    let (rc, cc) = center_index(rows, cols);
    let mut out = Vec::with_capacity(rows * cols * h * w);
    for r in 0..rows {
        for c in 0..cols {
            let dy = p.disparity * (r as f64 - rc as f64);
            let dx = p.disparity * (c as f64 - cc as f64);
            out.extend(tex.shifted(dy, dx));
        }
    }
    out
}

/// One synthetic signal, fully determined by `(kind, params, seed)`.
pub fn synth_signal(kind: SynthKind, params: &SynthParams, seed: u64) -> Result<SignalTensor> {
    params.validate()?;
    let mut r = rng::stream(seed, 0);
    let (h, w) = (params.height, params.width);
    let (dims, values) = match kind {
        SynthKind::Image1f => (vec![h, w], image_1f(&mut r, h, w)),
        SynthKind::Cartoon => (vec![h, w], cartoon(&mut r, h, w, params.cells)),
        SynthKind::Video => (vec![params.frames, h, w], video(&mut r, params)),
        SynthKind::Multispectral => (vec![params.bands, h, w], multispectral(&mut r, params)),
        SynthKind::Lightfield => (vec![params.grid.0, params.grid.1, h, w], lightfield(&mut r, params)),
    };
    SignalTensor::new(dims, values, kind.signal_kind())
}

/// Seed of test signal `i` (train signals use `i + 2^32`).
pub fn signal_seed(seed: u64, role: Role, index: usize) -> u64 {
    let offset = match role {
        Role::Test => 0,
        Role::Train => 1 << 32,
    };
    rng::derive_seed(seed, offset + index as u64)
}

/// `n_test` + `n_train` signals generated in memory, as `(id, signal)` pairs.
pub fn synth_signals(
    kind: SynthKind,
    params: &SynthParams,
    seed: u64,
    role: Role,
    count: usize,
) -> Result<Vec<(String, SignalTensor)>> {
    let role_name = match role {
        Role::Test => "test",
        Role::Train => "train",
    };
    (0..count)
        .map(|i| {
            let t = synth_signal(kind, params, signal_seed(seed, role, i))?;
            Ok((format!("{}_{role_name}_{i:04}.ndf", kind.token()), t))
        })
        .collect()
}

/// Write a synthetic dataset (NDF files plus `manifest.json`) into `dir`.
pub fn synth_dataset(
    kind: SynthKind,
    params: &SynthParams,
    seed: u64,
    n_test: usize,
    n_train: usize,
    dir: &Path,
) -> Result<DatasetManifest> {
    params.validate()?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut entries = Vec::new();
    for (role, count) in [(Role::Test, n_test), (Role::Train, n_train)] {
        for (name, t) in synth_signals(kind, params, seed, role, count)? {
            write_ndf(&t, dir.join(&name))?;
            entries.push(ManifestEntry {
                path: name,
                role,
                kind: kind.signal_kind(),
            });
        }
    }
    let manifest = DatasetManifest {
        name: format!("synthetic-{}", kind.token()),
        lightfield_grid: (kind == SynthKind::Lightfield).then_some([params.grid.0, params.grid.1]),
        entries,
        base_dir: dir.to_path_buf(),
    };
    crate::fsutil::write_atomic(&dir.join("manifest.json"), manifest.to_json().as_bytes())?;
    Ok(manifest)
}
