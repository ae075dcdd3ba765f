//! N-dimensional signals, the NDF container, PGM input, dataset manifests
//! and light-field preprocessing.
//!
//! NDF layout (all integers little-endian):
//!
//! ```text
//! "NDSF" | u32 version (=1) | u32 ndim | ndim x u64 dims | prod(dims) x f64 values
//! ```
//!
//! Values are stored row-major.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsutil::write_atomic;

pub const NDF_MAGIC: &[u8; 4] = b"NDSF";
pub const NDF_VERSION: u32 = 1;
const MAX_ELEMENTS: u128 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalKind {
    Image,
    Video,
    Multispectral,
    Lightfield,
    #[default]
    Generic,
}

impl SignalKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SignalKind::Image => "image",
            SignalKind::Video => "video",
            SignalKind::Multispectral => "multispectral",
            SignalKind::Lightfield => "lightfield",
            SignalKind::Generic => "generic",
        }
    }
}

impl fmt::Display for SignalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SignalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "image" => Ok(SignalKind::Image),
            "video" => Ok(SignalKind::Video),
            "multispectral" => Ok(SignalKind::Multispectral),
            "lightfield" => Ok(SignalKind::Lightfield),
            "generic" => Ok(SignalKind::Generic),
            other => Err(Error::Parse(format!("unknown signal kind {other:?}"))),
        }
    }
}

/// A finite, real-valued, row-major N-dimensional array.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalTensor {
    dims: Vec<usize>,
    values: Vec<f64>,
    kind: SignalKind,
}

impl SignalTensor {
    pub fn new(dims: Vec<usize>, values: Vec<f64>, kind: SignalKind) -> Result<Self> {
        check_dims(&dims)?;
        let n: usize = dims.iter().product();
        if n != values.len() {
            return Err(Error::InvalidTensor(format!(
                "dims {dims:?} describe {n} values but {} were given",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidTensor(format!(
                "non-finite value {} at flat index {i}",
                values[i]
            )));
        }
        if kind == SignalKind::Lightfield && dims.len() != 4 {
            return Err(Error::InvalidTensor(format!(
                "light fields need 4 axes (grid_v, grid_u, height, width), got {dims:?}"
            )));
        }
        Ok(SignalTensor { dims, values, kind })
    }

    pub fn zeros(dims: Vec<usize>, kind: SignalKind) -> Result<Self> {
        let n = dims.iter().product();
        Self::new(dims, vec![0.0; n], kind)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn kind(&self) -> SignalKind {
        self.kind
    }

    pub fn with_kind(self, kind: SignalKind) -> Result<Self> {
        Self::new(self.dims, self.values, kind)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Squared Euclidean norm.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Copy of the 2D slice `[r, c, :, :]` of a 4-axis tensor.
    pub fn view(&self, r: usize, c: usize) -> Result<SignalTensor> {
        if self.dims.len() != 4 {
            return Err(Error::NotALightfield(format!("dims {:?}", self.dims)));
        }
        let [rows, cols, h, w] = [self.dims[0], self.dims[1], self.dims[2], self.dims[3]];
        if r >= rows || c >= cols {
            return Err(Error::OutOfRange(format!("view ({r},{c}) outside {rows}x{cols} grid")));
        }
        let start = (r * cols + c) * h * w;
        SignalTensor::new(
            vec![h, w],
            self.values[start..start + h * w].to_vec(),
            SignalKind::Image,
        )
    }
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::InvalidTensor("tensor needs at least one axis".into()));
    }
    if dims.contains(&0) {
        return Err(Error::InvalidTensor(format!("zero-length axis in {dims:?}")));
    }
    let mut n: u128 = 1;
    for &d in dims {
        n = n.saturating_mul(d as u128);
        if n > MAX_ELEMENTS {
            return Err(Error::DimOverflow);
        }
    }
    Ok(())
}

pub fn encode_ndf(t: &SignalTensor) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + 8 * t.dims.len() + 8 * t.values.len());
    out.extend_from_slice(NDF_MAGIC);
    out.extend_from_slice(&NDF_VERSION.to_le_bytes());
    out.extend_from_slice(&(t.dims.len() as u32).to_le_bytes());
    for &d in &t.dims {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
    for v in &t.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(Error::TruncatedFile {
                needed: self.pos as u64 + n as u64,
                found: self.bytes.len() as u64,
            }),
        }
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

fn decode_header(r: &mut Reader<'_>) -> Result<Vec<usize>> {
    if r.take(4)? != NDF_MAGIC {
        return Err(Error::BadMagic { expected: "NDSF" });
    }
    let version = r.u32()?;
    if version != NDF_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let ndim = r.u32()? as usize;
    if ndim == 0 {
        return Err(Error::InvalidTensor("ndim is 0".into()));
    }
    let mut dims = Vec::with_capacity(ndim.min(64));
    let mut n: u128 = 1;
    for _ in 0..ndim {
        let d = r.u64()?;
        n = n.saturating_mul(d as u128);
        if n > MAX_ELEMENTS {
            return Err(Error::DimOverflow);
        }
        dims.push(d as usize);
    }
    Ok(dims)
}

/// Decode one NDF record at the start of `bytes`; returns the tensor and
/// the number of bytes consumed.
pub fn decode_ndf_prefix(bytes: &[u8]) -> Result<(SignalTensor, usize)> {
    let mut r = Reader { bytes, pos: 0 };
    let dims = decode_header(&mut r)?;
    check_dims(&dims)?;
    let n: usize = dims.iter().product();
    let payload = r.take(n * 8)?;
    let values = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let t = SignalTensor::new(dims, values, SignalKind::Generic)?;
    Ok((t, r.pos))
}

pub fn decode_ndf(bytes: &[u8]) -> Result<SignalTensor> {
    let (t, used) = decode_ndf_prefix(bytes)?;
    if used != bytes.len() {
        return Err(Error::TrailingBytes((bytes.len() - used) as u64));
    }
    Ok(t)
}

pub fn read_ndf(path: impl AsRef<Path>) -> Result<SignalTensor> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_ndf(&bytes)
}

/// Dims of an NDF file, reading only its header.
pub fn read_ndf_dims(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    use std::io::Read;
    let path = path.as_ref();
    let mut f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut head = [0u8; 12];
    let got = read_up_to(&mut f, &mut head).map_err(|e| Error::io(path, e))?;
    let mut r = Reader {
        bytes: &head[..got],
        pos: 0,
    };
    r.take(4).and_then(|m| {
        if m == NDF_MAGIC {
            Ok(())
        } else {
            Err(Error::BadMagic { expected: "NDSF" })
        }
    })?;
    let _ = r.u32()?;
    let ndim = r.u32()? as usize;
    let mut dim_bytes = vec![0u8; ndim * 8];
    f.read_exact(&mut dim_bytes).map_err(|_| Error::TruncatedFile {
        needed: 12 + dim_bytes.len() as u64,
        found: 12,
    })?;
    let mut all = head.to_vec();
    all.extend_from_slice(&dim_bytes);
    decode_header(&mut Reader { bytes: &all, pos: 0 })
}

fn read_up_to(f: &mut impl std::io::Read, buf: &mut [u8]) -> std::io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match f.read(&mut buf[filled..])? {
            0 => break,
            n => filled += n,
        }
    }
    Ok(filled)
}

pub fn write_ndf(t: &SignalTensor, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &encode_ndf(t))
}

/// Read a binary (P5) PGM image, scaling samples to [0, 1] by maxval.
pub fn read_pgm(path: impl AsRef<Path>) -> Result<SignalTensor> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pgm(&bytes)
}

pub fn decode_pgm(bytes: &[u8]) -> Result<SignalTensor> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(Error::BadHeader("missing PNM magic".into()));
    }
    match bytes[1] {
        b'5' => {}
        b'1'..=b'7' => {
            return Err(Error::UnsupportedFormat(
                String::from_utf8_lossy(&bytes[..2]).into_owned(),
            ))
        }
        _ => return Err(Error::BadHeader("missing PNM magic".into())),
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while let Some(&b) = bytes.get(pos) {
                        pos += 1;
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::BadHeader("expected a decimal header field".into()));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::BadHeader("header field overflows".into()))?;
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::BadHeader("missing whitespace after maxval".into())),
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(Error::BadHeader("zero image size".into()));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::BadHeader(format!("maxval {maxval} outside 1..=65535")));
    }
    let bps = if maxval < 256 { 1 } else { 2 };
    let n = width.checked_mul(height).ok_or(Error::DimOverflow)?;
    let data = &bytes[pos..];
    if data.len() < n * bps {
        return Err(Error::TruncatedFile {
            needed: (pos + n * bps) as u64,
            found: bytes.len() as u64,
        });
    }
    let scale = maxval as f64;
    let values = if bps == 1 {
        data[..n].iter().map(|&b| b as f64 / scale).collect()
    } else {
        data[..2 * n]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 / scale)
            .collect()
    };
    SignalTensor::new(vec![height, width], values, SignalKind::Image)
}

/// Load a signal file by extension: `.pgm` is read as PGM, anything else as NDF.
pub fn load_signal(path: impl AsRef<Path>, kind: SignalKind) -> Result<SignalTensor> {
    let path = path.as_ref();
    let t = if is_pgm(path) { read_pgm(path)? } else { read_ndf(path)? };
    t.with_kind(kind)
}

fn is_pgm(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
}

fn signal_dims(path: &Path) -> Result<Vec<usize>> {
    if is_pgm(path) {
        Ok(read_pgm(path)?.dims)
    } else {
        read_ndf_dims(path)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub role: Role,
    pub kind: SignalKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    #[serde(default)]
    pub lightfield_grid: Option<[usize; 2]>,
    pub entries: Vec<ManifestEntry>,
    /// Directory that relative entry paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl DatasetManifest {
    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        let p = Path::new(&entry.path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn entries_with(&self, role: Role) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(move |e| e.role == role)
    }

    pub fn load_entry(&self, entry: &ManifestEntry) -> Result<SignalTensor> {
        load_signal(self.resolve(entry), entry.kind)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    /// Check the split and dims invariants against the files on disk.
    pub fn validate(&self) -> Result<()> {
        let train: HashSet<&str> = self.entries_with(Role::Train).map(|e| e.path.as_str()).collect();
        if let Some(e) = self.entries_with(Role::Test).find(|e| train.contains(e.path.as_str())) {
            return Err(Error::OverlappingSplit(e.path.clone()));
        }
        let mut first: Option<Vec<usize>> = None;
        for e in &self.entries {
            let dims = signal_dims(&self.resolve(e))?;
            if e.kind == SignalKind::Lightfield {
                if dims.len() != 4 {
                    return Err(Error::NotALightfield(format!("{}: dims {dims:?}", e.path)));
                }
                if let Some([rows, cols]) = self.lightfield_grid {
                    if dims[0] != rows || dims[1] != cols {
                        return Err(Error::DimMismatch(format!(
                            "{}: grid {}x{} does not match lightfield_grid {rows}x{cols}",
                            e.path, dims[0], dims[1]
                        )));
                    }
                }
            }
            if e.role == Role::Test {
                match &first {
                    None => first = Some(dims),
                    Some(f) if *f != dims => {
                        return Err(Error::MixedDims {
                            first: f.clone(),
                            other: dims,
                        })
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

pub fn parse_manifest(json: &str, base_dir: impl Into<PathBuf>) -> Result<DatasetManifest> {
    let mut m: DatasetManifest = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    m.base_dir = base_dir.into();
    Ok(m)
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<DatasetManifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let m = parse_manifest(&text, base)?;
    m.validate()?;
    Ok(m)
}

/// Stack `rows * cols` equally sized 2D views, listed row-major, into a
/// `[rows, cols, h, w]` light field.
pub fn assemble_lightfield(views: &[SignalTensor], grid: (usize, usize)) -> Result<SignalTensor> {
    let (rows, cols) = grid;
    if views.len() != rows * cols {
        return Err(Error::CountMismatch {
            expected: rows * cols,
            found: views.len(),
        });
    }
    let first = views.first().ok_or_else(|| Error::EmptyInput("no views".into()))?;
    if first.dims.len() != 2 {
        return Err(Error::DimMismatch(format!("views must be 2D, got {:?}", first.dims)));
    }
    let mut values = Vec::with_capacity(views.len() * first.len());
    for (i, v) in views.iter().enumerate() {
        if v.dims != first.dims {
            return Err(Error::DimMismatch(format!(
                "view {i} has dims {:?}, expected {:?}",
                v.dims, first.dims
            )));
        }
        values.extend_from_slice(&v.values);
    }
    SignalTensor::new(
        vec![rows, cols, first.dims[0], first.dims[1]],
        values,
        SignalKind::Lightfield,
    )
}

/// Grid position treated as the center view: `(rows / 2, cols / 2)`.
pub fn center_index(rows: usize, cols: usize) -> (usize, usize) {
    (rows / 2, cols / 2)
}

/// Subtract the center view from every view of a light field.
pub fn center_view_subtract(lf: &SignalTensor) -> Result<SignalTensor> {
    if lf.kind != SignalKind::Lightfield || lf.dims.len() != 4 {
        return Err(Error::NotALightfield(format!(
            "kind {} with dims {:?}",
            lf.kind, lf.dims
        )));
    }
    let [rows, cols, h, w] = [lf.dims[0], lf.dims[1], lf.dims[2], lf.dims[3]];
    let view = h * w;
    let (rc, cc) = center_index(rows, cols);
    let center = &lf.values[(rc * cols + cc) * view..][..view];
    let values = lf
        .values
        .chunks_exact(view)
        .flat_map(|v| v.iter().zip(center).map(|(a, b)| a - b))
        .collect();
    SignalTensor::new(lf.dims.clone(), values, SignalKind::Lightfield)
}
