//! On-disk datasets and images.
//!
//! Each artifact is a pretty-printed JSON manifest next to a raw payload of
//! little-endian `f64`. Datasets are stored in (face, detector row,
//! detector column, radius) order, images in grid storage order (last axis
//! fastest). Manifests record the payload hash and the provenance of the
//! run that produced them.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use polymean_core::data::Samples;
use polymean_core::{build_domain, DomainSpec, GridSpec, ImageGrid, Phantom, Quantity, RadialGrid};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const DATASET_FORMAT: &str = "polymean-dataset";
pub const IMAGE_FORMAT: &str = "polymean-image";
pub const FORMAT_VERSION: u32 = 1;
pub const DATASET_LAYOUT: &str = "face,row,col,radius";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputRef {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub params: serde_json::Value,
    pub inputs: Vec<InputRef>,
}

impl Provenance {
    pub fn new(command: &str, params: serde_json::Value) -> Self {
        Provenance {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            params,
            inputs: Vec::new(),
        }
    }

    /// Records a manifest and its payload as inputs.
    pub fn with_input(mut self, manifest: &Path, payload_sha256: &str) -> Result<Self> {
        let bytes = fs::read(manifest).map_err(|e| Error::io(manifest, e))?;
        self.inputs.push(InputRef {
            path: manifest.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        self.inputs.push(InputRef {
            path: format!("{}#payload", manifest.display()),
            sha256: payload_sha256.to_string(),
        });
        Ok(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format: String,
    pub version: u32,
    pub quantity: Quantity,
    pub domain: DomainSpec,
    pub radial: RadialGrid,
    pub detectors: usize,
    pub layout: String,
    pub payload: String,
    pub payload_sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phantom: Option<Phantom>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageManifest {
    pub format: String,
    pub version: u32,
    pub grid: GridSpec,
    pub payload: String,
    pub payload_sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    pub provenance: Provenance,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn f64_bytes(values: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(values.len() * 8);
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn f64_from_bytes(bytes: &[u8]) -> Option<Vec<f64>> {
    if bytes.len() % 8 != 0 {
        return None;
    }
    Some(
        bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect(),
    )
}

/// `foo/bar.json` → `foo/bar.<ext>`.
pub fn sibling(manifest: &Path, ext: &str) -> PathBuf {
    manifest.with_extension(ext)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).expect("manifest serializes");
    s.push('\n');
    write_file(path, s.as_bytes())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| Error::malformed(path, e.to_string()))
}

fn payload_name(manifest: &Path) -> String {
    sibling(manifest, "f64")
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "payload.f64".into())
}

fn read_payload(manifest: &Path, name: &str, sha: &str, len: usize) -> Result<Vec<f64>> {
    let path = manifest.parent().unwrap_or(Path::new("")).join(name);
    let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
    if bytes.len() != len * 8 {
        return Err(Error::malformed(
            manifest,
            format!("payload has {} bytes, expected {}", bytes.len(), len * 8),
        ));
    }
    if sha256_hex(&bytes) != sha {
        return Err(Error::malformed(manifest, "payload hash does not match"));
    }
    Ok(f64_from_bytes(&bytes).expect("length checked"))
}

/// Builds a manifest for `samples`; the payload name follows `path`.
pub fn dataset_manifest(
    path: &Path,
    samples: &Samples,
    quantity: Quantity,
    phantom: Option<Phantom>,
    provenance: Provenance,
) -> DatasetManifest {
    DatasetManifest {
        format: DATASET_FORMAT.into(),
        version: FORMAT_VERSION,
        quantity,
        domain: samples.domain.spec.clone(),
        radial: samples.grid,
        detectors: samples.detector_count(),
        layout: DATASET_LAYOUT.into(),
        payload: payload_name(path),
        payload_sha256: sha256_hex(&f64_bytes(&samples.values)),
        phantom,
        provenance,
    }
}

/// Writes `manifest` to `path` and `values` next to it.
pub fn write_dataset(path: &Path, manifest: &DatasetManifest, values: &[f64]) -> Result<()> {
    let payload = manifest.parent_dir(path).join(&manifest.payload);
    write_file(&payload, &f64_bytes(values))?;
    write_json(path, manifest)
}

impl DatasetManifest {
    fn parent_dir(&self, path: &Path) -> PathBuf {
        path.parent().map(Path::to_path_buf).unwrap_or_default()
    }
}

/// Reads and validates a dataset.
pub fn read_dataset(path: &Path) -> Result<(DatasetManifest, Samples)> {
    let m: DatasetManifest = read_json(path)?;
    if m.format != DATASET_FORMAT || m.version != FORMAT_VERSION {
        return Err(Error::malformed(
            path,
            format!("not a {DATASET_FORMAT} v{FORMAT_VERSION} manifest"),
        ));
    }
    if m.layout != DATASET_LAYOUT {
        return Err(Error::malformed(
            path,
            format!("unknown layout {}", m.layout),
        ));
    }
    let domain = build_domain(&m.domain).map_err(|e| Error::malformed(path, e.to_string()))?;
    if domain.detector_count() != m.detectors {
        return Err(Error::malformed(
            path,
            format!(
                "{} detectors declared, domain has {}",
                m.detectors,
                domain.detector_count()
            ),
        ));
    }
    RadialGrid::new(m.radial.count, m.radial.max)
        .map_err(|e| Error::malformed(path, e.to_string()))?;
    let values = read_payload(
        path,
        &m.payload,
        &m.payload_sha256,
        m.detectors * m.radial.count,
    )?;
    let samples = Samples::new(domain, m.radial, values)
        .map_err(|e| Error::malformed(path, e.to_string()))?;
    Ok((m, samples))
}

pub fn image_manifest(
    path: &Path,
    img: &ImageGrid,
    domain: Option<DomainSpec>,
    provenance: Provenance,
) -> ImageManifest {
    ImageManifest {
        format: IMAGE_FORMAT.into(),
        version: FORMAT_VERSION,
        grid: img.spec,
        payload: payload_name(path),
        payload_sha256: sha256_hex(&f64_bytes(&img.values)),
        domain,
        provenance,
    }
}

/// Writes the manifest, the raw grid, a 16-bit PGM of the image (2D) or of
/// its three central slices (3D), and a CSV of the central slice.
pub fn write_image(path: &Path, manifest: &ImageManifest, img: &ImageGrid) -> Result<()> {
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    write_file(&dir.join(&manifest.payload), &f64_bytes(&img.values))?;
    if img.spec.dim == 2 {
        write_file(&sibling(path, "pgm"), &pgm16(&slice(img, 2, 0)))?;
    } else {
        for axis in 0..3 {
            let mid = img.spec.n[axis] / 2;
            let p = sibling(path, &format!("x{}.pgm", axis + 1));
            write_file(&p, &pgm16(&slice(img, axis, mid)))?;
        }
    }
    write_file(&sibling(path, "csv"), csv_slice(img).as_bytes())?;
    write_json(path, manifest)
}

pub fn read_image(path: &Path) -> Result<(ImageManifest, ImageGrid)> {
    let m: ImageManifest = read_json(path)?;
    if m.format != IMAGE_FORMAT || m.version != FORMAT_VERSION {
        return Err(Error::malformed(
            path,
            format!("not a {IMAGE_FORMAT} v{FORMAT_VERSION} manifest"),
        ));
    }
    let g = m.grid;
    let spec =
        GridSpec::new(g.dim, g.n, g.lo, g.hi).map_err(|e| Error::malformed(path, e.to_string()))?;
    let values = read_payload(path, &m.payload, &m.payload_sha256, spec.len())?;
    Ok((m, ImageGrid { spec, values }))
}

/// A 2D section: the plane `index along axis = at`, as rows of the
/// remaining axes (first remaining axis across, second down from the top).
pub struct Slice {
    pub width: usize,
    pub height: usize,
    /// Row-major, top row first.
    pub values: Vec<f64>,
}

pub fn slice(img: &ImageGrid, axis: usize, at: usize) -> Slice {
    let s = img.spec;
    let (u, w) = match (s.dim, axis) {
        (2, _) => (0, 1),
        (_, 0) => (1, 2),
        (_, 1) => (0, 2),
        _ => (0, 1),
    };
    let (width, height) = (s.n[u], s.n[w]);
    let mut values = Vec::with_capacity(width * height);
    for r in (0..height).rev() {
        for c in 0..width {
            let mut idx = [0; 3];
            if s.dim == 3 {
                idx[axis] = at;
            }
            idx[u] = c;
            idx[w] = r;
            values.push(img.get(idx));
        }
    }
    Slice {
        width,
        height,
        values,
    }
}

/// Binary 16-bit PGM, min-max scaled (constant images map to 0).
pub fn pgm16(s: &Slice) -> Vec<u8> {
    let lo = s.values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = s.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = format!("P5\n{} {}\n65535\n", s.width, s.height).into_bytes();
    for &v in &s.values {
        let q = ((v - lo) / span * 65535.0).round().clamp(0.0, 65535.0) as u16;
        out.extend_from_slice(&q.to_be_bytes());
    }
    out
}

/// `x1,x2,x3,value` rows of the whole 2D grid or the central `x3` slice.
pub fn csv_slice(img: &ImageGrid) -> String {
    let s = img.spec;
    let k = if s.dim == 3 { s.n[2] / 2 } else { 0 };
    let mut out = String::from("x1,x2,x3,value\n");
    for i in 0..s.n[0] {
        for j in 0..s.n[1] {
            let p = s.point([i, j, k]);
            out.push_str(&format!(
                "{},{},{},{:e}\n",
                p[0],
                p[1],
                p[2],
                img.get([i, j, k])
            ));
        }
    }
    out
}

pub fn read_phantom(path: &Path) -> Result<Phantom> {
    let p: Phantom = read_json(path)?;
    if p.dim != 2 && p.dim != 3 {
        return Err(Error::malformed(path, "phantom dimension must be 2 or 3"));
    }
    for c in &p.components {
        if !(c.radius > 0.0 && c.radius.is_finite()) {
            return Err(Error::malformed(path, "component radius must be positive"));
        }
    }
    Ok(p)
}

pub fn write_phantom(path: &Path, p: &Phantom) -> Result<()> {
    write_json(path, p)
}

pub fn read_domain(path: &Path) -> Result<DomainSpec> {
    read_json(path)
}
