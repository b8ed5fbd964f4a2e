//! Matrix files, report envelopes and byte-stable JSON output.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use numrange::config::RunConfig;
use numrange::numerics::{ComplexMatrix, Fingerprint};
use numrange::range::PointCloud;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{CliError, CliResult};

/// On-disk matrix: `d` and `d²` row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub d: usize,
    pub entries: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl MatrixFile {
    pub fn from_matrix(t: &ComplexMatrix, name: Option<String>) -> Self {
        Self {
            d: t.dim(),
            entries: t.entries().iter().map(|z| [z.re, z.im]).collect(),
            name,
        }
    }

    pub fn to_matrix(&self) -> CliResult<ComplexMatrix> {
        if self.d == 0 {
            return Err(CliError::Length("matrix dimension must be positive".into()));
        }
        let expected = self.d.checked_mul(self.d).ok_or_else(|| CliError::Length("matrix dimension overflows".into()))?;
        if self.entries.len() != expected {
            return Err(CliError::Length(format!(
                "d = {} needs {expected} entries, found {}",
                self.d,
                self.entries.len()
            )));
        }
        if let Some(k) = self.entries.iter().position(|[re, im]| !(re.is_finite() && im.is_finite())) {
            return Err(CliError::NonFinite(format!("entry {k} is not finite")));
        }
        let entries = self.entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        Ok(ComplexMatrix::new(self.d, entries)?)
    }
}

fn parse_error(path: &Path, e: serde_json::Error) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn load_matrix_file(path: &Path) -> CliResult<MatrixFile> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| parse_error(path, e))
}

pub fn load_matrix(path: &Path) -> CliResult<ComplexMatrix> {
    load_matrix_file(path)?.to_matrix()
}

/// Pretty JSON with every float written as `{:.16e}`: 17 significant
/// digits, enough to round-trip any `f64` and independent of the shortest
/// representation algorithm.
struct FixedFloats(PrettyFormatter<'static>);

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .map_err(|e| CliError::io("<json>", io::Error::other(e)))?;
    buf.push(b'\n');
    Ok(buf)
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp: PathBuf = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::io(path, e)
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    write_atomic(path, &to_json(value)?)
}

pub fn write_matrix(path: &Path, t: &ComplexMatrix, name: Option<String>) -> CliResult<()> {
    write_json(path, &MatrixFile::from_matrix(t, name))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixInfo {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub fingerprint: Fingerprint,
    pub fingerprint_hex: String,
}

impl MatrixInfo {
    pub fn new(t: &ComplexMatrix, name: Option<String>) -> Self {
        let fingerprint = t.fingerprint();
        Self { name, fingerprint_hex: fingerprint.hex(), fingerprint }
    }
}

/// Every artifact carries the command, the operator it refers to and the
/// full configuration that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub command: String,
    pub version: String,
    pub matrix: MatrixInfo,
    pub config: RunConfig,
    pub result: T,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| parse_error(path, e))
}

pub fn read_cloud(path: &Path) -> CliResult<PointCloud> {
    Ok(read_json::<Envelope<PointCloud>>(path)?.result)
}

/// `index,re_1,im_1,…,re_n,im_n` per point.
pub fn cloud_csv(cloud: &PointCloud) -> Vec<u8> {
    let mut out = String::from("index");
    for j in 1..=cloud.n {
        out.push_str(&format!(",re_{j},im_{j}"));
    }
    out.push('\n');
    for (i, p) in cloud.points.iter().enumerate() {
        out.push_str(&i.to_string());
        for z in &p.value {
            out.push_str(&format!(",{:.16e},{:.16e}", z.re, z.im));
        }
        out.push('\n');
    }
    out.into_bytes()
}
