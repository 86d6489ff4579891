//! Bit-exact file emission: binary PPM images, lossless CSV tables, and the
//! JSON run manifest that makes every artifact reproducible.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use fracdelay::render::{ClassTallies, RgbImage};

/// Renders a float for CSV: shortest decimal string that parses back to the
/// identical bits (never more than 17 significant digits), with negative
/// zero normalized to `0`.
pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    format!("{v}")
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Rectangular table with a header row.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: Vec<S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len(), "ragged CSV row");
        self.rows.push(row);
    }
}

/// Writes the table: comma-joined header, one line per row, `\n` endings,
/// no trailing separator.
pub fn write_csv(path: &Path, table: &Table) -> io::Result<()> {
    let mut out = String::new();
    out.push_str(&table.header.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::render).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    fs::write(path, out)
}

/// Writes a binary PPM: ASCII header `P6\n<width> <height>\n255\n` followed
/// by width*height RGB triples, row-major, top row first.
pub fn write_ppm(path: &Path, image: &RgbImage) -> io::Result<()> {
    assert!(
        image.width > 0 && image.height > 0,
        "cannot write an empty image"
    );
    let mut bytes = Vec::with_capacity(20 + image.data.len());
    write!(bytes, "P6\n{} {}\n255\n", image.width, image.height)?;
    bytes.extend_from_slice(&image.data);
    fs::write(path, bytes)
}

/// Checksum record for one emitted file.
#[derive(Debug, Clone, Serialize)]
pub struct ArtifactRecord {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Reads an emitted file back and records its size and SHA-256.
pub fn artifact_record(path: &Path) -> io::Result<ArtifactRecord> {
    let data = fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&data);
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for b in digest {
        hex.push_str(&format!("{b:02x}"));
    }
    Ok(ArtifactRecord {
        path: path.display().to_string(),
        bytes: data.len() as u64,
        sha256: hex,
    })
}

/// Per-class pixel counts as they appear in the manifest.
#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
pub struct TallySummary {
    pub escaped: usize,
    pub converged: usize,
    pub oscillating: usize,
    pub undecided: usize,
}

impl From<ClassTallies> for TallySummary {
    fn from(t: ClassTallies) -> Self {
        Self {
            escaped: t.escaped,
            converged: t.converged,
            oscillating: t.oscillating,
            undecided: t.undecided,
        }
    }
}

/// Reproducibility record written beside every artifact: the command line,
/// every resolved parameter (defaults included), wall-clock duration,
/// per-class tallies where applicable, and checksums of the artifacts.
///
/// Re-running with the recorded configuration reproduces the artifacts
/// byte for byte; only the wall-clock field differs between runs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command_line: Vec<String>,
    pub subcommand: String,
    /// Sorted key-value map of the fully resolved configuration.
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub duration_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tallies: Option<TallySummary>,
    pub artifacts: Vec<ArtifactRecord>,
}

impl RunManifest {
    pub fn new(subcommand: &str, command_line: Vec<String>) -> Self {
        Self {
            tool: "fracdelay",
            version: env!("CARGO_PKG_VERSION"),
            command_line,
            subcommand: subcommand.to_string(),
            parameters: BTreeMap::new(),
            duration_seconds: 0.0,
            tallies: None,
            artifacts: Vec::new(),
        }
    }

    pub fn param<V: Serialize>(&mut self, key: &str, value: V) {
        let v = serde_json::to_value(value).expect("parameter serializes");
        self.parameters.insert(key.to_string(), v);
    }
}

/// Writes the manifest as pretty JSON with stable key order (struct order
/// at the top level, sorted parameter keys).
pub fn write_manifest(path: &Path, manifest: &RunManifest) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    fs::write(path, text)
}

/// Manifest path placed beside an artifact: `<artifact>.manifest.json` for
/// single-file outputs, `<prefix>.manifest.json` for prefixed families.
pub fn manifest_path_for(artifact: &Path) -> std::path::PathBuf {
    let mut s = artifact.as_os_str().to_os_string();
    s.push(".manifest.json");
    std::path::PathBuf::from(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_lossless_and_normalizes_negative_zero() {
        assert_eq!(format_float(0.25), "0.25");
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(-0.0), "0");
        assert_eq!(format_float(1.0 / 3.0), "0.3333333333333333");
        let v = -0.499_289_580_953_672_8;
        assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn ppm_bytes_are_exact() {
        let dir = std::env::temp_dir().join("fracdelay-io-tests");
        fs::create_dir_all(&dir).unwrap();

        let white = RgbImage {
            width: 1,
            height: 1,
            data: vec![255, 255, 255],
        };
        let p = dir.join("white.ppm");
        write_ppm(&p, &white).unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"P6\n1 1\n255\n\xff\xff\xff");

        let bw = RgbImage {
            width: 2,
            height: 1,
            data: vec![0, 0, 0, 255, 255, 255],
        };
        let p2 = dir.join("bw.ppm");
        write_ppm(&p2, &bw).unwrap();
        assert_eq!(
            fs::read(&p2).unwrap(),
            b"P6\n2 1\n255\n\x00\x00\x00\xff\xff\xff"
        );

        // re-emission is byte-identical
        let before = artifact_record(&p).unwrap();
        write_ppm(&p, &white).unwrap();
        let after = artifact_record(&p).unwrap();
        assert_eq!(before.sha256, after.sha256);
    }

    #[test]
    fn csv_layout_matches_contract() {
        let dir = std::env::temp_dir().join("fracdelay-io-tests");
        fs::create_dir_all(&dir).unwrap();
        let mut t = Table::new(vec!["phi", "c_re", "c_im"]);
        t.push(vec![Cell::Float(0.0), Cell::Float(0.25), Cell::Float(-0.0)]);
        let p = dir.join("cardioid.csv");
        write_csv(&p, &t).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "phi,c_re,c_im\n0,0.25,0\n");

        let empty = Table::new(vec!["a", "b"]);
        let p2 = dir.join("empty.csv");
        write_csv(&p2, &empty).unwrap();
        assert_eq!(fs::read_to_string(&p2).unwrap(), "a,b\n");
    }

    #[test]
    fn manifest_key_order_is_stable() {
        let mut m = RunManifest::new("render", vec!["fracdelay".into(), "render".into()]);
        m.param("zeta", 1.0);
        m.param("alpha", 2.0);
        let s = serde_json::to_string(&m).unwrap();
        let alpha = s.find("\"alpha\"").unwrap();
        let zeta = s.find("\"zeta\"").unwrap();
        assert!(alpha < zeta, "parameter keys must be sorted");
        assert!(s.find("\"tool\"").unwrap() < s.find("\"version\"").unwrap());
    }
}
