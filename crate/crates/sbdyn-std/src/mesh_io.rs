//! Wavefront OBJ subset and a compact binary mesh cache.
//!
//! OBJ: `v x y z` and `f i j k` records with 1-based (or negative,
//! relative) indices; `#` starts a comment. A comment line `# units km`
//! declares kilometre coordinates, otherwise metres are assumed. Other
//! record types (`vn`, `vt`, `o`, `g`, `s`, ...) are skipped.
//!
//! Binary cache, little-endian throughout:
//!
//! | offset | size | content                          |
//! |--------|------|----------------------------------|
//! | 0      | 8    | magic `SBDMESH\0`                |
//! | 8      | 1    | format version (1)               |
//! | 9      | 3    | reserved, zero                   |
//! | 12     | 4    | vertex count `V` (u32)           |
//! | 16     | 4    | face count `F` (u32)             |
//! | 20     | 24 V | vertices, three f64 each, metres |
//! | ..     | 12 F | faces, three u32 each, 0-based   |

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use sbdyn_core::shape_model::{MeshError, TriangleMesh};
use sbdyn_core::Vector3;
use thiserror::Error;

pub const CACHE_MAGIC: [u8; 8] = *b"SBDMESH\0";
pub const CACHE_VERSION: u8 = 1;
const HEADER_LEN: usize = 20;

#[derive(Debug, Error)]
pub enum MeshIoError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: non-triangular face with {count} vertices")]
    NonTriangularFace { line: usize, count: usize },
    #[error("mesh cache: {0}")]
    Cache(String),
    #[error("invalid mesh: {0}")]
    Mesh(#[from] MeshError),
}

/// Coordinate unit declared by an OBJ file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthUnit {
    Meters,
    Kilometers,
}

impl LengthUnit {
    pub fn to_meters(self) -> f64 {
        match self {
            Self::Meters => 1.0,
            Self::Kilometers => 1000.0,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "m" | "meter" | "meters" | "metre" | "metres" => Some(Self::Meters),
            "km" | "kilometer" | "kilometers" | "kilometre" | "kilometres" => Some(Self::Kilometers),
            _ => None,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Self::Meters => "m",
            Self::Kilometers => "km",
        }
    }
}

fn parse_index(token: &str, vertex_count: usize, line: usize) -> Result<usize, MeshIoError> {
    let head = token.split('/').next().unwrap_or("");
    let raw: i64 = head.parse().map_err(|_| MeshIoError::Parse {
        line,
        message: format!("bad face index `{token}`"),
    })?;
    let resolved = match raw {
        0 => None,
        r if r > 0 => Some(r as usize - 1),
        r => (vertex_count as i64 + r).try_into().ok(),
    };
    resolved.ok_or_else(|| MeshIoError::Parse {
        line,
        message: format!("face index {raw} does not refer to a vertex"),
    })
}

/// Parse OBJ text. `unit` overrides any `# units` declaration.
pub fn parse_obj(text: &str, unit: Option<LengthUnit>) -> Result<TriangleMesh, MeshIoError> {
    let mut declared = None;
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let trimmed = raw.trim();
        if let Some(comment) = trimmed.strip_prefix('#') {
            let mut words = comment.split_whitespace();
            if words.next().is_some_and(|w| w.eq_ignore_ascii_case("units")) {
                let word = words.next().unwrap_or("");
                declared = Some(LengthUnit::parse(word).ok_or_else(|| MeshIoError::Parse {
                    line,
                    message: format!("unknown length unit `{word}`"),
                })?);
            }
            continue;
        }
        let content = trimmed.split('#').next().unwrap_or("");
        let mut fields = content.split_whitespace();
        match fields.next() {
            Some("v") => {
                let coords: Vec<&str> = fields.collect();
                if !(3..=4).contains(&coords.len()) {
                    return Err(MeshIoError::Parse {
                        line,
                        message: format!("vertex needs 3 coordinates, found {}", coords.len()),
                    });
                }
                let mut v = [0.0; 3];
                for (slot, token) in v.iter_mut().zip(&coords) {
                    *slot = token.parse().map_err(|_| MeshIoError::Parse {
                        line,
                        message: format!("bad coordinate `{token}`"),
                    })?;
                }
                vertices.push(Vector3::from(v));
            }
            Some("f") => {
                let idx: Vec<&str> = fields.collect();
                if idx.len() != 3 {
                    return Err(MeshIoError::NonTriangularFace { line, count: idx.len() });
                }
                let mut face = [0; 3];
                for (slot, token) in face.iter_mut().zip(&idx) {
                    *slot = parse_index(token, vertices.len(), line)?;
                }
                faces.push(face);
            }
            _ => {}
        }
    }
    let scale = unit.or(declared).unwrap_or(LengthUnit::Meters).to_meters();
    if scale != 1.0 {
        for v in &mut vertices {
            *v *= scale;
        }
    }
    Ok(TriangleMesh::new(vertices, faces)?)
}

/// OBJ text in the given unit, with a `# units` header.
pub fn format_obj(mesh: &TriangleMesh, unit: LengthUnit, comment: &str) -> String {
    let scale = 1.0 / unit.to_meters();
    let mut out = String::new();
    for line in comment.lines() {
        out.push_str(&format!("# {line}\n"));
    }
    out.push_str(&format!("# units {}\n", unit.label()));
    for v in mesh.vertices() {
        let v = v * scale;
        out.push_str(&format!("v {:?} {:?} {:?}\n", v.x, v.y, v.z));
    }
    for [a, b, c] in mesh.faces() {
        out.push_str(&format!("f {} {} {}\n", a + 1, b + 1, c + 1));
    }
    out
}

pub fn encode_cache(mesh: &TriangleMesh) -> Vec<u8> {
    let (v, f) = (mesh.vertices(), mesh.faces());
    let mut out = Vec::with_capacity(HEADER_LEN + 24 * v.len() + 12 * f.len());
    out.extend_from_slice(&CACHE_MAGIC);
    out.push(CACHE_VERSION);
    out.extend_from_slice(&[0; 3]);
    out.extend_from_slice(&(v.len() as u32).to_le_bytes());
    out.extend_from_slice(&(f.len() as u32).to_le_bytes());
    for p in v {
        for c in p.iter() {
            out.extend_from_slice(&c.to_le_bytes());
        }
    }
    for face in f {
        for &i in face {
            out.extend_from_slice(&(i as u32).to_le_bytes());
        }
    }
    out
}

pub fn decode_cache(bytes: &[u8]) -> Result<TriangleMesh, MeshIoError> {
    let bad = |m: &str| MeshIoError::Cache(m.to_string());
    if bytes.len() < HEADER_LEN || bytes[..8] != CACHE_MAGIC {
        return Err(bad("missing magic header"));
    }
    if bytes[8] != CACHE_VERSION {
        return Err(MeshIoError::Cache(format!("unsupported version {}", bytes[8])));
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as usize;
    let (nv, nf) = (word(12), word(16));
    let expected = nv
        .checked_mul(24)
        .and_then(|a| nf.checked_mul(12).and_then(|b| a.checked_add(b)))
        .and_then(|body| body.checked_add(HEADER_LEN))
        .ok_or_else(|| bad("counts overflow"))?;
    if bytes.len() != expected {
        return Err(MeshIoError::Cache(format!(
            "expected {expected} bytes for {nv} vertices and {nf} faces, found {}",
            bytes.len()
        )));
    }
    let mut at = HEADER_LEN;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let mut v = [0.0; 3];
        for c in &mut v {
            *c = f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
            at += 8;
        }
        vertices.push(Vector3::from(v));
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let mut face = [0; 3];
        for i in &mut face {
            *i = word(at);
            at += 4;
        }
        faces.push(face);
    }
    Ok(TriangleMesh::new(vertices, faces)?)
}

fn read(path: &Path) -> Result<Vec<u8>, MeshIoError> {
    fs::read(path).map_err(|source| MeshIoError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Load an OBJ file or a binary cache (recognized by its magic bytes).
pub fn load_mesh(path: &Path, unit: Option<LengthUnit>) -> Result<TriangleMesh, MeshIoError> {
    let bytes = read(path)?;
    if bytes.starts_with(&CACHE_MAGIC) {
        return decode_cache(&bytes);
    }
    let text = String::from_utf8(bytes).map_err(|e| MeshIoError::Parse {
        line: 0,
        message: format!("not UTF-8 text: {e}"),
    })?;
    parse_obj(&text, unit)
}

pub fn write_cache(mesh: &TriangleMesh, path: &Path) -> Result<(), MeshIoError> {
    let io = |source| MeshIoError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut file = fs::File::create(path).map_err(io)?;
    file.write_all(&encode_cache(mesh)).map_err(io)
}
