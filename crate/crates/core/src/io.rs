//! Field files.
//!
//! H3F1 is a one-line ASCII header `H3F1 <n> <ncomp> <tag>\n` followed by
//! `n^3 * ncomp` little-endian f64 values in node order (x fastest). VTK
//! export writes legacy ASCII structured points for external viewers.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use crate::fields::{
    make_grid, unflatten, Degree, FieldError, FieldKind, LiftField, NodeField, ScalarField, SphereMapField,
    VecField,
};

pub const MAGIC: &str = "H3F1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("empty output path")]
    EmptyPath,
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed H3F1 header: {0}")]
    BadHeader(String),
    #[error("expected {expected} payload bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("file holds a {found} field, expected {expected}")]
    WrongKind { expected: &'static str, found: &'static str },
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes any node field as H3F1.
pub fn write_h3f<F: NodeField, W: Write>(field: &F, mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "{MAGIC} {} {} {}",
        field.grid().n(),
        field.ncomp(),
        field.kind().tag()
    )?;
    let mut buf = Vec::with_capacity(field.flat().len() * 8);
    for v in field.flat() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)?;
    out.flush()
}

pub fn save_h3f<F: NodeField>(field: &F, path: &Path) -> Result<(), IoError> {
    if path.as_os_str().is_empty() {
        return Err(IoError::EmptyPath);
    }
    let file = File::create(path).map_err(io_err(path))?;
    write_h3f(field, BufWriter::new(file)).map_err(io_err(path))
}

/// A field read from disk, tagged by its kind.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyField {
    Scalar(ScalarField),
    Vec(VecField),
    Sphere(SphereMapField),
    Lift(LiftField),
}

impl AnyField {
    pub fn kind(&self) -> FieldKind {
        match self {
            AnyField::Scalar(f) => f.kind(),
            AnyField::Vec(f) => f.kind(),
            AnyField::Sphere(f) => f.kind(),
            AnyField::Lift(f) => f.kind(),
        }
    }
}

pub fn read_h3f<R: BufRead>(mut input: R) -> Result<AnyField, IoError> {
    let mut header = Vec::new();
    input
        .read_until(b'\n', &mut header)
        .map_err(|e| IoError::BadHeader(e.to_string()))?;
    let header = String::from_utf8(header).map_err(|_| IoError::BadHeader("not ASCII".into()))?;
    let parts: Vec<&str> = header.trim_end_matches('\n').split(' ').collect();
    let [magic, n, ncomp, tag] = parts[..] else {
        return Err(IoError::BadHeader(header.trim_end().to_string()));
    };
    if magic != MAGIC {
        return Err(IoError::BadHeader(format!("magic '{magic}'")));
    }
    let n: usize = n
        .parse()
        .map_err(|_| IoError::BadHeader(format!("node count '{n}'")))?;
    let ncomp: usize = ncomp
        .parse()
        .map_err(|_| IoError::BadHeader(format!("component count '{ncomp}'")))?;
    let kind = FieldKind::from_tag(tag).ok_or_else(|| IoError::BadHeader(format!("tag '{tag}'")))?;
    if kind.ncomp() != ncomp {
        return Err(IoError::BadHeader(format!("{tag} fields have {} components, header says {ncomp}", kind.ncomp())));
    }
    let grid = make_grid(n, 0.0)?;

    let expected = grid.len() * ncomp * 8;
    let mut payload = Vec::with_capacity(expected);
    input
        .read_to_end(&mut payload)
        .map_err(|e| IoError::BadHeader(e.to_string()))?;
    if payload.len() != expected {
        return Err(IoError::Truncated {
            expected,
            found: payload.len(),
        });
    }
    let flat: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();

    Ok(match kind {
        FieldKind::Scalar => AnyField::Scalar(ScalarField::new(grid, flat)?),
        FieldKind::Vec1 | FieldKind::Vec2 => {
            let degree = if kind == FieldKind::Vec1 { Degree::One } else { Degree::Two };
            AnyField::Vec(VecField::new(grid, degree, unflatten(&flat))?)
        }
        FieldKind::S2 => AnyField::Sphere(SphereMapField::new(grid, unflatten(&flat))?),
        FieldKind::S3 => AnyField::Lift(LiftField::new(grid, unflatten(&flat))?),
    })
}

pub fn load_h3f(path: &Path) -> Result<AnyField, IoError> {
    let file = File::open(path).map_err(io_err(path))?;
    read_h3f(BufReader::new(file))
}

fn wrong(expected: &'static str, found: &AnyField) -> IoError {
    IoError::WrongKind {
        expected,
        found: found.kind().tag(),
    }
}

pub fn load_sphere_map(path: &Path) -> Result<SphereMapField, IoError> {
    match load_h3f(path)? {
        AnyField::Sphere(f) => Ok(f),
        other => Err(wrong("S2", &other)),
    }
}

pub fn load_lift(path: &Path) -> Result<LiftField, IoError> {
    match load_h3f(path)? {
        AnyField::Lift(f) => Ok(f),
        other => Err(wrong("S3", &other)),
    }
}

/// Loads a vector field of the requested degree.
pub fn load_vec(path: &Path, degree: Degree) -> Result<VecField, IoError> {
    let expected = match degree {
        Degree::One => "VEC1",
        Degree::Two => "VEC2",
    };
    match load_h3f(path)? {
        AnyField::Vec(f) if f.degree == degree => Ok(f),
        other => Err(wrong(expected, &other)),
    }
}

/// Legacy ASCII VTK, one `SCALARS` array per component.
pub fn write_vtk<F: NodeField, W: Write>(field: &F, name: &str, mut out: W) -> std::io::Result<()> {
    let g = field.grid();
    let n = g.n();
    let c = field.ncomp();
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "hopflift {}", field.kind().tag())?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET STRUCTURED_POINTS")?;
    writeln!(out, "DIMENSIONS {n} {n} {n}")?;
    writeln!(out, "ORIGIN -1 -1 -1")?;
    writeln!(out, "SPACING {h} {h} {h}", h = g.h())?;
    writeln!(out, "POINT_DATA {}", g.len())?;
    let flat = field.flat();
    for k in 0..c {
        let array = if c == 1 { name.to_string() } else { format!("{name}_{k}") };
        writeln!(out, "SCALARS {array} double 1")?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for i in 0..g.len() {
            writeln!(out, "{}", flat[i * c + k])?;
        }
    }
    out.flush()
}

pub fn export_vtk<F: NodeField>(field: &F, name: &str, path: &Path) -> Result<(), IoError> {
    if path.as_os_str().is_empty() {
        return Err(IoError::EmptyPath);
    }
    if let Some(p) = field.flat().iter().position(|v| !v.is_finite()) {
        return Err(FieldError::NonFinite(p / field.ncomp()).into());
    }
    let file = File::create(path).map_err(io_err(path))?;
    write_vtk(field, name, BufWriter::new(file)).map_err(io_err(path))
}
