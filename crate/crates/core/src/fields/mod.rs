//! Structured-grid calculus: grids, node fields, difference operators,
//! quadrature and mollification.

mod grid;
mod mollify;
mod norms;
mod ops;

use thiserror::Error;

pub use grid::{make_grid, Axis, Grid3};
pub use mollify::{mollification_region, mollify, mollify_nodes, Mollify};
pub use norms::{l1_norm, l2_inner, l2_norm, lp_norm, Region};
pub use ops::{
    curl, curl_adjoint, div, div_adjoint, grad, grad_adjoint, partial, partial_adjoint,
};
pub(crate) use ops::weighted_column_sq;

/// Unit-norm tolerance for sphere- and lift-valued fields.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("grid needs at least 3 nodes per axis, got {0}")]
    InvalidResolution(usize),
    #[error("ball margin must lie in [0, 1), got {0}")]
    InvalidMargin(f64),
    #[error("mollifier width {eps} is below the grid spacing {h}")]
    WidthTooSmall { eps: f64, h: f64 },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("field kinds differ: {0:?} vs {1:?}")]
    KindMismatch(FieldKind, FieldKind),
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite value at node {0}")]
    NonFinite(usize),
    #[error("value at node {index} has norm {norm}, expected 1")]
    NotUnit { index: usize, norm: f64 },
}

/// Differential-form degree carried by a [`VecField`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Degree {
    /// 1-form, identified with a vector by raising the index.
    One,
    /// 2-form, identified with a vector by the Hodge star.
    Two,
}

/// What a field's node values mean; doubles as the file tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum FieldKind {
    Scalar,
    Vec1,
    Vec2,
    S2,
    S3,
}

impl FieldKind {
    pub fn ncomp(self) -> usize {
        match self {
            FieldKind::Scalar => 1,
            FieldKind::Vec1 | FieldKind::Vec2 | FieldKind::S2 => 3,
            FieldKind::S3 => 4,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            FieldKind::Scalar => "SCAL",
            FieldKind::Vec1 => "VEC1",
            FieldKind::Vec2 => "VEC2",
            FieldKind::S2 => "S2",
            FieldKind::S3 => "S3",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Some(match tag {
            "SCAL" => FieldKind::Scalar,
            "VEC1" => FieldKind::Vec1,
            "VEC2" => FieldKind::Vec2,
            "S2" => FieldKind::S2,
            "S3" => FieldKind::S3,
            _ => return None,
        })
    }
}

/// Common view over every grid field: its grid, its kind and the flat
/// node-major value array (component innermost).
pub trait NodeField {
    fn grid(&self) -> &Grid3;
    fn kind(&self) -> FieldKind;
    fn flat(&self) -> &[f64];

    fn ncomp(&self) -> usize {
        self.kind().ncomp()
    }

    /// Components at one node.
    fn node(&self, idx: usize) -> &[f64] {
        let c = self.ncomp();
        &self.flat()[idx * c..(idx + 1) * c]
    }
}

fn check_len(grid: &Grid3, got: usize) -> Result<(), FieldError> {
    if got != grid.len() {
        return Err(FieldError::LengthMismatch {
            expected: grid.len(),
            got,
        });
    }
    Ok(())
}

fn check_finite(flat: &[f64], ncomp: usize) -> Result<(), FieldError> {
    match flat.iter().position(|v| !v.is_finite()) {
        Some(p) => Err(FieldError::NonFinite(p / ncomp)),
        None => Ok(()),
    }
}

fn check_unit<const C: usize>(values: &[[f64; C]]) -> Result<(), FieldError> {
    for (index, v) in values.iter().enumerate() {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !((norm - 1.0).abs() <= UNIT_TOL) {
            return Err(FieldError::NotUnit { index, norm });
        }
    }
    Ok(())
}

pub(crate) fn unflatten<const C: usize>(flat: &[f64]) -> Vec<[f64; C]> {
    flat.chunks_exact(C)
        .map(|c| std::array::from_fn(|i| c[i]))
        .collect()
}

/// Scalar node field.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid3,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid3, values: Vec<f64>) -> Result<Self, FieldError> {
        check_len(&grid, values.len())?;
        check_finite(&values, 1)?;
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: Grid3) -> Self {
        ScalarField {
            values: vec![0.0; grid.len()],
            grid,
        }
    }

    /// Samples `f` at every node.
    pub fn from_fn<F>(grid: Grid3, f: F) -> Self
    where
        F: Fn([f64; 3]) -> f64 + Sync + Send,
    {
        let values = crate::par::map_indices(grid.len(), |i| f(grid.point(i)));
        ScalarField { grid, values }
    }
}

impl NodeField for ScalarField {
    fn grid(&self) -> &Grid3 {
        &self.grid
    }
    fn kind(&self) -> FieldKind {
        FieldKind::Scalar
    }
    fn flat(&self) -> &[f64] {
        &self.values
    }
}

/// Three components per node, standing for a 1-form or a 2-form.
#[derive(Debug, Clone, PartialEq)]
pub struct VecField {
    pub grid: Grid3,
    pub degree: Degree,
    pub values: Vec<[f64; 3]>,
}

impl VecField {
    pub fn new(grid: Grid3, degree: Degree, values: Vec<[f64; 3]>) -> Result<Self, FieldError> {
        check_len(&grid, values.len())?;
        check_finite(values.as_flattened(), 3)?;
        Ok(VecField {
            grid,
            degree,
            values,
        })
    }

    pub fn zeros(grid: Grid3, degree: Degree) -> Self {
        VecField {
            grid,
            degree,
            values: vec![[0.0; 3]; grid.len()],
        }
    }

    pub fn from_fn<F>(grid: Grid3, degree: Degree, f: F) -> Self
    where
        F: Fn([f64; 3]) -> [f64; 3] + Sync + Send,
    {
        let values = crate::par::map_indices(grid.len(), |i| f(grid.point(i)));
        VecField {
            grid,
            degree,
            values,
        }
    }

    /// Nodewise `self + scale * other`.
    pub fn add_scaled(&self, scale: f64, other: &VecField) -> VecField {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| [a[0] + scale * b[0], a[1] + scale * b[1], a[2] + scale * b[2]])
            .collect();
        VecField {
            grid: self.grid,
            degree: self.degree,
            values,
        }
    }

    pub fn scaled(&self, scale: f64) -> VecField {
        VecField {
            grid: self.grid,
            degree: self.degree,
            values: self
                .values
                .iter()
                .map(|a| [scale * a[0], scale * a[1], scale * a[2]])
                .collect(),
        }
    }
}

impl NodeField for VecField {
    fn grid(&self) -> &Grid3 {
        &self.grid
    }
    fn kind(&self) -> FieldKind {
        match self.degree {
            Degree::One => FieldKind::Vec1,
            Degree::Two => FieldKind::Vec2,
        }
    }
    fn flat(&self) -> &[f64] {
        self.values.as_flattened()
    }
}

/// Grid sample of a map into the unit sphere of R^3.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereMapField {
    pub(crate) grid: Grid3,
    pub(crate) values: Vec<[f64; 3]>,
}

impl SphereMapField {
    /// Validates `|u| = 1` to within [`UNIT_TOL`] at every node.
    pub fn new(grid: Grid3, values: Vec<[f64; 3]>) -> Result<Self, FieldError> {
        check_len(&grid, values.len())?;
        check_finite(values.as_flattened(), 3)?;
        check_unit(&values)?;
        Ok(SphereMapField { grid, values })
    }

    /// Skips the unit-norm check; for perturbation diagnostics only.
    pub fn new_unchecked(grid: Grid3, values: Vec<[f64; 3]>) -> Self {
        assert_eq!(values.len(), grid.len());
        SphereMapField { grid, values }
    }

    /// Samples `f` and normalizes each value.
    pub fn from_fn<F>(grid: Grid3, f: F) -> Self
    where
        F: Fn([f64; 3]) -> [f64; 3] + Sync + Send,
    {
        let values = crate::par::map_indices(grid.len(), |i| normalize3(f(grid.point(i))));
        SphereMapField { grid, values }
    }

    pub fn values(&self) -> &[[f64; 3]] {
        &self.values
    }
}

impl NodeField for SphereMapField {
    fn grid(&self) -> &Grid3 {
        &self.grid
    }
    fn kind(&self) -> FieldKind {
        FieldKind::S2
    }
    fn flat(&self) -> &[f64] {
        self.values.as_flattened()
    }
}

/// Grid sample of a map into the unit sphere of R^4 = C^2, stored as
/// `(x1, x2, x3, x4)` with `z = x1 + i x2`, `w = x3 + i x4`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftField {
    pub(crate) grid: Grid3,
    pub(crate) values: Vec<[f64; 4]>,
}

impl LiftField {
    pub fn new(grid: Grid3, values: Vec<[f64; 4]>) -> Result<Self, FieldError> {
        check_len(&grid, values.len())?;
        check_finite(values.as_flattened(), 4)?;
        check_unit(&values)?;
        Ok(LiftField { grid, values })
    }

    pub fn from_fn<F>(grid: Grid3, f: F) -> Self
    where
        F: Fn([f64; 3]) -> [f64; 4] + Sync + Send,
    {
        let values = crate::par::map_indices(grid.len(), |i| normalize4(f(grid.point(i))));
        LiftField { grid, values }
    }

    pub fn values(&self) -> &[[f64; 4]] {
        &self.values
    }

    /// Multiplies by a nodewise phase: `(z, w) -> e^{i phase} (z, w)`.
    pub fn rotate_phase(&self, phase: &[f64]) -> LiftField {
        let values = crate::par::map_indices(self.grid.len(), |i| {
            crate::hopf::phase_rotate(&self.values[i], phase[i])
        });
        LiftField {
            grid: self.grid,
            values,
        }
    }
}

impl NodeField for LiftField {
    fn grid(&self) -> &Grid3 {
        &self.grid
    }
    fn kind(&self) -> FieldKind {
        FieldKind::S3
    }
    fn flat(&self) -> &[f64] {
        self.values.as_flattened()
    }
}

pub(crate) fn normalize3(v: [f64; 3]) -> [f64; 3] {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / r, v[1] / r, v[2] / r]
}

pub(crate) fn normalize4(v: [f64; 4]) -> [f64; 4] {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]).sqrt();
    [v[0] / r, v[1] / r, v[2] / r, v[3] / r]
}

pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm_sq<const C: usize>(v: &[f64; C]) -> f64 {
    v.iter().map(|x| x * x).sum()
}
