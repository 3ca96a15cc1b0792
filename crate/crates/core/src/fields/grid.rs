use serde::Serialize;

use super::FieldError;

/// Coordinate axis of the cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X = 0,
    Y = 1,
    Z = 2,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Uniform node grid on the cube `[-1, 1]^3` with an inscribed-ball mask.
///
/// Nodes are stored with the x index fastest: `idx = (k * n + j) * n + i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid3 {
    n: usize,
    h: f64,
    ball_margin: f64,
}

/// Builds a grid with `n` nodes per axis.
pub fn make_grid(n: usize, ball_margin: f64) -> Result<Grid3, FieldError> {
    Grid3::new(n, ball_margin)
}

impl Grid3 {
    pub fn new(n: usize, ball_margin: f64) -> Result<Self, FieldError> {
        if n < 3 {
            return Err(FieldError::InvalidResolution(n));
        }
        if !(0.0..1.0).contains(&ball_margin) {
            return Err(FieldError::InvalidMargin(ball_margin));
        }
        Ok(Grid3 {
            n,
            h: 2.0 / (n - 1) as f64,
            ball_margin,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn ball_margin(&self) -> f64 {
        self.ball_margin
    }

    /// Total node count `n^3`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.n + j) * self.n + i
    }

    pub fn ijk(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx % n, (idx / n) % n, idx / (n * n)]
    }

    /// Linear-index step along `axis`.
    pub fn stride(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => 1,
            Axis::Y => self.n,
            Axis::Z => self.n * self.n,
        }
    }

    /// Node coordinate along one axis; exact `-1` and `1` at the ends.
    pub fn coord(&self, i: usize) -> f64 {
        -1.0 + (2 * i) as f64 / (self.n - 1) as f64
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let [i, j, k] = self.ijk(idx);
        [self.coord(i), self.coord(j), self.coord(k)]
    }

    /// Radius of the ball used for norm reporting.
    pub fn ball_radius(&self) -> f64 {
        1.0 - self.ball_margin
    }

    pub fn in_ball(&self, idx: usize) -> bool {
        let [x, y, z] = self.point(idx);
        let r = self.ball_radius();
        x * x + y * y + z * z <= r * r * (1.0 + 1e-14)
    }

    /// True for nodes on a face, edge or corner of the cube.
    pub fn is_boundary(&self, idx: usize) -> bool {
        let last = self.n - 1;
        self.ijk(idx).iter().any(|&c| c == 0 || c == last)
    }

    /// One-dimensional trapezoidal weight (without the factor `h`).
    pub(crate) fn trap1(&self, i: usize) -> f64 {
        if i == 0 || i == self.n - 1 {
            0.5
        } else {
            1.0
        }
    }

    /// Trapezoidal quadrature weight of a node: `h^3` scaled by 1/2 per axis on which
    /// the node sits at an end.
    pub fn weight(&self, idx: usize) -> f64 {
        let [i, j, k] = self.ijk(idx);
        self.h * self.h * self.h * self.trap1(i) * self.trap1(j) * self.trap1(k)
    }

    /// Node closest to the origin (the centre node for odd `n`).
    pub fn nearest_to_origin(&self) -> usize {
        let c = (self.n - 1) / 2;
        self.index(c, c, c)
    }

    /// Distance of a node from the cube boundary, `min_a (1 - |x_a|)`.
    pub fn boundary_distance(&self, idx: usize) -> f64 {
        let p = self.point(idx);
        p.iter().map(|x| 1.0 - x.abs()).fold(f64::INFINITY, f64::min)
    }
}
