//! Analytic test maps with closed-form reference values.

use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::fields::{dot3, norm_sq, Degree, Grid3, LiftField, SphereMapField, VecField};
use crate::hopf::S2Point;

#[derive(Debug, Error)]
pub enum TestMapError {
    #[error("latitude t0 = {0} must lie strictly between 0 and pi/2")]
    BadLatitude(f64),
    #[error("unknown planar map '{0}' (expected gaussian-bump or linear-winding)")]
    UnknownPlanar(String),
}

/// `u = p` everywhere.
pub fn gen_constant(grid: Grid3, p: &S2Point) -> SphereMapField {
    let p = p.0;
    SphereMapField::from_fn(grid, move |_| p)
}

/// `u(x) = x / |x|`, with `u(0) = (0, 0, 1)`.
pub fn gen_hedgehog(grid: Grid3) -> SphereMapField {
    gen_hedgehog_centered(grid, [0.0; 3])
}

/// `u(x) = (x - c) / |x - c|`. With `c` outside the cube this is a smooth map
/// whose range is a small cap.
pub fn gen_hedgehog_centered(grid: Grid3, center: [f64; 3]) -> SphereMapField {
    SphereMapField::from_fn(grid, move |p| {
        let d = [p[0] - center[0], p[1] - center[1], p[2] - center[2]];
        if norm_sq(&d) == 0.0 {
            [0.0, 0.0, 1.0]
        } else {
            d
        }
    })
}

/// Closed-form values of the lift family at every node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiftFamilyOracle {
    pub t0: f64,
    pub a: [f64; 3],
    pub b: [f64; 3],
    /// `eta0 = 2 (sin^2 t0 a + cos^2 t0 b)`.
    pub eta: [f64; 3],
    /// `|d uhat0|^2 = sin^2 t0 |a|^2 + cos^2 t0 |b|^2`.
    pub duhat_sq: f64,
    /// `|d u0|^2 = sin^2(2 t0) |a - b|^2`.
    pub du_sq: f64,
    /// `|eta0|^2 / 4 + |d u0|^2 / 4`, equal to `duhat_sq`.
    pub energy_rhs: f64,
}

#[derive(Debug, Clone)]
pub struct LiftFamily {
    pub uhat: LiftField,
    pub u: SphereMapField,
    pub eta: VecField,
    pub oracle: LiftFamilyOracle,
}

/// `uhat0(x) = (e^{i a.x} sin t0, e^{i b.x} cos t0)` with `u0 = h o uhat0` and
/// `eta0 = 2 uhat0^* theta`, all from closed forms.
pub fn gen_lift_family(
    grid: Grid3,
    t0: f64,
    a: [f64; 3],
    b: [f64; 3],
) -> Result<LiftFamily, TestMapError> {
    if !(t0 > 0.0 && t0 < std::f64::consts::FRAC_PI_2) {
        return Err(TestMapError::BadLatitude(t0));
    }
    let (st, ct) = t0.sin_cos();
    let (s2t, c2t) = (2.0 * t0).sin_cos();
    let uhat = LiftField::from_fn(grid, |x| {
        let (s1, c1) = dot3(&a, &x).sin_cos();
        let (s2, c2) = dot3(&b, &x).sin_cos();
        [c1 * st, s1 * st, c2 * ct, s2 * ct]
    });
    // h = (2 conj(z) w, |z|^2 - |w|^2) = (sin 2t0 e^{i (b - a).x}, -cos 2t0)
    let u = SphereMapField::from_fn(grid, |x| {
        let (s, c) = (dot3(&b, &x) - dot3(&a, &x)).sin_cos();
        [s2t * c, s2t * s, -c2t]
    });
    let eta_v: [f64; 3] = std::array::from_fn(|k| 2.0 * (st * st * a[k] + ct * ct * b[k]));
    let eta = VecField::from_fn(grid, Degree::One, |_| eta_v);
    let amb = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let duhat_sq = st * st * norm_sq(&a) + ct * ct * norm_sq(&b);
    let du_sq = s2t * s2t * norm_sq(&amb);
    Ok(LiftFamily {
        uhat,
        u,
        eta,
        oracle: LiftFamilyOracle {
            t0,
            a,
            b,
            eta: eta_v,
            duhat_sq,
            du_sq,
            energy_rhs: 0.25 * norm_sq(&eta_v) + 0.25 * du_sq,
        },
    })
}

/// Two-variable maps `u(x) = pi(1 / F(x1 + i x2))`, with `pi` the inverse
/// stereographic projection, so `F = 0` goes to `(0, 0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanarKind {
    /// `F(zeta) = zeta exp(-|zeta|^2 / 0.64)`.
    GaussianBump,
    /// `F(zeta) = zeta / 2`.
    LinearWinding,
}

impl FromStr for PlanarKind {
    type Err = TestMapError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gaussian-bump" => Ok(PlanarKind::GaussianBump),
            "linear-winding" => Ok(PlanarKind::LinearWinding),
            other => Err(TestMapError::UnknownPlanar(other.to_string())),
        }
    }
}

impl PlanarKind {
    pub fn name(self) -> &'static str {
        match self {
            PlanarKind::GaussianBump => "gaussian-bump",
            PlanarKind::LinearWinding => "linear-winding",
        }
    }

    fn eval(self, re: f64, im: f64) -> (f64, f64) {
        match self {
            PlanarKind::GaussianBump => {
                let g = (-(re * re + im * im) / 0.64).exp();
                (re * g, im * g)
            }
            PlanarKind::LinearWinding => (0.5 * re, 0.5 * im),
        }
    }
}

/// `pi(1/F) = (2 conj(F), 1 - |F|^2) / (1 + |F|^2)`. Both choices keep
/// `|F| < 1` on the cube, so the range stays in the open upper hemisphere.
pub fn gen_planar(grid: Grid3, kind: PlanarKind) -> SphereMapField {
    SphereMapField::from_fn(grid, move |x| {
        let (fr, fi) = kind.eval(x[0], x[1]);
        let m = fr * fr + fi * fi;
        [2.0 * fr / (1.0 + m), -2.0 * fi / (1.0 + m), (1.0 - m) / (1.0 + m)]
    })
}

/// Compactly supported smooth bump `w = B(x) d` and its curls, used as a
/// manufactured solution for the gauge solve: `a0 = curl w` is
/// divergence-free and vanishes near the boundary, and `G = curl a0`.
#[derive(Debug, Clone)]
pub struct ManufacturedGauge {
    /// `curl w`, sampled from its closed form.
    pub a0: VecField,
    /// `curl curl w = Hess(B) d - (lap B) d`, sampled from its closed form.
    pub g: VecField,
    /// Difference curl of the sampled `w`: an exact zero of the discrete functional.
    pub a0_discrete: VecField,
    /// Difference curl of `a0_discrete`.
    pub g_discrete: VecField,
}

const BUMP_CENTER: [f64; 3] = [0.05, -0.1, 0.02];
const BUMP_RADIUS: f64 = 0.7;
const BUMP_DIRECTION: [f64; 3] = [0.3, -0.5, 0.8];

/// Value, gradient and Hessian of `B(x) = exp(1 - 1 / (1 - |x - c|^2 / R^2))`.
fn bump_jet(x: [f64; 3]) -> (f64, [f64; 3], [[f64; 3]; 3]) {
    let y: [f64; 3] = std::array::from_fn(|k| x[k] - BUMP_CENTER[k]);
    let r2 = BUMP_RADIUS * BUMP_RADIUS;
    let s = norm_sq(&y) / r2;
    if s >= 1.0 {
        return (0.0, [0.0; 3], [[0.0; 3]; 3]);
    }
    let q = 1.0 - s;
    let b = (1.0 - 1.0 / q).exp();
    let f1 = -1.0 / (q * q);
    let f2 = -2.0 / (q * q * q);
    let ds: [f64; 3] = std::array::from_fn(|k| 2.0 * y[k] / r2);
    let grad = ds.map(|d| b * f1 * d);
    let hess = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let diag = if i == j { 2.0 / r2 } else { 0.0 };
            b * ((f2 + f1 * f1) * ds[i] * ds[j] + f1 * diag)
        })
    });
    (b, grad, hess)
}

pub fn gen_manufactured_gauge(grid: Grid3) -> ManufacturedGauge {
    let d = BUMP_DIRECTION;
    let a0 = VecField::from_fn(grid, Degree::One, |x| {
        let (_, gb, _) = bump_jet(x);
        crate::fields::cross3(&gb, &d)
    });
    let g = VecField::from_fn(grid, Degree::Two, |x| {
        let (_, _, hb) = bump_jet(x);
        let lap = hb[0][0] + hb[1][1] + hb[2][2];
        std::array::from_fn(|i| dot3(&hb[i], &d) - lap * d[i])
    });
    let w = VecField::from_fn(grid, Degree::One, |x| {
        let b = bump_jet(x).0;
        d.map(|c| b * c)
    });
    let mut a0_discrete = crate::fields::curl(&w);
    a0_discrete.degree = Degree::One;
    let g_discrete = crate::fields::curl(&a0_discrete);
    ManufacturedGauge {
        a0,
        g,
        a0_discrete,
        g_discrete,
    }
}
