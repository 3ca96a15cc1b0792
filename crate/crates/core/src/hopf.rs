//! Pointwise Hopf-fibration layer.
//!
//! Points of `S^3` are `(x1, x2, x3, x4)` with `z = x1 + i x2`, `w = x3 + i x4`.
//! The Hopf map is `h(z, w) = (2 conj(z) w, |z|^2 - |w|^2)`, the connection
//! form is `theta = -x2 dx1 + x1 dx2 - x4 dx3 + x3 dx4`, and everything here is
//! evaluated analytically (no differencing) except the grid routines
//! [`gauge_of_lift`] and [`energy_identity_defect`].

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::fields::{
    dot3, norm_sq, partial, Axis, Degree, FieldError, LiftField, ScalarField, SphereMapField,
    VecField,
};
use crate::par;

/// Input tolerance on `| |q| - 1 |` for [`hopf`].
pub const HOPF_INPUT_TOL: f64 = 1e-9;
/// Tangency tolerance for [`theta_at`].
pub const TANGENT_TOL: f64 = 1e-9;
/// Default angular clearance (radians) between a section's image and its pole.
pub const DEFAULT_POLE_CLEARANCE: f64 = 0.05;
/// Default section pole.
pub const SOUTH_POLE: S2Point = S2Point([0.0, 0.0, -1.0]);

#[derive(Debug, Error)]
pub enum HopfError {
    #[error("point has norm {0}, expected 1")]
    NotUnit(f64),
    #[error("vector is not tangent to S^3 (v.q = {0})")]
    NotTangent(f64),
    #[error("point lies {distance} rad from the section pole (need at least {clearance})")]
    TooCloseToPole { distance: f64, clearance: f64 },
    #[error("Hopf coordinate t = {0} is too close to 0 or pi/2")]
    DegenerateChart(f64),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Unit vector of R^4 = C^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct S3Point(pub [f64; 4]);

/// Unit vector of R^3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct S2Point(pub [f64; 3]);

impl S3Point {
    /// Accepts `x` when `| |x| - 1 | <= 1e-9` and renormalizes it.
    pub fn new(x: [f64; 4]) -> Result<Self, HopfError> {
        let r = norm_sq(&x).sqrt();
        if !((r - 1.0).abs() <= HOPF_INPUT_TOL) {
            return Err(HopfError::NotUnit(r));
        }
        Ok(S3Point(x.map(|v| v / r)))
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.0[0], self.0[1])
    }

    pub fn w(&self) -> Complex64 {
        Complex64::new(self.0[2], self.0[3])
    }

    pub fn from_complex(z: Complex64, w: Complex64) -> Self {
        S3Point([z.re, z.im, w.re, w.im])
    }

    /// `h(q)`; infallible because `q` is already unit.
    pub fn project(&self) -> S2Point {
        S2Point(hopf_raw(&self.0))
    }

    /// The vertical vector `i q = (-x2, x1, -x4, x3)`.
    pub fn vertical(&self) -> [f64; 4] {
        let x = &self.0;
        [-x[1], x[0], -x[3], x[2]]
    }
}

impl S2Point {
    pub fn new(p: [f64; 3]) -> Result<Self, HopfError> {
        let r = norm_sq(&p).sqrt();
        if !((r - 1.0).abs() <= HOPF_INPUT_TOL) {
            return Err(HopfError::NotUnit(r));
        }
        Ok(S2Point(p.map(|v| v / r)))
    }

    /// Angle between two unit vectors.
    pub fn angle_to(&self, other: &S2Point) -> f64 {
        angle_between(&self.0, &other.0)
    }
}

pub(crate) fn angle_between(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    // atan2 form keeps accuracy near 0 and pi.
    let c = crate::fields::cross3(a, b);
    norm_sq(&c).sqrt().atan2(dot3(a, b))
}

/// Hopf map on raw coordinates, no checks; renormalizes if `|h|` drifts by
/// more than 1e-14.
pub(crate) fn hopf_raw(x: &[f64; 4]) -> [f64; 3] {
    let p = [
        2.0 * (x[0] * x[2] + x[1] * x[3]),
        2.0 * (x[0] * x[3] - x[1] * x[2]),
        x[0] * x[0] + x[1] * x[1] - x[2] * x[2] - x[3] * x[3],
    ];
    let r = norm_sq(&p).sqrt();
    if (r - 1.0).abs() > 1e-14 {
        p.map(|v| v / r)
    } else {
        p
    }
}

/// `h(z, w) = (2 conj(z) w, |z|^2 - |w|^2)`.
pub fn hopf(q: &[f64; 4]) -> Result<S2Point, HopfError> {
    Ok(S3Point::new(*q)?.project())
}

/// Jacobian of `h` as a map R^4 -> R^3 (rows are the three output components).
pub fn hopf_jacobian(x: &[f64; 4]) -> [[f64; 4]; 3] {
    [
        [2.0 * x[2], 2.0 * x[3], 2.0 * x[0], 2.0 * x[1]],
        [2.0 * x[3], -2.0 * x[2], -2.0 * x[1], 2.0 * x[0]],
        [2.0 * x[0], 2.0 * x[1], -2.0 * x[2], -2.0 * x[3]],
    ]
}

fn apply_jacobian(j: &[[f64; 4]; 3], v: &[f64; 4]) -> [f64; 3] {
    std::array::from_fn(|r| (0..4).map(|c| j[r][c] * v[c]).sum())
}

/// `theta_x(v) = -x2 v1 + x1 v2 - x4 v3 + x3 v4`, without the tangency check.
pub(crate) fn theta_raw(x: &[f64; 4], v: &[f64; 4]) -> f64 {
    -x[1] * v[0] + x[0] * v[1] - x[3] * v[2] + x[2] * v[3]
}

/// Connection 1-form evaluated on a tangent vector at `q`.
pub fn theta_at(q: &S3Point, v: &[f64; 4]) -> Result<f64, HopfError> {
    let vq: f64 = (0..4).map(|i| v[i] * q.0[i]).sum();
    let scale = norm_sq(v).sqrt().max(1.0);
    if vq.abs() > TANGENT_TOL * scale {
        return Err(HopfError::NotTangent(vq));
    }
    Ok(theta_raw(&q.0, v))
}

/// `(z, w) -> e^{i phi} (z, w)`.
pub fn phase_rotate(x: &[f64; 4], phi: f64) -> [f64; 4] {
    let (s, c) = phi.sin_cos();
    [
        c * x[0] - s * x[1],
        s * x[0] + c * x[1],
        c * x[2] - s * x[3],
        s * x[2] + c * x[3],
    ]
}

/// A smooth right inverse of `h` on `S^2` minus a pole.
///
/// For a pole `P`, let `chi` be the spinor whose Bloch vector is `-P`. The
/// section sends `p` to `(1 + p.sigma) chi`, normalized; this is singular
/// only at `p = P`.
#[derive(Debug, Clone, Copy)]
pub struct Section {
    pole: S2Point,
    clearance: f64,
    chi: [Complex64; 2],
}

impl Section {
    pub fn new(pole: S2Point, clearance: f64) -> Self {
        let m = pole.0.map(|v| -v);
        let chi = if m[2] >= 0.0 {
            let r = (2.0 * (1.0 + m[2])).sqrt();
            [
                Complex64::new((1.0 + m[2]) / r, 0.0),
                Complex64::new(m[0] / r, m[1] / r),
            ]
        } else {
            let r = (2.0 * (1.0 - m[2])).sqrt();
            [
                Complex64::new(m[0] / r, -m[1] / r),
                Complex64::new((1.0 - m[2]) / r, 0.0),
            ]
        };
        Section {
            pole,
            clearance,
            chi,
        }
    }

    pub fn pole(&self) -> S2Point {
        self.pole
    }

    pub fn apply(&self, p: &S2Point) -> Result<S3Point, HopfError> {
        let distance = p.angle_to(&self.pole);
        if distance < self.clearance {
            return Err(HopfError::TooCloseToPole {
                distance,
                clearance: self.clearance,
            });
        }
        Ok(self.apply_unchecked(&p.0))
    }

    pub(crate) fn apply_unchecked(&self, n: &[f64; 3]) -> S3Point {
        let [c0, c1] = self.chi;
        let a = Complex64::new(1.0 + n[2], 0.0) * c0 + Complex64::new(n[0], -n[1]) * c1;
        let b = Complex64::new(n[0], n[1]) * c0 + Complex64::new(1.0 - n[2], 0.0) * c1;
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        S3Point::from_complex(a / r, b / r)
    }
}

/// Section of `h` away from `pole`, with the default clearance.
pub fn stereo_section(p: &S2Point, pole: &S2Point) -> Result<S3Point, HopfError> {
    Section::new(*pole, DEFAULT_POLE_CLEARANCE).apply(p)
}

/// Hopf coordinates `(t, phi1, phi2) -> (e^{i phi1} sin t, e^{i phi2} cos t)`.
pub fn hopf_coordinates(t: f64, phi1: f64, phi2: f64) -> S3Point {
    S3Point([
        phi1.cos() * t.sin(),
        phi1.sin() * t.sin(),
        phi2.cos() * t.cos(),
        phi2.sin() * t.cos(),
    ])
}

/// The orthonormal frame `tau1 = d/dphi1 + d/dphi2`, `tau2 = d/dt`,
/// `tau3 = cot t d/dphi1 - tan t d/dphi2` at a Hopf-coordinate point.
pub fn hopf_frame(t: f64, phi1: f64, phi2: f64) -> [[f64; 4]; 3] {
    let (s1, c1) = phi1.sin_cos();
    let (s2, c2) = phi2.sin_cos();
    let (st, ct) = t.sin_cos();
    [
        [-s1 * st, c1 * st, -s2 * ct, c2 * ct],
        [c1 * ct, s1 * ct, -c2 * st, -s2 * st],
        [-s1 * ct, c1 * ct, s2 * st, -c2 * st],
    ]
}

/// Defects of the frame identities at one point; each entry should be ~0.
#[derive(Debug, Clone, Copy, Default, Serialize, PartialEq)]
pub struct FrameReport {
    /// `max |<tau_a, tau_b> - delta_ab|`, plus tangency `|<tau_a, q>|`.
    pub orthonormality: f64,
    /// `|dh(tau1)|`.
    pub vertical_kernel: f64,
    /// `max_a | |dh(tau_a)| - 2 |` for `a = 2, 3`.
    pub horizontal_scale: f64,
    /// `max |dh(tau2) - 2 f1|, |dh(tau3) - 2 f2|` with `(f1, f2)` the orthonormal frame on `S^2`.
    pub matrix: f64,
    /// `max_{a<b} | h^*omega(tau_a, tau_b) - 4 (dx1^dx2 + dx3^dx4)(tau_a, tau_b) |`.
    pub pullback: f64,
    /// `max( |theta(tau1) - 1|, |theta(tau2)|, |theta(tau3)| )`.
    pub theta: f64,
}

impl FrameReport {
    pub fn max_defect(&self) -> f64 {
        [
            self.orthonormality,
            self.vertical_kernel,
            self.horizontal_scale,
            self.matrix,
            self.pullback,
            self.theta,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    fn merge(&mut self, o: &FrameReport) {
        self.orthonormality = self.orthonormality.max(o.orthonormality);
        self.vertical_kernel = self.vertical_kernel.max(o.vertical_kernel);
        self.horizontal_scale = self.horizontal_scale.max(o.horizontal_scale);
        self.matrix = self.matrix.max(o.matrix);
        self.pullback = self.pullback.max(o.pullback);
        self.theta = self.theta.max(o.theta);
    }
}

fn dot4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    (0..4).map(|i| a[i] * b[i]).sum()
}

fn two_form_12_34(v: &[f64; 4], w: &[f64; 4]) -> f64 {
    4.0 * (v[0] * w[1] - v[1] * w[0] + v[2] * w[3] - v[3] * w[2])
}

/// Checks the frame identities of the Hopf map at `(t, phi1, phi2)` using the
/// analytic Jacobian of `h`.
pub fn frame_checks(t: f64, phi1: f64, phi2: f64) -> Result<FrameReport, HopfError> {
    if !(1e-3..=std::f64::consts::FRAC_PI_2 - 1e-3).contains(&t) {
        return Err(HopfError::DegenerateChart(t));
    }
    let q = hopf_coordinates(t, phi1, phi2);
    let tau = hopf_frame(t, phi1, phi2);
    let jac = hopf_jacobian(&q.0);
    let p = q.project().0;

    let mut orth = 0.0_f64;
    for a in 0..3 {
        orth = orth.max(dot4(&tau[a], &q.0).abs());
        for b in 0..3 {
            let target = if a == b { 1.0 } else { 0.0 };
            orth = orth.max((dot4(&tau[a], &tau[b]) - target).abs());
        }
    }

    let images: Vec<[f64; 3]> = tau.iter().map(|v| apply_jacobian(&jac, v)).collect();

    // Oriented orthonormal frame on S^2 in the chart (e^{i phi} sin 2t, -cos 2t), phi = phi2 - phi1.
    let phi = phi2 - phi1;
    let (sp, cp) = phi.sin_cos();
    let (s2t, c2t) = (2.0 * t).sin_cos();
    let f1 = [cp * c2t, sp * c2t, s2t];
    let f2 = [sp, -cp, 0.0];
    let diff = |a: &[f64; 3], b: &[f64; 3]| {
        let d = [a[0] - 2.0 * b[0], a[1] - 2.0 * b[1], a[2] - 2.0 * b[2]];
        norm_sq(&d).sqrt()
    };

    let mut pullback = 0.0_f64;
    for a in 0..3 {
        for b in (a + 1)..3 {
            let lhs = dot3(&p, &crate::fields::cross3(&images[a], &images[b]));
            let rhs = two_form_12_34(&tau[a], &tau[b]);
            pullback = pullback.max((lhs - rhs).abs());
        }
    }

    let th: Vec<f64> = tau.iter().map(|v| theta_raw(&q.0, v)).collect();

    Ok(FrameReport {
        orthonormality: orth,
        vertical_kernel: norm_sq(&images[0]).sqrt(),
        horizontal_scale: (norm_sq(&images[1]).sqrt() - 2.0)
            .abs()
            .max((norm_sq(&images[2]).sqrt() - 2.0).abs()),
        matrix: diff(&images[1], &f1).max(diff(&images[2], &f2)),
        pullback,
        theta: (th[0] - 1.0).abs().max(th[1].abs()).max(th[2].abs()),
    })
}

/// Aggregate of [`frame_checks`] over random chart points.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct FrameSweepReport {
    pub samples: usize,
    pub seed: u64,
    pub worst: FrameReport,
    pub max_defect: f64,
}

/// Runs [`frame_checks`] at `samples` random points with `t` uniform in
/// `[1e-3, pi/2 - 1e-3]` and both angles uniform in `[0, 2 pi)`.
pub fn frame_check_sweep(samples: usize, seed: u64) -> FrameSweepReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = std::f64::consts::TAU;
    let mut worst = FrameReport::default();
    for _ in 0..samples {
        let t = rng.gen_range(1e-3..std::f64::consts::FRAC_PI_2 - 1e-3);
        let r = frame_checks(t, rng.gen_range(0.0..tau), rng.gen_range(0.0..tau))
            .expect("t drawn inside the chart");
        worst.merge(&r);
    }
    FrameSweepReport {
        samples,
        seed,
        max_defect: worst.max_defect(),
        worst,
    }
}

/// `2 u^* theta` from difference partials of the lift: the gauge 1-form.
pub fn gauge_of_lift(lift: &LiftField) -> VecField {
    let g = lift.grid;
    let d: Vec<Vec<[f64; 4]>> = Axis::ALL
        .iter()
        .map(|&ax| partial(&g, &lift.values, ax))
        .collect();
    let values = par::map_indices(g.len(), |i| {
        let x = &lift.values[i];
        std::array::from_fn(|a| 2.0 * theta_raw(x, &d[a][i]))
    });
    VecField {
        grid: g,
        degree: Degree::One,
        values,
    }
}

/// Nodewise Hopf projection of a lift.
pub fn project_lift(lift: &LiftField) -> SphereMapField {
    let values = par::map_indices(lift.grid.len(), |i| hopf_raw(&lift.values[i]));
    SphereMapField {
        grid: lift.grid,
        values,
    }
}

/// Nodewise `|d lift|^2 - |eta|^2 / 4 - |du|^2 / 4`.
pub fn energy_identity_defect(
    lift: &LiftField,
    u: &SphereMapField,
    eta: &VecField,
) -> Result<ScalarField, HopfError> {
    let g = lift.grid;
    if u.grid != g || eta.grid != g {
        return Err(FieldError::GridMismatch.into());
    }
    let dl: Vec<Vec<[f64; 4]>> = Axis::ALL.iter().map(|&a| partial(&g, &lift.values, a)).collect();
    let du: Vec<Vec<[f64; 3]>> = Axis::ALL.iter().map(|&a| partial(&g, &u.values, a)).collect();
    let values = par::map_indices(g.len(), |i| {
        let e_lift: f64 = (0..3).map(|a| norm_sq(&dl[a][i])).sum();
        let e_u: f64 = (0..3).map(|a| norm_sq(&du[a][i])).sum();
        e_lift - 0.25 * norm_sq(&eta.values[i]) - 0.25 * e_u
    });
    Ok(ScalarField { grid: g, values })
}

/// Random unit vector of R^4 (Gaussian direction).
pub fn random_s3(rng: &mut impl Rng) -> S3Point {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let r2 = norm_sq(&v);
        if r2 > 1e-4 && r2 <= 1.0 {
            let r = r2.sqrt();
            return S3Point(v.map(|x| x / r));
        }
    }
}

/// Random unit vector of R^3.
pub fn random_s2(rng: &mut impl Rng) -> S2Point {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let r2 = norm_sq(&v);
        if r2 > 1e-4 && r2 <= 1.0 {
            let r = r2.sqrt();
            return S2Point(v.map(|x| x / r));
        }
    }
}
