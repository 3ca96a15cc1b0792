//! Canonical gauge: the divergence-free, tangential vector proxy `a` of a
//! 1-form with `curl a = G`.
//!
//! The solve minimizes
//! `|curl a - G|^2 + mu_d |div a|^2 + mu_b sum_faces (a.n)^2`
//! with trapezoidal weights, by conjugate gradients on the normal equations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::fields::{
    curl, div, grad, l1_norm, l2_inner, l2_norm, lp_norm, partial, partial_adjoint,
    weighted_column_sq, Axis, Degree, FieldError, Grid3, NodeField, Region, ScalarField,
    VecField,
};
use crate::par;
use crate::solver::{conjugate_gradient, CgConfig, CgStatus};

/// Seed of the test functions behind `weak_trace_defect`.
pub const WEAK_TRACE_SEED: u64 = 0x5eed_0001;
/// Number of test functions behind `weak_trace_defect`.
pub const WEAK_TRACE_TRIALS: usize = 8;
/// Seed of the test functions used by [`gauge_minimality_check`].
pub const MINIMALITY_SEED: u64 = 0x5eed_0002;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaugeSolveConfig {
    pub max_iters: usize,
    pub rel_tol: f64,
    /// Weight on the squared normal trace `a.n` over the cube faces.
    pub boundary_penalty: f64,
    /// Weight on the squared divergence.
    pub div_penalty: f64,
    /// Jacobi preconditioning of the CG iteration.
    pub jacobi: bool,
}

impl GaugeSolveConfig {
    /// Defaults for a grid: `20 n` iterations, `rel_tol = 1e-8`,
    /// `div_penalty = 1`, `boundary_penalty = 10 / h`.
    pub fn for_grid(grid: &Grid3) -> Self {
        GaugeSolveConfig {
            max_iters: 20 * grid.n(),
            rel_tol: 1e-8,
            boundary_penalty: 10.0 / grid.h(),
            div_penalty: 1.0,
            jacobi: true,
        }
    }

    fn validate(&self) -> Result<(), HodgeError> {
        let ok = self.max_iters > 0
            && self.rel_tol > 0.0
            && self.rel_tol < 1.0
            && self.boundary_penalty > 0.0
            && self.div_penalty > 0.0
            && self.boundary_penalty.is_finite()
            && self.div_penalty.is_finite();
        if ok {
            Ok(())
        } else {
            Err(HodgeError::InvalidConfig(*self))
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct GaugeReport {
    /// `|curl a - G| / |G|` (absolute when `G = 0`).
    pub curl_residual_rel: f64,
    /// `|div a|`.
    pub div_norm: f64,
    /// `(sum_faces w (a.n)^2)^(1/2)`.
    pub normal_trace_norm: f64,
    /// Worst `|<a, grad psi>| / (|a| |grad psi|)` over fixed smooth test functions.
    pub weak_trace_defect: f64,
    pub iterations: usize,
    /// Relative residual of the normal equations at exit.
    pub solver_residual_rel: f64,
    /// `|a|_{L^{3/2}} / |G|_{L^1}` over the cube.
    pub l32_l1_ratio: f64,
}

#[derive(Debug, Error)]
pub enum HodgeError {
    #[error("invalid gauge solver configuration {0:?}")]
    InvalidConfig(GaugeSolveConfig),
    #[error("expected a 2-form proxy, got a {0:?} field")]
    WrongDegree(Degree),
    #[error("gauge solver diverged after {iterations} iterations")]
    SolverDiverged { iterations: usize },
    #[error("gauge solver stopped at {} iterations without reaching the tolerance", .0.1.iterations)]
    NotConverged(Box<(VecField, GaugeReport)>),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Smooth test function: quadratic polynomial plus two Fourier modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    linear: [f64; 3],
    quadratic: [f64; 6],
    modes: [([f64; 3], f64, f64); 2],
}

impl TestFunction {
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let mut coef = || rng.gen_range(-1.0..1.0);
        let linear = [coef(), coef(), coef()];
        let quadratic = [coef(), coef(), coef(), coef(), coef(), coef()];
        let mode = |rng: &mut R| {
            let k = [
                rng.gen_range(-3..=3) as f64,
                rng.gen_range(-3..=3) as f64,
                rng.gen_range(-3..=3) as f64,
            ];
            (k, rng.gen_range(0.0..std::f64::consts::TAU), rng.gen_range(-0.5..0.5))
        };
        let modes = [mode(rng), mode(rng)];
        TestFunction {
            linear,
            quadratic,
            modes,
        }
    }

    pub fn eval(&self, x: [f64; 3]) -> f64 {
        let l = &self.linear;
        let q = &self.quadratic;
        let mut v = l[0] * x[0] + l[1] * x[1] + l[2] * x[2];
        v += q[0] * x[0] * x[0] + q[1] * x[1] * x[1] + q[2] * x[2] * x[2];
        v += q[3] * x[0] * x[1] + q[4] * x[1] * x[2] + q[5] * x[0] * x[2];
        for (k, phase, amp) in &self.modes {
            v += amp * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + phase).sin();
        }
        v
    }

    /// Difference gradient of the sampled function.
    pub fn gradient(&self, grid: Grid3) -> VecField {
        grad(&ScalarField::from_fn(grid, |x| self.eval(x)))
    }
}

/// Deterministic list of test functions.
pub fn test_functions(count: usize, seed: u64) -> Vec<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| TestFunction::random(&mut rng)).collect()
}

/// Worst relative inner product of `a` against the difference gradients of
/// `count` seeded test functions, over the cube.
pub fn gradient_orthogonality(a: &VecField, count: usize, seed: u64) -> f64 {
    let an = l2_norm(a, Region::Cube);
    if an == 0.0 {
        return 0.0;
    }
    test_functions(count, seed)
        .iter()
        .map(|psi| {
            let g = psi.gradient(a.grid);
            let gn = l2_norm(&g, Region::Cube);
            let ip = l2_inner(a, &g, Region::Cube).expect("same grid and kind");
            if gn == 0.0 {
                0.0
            } else {
                ip.abs() / (an * gn)
            }
        })
        .fold(0.0, f64::max)
}

/// Largest relative decrease `(|a| - min_t |a + t grad psi|) / |a|` over
/// `trials` seeded smooth test functions. Always `>= 0`; it vanishes exactly
/// when `a` is orthogonal to every tested gradient, i.e. when `a` is the
/// L^2-minimal member of its class.
pub fn gauge_minimality_check(a: &VecField, trials: usize) -> f64 {
    let an = l2_norm(a, Region::Cube);
    if an == 0.0 {
        return 0.0;
    }
    test_functions(trials, MINIMALITY_SEED)
        .iter()
        .map(|psi| {
            let g = psi.gradient(a.grid);
            let gg = l2_inner(&g, &g, Region::Cube).expect("same field");
            if gg == 0.0 {
                return 0.0;
            }
            let ag = l2_inner(a, &g, Region::Cube).expect("same grid and kind");
            // |a + t g|^2 is minimal at t = -<a, g> / |g|^2
            let best = (an * an - ag * ag / gg).max(0.0).sqrt();
            (an - best) / an
        })
        .fold(0.0, f64::max)
}

/// The normal operator of the penalized least-squares functional.
struct NormalOperator {
    grid: Grid3,
    weights: Vec<f64>,
    div_penalty: f64,
    boundary_penalty: f64,
    /// Face quadrature weight per node and axis; zero off the faces.
    faces: Vec<[f64; 3]>,
}

impl NormalOperator {
    fn new(grid: Grid3, cfg: &GaugeSolveConfig) -> Self {
        let weights = (0..grid.len()).map(|i| grid.weight(i)).collect();
        let h2 = grid.h() * grid.h();
        let last = grid.n() - 1;
        let faces = par::map_indices(grid.len(), |i| {
            let ijk = grid.ijk(i);
            std::array::from_fn(|a| {
                if ijk[a] == 0 || ijk[a] == last {
                    let face: f64 = (0..3).filter(|&b| b != a).map(|b| grid.trap1(ijk[b])).product();
                    h2 * face
                } else {
                    0.0
                }
            })
        });
        NormalOperator {
            grid,
            weights,
            div_penalty: cfg.div_penalty,
            boundary_penalty: cfg.boundary_penalty,
            faces,
        }
    }

    /// `C^T m[0..3] + D^T m[3]`, with `C` the curl and `D` the divergence.
    fn adjoint(&self, m: &[[f64; 4]]) -> Vec<[f64; 3]> {
        let g = &self.grid;
        let t: Vec<Vec<[f64; 4]>> = Axis::ALL.iter().map(|&ax| partial_adjoint(g, m, ax)).collect();
        par::map_indices(g.len(), |i| {
            let (tx, ty, tz) = (&t[0][i], &t[1][i], &t[2][i]);
            [
                tz[1] - ty[2] + tx[3],
                tx[2] - tz[0] + ty[3],
                ty[0] - tx[1] + tz[3],
            ]
        })
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        let (a, _) = x.as_chunks::<3>();
        let d: Vec<Vec<[f64; 3]>> = Axis::ALL.iter().map(|&ax| partial(g, a, ax)).collect();
        let m = par::map_indices(g.len(), |i| {
            let (dx, dy, dz) = (&d[0][i], &d[1][i], &d[2][i]);
            let w = self.weights[i];
            [
                w * (dy[2] - dz[1]),
                w * (dz[0] - dx[2]),
                w * (dx[1] - dy[0]),
                self.div_penalty * w * (dx[0] + dy[1] + dz[2]),
            ]
        });
        let mut out = self.adjoint(&m);
        par::for_each_indexed(&mut out, |i, o| {
            for c in 0..3 {
                o[c] += self.boundary_penalty * self.faces[i][c] * a[i][c];
            }
        });
        out.into_flattened()
    }

    fn rhs(&self, target: &[[f64; 3]]) -> Vec<f64> {
        let m = par::map_indices(self.grid.len(), |i| {
            let w = self.weights[i];
            let t = &target[i];
            [w * t[0], w * t[1], w * t[2], 0.0]
        });
        self.adjoint(&m).into_flattened()
    }

    /// Exact diagonal of the operator, inverted.
    fn inverse_diagonal(&self) -> Vec<f64> {
        let g = &self.grid;
        let q = weighted_column_sq(g);
        let h3 = g.h().powi(3);
        let diag = par::map_indices(g.len(), |i| {
            let ijk = g.ijk(i);
            // weighted squared column norm of D_ax at node i
            let col: [f64; 3] = std::array::from_fn(|ax| {
                let others: f64 = (0..3).filter(|&b| b != ax).map(|b| g.trap1(ijk[b])).product();
                h3 * others * q[ijk[ax]]
            });
            let total = col[0] + col[1] + col[2];
            let d: [f64; 3] = std::array::from_fn(|c| {
                (total - col[c])
                    + self.div_penalty * col[c]
                    + self.boundary_penalty * self.faces[i][c]
            });
            d
        });
        diag.into_flattened().into_iter().map(|d| 1.0 / d).collect()
    }

    fn normal_trace_norm(&self, a: &VecField) -> f64 {
        par::sum_indices(self.grid.len(), |i| {
            (0..3)
                .map(|c| self.faces[i][c] * a.values[i][c] * a.values[i][c])
                .sum::<f64>()
        })
        .sqrt()
    }
}

/// Solves for the canonical gauge of the 2-form proxy `g`.
pub fn canonical_gauge(
    g: &VecField,
    cfg: &GaugeSolveConfig,
) -> Result<(VecField, GaugeReport), HodgeError> {
    cfg.validate()?;
    if g.degree != Degree::Two {
        return Err(HodgeError::WrongDegree(g.degree));
    }
    if let Some(p) = g.values.iter().position(|v| v.iter().any(|c| !c.is_finite())) {
        return Err(FieldError::NonFinite(p).into());
    }
    let grid = g.grid;
    let op = NormalOperator::new(grid, cfg);
    let b = op.rhs(&g.values);
    let inv = cfg.jacobi.then(|| op.inverse_diagonal());
    let cg_cfg = CgConfig {
        max_iters: cfg.max_iters,
        rel_tol: cfg.rel_tol,
        ..CgConfig::default()
    };
    let out = conjugate_gradient(|x| op.apply(x), &b, inv.as_deref(), &cg_cfg);
    let (nodes, _) = out.x.as_chunks::<3>();
    let a = VecField {
        grid,
        degree: Degree::One,
        values: nodes.to_vec(),
    };

    let resid = curl(&a).add_scaled(-1.0, g);
    let g_norm = l2_norm(g, Region::Cube);
    let r_norm = l2_norm(&resid, Region::Cube);
    let g_l1 = l1_norm(g, Region::Cube);
    let report = GaugeReport {
        curl_residual_rel: if g_norm > 0.0 { r_norm / g_norm } else { r_norm },
        div_norm: l2_norm(&div(&a), Region::Cube),
        normal_trace_norm: op.normal_trace_norm(&a),
        weak_trace_defect: gradient_orthogonality(&a, WEAK_TRACE_TRIALS, WEAK_TRACE_SEED),
        iterations: out.iterations,
        solver_residual_rel: out.residual_rel,
        l32_l1_ratio: if g_l1 > 0.0 {
            lp_norm(&a, 1.5, Region::Cube) / g_l1
        } else {
            0.0
        },
    };
    match out.status {
        CgStatus::Converged => Ok((a, report)),
        CgStatus::MaxIters => Err(HodgeError::NotConverged(Box::new((a, report)))),
        CgStatus::Diverged => Err(HodgeError::SolverDiverged {
            iterations: out.iterations,
        }),
    }
}

/// Checks that a field has the grid and degree expected of a gauge.
pub fn expect_one_form(a: &VecField, grid: &Grid3) -> Result<(), FieldError> {
    if a.grid() != grid {
        return Err(FieldError::GridMismatch);
    }
    if a.degree != Degree::One {
        return Err(FieldError::KindMismatch(a.kind(), crate::fields::FieldKind::Vec1));
    }
    Ok(())
}
