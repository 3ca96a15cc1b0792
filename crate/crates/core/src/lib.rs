//! Hopf lifts of sphere-valued grid maps.
//!
//! The crate samples maps `u: [-1, 1]^3 -> S^2` on a uniform node grid and
//! provides the pieces needed to decide whether such a map lifts through the
//! Hopf fibration `h: S^3 -> S^2`, to construct the lift, and to smooth the
//! pair `(u, eta)` without breaking the constraint `d eta = u^* omega`:
//!
//! * [`fields`]: grids, node fields, difference operators, quadrature, mollification.
//! * [`pullback`]: the pulled-back area form and its closedness diagnostics.
//! * [`hodge`]: the divergence-free, tangential gauge for a given area form.
//! * [`hopf`]: exact pointwise formulas for `h`, the connection form and sections.
//! * [`lift`]: the lift itself, recovered up to a global phase.
//! * [`approx`]: mollified approximants that keep the constraint.
//! * [`testmaps`]: analytic maps with closed-form reference values.
//! * [`io`], [`cli`], [`selftest`]: file formats, the `hopflift` command line
//!   and its built-in invariant suite.

pub mod approx;
pub mod cli;
pub mod fields;
pub mod hodge;
pub mod hopf;
pub mod io;
pub mod lift;
pub mod par;
pub mod pullback;
pub mod selftest;
pub mod solver;
pub mod testmaps;
