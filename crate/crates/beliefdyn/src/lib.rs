//! # beliefdyn
//!
//! Numerical toolkit for mean-field belief dynamics in social systems.
//!
//! Agents carry a static personality `p` and a belief `x(t)` that evolves
//! under pairwise social attraction, a pull toward an individual prejudice
//! `u(p)`, and Brownian noise. In the large-population limit the joint
//! density `rho(p, x, t)` obeys a nonlinear Fokker-Planck equation; this
//! crate computes its stationary and transient solutions and cross-validates
//! them against direct stochastic simulation of the finite agent system.
//!
//! The main pieces:
//!
//! * [`model`] — scenario definitions: the coefficient functions
//!   (stubbornness `alpha(p)`, prejudice `u(p)`, mutual influence `zeta`,
//!   noise variance, personality density `rho0`), named presets, and
//!   validation.
//! * [`numerics`] — tensor grids, trapezoidal quadrature, the error
//!   function, dense LU solves.
//! * [`stationary`] — the stationary density as the fixed point of an
//!   exponential-of-integrated-drift operator, with a successive
//!   approximation loop, a Fredholm solver (Nystrom or Neumann series) for
//!   the interaction mean `phi*(p)` under unbounded confidence, and closed
//!   forms for product-form influence.
//! * [`transient`] — time evolution under unbounded confidence via the
//!   Ornstein-Uhlenbeck Green function and a Volterra equation for the
//!   self-consistent interaction field `phi(p, t)`, plus Laplace-domain
//!   cross-checks.
//! * [`mcsim`] — seeded, reproducible Euler-Maruyama simulation of the
//!   finite agent system.
//! * [`config`] — TOML scenario configuration files.
//! * [`csvio`] — CSV serialization of densities, marginals and time series.

pub mod config;
pub mod csvio;
mod error;
pub mod mcsim;
pub mod model;
pub mod numerics;
pub mod stationary;
pub mod transient;

pub use error::{Error, Result};
