//! Error certification for a generalized three-point quadrature rule.
//!
//! The rule approximates the mean value of `f` over `[a, b]` by
//!
//! ```text
//! Q(f; alpha, lambda) = lambda * (alpha f(a) + (1 - alpha) f(b))
//!                     + (1 - lambda) * f(alpha a + (1 - alpha) b)
//! ```
//!
//! with `alpha, lambda` in `[0, 1]`. Midpoint (`lambda = 0`), trapezoid
//! (`lambda = 1, alpha = 1/2`) and Simpson (`lambda = 1/3, alpha = 1/2`)
//! are special cases.
//!
//! When `|f'|^q` is quasi-convex on `[a, b]` the approximation error admits
//! closed-form bounds built from endpoint (and node) suprema of `|f'|^q` and
//! moment factors of the weight kernels. This crate evaluates the rule, the
//! bounds, and a high-accuracy reference integral, and cross-checks every
//! identity numerically:
//!
//! * [`model`]: intervals, rule parameters, regime classification, suprema witnesses
//! * [`registry`]: the closed corpus of test functions with exact derivatives
//! * [`quad`]: rule evaluation, adaptive reference integration, the kernel identity
//! * [`bounds`]: the three bound families, moment factors, baselines, corollary cross-checks
//! * [`qc`]: quasi-convexity verification on grids, with a brute-force oracle
//! * [`means`]: classical means and the bound specializations they satisfy
//! * [`sweep`]: parameter sweeps producing per-tuple soundness reports (CSV/JSON)
//!
//! ```
//! use quadcert::{model, quad, bounds};
//!
//! let iv = model::Interval::new(0.0, 1.0).unwrap();
//! let f = registry_member("pow:2").unwrap();
//! let params = model::make_params(0.5, 1.0 / 3.0, 2.0).unwrap();
//! let err = quad::true_error(&f, iv, &params).unwrap();
//! let bound = bounds::theorem21_bound(&f, iv, &params).unwrap();
//! assert!(err <= bound.value);
//! # use quadcert::registry::registry_member;
//! ```
//!
//! The `parallel` feature (default) runs sweeps on a rayon pool; disabling it
//! yields a dependency-free sequential build with identical output.

pub mod bounds;
pub mod error;
pub mod means;
pub mod model;
pub mod qc;
pub mod quad;
pub mod registry;
pub mod sweep;

pub use error::{Error, Result};
pub use model::{classify_regime, make_params, Interval, Regime, RuleParams, SupWitness};
pub use registry::FunctionSpec;
