//! Quasi-convexity verification on uniform grids.
//!
//! A function `g` is quasi-convex when `g(tx + (1-t)y) <= sup{g(x), g(y)}`
//! for all `x, y` in the interval and `t` in `[0, 1]`. On a grid this is the
//! triple condition: no interior point rises above the smaller of the best
//! points on each side. [`check_quasiconvex`] evaluates it in linear time via
//! prefix/suffix minima; [`brute_force_qc`] is the cubic oracle over all
//! grid triples, kept deliberately naive so the two implementations share no
//! structure.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Interval;
use crate::registry::FunctionSpec;

pub const DEFAULT_QC_SAMPLES: usize = 2001;
pub const DEFAULT_QC_TOL: f64 = 1e-10;

/// Outcome of a quasi-convexity check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QCVerdict {
    pub holds: bool,
    /// Split point of the non-increasing/non-decreasing decomposition
    /// (the grid argmin); present when the property holds.
    pub valley_point: Option<f64>,
    /// Largest amount by which an interior grid value exceeds the smaller of
    /// the two side minima; zero when the property holds exactly.
    pub worst_violation: f64,
    pub samples: usize,
}

fn grid(iv: Interval, n: usize, kinks: &[f64]) -> Vec<f64> {
    let w = iv.width();
    (0..n)
        .map(|i| {
            let mut x = iv.a() + w * i as f64 / (n - 1) as f64;
            // Keep samples off derivative kinks; the nudge is far below grid
            // resolution and cannot reorder points.
            if kinks.iter().any(|&k| (x - k).abs() < 1e-12) {
                x += 1e-12;
            }
            x
        })
        .collect()
}

fn verdict_from_samples(xs: &[f64], gs: &[f64], tol: f64) -> QCVerdict {
    let n = gs.len();
    // prefix[i] = min over j < i, suffix[i] = min over j > i.
    let mut prefix = vec![0.0; n];
    let mut acc = f64::INFINITY;
    for i in 0..n {
        prefix[i] = acc;
        acc = acc.min(gs[i]);
    }
    let mut suffix = vec![0.0; n];
    let mut acc = f64::INFINITY;
    for i in (0..n).rev() {
        suffix[i] = acc;
        acc = acc.min(gs[i]);
    }
    let mut worst = 0.0_f64;
    for z in 1..n - 1 {
        worst = worst.max(gs[z] - prefix[z].max(suffix[z]));
    }
    let holds = worst <= tol;
    let valley_point = if holds {
        let argmin = gs
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .expect("non-empty grid");
        Some(xs[argmin])
    } else {
        None
    };
    QCVerdict {
        holds,
        valley_point,
        worst_violation: worst,
        samples: n,
    }
}

fn sample<F: Fn(f64) -> f64>(g: &F, xs: &[f64]) -> Result<Vec<f64>> {
    xs.iter()
        .map(|&x| {
            let v = g(x);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Domain(format!(
                    "quasi-convexity sample at x = {x} is not finite"
                )))
            }
        })
        .collect()
}

fn check_samples(n_samples: usize, tol: f64) -> Result<()> {
    if n_samples < 3 {
        return Err(Error::InvalidParam {
            field: "n_samples",
            value: n_samples as f64,
            requirement: "at least 3 grid points",
        });
    }
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::InvalidParam {
            field: "tol",
            value: tol,
            requirement: "finite and >= 0",
        });
    }
    Ok(())
}

/// Grid quasi-convexity check in O(n).
pub fn check_quasiconvex<F: Fn(f64) -> f64>(
    g: F,
    iv: Interval,
    n_samples: usize,
    tol: f64,
) -> Result<QCVerdict> {
    check_quasiconvex_with_kinks(g, iv, n_samples, tol, &[])
}

/// As [`check_quasiconvex`], nudging grid points off the given kink abscissae.
pub fn check_quasiconvex_with_kinks<F: Fn(f64) -> f64>(
    g: F,
    iv: Interval,
    n_samples: usize,
    tol: f64,
    kinks: &[f64],
) -> Result<QCVerdict> {
    check_samples(n_samples, tol)?;
    let xs = grid(iv, n_samples, kinks);
    let gs = sample(&g, &xs)?;
    Ok(verdict_from_samples(&xs, &gs, tol))
}

/// Checks `|f'|^q` for quasi-convexity on the interval with default grid
/// density, the hypothesis under which the error bounds apply.
pub fn check_derivative_power(f: &FunctionSpec, iv: Interval, q: f64) -> Result<QCVerdict> {
    f.check_domain(iv)?;
    check_quasiconvex_with_kinks(
        |x| f.deriv(x).abs().powf(q),
        iv,
        DEFAULT_QC_SAMPLES,
        DEFAULT_QC_TOL,
        &f.kinks(),
    )
}

/// Cubic-cost oracle: the worst triple violation
/// `max over x < z < y of g(z) - max(g(x), g(y))`, clamped at zero.
/// `n_samples` is capped at 200.
pub fn brute_force_qc<F: Fn(f64) -> f64>(
    g: F,
    iv: Interval,
    n_samples: usize,
    tol: f64,
) -> Result<QCVerdict> {
    check_samples(n_samples, tol)?;
    if n_samples > 200 {
        return Err(Error::InvalidParam {
            field: "n_samples",
            value: n_samples as f64,
            requirement: "at most 200 for the cubic oracle",
        });
    }
    let xs = grid(iv, n_samples, &[]);
    let gs = sample(&g, &xs)?;
    let n = gs.len();
    let mut worst = 0.0_f64;
    for x in 0..n {
        for z in x + 1..n {
            for y in z + 1..n {
                worst = worst.max(gs[z] - gs[x].max(gs[y]));
            }
        }
    }
    let holds = worst <= tol;
    let valley_point = if holds {
        let argmin = gs
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .expect("non-empty grid");
        Some(xs[argmin])
    } else {
        None
    };
    Ok(QCVerdict {
        holds,
        valley_point,
        worst_violation: worst,
        samples: n,
    })
}
