//! Classical means and the error-bound specializations they satisfy.
//!
//! Applying the rule to `x^n` or `1/x` turns quadrature statements into
//! relations between means: the rule side becomes weighted arithmetic and
//! harmonic means, the integral side a (generalized) logarithmic mean.
//! [`proposition_bound`] evaluates those relations from the mean operations
//! directly and re-derives both sides through the generic quadrature path;
//! the two routes must agree to 1e-12.

use serde::Serialize;

use crate::bounds::{self, BoundValue};
use crate::error::{Error, Result};
use crate::model::{classify_regime, Interval, Regime, RuleParams};
use crate::quad;
use crate::registry::{registry_member, FunctionSpec};

/// Weighted arithmetic mean `alpha a + (1 - alpha) b`.
pub fn weighted_arithmetic(a: f64, b: f64, alpha: f64) -> f64 {
    alpha * a + (1.0 - alpha) * b
}

/// Arithmetic mean.
pub fn arithmetic(a: f64, b: f64) -> f64 {
    0.5 * (a + b)
}

/// Weighted harmonic mean `(alpha/a + (1-alpha)/b)^-1`, `a, b != 0`.
pub fn weighted_harmonic(a: f64, b: f64, alpha: f64) -> Result<f64> {
    if a == 0.0 || b == 0.0 {
        return Err(Error::Domain(format!(
            "weighted harmonic mean requires a, b != 0 (got a = {a}, b = {b})"
        )));
    }
    Ok(1.0 / (alpha / a + (1.0 - alpha) / b))
}

/// Harmonic mean `2ab / (a + b)`, `a, b != 0`.
pub fn harmonic(a: f64, b: f64) -> Result<f64> {
    if a == 0.0 || b == 0.0 {
        return Err(Error::Domain(format!(
            "harmonic mean requires a, b != 0 (got a = {a}, b = {b})"
        )));
    }
    Ok(2.0 * a * b / (a + b))
}

/// Logarithmic mean `(b - a) / (ln b - ln a)`, `a, b > 0`, `a != b`.
/// Switches to a series in `(b - a)/a` when the gap underflows the log.
pub fn logarithmic(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!(
            "logarithmic mean requires a, b > 0 (got a = {a}, b = {b})"
        )));
    }
    if a == b {
        return Err(Error::Domain("logarithmic mean requires a != b".into()));
    }
    let w = b - a;
    if w.abs() < 1e-8 * a.abs() {
        let r = w / a;
        return Ok(a * (1.0 + r / 2.0 - r * r / 12.0));
    }
    Ok(w / (b.ln() - a.ln()))
}

/// Generalized logarithmic mean
/// `((b^{n+1} - a^{n+1}) / ((n+1)(b - a)))^{1/n}`, `a != b`, `n >= 1`.
/// For odd `n` a negative radicand takes the real signed root.
pub fn n_logarithmic(a: f64, b: f64, n: u32) -> Result<f64> {
    let inner = n_logarithmic_pow(a, b, n)?;
    let root = inner.abs().powf(1.0 / n as f64);
    Ok(if inner < 0.0 { -root } else { root })
}

/// The `n`-th power of the generalized logarithmic mean, which is the mean
/// value of `x^n` over `[a, b]`.
pub fn n_logarithmic_pow(a: f64, b: f64, n: u32) -> Result<f64> {
    if a == b {
        return Err(Error::Domain(
            "generalized logarithmic mean requires a != b".into(),
        ));
    }
    if n < 1 {
        return Err(Error::InvalidParam {
            field: "n",
            value: n as f64,
            requirement: "n >= 1",
        });
    }
    let k = n as i32;
    Ok((b.powi(k + 1) - a.powi(k + 1)) / ((n as f64 + 1.0) * (b - a)))
}

/// Mean value of `1/x` over `[a, b]`, `0` outside the interval. Equals the
/// reciprocal of the logarithmic mean for positive intervals and extends it
/// through the sign flip for negative ones.
fn reciprocal_mean_value(a: f64, b: f64) -> Result<f64> {
    if a > 0.0 {
        Ok(1.0 / logarithmic(a, b)?)
    } else if b < 0.0 {
        Ok(-1.0 / logarithmic(-b, -a)?)
    } else {
        Err(Error::Domain(format!(
            "mean of 1/x requires 0 outside [{a}, {b}]"
        )))
    }
}

/// Inputs shared by the four mean propositions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanInputs {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    /// Power for the `x^n` propositions; ignored by the reciprocal ones.
    pub n: Option<u32>,
}

/// The four bound specializations at mean level.
///
/// P1/P2 apply the power-mean resp. split-sup Hoelder bound to `x^n`;
/// P3/P4 apply them to `1/x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Proposition {
    P1,
    P2,
    P3,
    P4,
}

impl Proposition {
    pub fn key(&self) -> &'static str {
        match self {
            Proposition::P1 => "P1",
            Proposition::P2 => "P2",
            Proposition::P3 => "P3",
            Proposition::P4 => "P4",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "P1" => Ok(Proposition::P1),
            "P2" => Ok(Proposition::P2),
            "P3" => Ok(Proposition::P3),
            "P4" => Ok(Proposition::P4),
            _ => Err(Error::Config(format!(
                "unknown proposition {s:?} (expected P1..P4)"
            ))),
        }
    }
}

/// A proposition instance: the mean-level statement next to its generic
/// quadrature recomputation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropositionReport {
    pub which: Proposition,
    pub regime: Regime,
    /// `|rule side - mean side|` assembled from mean operations.
    pub lhs: f64,
    /// The bound assembled from the proposition's printed supremum factors.
    pub bound: f64,
    pub slack: f64,
    /// The same two quantities through the generic function-spec path.
    pub lhs_generic: f64,
    pub bound_generic: BoundValue,
    pub lhs_agreement: f64,
    pub bound_agreement: f64,
}

fn power_lhs(inputs: &MeanInputs, params: &RuleParams, n: u32) -> Result<f64> {
    let (a, b, alpha) = (inputs.a, inputs.b, inputs.alpha);
    let k = n as i32;
    let rule = params.lambda * weighted_arithmetic(a.powi(k), b.powi(k), alpha)
        + (1.0 - params.lambda) * weighted_arithmetic(a, b, alpha).powi(k);
    Ok((rule - n_logarithmic_pow(a, b, n)?).abs())
}

fn reciprocal_lhs(inputs: &MeanInputs, params: &RuleParams) -> Result<f64> {
    let (a, b, alpha) = (inputs.a, inputs.b, inputs.alpha);
    let rule = params.lambda / weighted_harmonic(a, b, alpha)?
        + (1.0 - params.lambda) / weighted_arithmetic(a, b, alpha);
    Ok((rule - reciprocal_mean_value(a, b)?).abs())
}

/// Evaluates one proposition. Validates the proposition's own preconditions
/// (`n >= 2` for P1/P2, `0` outside the interval for P3/P4, `q > 1` for the
/// Hoelder pair) and cross-checks against the generic theorem path.
pub fn proposition_bound(
    which: Proposition,
    inputs: &MeanInputs,
    params: &RuleParams,
) -> Result<PropositionReport> {
    if inputs.alpha != params.alpha {
        return Err(Error::InvalidParam {
            field: "alpha",
            value: inputs.alpha,
            requirement: "equal to params.alpha",
        });
    }
    let iv = Interval::new(inputs.a, inputs.b)?;
    let (a, b) = (inputs.a, inputs.b);
    let w = iv.width();
    let q = params.q;
    let regime = classify_regime(params);

    let (lhs, bound, f): (f64, f64, FunctionSpec) = match which {
        Proposition::P1 | Proposition::P2 => {
            let n = match inputs.n {
                Some(n) if n >= 2 => n,
                _ => {
                    return Err(Error::InvalidParam {
                        field: "n",
                        value: inputs.n.map(|n| n as f64).unwrap_or(f64::NAN),
                        requirement: "n >= 2 for the power propositions",
                    })
                }
            };
            let f = registry_member(&format!("pow:{n}"))?;
            let lhs = power_lhs(inputs, params, n)?;
            let e = (n - 1) as f64 * q;
            let nf = n as f64;
            let bound = match which {
                Proposition::P1 => {
                    let coef =
                        bounds::power_mean_coefficient(&bounds::gamma_upsilon(params), regime);
                    let big_e = a.abs().powf(e).max(b.abs().powf(e));
                    nf * w * coef * big_e.powf(1.0 / q)
                }
                _ => {
                    let p = params.p.ok_or(Error::UnsupportedExponent { q })?;
                    let eps = bounds::epsilons(params)?;
                    let (e1, e2) = bounds::holder_moment_pair(&eps, regime);
                    let node = weighted_arithmetic(a, b, inputs.alpha);
                    let big_f = a.abs().powf(e).max(node.abs().powf(e));
                    let big_g = b.abs().powf(e).max(node.abs().powf(e));
                    let holder = (1.0 / (p + 1.0)).powf(1.0 / p);
                    nf * w
                        * holder
                        * ((1.0 - inputs.alpha).powf(1.0 / q)
                            * big_f.powf(1.0 / q)
                            * e1.max(0.0).powf(1.0 / p)
                            + inputs.alpha.powf(1.0 / q)
                                * big_g.powf(1.0 / q)
                                * e2.max(0.0).powf(1.0 / p))
                }
            };
            (lhs, bound, f)
        }
        Proposition::P3 | Proposition::P4 => {
            if !(a > 0.0 || b < 0.0) {
                return Err(Error::Domain(format!(
                    "{} requires 0 outside [{a}, {b}]",
                    which.key()
                )));
            }
            let f = registry_member("recip")?;
            let lhs = reciprocal_lhs(inputs, params)?;
            let bound = match which {
                Proposition::P3 => {
                    let coef =
                        bounds::power_mean_coefficient(&bounds::gamma_upsilon(params), regime);
                    let big_k = (a * a).powf(-q).max((b * b).powf(-q));
                    w * coef * big_k.powf(1.0 / q)
                }
                _ => {
                    let p = params.p.ok_or(Error::UnsupportedExponent { q })?;
                    let eps = bounds::epsilons(params)?;
                    let (e1, e2) = bounds::holder_moment_pair(&eps, regime);
                    let node = weighted_arithmetic(a, b, inputs.alpha);
                    let big_m = (a * a).powf(-q).max((node * node).powf(-q));
                    let big_n = (b * b).powf(-q).max((node * node).powf(-q));
                    let holder = (1.0 / (p + 1.0)).powf(1.0 / p);
                    w * holder
                        * ((1.0 - inputs.alpha).powf(1.0 / q)
                            * big_m.powf(1.0 / q)
                            * e1.max(0.0).powf(1.0 / p)
                            + inputs.alpha.powf(1.0 / q)
                                * big_n.powf(1.0 / q)
                                * e2.max(0.0).powf(1.0 / p))
                }
            };
            (lhs, bound, f)
        }
    };

    let lhs_generic = quad::true_error(&f, iv, params)?;
    let bound_generic = match which {
        Proposition::P1 | Proposition::P3 => bounds::theorem21_bound(&f, iv, params)?,
        Proposition::P2 | Proposition::P4 => bounds::theorem23_bound(&f, iv, params)?,
    };

    Ok(PropositionReport {
        which,
        regime,
        lhs,
        bound,
        slack: bound - lhs,
        lhs_generic,
        lhs_agreement: (lhs - lhs_generic).abs(),
        bound_agreement: (bound - bound_generic.value).abs(),
        bound_generic,
    })
}
