//! Core value types: intervals, rule parameters, regime classification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A non-degenerate closed interval `[a, b]`, `a < b`, both finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::InvalidParam {
                field: "interval_a",
                value: a,
                requirement: "finite",
            });
        }
        if !b.is_finite() {
            return Err(Error::InvalidParam {
                field: "interval_b",
                value: b,
                requirement: "finite",
            });
        }
        if a >= b {
            return Err(Error::InvalidParam {
                field: "interval_b",
                value: b,
                requirement: "b > a (non-degenerate interval)",
            });
        }
        Ok(Interval { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }
}

// Serialized as a two-element array, matching the config format.
impl Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.a, self.b].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b] = <[f64; 2]>::deserialize(d)?;
        Interval::new(a, b).map_err(serde::de::Error::custom)
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

/// Validated rule parameters.
///
/// `p` is the conjugate exponent `q / (q - 1)`, present only for `q > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuleParams {
    pub alpha: f64,
    pub lambda: f64,
    pub q: f64,
    pub p: Option<f64>,
}

/// Builds [`RuleParams`], validating `0 <= alpha <= 1`, `0 <= lambda <= 1`,
/// `q >= 1` and finiteness.
pub fn make_params(alpha: f64, lambda: f64, q: f64) -> Result<RuleParams> {
    if !(alpha.is_finite() && (0.0..=1.0).contains(&alpha)) {
        return Err(Error::InvalidParam {
            field: "alpha",
            value: alpha,
            requirement: "0 <= alpha <= 1",
        });
    }
    if !(lambda.is_finite() && (0.0..=1.0).contains(&lambda)) {
        return Err(Error::InvalidParam {
            field: "lambda",
            value: lambda,
            requirement: "0 <= lambda <= 1",
        });
    }
    if !(q.is_finite() && q >= 1.0) {
        return Err(Error::InvalidParam {
            field: "q",
            value: q,
            requirement: "q >= 1",
        });
    }
    let p = if q > 1.0 { Some(q / (q - 1.0)) } else { None };
    // alpha*lambda <= 1 - lambda*(1 - alpha) holds identically; the slack
    // tolerance only absorbs last-bit rounding.
    let x = alpha * lambda;
    let z = 1.0 - lambda * (1.0 - alpha);
    assert!(x <= z + 1e-15, "kernel ordering violated: {x} > {z}");
    Ok(RuleParams {
        alpha,
        lambda,
        q,
        p,
    })
}

impl RuleParams {
    /// The rule's interior node `alpha * a + (1 - alpha) * b`.
    pub fn node(&self, iv: Interval) -> f64 {
        self.alpha * iv.a() + (1.0 - self.alpha) * iv.b()
    }
}

/// Ordering regime of the three kernel breakpoints
/// `alpha*lambda`, `1 - alpha`, `1 - lambda*(1 - alpha)`.
///
/// Exactly one applies to any valid `(alpha, lambda)`; ties resolve to the
/// lowest tag. The branch coefficients of the bounds coincide on regime
/// boundaries, so tie resolution never changes a bound value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    /// `alpha*lambda <= 1 - alpha <= 1 - lambda*(1 - alpha)`
    R1,
    /// `alpha*lambda <= 1 - lambda*(1 - alpha) <= 1 - alpha`
    R2,
    /// `1 - alpha <= alpha*lambda <= 1 - lambda*(1 - alpha)`
    R3,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::R1 => write!(f, "R1"),
            Regime::R2 => write!(f, "R2"),
            Regime::R3 => write!(f, "R3"),
        }
    }
}

/// Classifies the `(alpha, lambda)` point. Total on valid parameters:
/// `alpha*lambda <= 1 - lambda*(1 - alpha)` always holds, so failing R1
/// leaves exactly the R2 and R3 cases.
pub fn classify_regime(params: &RuleParams) -> Regime {
    let x = params.alpha * params.lambda;
    let y = 1.0 - params.alpha;
    let z = 1.0 - params.lambda * (1.0 - params.alpha);
    if x <= y && y <= z {
        Regime::R1
    } else if z <= y {
        Regime::R2
    } else {
        Regime::R3
    }
}

/// A supremum of `|f'|^q` over a finite candidate set, with the attaining
/// abscissa. Ties go to the smallest `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupWitness {
    pub value: f64,
    pub arg: f64,
    pub candidates: Vec<f64>,
}

impl SupWitness {
    /// `candidates` must be ascending; strict improvement keeps the first
    /// (smallest) attaining point.
    pub(crate) fn over<F: Fn(f64) -> f64>(g: F, candidates: Vec<f64>) -> Self {
        debug_assert!(candidates.windows(2).all(|w| w[0] <= w[1]));
        let mut value = f64::NEG_INFINITY;
        let mut arg = candidates[0];
        for &x in &candidates {
            let v = g(x);
            if v > value {
                value = v;
                arg = x;
            }
        }
        SupWitness {
            value,
            arg,
            candidates,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_rejects_bad_endpoints() {
        assert!(Interval::new(0.0, 0.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
        let iv = Interval::new(-1.0, 2.0).unwrap();
        assert_eq!(iv.width(), 3.0);
        assert_eq!(iv.midpoint(), 0.5);
    }

    #[test]
    fn make_params_examples() {
        let p = make_params(0.5, 1.0 / 3.0, 2.0).unwrap();
        assert_eq!(p.p, Some(2.0));

        let p = make_params(0.0, 0.0, 1.0).unwrap();
        assert_eq!(p.p, None);

        let err = make_params(1.2, 0.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("alpha out of range"), "{err}");

        assert!(make_params(0.5, -0.1, 1.0).is_err());
        assert!(make_params(0.5, 0.5, 0.5).is_err());
        assert!(make_params(f64::NAN, 0.5, 1.0).is_err());
    }

    #[test]
    fn conjugate_exponent_identity() {
        for q in [1.5, 2.0, 3.0, 10.0, 1.0001] {
            let p = make_params(0.3, 0.3, q).unwrap().p.unwrap();
            assert!((1.0 / p + 1.0 / q - 1.0).abs() <= 1e-15, "q = {q}");
        }
    }

    #[test]
    fn classify_regime_examples() {
        // Simpson point: 1/6 <= 1/2 <= 5/6.
        let p = make_params(0.5, 1.0 / 3.0, 2.0).unwrap();
        assert_eq!(classify_regime(&p), Regime::R1);

        // Trapezoid point: all three breakpoints tie at 1/2; lowest tag wins.
        let p = make_params(0.5, 1.0, 1.0).unwrap();
        assert_eq!(classify_regime(&p), Regime::R1);

        // 0.1 <= 0.81 <= 0.91.
        let p = make_params(0.9, 0.9, 1.5).unwrap();
        assert_eq!(classify_regime(&p), Regime::R3);
    }

    #[test]
    fn regime_is_total_and_q_invariant() {
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        for &alpha in &grid {
            for &lambda in &grid {
                let tags: Vec<Regime> = [1.0, 1.5, 2.0, 7.0]
                    .iter()
                    .map(|&q| classify_regime(&make_params(alpha, lambda, q).unwrap()))
                    .collect();
                assert!(
                    tags.windows(2).all(|w| w[0] == w[1]),
                    "q must not affect regime"
                );
                // The defining inequalities of the returned tag hold.
                let x = alpha * lambda;
                let y = 1.0 - alpha;
                let z = 1.0 - lambda * (1.0 - alpha);
                let tol = 1e-15;
                match tags[0] {
                    Regime::R1 => assert!(x <= y + tol && y <= z + tol),
                    Regime::R2 => assert!(x <= z + tol && z <= y + tol),
                    Regime::R3 => assert!(y <= x + tol && x <= z + tol),
                }
            }
        }
    }

    #[test]
    fn sup_witness_tie_breaks_to_smallest() {
        let w = SupWitness::over(|x| (x - 1.0).abs(), vec![0.0, 1.0, 2.0]);
        assert_eq!(w.value, 1.0);
        assert_eq!(w.arg, 0.0);
    }
}
