//! The closed corpus of test functions.
//!
//! Every member carries an exact derivative, an antiderivative, an optional
//! fourth derivative, a domain predicate and convexity information. Members
//! are addressed by string keys: `pow:2` .. `pow:6`, `recip`, `exp`,
//! `neg_exp`, `absshift:<c>`, `log`.

use crate::error::{Error, Result};
use crate::model::Interval;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    /// `x^n`, `n` in `2..=6`.
    Pow(u32),
    /// `1/x`, valid when `0` is outside the interval.
    Recip,
    /// `e^x`.
    Exp,
    /// `e^(-x)`.
    NegExp,
    /// `|x - c|`, kink at `c`.
    AbsShift(f64),
    /// `ln x`, valid for `a > 0`.
    Log,
}

/// A corpus member. Construct via [`registry_member`] or [`registry`].
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    kind: Kind,
    id: String,
}

/// Parses a registry key. Unknown keys and out-of-range parameters are errors;
/// the corpus is closed and arbitrary expressions are not accepted.
pub fn registry_member(id: &str) -> Result<FunctionSpec> {
    let kind = if let Some(n) = id.strip_prefix("pow:") {
        let n: u32 = n.parse().map_err(|_| Error::UnknownFunction(id.into()))?;
        if !(2..=6).contains(&n) {
            return Err(Error::UnknownFunction(id.into()));
        }
        Kind::Pow(n)
    } else if let Some(c) = id.strip_prefix("absshift:") {
        let c: f64 = c.parse().map_err(|_| Error::UnknownFunction(id.into()))?;
        if !c.is_finite() {
            return Err(Error::UnknownFunction(id.into()));
        }
        Kind::AbsShift(c)
    } else {
        match id {
            "recip" => Kind::Recip,
            "exp" => Kind::Exp,
            "neg_exp" => Kind::NegExp,
            "log" => Kind::Log,
            _ => return Err(Error::UnknownFunction(id.into())),
        }
    };
    Ok(FunctionSpec {
        kind,
        id: id.into(),
    })
}

/// All members with canonical parameters, in registry order.
pub fn registry() -> Vec<FunctionSpec> {
    [
        "pow:2",
        "pow:3",
        "pow:4",
        "pow:5",
        "pow:6",
        "recip",
        "exp",
        "neg_exp",
        "absshift:0.5",
        "log",
    ]
    .iter()
    .map(|id| registry_member(id).expect("canonical ids parse"))
    .collect()
}

impl FunctionSpec {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            Kind::Pow(n) => x.powi(n as i32),
            Kind::Recip => 1.0 / x,
            Kind::Exp => x.exp(),
            Kind::NegExp => (-x).exp(),
            Kind::AbsShift(c) => (x - c).abs(),
            Kind::Log => x.ln(),
        }
    }

    /// Exact derivative. At an `absshift` kink this returns 0; quadrature is
    /// insensitive to the single point and samplers skip a window around it.
    pub fn deriv(&self, x: f64) -> f64 {
        match self.kind {
            Kind::Pow(n) => n as f64 * x.powi(n as i32 - 1),
            Kind::Recip => -1.0 / (x * x),
            Kind::Exp => x.exp(),
            Kind::NegExp => -(-x).exp(),
            Kind::AbsShift(c) => {
                if x == c {
                    0.0
                } else {
                    (x - c).signum()
                }
            }
            Kind::Log => 1.0 / x,
        }
    }

    /// Fourth derivative where it exists everywhere on the valid domain.
    pub fn fourth(&self, x: f64) -> Option<f64> {
        match self.kind {
            Kind::Pow(2) | Kind::Pow(3) => Some(0.0),
            Kind::Pow(4) => Some(24.0),
            Kind::Pow(5) => Some(120.0 * x),
            Kind::Pow(6) => Some(360.0 * x * x),
            Kind::Pow(_) => unreachable!("registry bounds n to 2..=6"),
            Kind::Recip => Some(24.0 / x.powi(5)),
            Kind::Exp => Some(x.exp()),
            Kind::NegExp => Some((-x).exp()),
            Kind::AbsShift(_) => None,
            Kind::Log => Some(-6.0 / x.powi(4)),
        }
    }

    pub fn has_fourth(&self) -> bool {
        !matches!(self.kind, Kind::AbsShift(_))
    }

    /// Antiderivative, available for every member.
    pub fn antiderivative(&self, x: f64) -> f64 {
        match self.kind {
            Kind::Pow(n) => x.powi(n as i32 + 1) / (n as f64 + 1.0),
            Kind::Recip => x.abs().ln(),
            Kind::Exp => x.exp(),
            Kind::NegExp => -(-x).exp(),
            Kind::AbsShift(c) => 0.5 * (x - c) * (x - c).abs(),
            Kind::Log => x * x.ln() - x,
        }
    }

    /// Interior points where `f'` is discontinuous.
    pub fn kinks(&self) -> Vec<f64> {
        match self.kind {
            Kind::AbsShift(c) => vec![c],
            _ => vec![],
        }
    }

    /// Whether the member is defined (and finite) on all of `iv`.
    pub fn valid_on(&self, iv: Interval) -> bool {
        match self.kind {
            Kind::Pow(_) | Kind::Exp | Kind::NegExp | Kind::AbsShift(_) => true,
            Kind::Recip => iv.a() > 0.0 || iv.b() < 0.0,
            Kind::Log => iv.a() > 0.0,
        }
    }

    pub fn check_domain(&self, iv: Interval) -> Result<()> {
        if self.valid_on(iv) {
            Ok(())
        } else {
            Err(Error::Domain(format!("{} is not defined on {iv}", self.id)))
        }
    }

    /// Whether the member is convex on `iv`.
    pub fn convex_on(&self, iv: Interval) -> bool {
        match self.kind {
            Kind::Pow(n) if n % 2 == 0 => true,
            Kind::Pow(_) => iv.a() >= 0.0,
            Kind::Recip => iv.a() > 0.0,
            Kind::Exp | Kind::NegExp | Kind::AbsShift(_) => true,
            Kind::Log => false,
        }
    }

    /// Compares `deriv` against a central finite difference at 100 interior
    /// points, skipping a window around kinks. Returns the worst relative
    /// error. Registration sanity: must come out below 1e-6.
    pub fn derivative_self_check(&self, iv: Interval) -> Result<f64> {
        self.check_domain(iv)?;
        let n = 100;
        let w = iv.width();
        let h = 1e-7 * w.max(1.0);
        let kinks = self.kinks();
        let mut worst = 0.0_f64;
        for i in 1..=n {
            let x = iv.a() + w * i as f64 / (n + 1) as f64;
            if kinks.iter().any(|&k| (x - k).abs() <= 10.0 * h) {
                continue;
            }
            let fd = (self.eval(x + h) - self.eval(x - h)) / (2.0 * h);
            let exact = self.deriv(x);
            let scale = exact.abs().max(1.0);
            worst = worst.max((fd - exact).abs() / scale);
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_intervals(f: &FunctionSpec) -> Vec<Interval> {
        [(0.0, 1.0), (1.0, 2.0), (-1.0, 2.0), (-2.0, -1.0)]
            .iter()
            .map(|&(a, b)| Interval::new(a, b).unwrap())
            .filter(|&iv| f.valid_on(iv))
            .collect()
    }

    #[test]
    fn keys_parse_and_reject() {
        for id in [
            "pow:2",
            "pow:6",
            "recip",
            "exp",
            "neg_exp",
            "absshift:0.5",
            "absshift:-1.25",
            "log",
        ] {
            assert_eq!(registry_member(id).unwrap().id(), id);
        }
        for id in [
            "pow:1",
            "pow:7",
            "pow:x",
            "sin",
            "absshift:nan",
            "",
            "POW:2",
        ] {
            assert!(registry_member(id).is_err(), "{id} must be rejected");
        }
        assert_eq!(registry().len(), 10);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for f in registry() {
            for iv in test_intervals(&f) {
                let worst = f.derivative_self_check(iv).unwrap();
                assert!(worst <= 1e-6, "{} on {iv}: rel err {worst}", f.id());
            }
        }
    }

    #[test]
    fn domain_predicate() {
        let recip = registry_member("recip").unwrap();
        assert!(!recip.valid_on(Interval::new(0.0, 1.0).unwrap()));
        assert!(!recip.valid_on(Interval::new(-1.0, 2.0).unwrap()));
        assert!(recip.valid_on(Interval::new(1.0, 2.0).unwrap()));
        assert!(recip.valid_on(Interval::new(-2.0, -1.0).unwrap()));

        let log = registry_member("log").unwrap();
        assert!(!log.valid_on(Interval::new(0.0, 1.0).unwrap()));
        assert!(log.valid_on(Interval::new(1.0, 2.0).unwrap()));

        let err = registry_member("log")
            .unwrap()
            .check_domain(Interval::new(-1.0, 2.0).unwrap())
            .unwrap_err();
        assert!(err.to_string().contains("log"), "{err}");
        assert!(err.to_string().contains("[-1, 2]"), "{err}");
    }

    #[test]
    fn absshift_kink_behavior() {
        let f = registry_member("absshift:0.5").unwrap();
        assert_eq!(f.deriv(0.5), 0.0);
        assert_eq!(f.deriv(0.25), -1.0);
        assert_eq!(f.deriv(0.75), 1.0);
        assert_eq!(f.kinks(), vec![0.5]);
        assert!(!f.has_fourth());
        // Antiderivative of |x - 1/2| through the kink.
        assert!((f.antiderivative(1.0) - f.antiderivative(0.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn convexity_flags() {
        let iv_pos = Interval::new(1.0, 2.0).unwrap();
        let iv_mix = Interval::new(-1.0, 2.0).unwrap();
        assert!(registry_member("pow:3").unwrap().convex_on(iv_pos));
        assert!(!registry_member("pow:3").unwrap().convex_on(iv_mix));
        assert!(registry_member("pow:4").unwrap().convex_on(iv_mix));
        assert!(!registry_member("log").unwrap().convex_on(iv_pos));
        assert!(!registry_member("recip")
            .unwrap()
            .convex_on(Interval::new(-2.0, -1.0).unwrap()));
        assert!(registry_member("recip").unwrap().convex_on(iv_pos));
    }
}
