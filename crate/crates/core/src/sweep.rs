//! Parameter sweep: every registered bound evaluated against measured
//! quadrature error over a grid of functions, intervals, rule parameters,
//! and exponents.
//!
//! Reports are emitted in a fixed deterministic order regardless of the
//! execution strategy; the parallel runner preserves that order, so its
//! output is bit-identical to the sequential one. Each bound is judged
//! against the error of its own target functional: the swept rule for the
//! three parametric bounds, the trapezoid or Simpson estimate for the
//! fixed-rule baselines.

use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::bounds::{self, BaselineOutcome, CorollaryCheck, TargetFunctional, ALL_COROLLARIES};
use crate::error::{Error, Result};
use crate::model::{classify_regime, make_params, Interval, Regime};
use crate::qc;
use crate::quad;
use crate::registry::{registry_member, FunctionSpec};

/// Grid description for one sweep run. Deserializable from JSON; every
/// field has a default so partial configs work.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Registry ids, e.g. `"pow:2"` or `"absshift:0.5"`.
    pub functions: Vec<String>,
    /// `[a, b]` pairs. Pairs on which a function is undefined still emit a
    /// report, marked skipped.
    pub intervals: Vec<[f64; 2]>,
    pub alpha_grid: Vec<f64>,
    pub lambda_grid: Vec<f64>,
    /// `(alpha, lambda)` pairs appended after the grid product.
    pub extra_points: Vec<[f64; 2]>,
    pub q_grid: Vec<f64>,
    /// A bound counts as violated only when it undershoots the measured
    /// error by more than this.
    pub tol_violation: f64,
    pub integrator_tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            functions: [
                "pow:2",
                "pow:3",
                "pow:4",
                "recip",
                "exp",
                "neg_exp",
                "absshift:0.5",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
            intervals: vec![[0.0, 1.0], [1.0, 2.0], [-1.0, 2.0]],
            alpha_grid: vec![0.0, 0.25, 1.0 / 3.0, 0.5, 1.0],
            lambda_grid: vec![0.0, 0.25, 1.0 / 3.0, 0.5, 1.0],
            extra_points: vec![[0.9, 0.9]],
            q_grid: vec![1.0, 1.5, 2.0],
            tol_violation: 1e-9,
            integrator_tol: 1e-12,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.functions.is_empty() {
            return Err(Error::Config("functions must be non-empty".into()));
        }
        for id in &self.functions {
            registry_member(id)?;
        }
        if self.intervals.is_empty() {
            return Err(Error::Config("intervals must be non-empty".into()));
        }
        for &[a, b] in &self.intervals {
            Interval::new(a, b)?;
        }
        for (name, grid) in [
            ("alpha_grid", &self.alpha_grid),
            ("lambda_grid", &self.lambda_grid),
        ] {
            if grid.is_empty() {
                return Err(Error::Config(format!("{name} must be non-empty")));
            }
            for &v in grid {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidParam {
                        field: if name == "alpha_grid" {
                            "alpha"
                        } else {
                            "lambda"
                        },
                        value: v,
                        requirement: "in [0, 1]",
                    });
                }
            }
        }
        for &[alpha, lambda] in &self.extra_points {
            make_params(alpha, lambda, 1.0)?;
        }
        if self.q_grid.is_empty() {
            return Err(Error::Config("q_grid must be non-empty".into()));
        }
        for &q in &self.q_grid {
            make_params(0.5, 0.5, q)?;
        }
        if !(self.tol_violation.is_finite() && self.tol_violation > 0.0) {
            return Err(Error::InvalidParam {
                field: "tol_violation",
                value: self.tol_violation,
                requirement: "finite and > 0",
            });
        }
        quad::check_tol(self.integrator_tol)?;
        Ok(())
    }

    /// Grid product followed by the extra points, in declaration order.
    pub fn rule_points(&self) -> Vec<(f64, f64)> {
        let mut pts = Vec::with_capacity(
            self.alpha_grid.len() * self.lambda_grid.len() + self.extra_points.len(),
        );
        for &alpha in &self.alpha_grid {
            for &lambda in &self.lambda_grid {
                pts.push((alpha, lambda));
            }
        }
        for &[alpha, lambda] in &self.extra_points {
            pts.push((alpha, lambda));
        }
        pts
    }
}

/// Column identities for the bounds a sweep evaluates, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundLabel {
    Thm21,
    Thm22,
    Thm23,
    Base12,
    Base13,
    Base14,
    Base15,
    SimpsonClassicalPrinted,
    SimpsonClassicalStandard,
}

impl BoundLabel {
    pub const ALL: [BoundLabel; 9] = [
        BoundLabel::Thm21,
        BoundLabel::Thm22,
        BoundLabel::Thm23,
        BoundLabel::Base12,
        BoundLabel::Base13,
        BoundLabel::Base14,
        BoundLabel::Base15,
        BoundLabel::SimpsonClassicalPrinted,
        BoundLabel::SimpsonClassicalStandard,
    ];

    pub fn key(&self) -> &'static str {
        match self {
            BoundLabel::Thm21 => "thm21",
            BoundLabel::Thm22 => "thm22",
            BoundLabel::Thm23 => "thm23",
            BoundLabel::Base12 => "base_12",
            BoundLabel::Base13 => "base_13",
            BoundLabel::Base14 => "base_14",
            BoundLabel::Base15 => "base_15",
            BoundLabel::SimpsonClassicalPrinted => "simpson_classical_printed",
            BoundLabel::SimpsonClassicalStandard => "simpson_classical_standard",
        }
    }

    /// The three parametric bounds; only these drive row verdicts and the
    /// process exit status.
    pub fn is_theorem(&self) -> bool {
        matches!(
            self,
            BoundLabel::Thm21 | BoundLabel::Thm22 | BoundLabel::Thm23
        )
    }

    /// The classical fourth-derivative pair assumes smoothness, not a
    /// quasi-convex derivative power, so the qc gate does not apply.
    fn qc_gated(&self) -> bool {
        !matches!(
            self,
            BoundLabel::SimpsonClassicalPrinted | BoundLabel::SimpsonClassicalStandard
        )
    }

    fn target(&self) -> TargetFunctional {
        match self {
            BoundLabel::Thm21 | BoundLabel::Thm22 | BoundLabel::Thm23 => TargetFunctional::Rule,
            BoundLabel::Base12 | BoundLabel::Base13 | BoundLabel::Base14 | BoundLabel::Base15 => {
                TargetFunctional::Trapezoid
            }
            _ => TargetFunctional::Simpson,
        }
    }
}

/// Ordered by severity: a row's verdict is the maximum over its theorem
/// bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Skipped,
    Sound,
    HypothesisUnmet,
    Violation,
}

impl Verdict {
    pub fn key(&self) -> &'static str {
        match self {
            Verdict::Skipped => "SKIPPED",
            Verdict::Sound => "SOUND",
            Verdict::HypothesisUnmet => "HYPOTHESIS_UNMET",
            Verdict::Violation => "VIOLATION",
        }
    }
}

/// One bound judged on one tuple.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub label: BoundLabel,
    pub target: TargetFunctional,
    /// Measured error of the target functional; absent when the function is
    /// undefined on the interval.
    pub target_error: Option<f64>,
    pub value: Option<f64>,
    pub slack: Option<f64>,
    pub verdict: Verdict,
    pub skip_reason: Option<&'static str>,
}

fn judge(
    label: BoundLabel,
    target_error: f64,
    outcome: std::result::Result<f64, &'static str>,
    qc_holds: bool,
    tol: f64,
) -> BoundReport {
    match outcome {
        Err(reason) => BoundReport {
            label,
            target: label.target(),
            target_error: Some(target_error),
            value: None,
            slack: None,
            verdict: Verdict::Skipped,
            skip_reason: Some(reason),
        },
        Ok(value) => {
            let slack = value - target_error;
            let verdict = if label.qc_gated() && !qc_holds {
                Verdict::HypothesisUnmet
            } else if slack < -tol {
                Verdict::Violation
            } else {
                Verdict::Sound
            };
            BoundReport {
                label,
                target: label.target(),
                target_error: Some(target_error),
                value: Some(value),
                slack: Some(slack),
                verdict,
                skip_reason: None,
            }
        }
    }
}

/// One sweep tuple: function, interval, rule point, exponent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TupleReport {
    pub function: String,
    pub interval: Interval,
    pub alpha: f64,
    pub lambda: f64,
    pub q: f64,
    pub regime: Regime,
    pub qc_holds: Option<bool>,
    pub true_error: Option<f64>,
    pub bounds: Vec<BoundReport>,
    /// Minimum slack over the theorem bounds that were computed.
    pub slack_min: Option<f64>,
    pub verdict: Verdict,
}

impl TupleReport {
    pub fn bound(&self, label: BoundLabel) -> &BoundReport {
        self.bounds
            .iter()
            .find(|b| b.label == label)
            .expect("all labels present in report order")
    }
}

struct PairContext {
    mean: f64,
    trap_error: f64,
    simpson_error: f64,
    /// Parallel to `q_grid`.
    qc_holds: Vec<bool>,
}

fn pair_context(f: &FunctionSpec, iv: Interval, cfg: &SweepConfig) -> Result<Option<PairContext>> {
    if !f.valid_on(iv) {
        return Ok(None);
    }
    let mean = quad::reference_integral(f, iv, cfg.integrator_tol)?.value / iv.width();
    let fa = f.eval(iv.a());
    let fb = f.eval(iv.b());
    let fm = f.eval(iv.midpoint());
    let qc_holds = cfg
        .q_grid
        .iter()
        .map(|&q| qc::check_derivative_power(f, iv, q).map(|v| v.holds))
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(PairContext {
        mean,
        trap_error: (0.5 * (fa + fb) - mean).abs(),
        simpson_error: ((fa + 4.0 * fm + fb) / 6.0 - mean).abs(),
        qc_holds,
    }))
}

#[derive(Clone, Copy)]
struct Task {
    f_idx: usize,
    iv_idx: usize,
    alpha: f64,
    lambda: f64,
    q_idx: usize,
}

struct Prepared {
    functions: Vec<FunctionSpec>,
    intervals: Vec<Interval>,
    contexts: Vec<Option<PairContext>>,
    tasks: Vec<Task>,
}

fn prepare(cfg: &SweepConfig) -> Result<Prepared> {
    cfg.validate()?;
    let functions = cfg
        .functions
        .iter()
        .map(|id| registry_member(id))
        .collect::<Result<Vec<_>>>()?;
    let intervals = cfg
        .intervals
        .iter()
        .map(|&[a, b]| Interval::new(a, b))
        .collect::<Result<Vec<_>>>()?;
    let mut contexts = Vec::with_capacity(functions.len() * intervals.len());
    for f in &functions {
        for &iv in &intervals {
            contexts.push(pair_context(f, iv, cfg)?);
        }
    }
    let points = cfg.rule_points();
    let mut tasks =
        Vec::with_capacity(functions.len() * intervals.len() * points.len() * cfg.q_grid.len());
    for f_idx in 0..functions.len() {
        for iv_idx in 0..intervals.len() {
            for &(alpha, lambda) in &points {
                for q_idx in 0..cfg.q_grid.len() {
                    tasks.push(Task {
                        f_idx,
                        iv_idx,
                        alpha,
                        lambda,
                        q_idx,
                    });
                }
            }
        }
    }
    Ok(Prepared {
        functions,
        intervals,
        contexts,
        tasks,
    })
}

fn evaluate_task(cfg: &SweepConfig, prep: &Prepared, task: Task) -> Result<TupleReport> {
    let f = &prep.functions[task.f_idx];
    let iv = prep.intervals[task.iv_idx];
    let q = cfg.q_grid[task.q_idx];
    let params = make_params(task.alpha, task.lambda, q)?;
    let regime = classify_regime(&params);
    let ctx = &prep.contexts[task.f_idx * prep.intervals.len() + task.iv_idx];

    let Some(ctx) = ctx else {
        let bounds = BoundLabel::ALL
            .iter()
            .map(|&label| BoundReport {
                label,
                target: label.target(),
                target_error: None,
                value: None,
                slack: None,
                verdict: Verdict::Skipped,
                skip_reason: Some("function not defined on interval"),
            })
            .collect();
        return Ok(TupleReport {
            function: f.id().to_string(),
            interval: iv,
            alpha: task.alpha,
            lambda: task.lambda,
            q,
            regime,
            qc_holds: None,
            true_error: None,
            bounds,
            slack_min: None,
            verdict: Verdict::Skipped,
        });
    };

    let rule = quad::rule_value(f, iv, &params)?;
    let true_error = (rule - ctx.mean).abs();
    let qc_holds = ctx.qc_holds[task.q_idx];
    let tol = cfg.tol_violation;

    let mut reports = Vec::with_capacity(BoundLabel::ALL.len());
    reports.push(judge(
        BoundLabel::Thm21,
        true_error,
        Ok(bounds::theorem21_bound(f, iv, &params)?.value),
        qc_holds,
        tol,
    ));
    for (label, res) in [
        (BoundLabel::Thm22, bounds::theorem22_bound(f, iv, &params)),
        (BoundLabel::Thm23, bounds::theorem23_bound(f, iv, &params)),
    ] {
        let outcome = match res {
            Ok(bv) => Ok(bv.value),
            Err(Error::UnsupportedExponent { .. }) => Err("requires q > 1"),
            Err(e) => return Err(e),
        };
        reports.push(judge(label, true_error, outcome, qc_holds, tol));
    }
    for baseline in bounds::baseline_bounds(f, iv, &params)? {
        let label = match baseline.kind {
            bounds::BaselineKind::Base12 => BoundLabel::Base12,
            bounds::BaselineKind::Base13 => BoundLabel::Base13,
            bounds::BaselineKind::Base14 => BoundLabel::Base14,
            bounds::BaselineKind::Base15 => BoundLabel::Base15,
            bounds::BaselineKind::SimpsonClassicalPrinted => BoundLabel::SimpsonClassicalPrinted,
            bounds::BaselineKind::SimpsonClassicalStandard => BoundLabel::SimpsonClassicalStandard,
        };
        let target_error = match baseline.target {
            TargetFunctional::Rule => true_error,
            TargetFunctional::Trapezoid => ctx.trap_error,
            TargetFunctional::Simpson => ctx.simpson_error,
        };
        let outcome = match baseline.outcome {
            BaselineOutcome::Computed(bv) => Ok(bv.value),
            BaselineOutcome::Skipped(reason) => Err(reason),
        };
        reports.push(judge(label, target_error, outcome, qc_holds, tol));
    }

    let theorem = reports.iter().filter(|r| r.label.is_theorem());
    let verdict = theorem
        .clone()
        .map(|r| r.verdict)
        .max()
        .unwrap_or(Verdict::Skipped);
    let slack_min = theorem
        .filter_map(|r| r.slack)
        .min_by(|a, b| a.total_cmp(b));

    Ok(TupleReport {
        function: f.id().to_string(),
        interval: iv,
        alpha: task.alpha,
        lambda: task.lambda,
        q,
        regime,
        qc_holds: Some(qc_holds),
        true_error: Some(true_error),
        bounds: reports,
        slack_min,
        verdict,
    })
}

/// Identifies the tuple behind a summary statistic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TupleKey {
    pub function: String,
    pub interval: [f64; 2],
    pub alpha: f64,
    pub lambda: f64,
    pub q: f64,
}

impl TupleKey {
    fn of(r: &TupleReport) -> Self {
        TupleKey {
            function: r.function.clone(),
            interval: [r.interval.a(), r.interval.b()],
            alpha: r.alpha,
            lambda: r.lambda,
            q: r.q,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelSummary {
    pub label: BoundLabel,
    pub key: &'static str,
    pub sound: usize,
    pub violation: usize,
    pub hypothesis_unmet: usize,
    pub skipped: usize,
    pub min_slack: Option<f64>,
    pub min_slack_witness: Option<TupleKey>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub total_reports: usize,
    pub skipped_tuples: usize,
    /// Violations among the three theorem bounds; the exit-status signal.
    pub theorem_violations: usize,
    pub per_label: Vec<LabelSummary>,
    /// Closed-form cross-checks, evaluated on the first pair the sweep
    /// could measure, at q = 2 (the q = 1 corollary pins its own exponent).
    pub corollaries: Vec<CorollaryCheck>,
    pub corollary_witness: Option<(String, [f64; 2])>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOutput {
    pub config: SweepConfig,
    pub reports: Vec<TupleReport>,
    pub summary: Summary,
}

fn summarize(prep: &Prepared, reports: &[TupleReport]) -> Result<Summary> {
    let mut per_label = Vec::with_capacity(BoundLabel::ALL.len());
    for &label in &BoundLabel::ALL {
        let mut s = LabelSummary {
            label,
            key: label.key(),
            sound: 0,
            violation: 0,
            hypothesis_unmet: 0,
            skipped: 0,
            min_slack: None,
            min_slack_witness: None,
        };
        for r in reports {
            let b = r.bound(label);
            match b.verdict {
                Verdict::Sound => s.sound += 1,
                Verdict::Violation => s.violation += 1,
                Verdict::HypothesisUnmet => s.hypothesis_unmet += 1,
                Verdict::Skipped => s.skipped += 1,
            }
            if let Some(slack) = b.slack {
                if s.min_slack.is_none_or(|m| slack < m) {
                    s.min_slack = Some(slack);
                    s.min_slack_witness = Some(TupleKey::of(r));
                }
            }
        }
        per_label.push(s);
    }
    let theorem_violations = per_label
        .iter()
        .filter(|s| s.label.is_theorem())
        .map(|s| s.violation)
        .sum();
    let skipped_tuples = reports
        .iter()
        .filter(|r| r.verdict == Verdict::Skipped)
        .count();

    let mut corollaries = Vec::new();
    let mut corollary_witness = None;
    'outer: for (f_idx, f) in prep.functions.iter().enumerate() {
        for (iv_idx, &iv) in prep.intervals.iter().enumerate() {
            if prep.contexts[f_idx * prep.intervals.len() + iv_idx].is_some() {
                for id in ALL_COROLLARIES {
                    corollaries.push(bounds::corollary_crosscheck(id, f, iv, 2.0)?);
                }
                corollary_witness = Some((f.id().to_string(), [iv.a(), iv.b()]));
                break 'outer;
            }
        }
    }

    Ok(Summary {
        total_reports: reports.len(),
        skipped_tuples,
        theorem_violations,
        per_label,
        corollaries,
        corollary_witness,
    })
}

/// Runs the sweep sequentially.
pub fn run_sweep_seq(cfg: &SweepConfig) -> Result<SweepOutput> {
    let prep = prepare(cfg)?;
    let reports = prep
        .tasks
        .iter()
        .map(|&t| evaluate_task(cfg, &prep, t))
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(&prep, &reports)?;
    Ok(SweepOutput {
        config: cfg.clone(),
        reports,
        summary,
    })
}

/// Runs the sweep on the rayon pool. Report order matches the sequential
/// runner exactly.
#[cfg(feature = "parallel")]
pub fn run_sweep_par(cfg: &SweepConfig) -> Result<SweepOutput> {
    let prep = prepare(cfg)?;
    let reports = prep
        .tasks
        .par_iter()
        .map(|&t| evaluate_task(cfg, &prep, t))
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(&prep, &reports)?;
    Ok(SweepOutput {
        config: cfg.clone(),
        reports,
        summary,
    })
}

/// Parallel when the `parallel` feature is on, sequential otherwise.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    #[cfg(feature = "parallel")]
    {
        run_sweep_par(cfg)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_sweep_seq(cfg)
    }
}

pub const CSV_HEADER: &str = "function,interval_a,interval_b,alpha,lambda,q,regime,qc_holds,\
true_error,thm21,thm22,thm23,base_12,base_13,base_14,base_15,slack_min,verdict";

fn push_opt(out: &mut String, v: Option<f64>) {
    use std::fmt::Write;
    out.push(',');
    if let Some(v) = v {
        write!(out, "{v}").unwrap();
    }
}

/// Renders reports as CSV. Floats use the shortest round-trip form; absent
/// quantities are empty fields.
pub fn to_csv(reports: &[TupleReport]) -> String {
    use std::fmt::Write;
    let mut out = String::with_capacity(reports.len() * 160 + CSV_HEADER.len() + 1);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in reports {
        write!(
            out,
            "{},{},{},{},{},{},{}",
            r.function,
            r.interval.a(),
            r.interval.b(),
            r.alpha,
            r.lambda,
            r.q,
            r.regime
        )
        .unwrap();
        out.push(',');
        if let Some(qc) = r.qc_holds {
            out.push_str(if qc { "true" } else { "false" });
        }
        push_opt(&mut out, r.true_error);
        for label in [
            BoundLabel::Thm21,
            BoundLabel::Thm22,
            BoundLabel::Thm23,
            BoundLabel::Base12,
            BoundLabel::Base13,
            BoundLabel::Base14,
            BoundLabel::Base15,
        ] {
            push_opt(&mut out, r.bound(label).value);
        }
        push_opt(&mut out, r.slack_min);
        out.push(',');
        out.push_str(r.verdict.key());
        out.push('\n');
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("serialization failed: {e}")))
}

/// One kernel-identity evaluation: measured rule error against the
/// first-derivative kernel integral, as an absolute residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityRow {
    pub function: String,
    pub interval: [f64; 2],
    pub alpha: f64,
    pub lambda: f64,
    pub residual: f64,
}

/// Midpoint/endpoint averaging inequality for a convex member:
/// `f(mid) <= mean <= (f(a) + f(b)) / 2` within tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexSandwichRow {
    pub function: String,
    pub interval: [f64; 2],
    pub midpoint_value: f64,
    pub mean_value: f64,
    pub endpoint_average: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub rows: Vec<IdentityRow>,
    pub max_residual: f64,
    pub worst: Option<IdentityRow>,
    pub sandwich: Vec<ConvexSandwichRow>,
    pub sandwich_ok: bool,
}

/// Checks the kernel identity on every defined (function, interval, rule
/// point) triple of the config, plus the convex-sandwich sanity rows.
pub fn identity_suite(cfg: &SweepConfig) -> Result<IdentityReport> {
    cfg.validate()?;
    let sandwich_tol = 1e-12;
    let points = cfg.rule_points();
    let mut rows = Vec::new();
    let mut sandwich = Vec::new();
    for id in &cfg.functions {
        let f = registry_member(id)?;
        for &[a, b] in &cfg.intervals {
            let iv = Interval::new(a, b)?;
            if !f.valid_on(iv) {
                continue;
            }
            for &(alpha, lambda) in &points {
                let params = make_params(alpha, lambda, 1.0)?;
                let residual = quad::lemma_identity_residual(&f, iv, &params)?;
                rows.push(IdentityRow {
                    function: f.id().to_string(),
                    interval: [a, b],
                    alpha,
                    lambda,
                    residual,
                });
            }
            if f.convex_on(iv) {
                let mean = quad::reference_integral(&f, iv, cfg.integrator_tol)?.value / iv.width();
                let midpoint_value = f.eval(iv.midpoint());
                let endpoint_average = 0.5 * (f.eval(a) + f.eval(b));
                sandwich.push(ConvexSandwichRow {
                    function: f.id().to_string(),
                    interval: [a, b],
                    midpoint_value,
                    mean_value: mean,
                    endpoint_average,
                    holds: midpoint_value <= mean + sandwich_tol
                        && mean <= endpoint_average + sandwich_tol,
                });
            }
        }
    }
    let worst = rows
        .iter()
        .max_by(|x, y| x.residual.total_cmp(&y.residual))
        .cloned();
    Ok(IdentityReport {
        max_residual: worst.as_ref().map_or(0.0, |w| w.residual),
        worst,
        sandwich_ok: sandwich.iter().all(|s| s.holds),
        rows,
        sandwich,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> SweepConfig {
        SweepConfig {
            functions: vec!["pow:2".into()],
            intervals: vec![[0.0, 1.0]],
            alpha_grid: vec![0.5],
            lambda_grid: vec![1.0 / 3.0],
            extra_points: vec![],
            q_grid: vec![1.0],
            ..SweepConfig::default()
        }
    }

    #[test]
    fn default_config_validates_and_counts() {
        let cfg = SweepConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.rule_points().len(), 26);
        let out = run_sweep_seq(&cfg).unwrap();
        assert_eq!(out.reports.len(), 7 * 3 * 26 * 3);
        assert_eq!(out.summary.total_reports, 1638);
        // recip is undefined on [0, 1] and [-1, 2].
        assert_eq!(out.summary.skipped_tuples, 2 * 26 * 3);
        assert_eq!(out.summary.theorem_violations, 0);
        assert!(out
            .reports
            .iter()
            .all(|r| r.verdict == Verdict::Sound || r.verdict == Verdict::Skipped));
        for c in &out.summary.corollaries {
            assert!(
                (c.ratio - c.expected_ratio).abs() <= 1e-12,
                "{}: ratio {} expected {}",
                c.key,
                c.ratio,
                c.expected_ratio
            );
        }
        assert_eq!(out.summary.corollaries.len(), 10);
        assert_eq!(
            out.summary.corollary_witness,
            Some(("pow:2".to_string(), [0.0, 1.0]))
        );
    }

    #[test]
    fn single_tuple_report_values() {
        let out = run_sweep_seq(&tiny_config()).unwrap();
        assert_eq!(out.reports.len(), 1);
        let r = &out.reports[0];
        assert_eq!(r.regime, Regime::R1);
        assert_eq!(r.qc_holds, Some(true));
        assert!(r.true_error.unwrap() <= 1e-15);
        let thm21 = r.bound(BoundLabel::Thm21);
        assert!((thm21.value.unwrap() - 5.0 / 18.0).abs() <= 1e-15);
        assert_eq!(thm21.verdict, Verdict::Sound);
        assert_eq!(r.bound(BoundLabel::Thm22).verdict, Verdict::Skipped);
        assert_eq!(
            r.bound(BoundLabel::Thm22).skip_reason,
            Some("requires q > 1")
        );
        let base12 = r.bound(BoundLabel::Base12);
        assert!((base12.value.unwrap() - 0.5).abs() <= 1e-15);
        assert!((base12.target_error.unwrap() - 1.0 / 6.0).abs() <= 1e-15);
        let base15 = r.bound(BoundLabel::Base15);
        assert!((base15.value.unwrap() - 0.375).abs() <= 1e-15);
        // Fourth derivative of x^2 vanishes, so both classical forms are 0
        // and Simpson is exact: slack is exactly zero and still sound.
        let printed = r.bound(BoundLabel::SimpsonClassicalPrinted);
        assert_eq!(printed.value, Some(0.0));
        assert_eq!(printed.verdict, Verdict::Sound);
        assert!((r.slack_min.unwrap() - 5.0 / 18.0).abs() <= 1e-15);
        assert_eq!(r.verdict, Verdict::Sound);
    }

    #[test]
    fn csv_shape_and_empties() {
        let out = run_sweep_seq(&tiny_config()).unwrap();
        let csv = to_csv(&out.reports);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let row = lines.next().unwrap();
        assert!(lines.next().is_none());
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 18);
        assert_eq!(cols[0], "pow:2");
        assert_eq!(cols[1], "0");
        assert_eq!(cols[2], "1");
        assert_eq!(cols[3], "0.5");
        assert_eq!(cols[5], "1");
        assert_eq!(cols[6], "R1");
        assert_eq!(cols[7], "true");
        assert_eq!(cols[10], "", "thm22 empty at q = 1");
        assert_eq!(cols[11], "", "thm23 empty at q = 1");
        assert_eq!(cols[13], "", "base_13 empty at q = 1");
        let thm21: f64 = cols[9].parse().unwrap();
        assert!((thm21 - 5.0 / 18.0).abs() <= 1e-15);
        assert_eq!(cols[17], "SOUND");
    }

    #[test]
    fn skipped_pair_still_reports() {
        let cfg = SweepConfig {
            functions: vec!["recip".into()],
            intervals: vec![[-1.0, 2.0]],
            ..SweepConfig::default()
        };
        let out = run_sweep_seq(&cfg).unwrap();
        assert_eq!(out.reports.len(), 26 * 3);
        assert!(out.reports.iter().all(|r| r.verdict == Verdict::Skipped));
        assert_eq!(out.summary.theorem_violations, 0);
        assert!(out.summary.corollaries.is_empty());
        let csv = to_csv(&out.reports);
        let row = csv.lines().nth(1).unwrap();
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[7], "");
        assert_eq!(cols[8], "");
        assert_eq!(cols[17], "SKIPPED");
    }

    #[test]
    fn runs_are_deterministic() {
        let cfg = SweepConfig::default();
        let a = run_sweep_seq(&cfg).unwrap();
        let b = run_sweep_seq(&cfg).unwrap();
        assert_eq!(a.reports, b.reports);
        assert_eq!(a.summary, b.summary);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_matches_sequential_bitwise() {
        let cfg = SweepConfig::default();
        let seq = run_sweep_seq(&cfg).unwrap();
        let par = run_sweep_par(&cfg).unwrap();
        assert_eq!(seq.reports, par.reports);
        assert_eq!(seq.summary, par.summary);
    }

    #[test]
    fn config_validation_rejects_bad_input() {
        let mut cfg = SweepConfig::default();
        cfg.q_grid.clear();
        assert!(cfg.validate().is_err());

        let mut cfg = SweepConfig::default();
        cfg.functions.push("pow:99".into());
        assert!(cfg.validate().is_err());

        let mut cfg = SweepConfig::default();
        cfg.intervals.push([2.0, 1.0]);
        assert!(cfg.validate().is_err());

        let mut cfg = SweepConfig::default();
        cfg.alpha_grid.push(1.5);
        assert!(cfg.validate().is_err());

        let mut cfg = SweepConfig::default();
        cfg.q_grid.push(0.5);
        assert!(cfg.validate().is_err());

        let cfg = SweepConfig {
            integrator_tol: 1.0,
            ..SweepConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_json_round_trip_with_defaults() {
        let cfg: SweepConfig = serde_json::from_str(r#"{"q_grid": [2.0]}"#).unwrap();
        assert_eq!(cfg.q_grid, vec![2.0]);
        assert_eq!(cfg.functions, SweepConfig::default().functions);
        assert!(serde_json::from_str::<SweepConfig>(r#"{"qgrid": [2.0]}"#).is_err());
        let text = to_json(&cfg).unwrap();
        let back: SweepConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn summary_json_exposes_violation_count() {
        let out = run_sweep_seq(&tiny_config()).unwrap();
        let text = to_json(&out.summary).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["theorem_violations"], 0);
        assert_eq!(v["per_label"][0]["key"], "thm21");
        assert_eq!(v["per_label"][0]["sound"], 1);
    }

    #[test]
    fn identity_suite_residuals_are_tiny() {
        let cfg = SweepConfig {
            functions: vec!["pow:3".into(), "absshift:0.5".into()],
            intervals: vec![[0.0, 1.0], [-1.0, 2.0]],
            alpha_grid: vec![0.0, 0.5, 1.0],
            lambda_grid: vec![0.0, 1.0 / 3.0, 1.0],
            extra_points: vec![[0.9, 0.9]],
            ..SweepConfig::default()
        };
        let report = identity_suite(&cfg).unwrap();
        assert_eq!(report.rows.len(), 2 * 2 * 10);
        assert!(
            report.max_residual <= 1e-9,
            "max residual {}",
            report.max_residual
        );
        assert!(report.sandwich_ok);
        // pow:3 is convex only where the interval stays nonnegative.
        assert_eq!(report.sandwich.len(), 3);
    }
}
