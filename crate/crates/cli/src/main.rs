//! Command line front end: single-tuple bound evaluation, identity and
//! corollary checks, mean-level propositions, quasi-convexity verdicts, and
//! the full sweep.
//!
//! Exit codes: 0 on success, 1 when a check fails (a bound violation, a
//! residual or ratio over threshold, a quasi-convexity failure), 2 on
//! usage or validation errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use quadcert::bounds::ALL_COROLLARIES;
use quadcert::means::{proposition_bound, MeanInputs, Proposition};
use quadcert::model::{make_params, Interval};
use quadcert::qc::{check_quasiconvex_with_kinks, DEFAULT_QC_TOL};
use quadcert::registry::registry_member;
use quadcert::sweep::{
    identity_suite, run_sweep_seq, to_csv, to_json, Summary, SweepConfig, SweepOutput, TupleReport,
    Verdict,
};

/// Accepts plain decimals and simple fractions such as `1/3`.
fn parse_real(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let value = if let Some((num, den)) = t.split_once('/') {
        let n: f64 = num
            .trim()
            .parse()
            .map_err(|e| format!("bad numerator in {t:?}: {e}"))?;
        let d: f64 = den
            .trim()
            .parse()
            .map_err(|e| format!("bad denominator in {t:?}: {e}"))?;
        if d == 0.0 {
            return Err(format!("zero denominator in {t:?}"));
        }
        n / d
    } else {
        t.parse()
            .map_err(|e| format!("invalid number {t:?}: {e}"))?
    };
    Ok(value)
}

#[derive(Parser)]
#[command(
    name = "quadcert",
    version,
    about = "Certified error bounds for a weighted three-point quadrature family"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every bound for one (function, interval, alpha, lambda, q) tuple
    Bound(BoundArgs),
    /// Check the first-derivative kernel identity over a config's grid
    Identity(IdentityArgs),
    /// Run the full sweep, writing CSV reports and a JSON summary
    Sweep(SweepArgs),
    /// Cross-check the fixed-parameter closed forms against the general bounds
    Corollaries(CorollariesArgs),
    /// Evaluate a mean-level proposition and its generic recomputation
    Means(MeansArgs),
    /// Test |f'|^q for quasi-convexity on an interval
    Qc(QcArgs),
}

#[derive(Args)]
struct BoundArgs {
    /// Registry id, e.g. pow:2, recip, exp, absshift:0.5
    #[arg(short, long)]
    function: String,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    b: f64,
    /// Endpoint weight within the rule, in [0, 1]; fractions allowed
    #[arg(long, value_parser = parse_real)]
    alpha: f64,
    /// Mix between endpoint pair and node evaluation, in [0, 1]
    #[arg(long, value_parser = parse_real)]
    lambda: f64,
    /// Power-mean exponent, >= 1
    #[arg(long, value_parser = parse_real, default_value = "2")]
    q: f64,
}

#[derive(Args)]
struct IdentityArgs {
    /// JSON sweep config; defaults to the built-in grid
    #[arg(long)]
    config: Option<PathBuf>,
    /// Largest acceptable identity residual
    #[arg(long, value_parser = parse_real, default_value = "1e-9")]
    tol: f64,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON sweep config; defaults to the built-in grid
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV output path
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
    /// Optional JSON summary output path
    #[arg(long)]
    summary_json: Option<PathBuf>,
    /// Force the sequential runner even when the parallel feature is built in
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct CorollariesArgs {
    #[arg(short, long, default_value = "exp")]
    function: String,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true, default_value = "0")]
    a: f64,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true, default_value = "1")]
    b: f64,
    /// Exponent for the conjugate-pair corollaries (the q = 1 corollary pins its own)
    #[arg(long, value_parser = parse_real, default_value = "2")]
    q: f64,
    /// Largest acceptable |ratio - expected|
    #[arg(long, value_parser = parse_real, default_value = "1e-9")]
    tol: f64,
}

#[derive(Args)]
struct MeansArgs {
    /// One of P1, P2, P3, P4
    #[arg(short, long)]
    prop: String,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, value_parser = parse_real)]
    alpha: f64,
    #[arg(long, value_parser = parse_real)]
    lambda: f64,
    #[arg(long, value_parser = parse_real, default_value = "2")]
    q: f64,
    /// Power for the x^n propositions (P1, P2)
    #[arg(short, long)]
    n: Option<u32>,
    /// Largest acceptable disagreement between the mean and generic paths
    #[arg(long, value_parser = parse_real, default_value = "1e-9")]
    tol: f64,
}

#[derive(Args)]
struct QcArgs {
    #[arg(short, long)]
    function: String,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, value_parser = parse_real, default_value = "1")]
    q: f64,
    #[arg(long, default_value = "2001")]
    samples: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Bound(args) => bound_cmd(args),
        Command::Identity(args) => identity_cmd(args),
        Command::Sweep(args) => sweep_cmd(args),
        Command::Corollaries(args) => corollaries_cmd(args),
        Command::Means(args) => means_cmd(args),
        Command::Qc(args) => qc_cmd(args),
    }
}

fn load_config(path: &Option<PathBuf>) -> anyhow::Result<SweepConfig> {
    let Some(path) = path else {
        return Ok(SweepConfig::default());
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cfg: SweepConfig =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(cfg)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| format!("{v:.6e}"))
}

fn print_report(r: &TupleReport) {
    println!(
        "{} on {}   alpha = {}  lambda = {}  q = {}  regime {}",
        r.function, r.interval, r.alpha, r.lambda, r.q, r.regime
    );
    match r.qc_holds {
        Some(true) => println!("|f'|^q quasi-convex: yes"),
        Some(false) => println!("|f'|^q quasi-convex: NO (bound hypotheses unmet)"),
        None => println!("|f'|^q quasi-convex: not evaluated"),
    }
    if let Some(err) = r.true_error {
        println!("rule error against the mean value: {err:.6e}");
    }
    println!();
    println!(
        "{:<28} {:<10} {:>14} {:>14} {:>14}  {:<16} note",
        "bound", "target", "value", "target error", "slack", "verdict"
    );
    for b in &r.bounds {
        let target = match b.target {
            quadcert::bounds::TargetFunctional::Rule => "rule",
            quadcert::bounds::TargetFunctional::Trapezoid => "trapezoid",
            quadcert::bounds::TargetFunctional::Simpson => "simpson",
        };
        println!(
            "{:<28} {:<10} {:>14} {:>14} {:>14}  {:<16} {}",
            b.label.key(),
            target,
            fmt_opt(b.value),
            fmt_opt(b.target_error),
            fmt_opt(b.slack),
            b.verdict.key(),
            b.skip_reason.unwrap_or("")
        );
    }
    println!();
    println!(
        "overall (theorem bounds): {}  min slack {}",
        r.verdict.key(),
        fmt_opt(r.slack_min)
    );
}

fn bound_cmd(args: BoundArgs) -> anyhow::Result<u8> {
    let f = registry_member(&args.function)?;
    let iv = Interval::new(args.a, args.b)?;
    f.check_domain(iv)?;
    make_params(args.alpha, args.lambda, args.q)?;
    let cfg = SweepConfig {
        functions: vec![args.function.clone()],
        intervals: vec![[args.a, args.b]],
        alpha_grid: vec![args.alpha],
        lambda_grid: vec![args.lambda],
        extra_points: vec![],
        q_grid: vec![args.q],
        ..SweepConfig::default()
    };
    let out = run_sweep_seq(&cfg)?;
    let report = &out.reports[0];
    print_report(report);
    Ok(u8::from(report.verdict == Verdict::Violation))
}

fn identity_cmd(args: IdentityArgs) -> anyhow::Result<u8> {
    let cfg = load_config(&args.config)?;
    let report = identity_suite(&cfg)?;
    println!(
        "kernel identity: {} rows, max residual {:.3e} (tolerance {:.1e})",
        report.rows.len(),
        report.max_residual,
        args.tol
    );
    if let Some(w) = &report.worst {
        println!(
            "worst row: {} on [{}, {}] at alpha = {}, lambda = {}",
            w.function, w.interval[0], w.interval[1], w.alpha, w.lambda
        );
    }
    let bad_sandwich = report.sandwich.iter().filter(|s| !s.holds).count();
    println!(
        "convex sandwich rows: {} checked, {} failing",
        report.sandwich.len(),
        bad_sandwich
    );
    let ok = report.max_residual <= args.tol && report.sandwich_ok;
    println!("identity check: {}", if ok { "OK" } else { "FAILED" });
    Ok(u8::from(!ok))
}

fn print_summary(summary: &Summary) {
    println!(
        "tuples: {} total, {} skipped; theorem violations: {}",
        summary.total_reports, summary.skipped_tuples, summary.theorem_violations
    );
    println!(
        "{:<28} {:>7} {:>10} {:>10} {:>8}  {:>12}  witness",
        "bound", "sound", "violation", "hyp-unmet", "skipped", "min slack"
    );
    for l in &summary.per_label {
        let (slack, witness) = match (&l.min_slack, &l.min_slack_witness) {
            (Some(s), Some(w)) => (
                format!("{s:.4e}"),
                format!(
                    "{} [{}, {}] alpha={} lambda={} q={}",
                    w.function, w.interval[0], w.interval[1], w.alpha, w.lambda, w.q
                ),
            ),
            _ => (String::new(), String::new()),
        };
        println!(
            "{:<28} {:>7} {:>10} {:>10} {:>8}  {:>12}  {}",
            l.key, l.sound, l.violation, l.hypothesis_unmet, l.skipped, slack, witness
        );
    }
    if let Some((f, iv)) = &summary.corollary_witness {
        println!();
        println!("corollary ratios ({f} on [{}, {}], q = 2):", iv[0], iv[1]);
        for c in &summary.corollaries {
            println!(
                "  {:<12} ratio {:<22} expected {}",
                c.key, c.ratio, c.expected_ratio
            );
        }
    }
}

fn sweep_cmd(args: SweepArgs) -> anyhow::Result<u8> {
    let cfg = load_config(&args.config)?;
    let output: SweepOutput = if args.sequential {
        run_sweep_seq(&cfg)?
    } else {
        quadcert::sweep::run_sweep(&cfg)?
    };
    fs::write(&args.out, to_csv(&output.reports))
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "wrote {} report rows to {}",
        output.reports.len(),
        args.out.display()
    );
    if let Some(path) = &args.summary_json {
        fs::write(path, to_json(&output.summary)?)
            .with_context(|| format!("writing {}", path.display()))?;
        println!("wrote summary to {}", path.display());
    }
    println!();
    print_summary(&output.summary);
    Ok(u8::from(output.summary.theorem_violations > 0))
}

fn corollaries_cmd(args: CorollariesArgs) -> anyhow::Result<u8> {
    let f = registry_member(&args.function)?;
    let iv = Interval::new(args.a, args.b)?;
    f.check_domain(iv)?;
    println!(
        "closed forms against general bounds: {} on {}, q = {}",
        args.function, iv, args.q
    );
    println!(
        "{:<12} {:>6} {:>10} {:>14} {:>14} {:>22} {:>9}  literal variant",
        "corollary", "alpha", "lambda", "closed form", "general", "ratio", "expected"
    );
    let mut worst = 0.0_f64;
    for id in ALL_COROLLARIES {
        let c = quadcert::bounds::corollary_crosscheck(id, &f, iv, args.q)?;
        worst = worst.max((c.ratio - c.expected_ratio).abs());
        println!(
            "{:<12} {:>6} {:>10} {:>14.6e} {:>14.6e} {:>22} {:>9}  {}",
            c.key,
            c.alpha,
            c.lambda,
            c.closed_form,
            c.general,
            c.ratio,
            c.expected_ratio,
            fmt_opt(c.literal_no_root)
        );
    }
    println!(
        "worst |ratio - expected| = {worst:.3e} (tolerance {:.1e})",
        args.tol
    );
    Ok(u8::from(worst > args.tol))
}

fn means_cmd(args: MeansArgs) -> anyhow::Result<u8> {
    let which = Proposition::parse(&args.prop)?;
    let params = make_params(args.alpha, args.lambda, args.q)?;
    let inputs = MeanInputs {
        a: args.a,
        b: args.b,
        alpha: args.alpha,
        n: args.n,
    };
    let r = proposition_bound(which, &inputs, &params)?;
    println!(
        "{} on [{}, {}] at alpha = {}, lambda = {}, q = {} (regime {})",
        which.key(),
        args.a,
        args.b,
        args.alpha,
        args.lambda,
        args.q,
        r.regime
    );
    println!("mean-level error side   {:.12e}", r.lhs);
    println!("mean-level bound        {:.12e}", r.bound);
    println!("slack                   {:.6e}", r.slack);
    println!("generic error side      {:.12e}", r.lhs_generic);
    println!("generic bound           {:.12e}", r.bound_generic.value);
    println!(
        "path agreement          error {:.3e}, bound {:.3e} (tolerance {:.1e})",
        r.lhs_agreement, r.bound_agreement, args.tol
    );
    let ok = r.lhs_agreement <= args.tol && r.bound_agreement <= args.tol && r.slack >= -args.tol;
    println!("proposition check: {}", if ok { "OK" } else { "FAILED" });
    Ok(u8::from(!ok))
}

fn qc_cmd(args: QcArgs) -> anyhow::Result<u8> {
    let f = registry_member(&args.function)?;
    let iv = Interval::new(args.a, args.b)?;
    f.check_domain(iv)?;
    let verdict = check_quasiconvex_with_kinks(
        |x| f.deriv(x).abs().powf(args.q),
        iv,
        args.samples,
        DEFAULT_QC_TOL,
        &f.kinks(),
    )?;
    println!(
        "|f'|^q for {} on {} with q = {} over {} samples",
        args.function, iv, args.q, verdict.samples
    );
    if verdict.holds {
        match verdict.valley_point {
            Some(v) => println!("quasi-convex: yes (valley near {v})"),
            None => println!("quasi-convex: yes"),
        }
        Ok(0)
    } else {
        println!(
            "quasi-convex: NO (worst interior violation {:.6e})",
            verdict.worst_violation
        );
        Ok(1)
    }
}
