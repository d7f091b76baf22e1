//! Argument definitions and the four subcommands.

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use ptail_core::bounds::{
    blm_bound, klar_sandwich, short_explicit, short_phi_sandwich, thm1_bounds, thm2_bounds, BoundResult,
    FamilyGroup, KlarProduct,
};
use ptail_core::compare::sample_curve;
use ptail_core::divergence::{discretize, kl_divergence, Side, TailQuery};
use ptail_core::exact::exact_tail;
use ptail_core::szasz::{
    boundary_rate, fit_exponential_rate, remark5_bound, szasz_apply, theorem3_bound, Affine, FunctionDescriptor,
    SzaszProblem, Target, Window, DEFAULT_TOLERANCE,
};

use crate::curve_csv::{write_curve, CurveHeader};
use crate::descriptor;
use crate::output::{format_number, Format, OutputEnvelope, Scalar, Table};
use crate::suites::{self, Suite, SuiteConfig, DEFAULT_SEED};
use crate::CliError;

#[derive(Parser, Debug)]
#[command(name = "ptail", version, about = "Poisson tail bounds, exact tails and Szász-Mirakyan experiments")]
pub struct Cli {
    /// Output format. Significant digits come from PTAIL_PRECISION (12 to 17, default 15).
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closed-form bounds and the exact probability of one tail event.
    Bound(BoundArgs),
    /// Quotient curve of the right-tail bound over Short's explicit bound, as CSV.
    Compare(CompareArgs),
    /// Run invariant sweeps; exits with status 2 on any violation.
    Validate(ValidateArgs),
    /// Szász-Mirakyan operator value, actual error and error bounds.
    Szasz(SzaszArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Right,
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KlarArg {
    Consecutive,
    Literal,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub side: SideArg,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub x: f64,
    /// Right-tail threshold: P(N_{nx} >= ceil(n b)).
    #[arg(long)]
    pub b: Option<f64>,
    /// Left-tail threshold: P(N_{nx} <= floor(n a)).
    #[arg(long)]
    pub a: Option<f64>,
    /// Comma-separated list of thm1, thm2, blm, short-phi, short-explicit, klar, or `all`.
    #[arg(long, default_value = "all")]
    pub family: String,
    /// Window length k in Klar's bound.
    #[arg(long, default_value_t = 5)]
    pub klar_k: u64,
    /// Product in Klar's ratio: consecutive (m+1)...(m+k) or the literal (m+1)^k.
    #[arg(long, value_enum, default_value_t = KlarArg::Consecutive)]
    pub klar_product: KlarArg,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub b: f64,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    /// Write the CSV here and print a summary; without it the CSV goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Comma-separated suites (tails, lemma3, stirling, identity8, gamma, median, crossovers, szasz) or `all`.
    #[arg(long)]
    pub suite: String,
    /// Largest k (lemma3, stirling, median) or largest n beta (crossovers).
    #[arg(long)]
    pub kmax: Option<u64>,
    /// Sample count (identity8, gamma), x grid size (tails) or curve samples (crossovers).
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("size").required(true).args(["n", "n_sweep"])))]
pub struct SzaszArgs {
    /// Target function, e.g. affine:2,1 or patch:affine:2,1;outside=+1;window=0.5,1.5.
    #[arg(long = "fn")]
    pub function: String,
    #[arg(long)]
    pub n: Option<u64>,
    /// Comma-separated list of n.
    #[arg(long, value_delimiter = ',')]
    pub n_sweep: Option<Vec<u64>>,
    #[arg(long)]
    pub x: f64,
    /// Window `lo,hi` on which f is affine; defaults to the descriptor's own.
    #[arg(long)]
    pub window: Option<String>,
    /// Affine reference `slope,intercept`; defaults to the descriptor's own.
    #[arg(long)]
    pub affine: Option<String>,
    /// Norm exponents for the moment bound.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub p: Vec<f64>,
    /// Bound on sup |f - l|; defaults to the descriptor's envelope when bounded.
    #[arg(long)]
    pub sup_norm: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub envelope: OutputEnvelope,
    /// Some invariant failed; the process should exit with status 2.
    pub violation: bool,
    /// Printed verbatim instead of the envelope (the curve CSV on stdout).
    pub raw_stdout: Option<String>,
}

impl Report {
    fn new(envelope: OutputEnvelope) -> Self {
        Self { envelope, violation: false, raw_stdout: None }
    }
}

pub fn run(command: &Command, digits: usize) -> Result<Report, CliError> {
    match command {
        Command::Bound(a) => bound(a),
        Command::Compare(a) => compare(a, digits),
        Command::Validate(a) => validate(a),
        Command::Szasz(a) => szasz(a),
    }
}

fn usage<T>(message: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(message.into()))
}

fn parse_families(list: &str, side: Side) -> Result<Vec<FamilyGroup>, CliError> {
    if list == "all" {
        return Ok(FamilyGroup::ALL.into_iter().filter(|g| g.applies_to(side)).collect());
    }
    list.split(',')
        .map(|s| s.trim().parse::<FamilyGroup>().or_else(|_| usage(format!("unknown bound family '{s}'"))))
        .collect()
}

pub fn bound(args: &BoundArgs) -> Result<Report, CliError> {
    let query = match (args.side, args.b, args.a) {
        (SideArg::Right, Some(b), None) => TailQuery::right(args.n, args.x, b),
        (SideArg::Left, None, Some(a)) => TailQuery::left(args.n, args.x, a),
        (SideArg::Right, _, _) => return usage("--side right takes --b and not --a"),
        (SideArg::Left, _, _) => return usage("--side left takes --a and not --b"),
    };
    query.check()?;
    let groups = parse_families(&args.family, query.side)?;
    let exact = exact_tail(&query)?;
    let grid = discretize(&query);

    let mut env = OutputEnvelope::new("bound");
    let side = if query.side == Side::Right { "right" } else { "left" };
    env.param("side", side);
    env.param("n", args.n);
    env.param("x", format_number(args.x, 17));
    env.param(if query.side == Side::Right { "b" } else { "a" }, format_number(query.threshold, 17));
    env.param("family", &args.family);
    if groups.contains(&FamilyGroup::Klar) {
        env.param("klar_k", args.klar_k);
        env.param("klar_product", if args.klar_product == KlarArg::Literal { "literal" } else { "consecutive" });
    }
    env.result("grid_index", grid.grid_index);
    env.result("grid_value", grid.grid_value);
    env.result("divergence", kl_divergence(grid.grid_value, args.x)?);
    env.result("exact", exact);

    let mut table = Table::new("bounds", &["family", "value", "valid", "slack", "note"]);
    let mut report_violation = false;
    for g in groups {
        if !g.applies_to(query.side) {
            table.push(vec![g.id().into(), f64::INFINITY.into(), false.into(), "".into(), "not defined for this tail".into()]);
            env.warn(format!("{}: not defined for {side}-tail queries", g.id()));
            continue;
        }
        let results: Vec<BoundResult> = match g {
            FamilyGroup::Thm1 => {
                let t = thm1_bounds(&query);
                vec![t.lower, t.lower_sharp, t.upper]
            }
            FamilyGroup::Thm2 => {
                let t = thm2_bounds(&query);
                vec![t.lower, t.lower_sharp, t.upper]
            }
            FamilyGroup::Blm => vec![blm_bound(&query)],
            FamilyGroup::ShortPhi => {
                let p = short_phi_sandwich(query.n, query.x, query.threshold);
                vec![p.lower, p.upper]
            }
            FamilyGroup::ShortExplicit => vec![short_explicit(&query)],
            FamilyGroup::Klar => {
                let product = match args.klar_product {
                    KlarArg::Consecutive => KlarProduct::Consecutive,
                    KlarArg::Literal => KlarProduct::Literal,
                };
                let p = klar_sandwich(query.n, query.x, query.threshold, args.klar_k, product);
                vec![p.lower, p.upper]
            }
        };
        for r in results {
            let id = r.family.id();
            if r.valid {
                let slack = r.slack(exact);
                if slack < 0.0 {
                    report_violation = true;
                    env.warn(format!("{id}: bound {} is on the wrong side of the exact value", r.value));
                }
                table.push(vec![id.into(), r.value.into(), true.into(), slack.into(), "".into()]);
            } else {
                env.warn(format!("{id}: {}", r.note));
                table.push(vec![id.into(), r.value.into(), false.into(), "".into(), r.note.into()]);
            }
        }
    }
    env.tables.push(table);
    Ok(Report { violation: report_violation, ..Report::new(env) })
}

pub fn compare(args: &CompareArgs, digits: usize) -> Result<Report, CliError> {
    if args.samples < 2 {
        return usage("--samples must be at least 2");
    }
    let (set, rows) = sample_curve(args.n, args.b, args.samples)?;
    let mut csv = Vec::new();
    write_curve(&mut csv, &CurveHeader::from(&set), &rows, digits).expect("writing to memory");

    let mut env = OutputEnvelope::new("compare");
    env.param("n", args.n);
    env.param("b", format_number(args.b, 17));
    env.param("samples", args.samples);
    env.result("grid_index", set.grid_index);
    env.result("beta", set.beta);
    env.result("beta_hat", set.beta_hat);
    env.result("x_hat", set.x_hat);
    env.result("y_hat", set.y_hat);
    env.result("z_hat", set.z_hat);
    match set.z_residual {
        Some(r) => env.result("z_residual", r),
        None => env.warn("z_hat lies outside the branch region its closed form assumes; Q(z_hat) = 1 not checked"),
    }
    let mut violation = false;
    env.result("ordering_checked", set.ordering_applies());
    if set.ordering_applies() {
        let holds = set.ordering_holds();
        env.result("ordering_holds", holds);
        if !holds {
            violation = true;
            env.warn("ordering y_hat < z_hat < x_hat < beta_hat fails");
        }
    } else {
        env.warn(format!(
            "n beta = {} < 9: ordering y_hat < z_hat < x_hat < beta_hat not asserted",
            set.grid_index
        ));
    }
    let csv = String::from_utf8(csv).expect("UTF-8 CSV");
    let raw_stdout = match &args.out {
        Some(path) => {
            std::fs::write(path, &csv).map_err(|source| CliError::Io { path: path.clone(), source })?;
            env.param("out", path.display());
            env.result("rows", rows.len() as u64);
            None
        }
        None => Some(csv),
    };
    Ok(Report { envelope: env, violation, raw_stdout })
}

fn parse_suites(list: &str) -> Result<Vec<Suite>, CliError> {
    if list == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    list.split(',').map(|s| s.trim().parse::<Suite>().map_err(CliError::Usage)).collect()
}

pub fn validate(args: &ValidateArgs) -> Result<Report, CliError> {
    let list = parse_suites(&args.suite)?;
    let config = SuiteConfig { kmax: args.kmax, points: args.points, seed: args.seed };
    let mut env = OutputEnvelope::new("validate");
    env.param("suite", &args.suite);
    if let Some(k) = args.kmax {
        env.param("kmax", k);
    }
    if let Some(p) = args.points {
        env.param("points", p);
    }
    env.param("seed", args.seed);
    let mut table = Table::new("suites", &["suite", "checked", "violations", "passed"]);
    let mut violation = false;
    for suite in list {
        let r = suites::run(suite, &config)?;
        table.push(vec![suite.id().into(), r.checked.into(), r.violations.into(), r.passed().into()]);
        for (name, value) in &r.metrics {
            env.result(&format!("{suite}.{name}"), *value);
        }
        if let Some(first) = &r.first_violation {
            violation = true;
            env.warn(format!("{suite}: {} violation(s); first: {first}", r.violations));
        }
    }
    env.tables.push(table);
    Ok(Report { violation, ..Report::new(env) })
}

fn pair(text: &str, what: &str) -> Result<(f64, f64), CliError> {
    let parsed = text.split_once(',').and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
    parsed.map_or_else(|| usage(format!("{what} must be two comma-separated numbers, got '{text}'")), Ok)
}

struct SzaszSetup {
    target: FunctionDescriptor,
    problem: Option<SzaszProblem>,
    sup_norm: Option<f64>,
    boundary: Option<(f64, f64)>,
}

fn szasz_setup(args: &SzaszArgs, env: &mut OutputEnvelope) -> Result<SzaszSetup, CliError> {
    let target = descriptor::parse(&args.function)?;
    let natural = target.natural_reference();
    let explicit = args.window.is_some() || args.affine.is_some();
    let window = match &args.window {
        Some(w) => {
            let (lo, hi) = pair(w, "--window")?;
            Some(Window::new(lo, hi)?)
        }
        None => natural.map(|(_, w)| w),
    };
    let reference = match &args.affine {
        Some(l) => {
            let (slope, intercept) = pair(l, "--affine")?;
            Some(Affine::new(slope, intercept))
        }
        None => natural.map(|(l, _)| l),
    };
    let problem = match (reference, window) {
        (Some(l), Some(w)) => match SzaszProblem::new(target.clone(), l, w, args.x) {
            Ok(p) => Some(p.with_tolerance(args.tol)),
            Err(e) if explicit => return Err(e.into()),
            Err(e) => {
                env.warn(format!("no error bounds: {e}"));
                None
            }
        },
        _ => {
            env.warn("no affine window known for this descriptor; pass --window and --affine for error bounds");
            None
        }
    };
    let sup_norm = args.sup_norm.or_else(|| {
        let p = problem.as_ref()?;
        let e = target.deviation_envelope(&p.affine_ref);
        (e.degree == 0.0).then_some(e.scale)
    });
    let boundary = match target {
        FunctionDescriptor::PowerDeviation { a, s } if args.x == a => Some((a, s)),
        _ => None,
    };
    Ok(SzaszSetup { target, problem, sup_norm, boundary })
}

struct SzaszRow {
    n: u64,
    value: f64,
    error: f64,
    first_index: u64,
    truncation_index: u64,
    remainder: f64,
    remark5: Option<f64>,
    theorem3: Vec<Option<f64>>,
    boundary: Option<(f64, f64)>,
}

fn szasz_row(setup: &SzaszSetup, args: &SzaszArgs, n: u64, env: &mut OutputEnvelope) -> Result<SzaszRow, CliError> {
    let v = szasz_apply(&setup.target, n, args.x, args.tol)?;
    let error = match &setup.problem {
        Some(p) => p.actual_error(n)?.0,
        None => (v.value - setup.target.eval(args.x)).abs(),
    };
    let mut remark5 = None;
    let mut theorem3 = vec![None; args.p.len()];
    let identical = setup.problem.as_ref().is_some_and(|p| setup.target.deviation_envelope(&p.affine_ref).scale == 0.0);
    if identical {
        // f coincides with its affine reference, so S_n f = f exactly
        remark5 = Some(0.0);
        theorem3.fill(Some(0.0));
    } else if let Some(p) = &setup.problem {
        if let Some(sup) = setup.sup_norm {
            match remark5_bound(p, n, sup) {
                Ok(b) => remark5 = Some(b),
                Err(e) => env.warn(format!("n={n}: sup-norm bound unavailable: {e}")),
            }
        }
        for (slot, &q) in theorem3.iter_mut().zip(&args.p) {
            match theorem3_bound(p, n, q) {
                Ok(b) => *slot = Some(b.bound),
                Err(e) => env.warn(format!("n={n} p={}: moment bound unavailable: {e}", format_number(q, 12))),
            }
        }
    }
    let boundary = match setup.boundary {
        Some((a, s)) => {
            let r = boundary_rate(a, s, n)?;
            Some((r.rhs, r.ratio()))
        }
        None => None,
    };
    Ok(SzaszRow {
        n,
        value: v.value,
        error,
        first_index: v.first_index,
        truncation_index: v.truncation_index,
        remainder: v.truncation_remainder_bound,
        remark5,
        theorem3,
        boundary,
    })
}

fn optional(v: Option<f64>) -> Scalar {
    v.map_or_else(|| "".into(), Scalar::Num)
}

pub fn szasz(args: &SzaszArgs) -> Result<Report, CliError> {
    if !(args.tol > 0.0) {
        return usage("--tol must be positive");
    }
    if let Some(q) = args.p.iter().find(|p| !(**p > 1.0)) {
        return usage(format!("--p values must exceed 1, got {q}"));
    }
    let mut env = OutputEnvelope::new("szasz");
    let setup = szasz_setup(args, &mut env)?;
    env.param("fn", descriptor::format(&setup.target));
    env.param("x", format_number(args.x, 17));
    env.param("tol", format_number(args.tol, 17));
    if let Some(p) = &setup.problem {
        env.param("window", format!("{},{}", format_number(p.window.lo, 17), format_number(p.window.hi, 17)));
        env.param("affine", format!("{},{}", format_number(p.affine_ref.slope, 17), format_number(p.affine_ref.intercept, 17)));
    }
    if let Some(s) = setup.sup_norm {
        env.param("sup_norm", format_number(s, 17));
    }
    let p_labels: Vec<String> = args.p.iter().map(|p| format!("theorem3_bound_p{}", format_number(*p, 12))).collect();
    env.param("p", args.p.iter().map(|p| format_number(*p, 12)).collect::<Vec<_>>().join(","));

    if let Some(n) = args.n {
        env.param("n", n);
        let r = szasz_row(&setup, args, n, &mut env)?;
        env.result("value", r.value);
        env.result("f_x", setup.target.eval(args.x));
        env.result("actual_error", r.error);
        env.result("first_index", r.first_index);
        env.result("truncation_index", r.truncation_index);
        env.result("truncation_remainder_bound", r.remainder);
        if let Some(b) = r.remark5 {
            env.result("remark5_bound", b);
        }
        for (label, b) in p_labels.iter().zip(&r.theorem3) {
            if let Some(b) = b {
                env.result(label, *b);
            }
        }
        if let Some((predicted, ratio)) = r.boundary {
            env.result("boundary_predicted_error", predicted);
            env.result("boundary_ratio", ratio);
        }
        return Ok(Report::new(env));
    }

    let sweep = args.n_sweep.as_deref().unwrap_or_default();
    if sweep.is_empty() {
        return usage("--n-sweep needs at least one value");
    }
    env.param("n_sweep", sweep.iter().map(u64::to_string).collect::<Vec<_>>().join(","));
    let mut columns = vec!["n", "value", "actual_error", "truncation_index", "remark5_bound"];
    columns.extend(p_labels.iter().map(String::as_str));
    if setup.boundary.is_some() {
        columns.extend(["boundary_predicted_error", "boundary_ratio"]);
    }
    let mut table = Table::new("sweep", &columns);
    let mut points = Vec::new();
    for &n in sweep {
        let r = szasz_row(&setup, args, n, &mut env)?;
        points.push((n, r.error));
        let mut row: Vec<Scalar> =
            vec![r.n.into(), r.value.into(), r.error.into(), r.truncation_index.into(), optional(r.remark5)];
        row.extend(r.theorem3.iter().map(|b| optional(*b)));
        if let Some((predicted, ratio)) = r.boundary {
            row.extend([predicted.into(), ratio.into()]);
        }
        table.push(row);
    }
    env.tables.push(table);
    let positive: Vec<(u64, f64)> = points.into_iter().filter(|(_, e)| *e > 0.0).collect();
    if let Some(rate) = fit_exponential_rate(&positive) {
        env.result("fitted_exponential_rate", rate);
    }
    if let Some(p) = &setup.problem {
        let mut h = kl_divergence(p.window.lo, args.x)?;
        if p.window.is_bounded() {
            h = h.min(kl_divergence(p.window.hi, args.x)?);
        }
        env.result("min_window_divergence", h);
    }
    Ok(Report::new(env))
}
