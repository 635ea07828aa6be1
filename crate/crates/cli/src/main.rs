//! `catrisk`: command-line front end for the pill-deal analyses.
//!
//! Exit codes: 0 success, 1 a `tables` cell failed, 2 bad arguments or
//! input, 3 solver failure, 4 value outside a utility's domain or range.

mod config;
mod output;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use catrisk_core::pill::log_grid;
use catrisk_core::report::Cell;
use catrisk_core::{
    acceptance_probability_threshold, calibrate_gamma, certainty_equivalent, classification_record, deal_value,
    emit_tables_report, implied_life, lambda_threshold, naive_life_bound, parse_gamma, simulate, summarize,
    sweep_deal_value, w_lambda, w_lambda_limit, AgentClass, DiscreteLottery, Error, FamilyKind, Money, PillDeal,
    UtilityFamily,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use config::SimConfig;
use output::{Field, Format, Table};

const DEFAULT_R: f64 = 220_000.0;

#[derive(Parser)]
#[command(name = "catrisk", version, about = "Values the deadly-pill deal under expected utility and under a catastrophe-sensitive ranking")]
struct Cli {
    /// Output format (default: table; csv for `sweep`)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Value of life above which a risk-neutral subject refuses: r/p
    NaiveBound {
        #[arg(long)]
        r: f64,
        #[arg(long)]
        p: f64,
    },
    /// Value of life at which the subject is indifferent to the deal
    ImpliedLife {
        #[command(flatten)]
        utility: UtilityArgs,
        #[arg(long, default_value_t = DEFAULT_R)]
        r: f64,
        #[arg(long, default_value_t = 1e-9)]
        p: f64,
    },
    /// Risk aversion that makes `--life` the indifference value
    CalibrateGamma {
        #[arg(long, value_parser = parse_family)]
        family: FamilyKind,
        #[arg(long)]
        life: f64,
        #[arg(long, default_value_t = DEFAULT_R)]
        r: f64,
        #[arg(long, default_value_t = 1e-9)]
        p: f64,
    },
    /// Certainty equivalent of a lottery given as wealth:prob,wealth:prob
    Ce {
        #[command(flatten)]
        utility: UtilityArgs,
        #[arg(long, value_parser = parse_lottery)]
        lottery: DiscreteLottery,
    },
    /// Certainty equivalent of the pill deal and whether it beats l
    PillValue {
        #[command(flatten)]
        utility: UtilityArgs,
        #[arg(long, default_value_t = 2e6)]
        l: f64,
        #[arg(long, default_value_t = DEFAULT_R)]
        r: f64,
        #[arg(long)]
        p: f64,
    },
    /// Deadly probability below which the deal is accepted
    PThreshold {
        #[command(flatten)]
        utility: UtilityArgs,
        #[arg(long, default_value_t = 2e6)]
        l: f64,
        #[arg(long, default_value_t = DEFAULT_R)]
        r: f64,
    },
    /// Weight λ0 = (l - r)/l at or below which the deal is never accepted
    LambdaThreshold {
        #[arg(long, default_value_t = 3e6)]
        l: f64,
        #[arg(long, default_value_t = DEFAULT_R)]
        r: f64,
    },
    /// Catastrophe-sensitive value W_λ(p) of the deal
    WLambda {
        #[arg(long, default_value_t = 3e6)]
        l: f64,
        #[arg(long, default_value_t = DEFAULT_R)]
        r: f64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        lambda: f64,
    },
    /// Never-taker or threshold classification of a λ agent
    Classify {
        #[arg(long, default_value_t = 3e6)]
        l: f64,
        #[arg(long, default_value_t = DEFAULT_R)]
        r: f64,
        #[arg(long)]
        lambda: f64,
    },
    /// Deal value over a log-spaced grid of 1/p
    Sweep(SweepArgs),
    /// Monte Carlo population facing the deal
    Simulate(SimulateArgs),
    /// Recompute the published calibration tables and check them
    Tables,
}

#[derive(Args)]
struct UtilityArgs {
    /// linear, cara or power
    #[arg(long, value_parser = parse_family)]
    family: FamilyKind,
    /// Risk aversion; accepts 1e-5, 10^-5.53 or 1e-5.53
    #[arg(long, value_parser = parse_gamma_arg)]
    gamma: Option<f64>,
}

impl UtilityArgs {
    fn utility(&self) -> Result<UtilityFamily, CliError> {
        match (self.family, self.gamma) {
            (FamilyKind::Linear, _) => Ok(UtilityFamily::linear()),
            (kind, Some(g)) => Ok(kind.with_gamma(g)?),
            (kind, None) => Err(CliError::Usage(format!("--gamma is required for the {} family", kind.name()))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    Eu,
    Cat,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    model: Model,
    /// Defaults to 2e6 for eu and 3e6 for cat
    #[arg(long)]
    l: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_R)]
    r: f64,
    #[arg(long, value_parser = parse_family, default_value = "cara")]
    family: FamilyKind,
    /// Without it, eu sweeps γ = 1e-5, 10^-4.5 and 10^-4.95
    #[arg(long, value_parser = parse_gamma_arg)]
    gamma: Option<f64>,
    /// Without it, cat sweeps λ = 0.95 and 0.90
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = 1e3)]
    inv_p_from: f64,
    #[arg(long, default_value_t = 1e15)]
    inv_p_to: f64,
    #[arg(long, default_value_t = 49)]
    points: usize,
}

#[derive(Args)]
struct SimulateArgs {
    /// Flat key = value file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n_agents: Option<usize>,
    #[arg(long)]
    eu_fraction: Option<f64>,
    #[arg(long)]
    l_min: Option<f64>,
    #[arg(long)]
    l_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma_exp_lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma_exp_hi: Option<f64>,
    #[arg(long)]
    lambda_lo: Option<f64>,
    #[arg(long)]
    lambda_hi: Option<f64>,
    /// Chosen at random and reported when omitted
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    /// Per-agent CSV: agent,kind,l,gamma_or_lambda,decision,never_taker
    #[arg(long)]
    agents_csv: Option<PathBuf>,
}

fn parse_family(s: &str) -> Result<FamilyKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_gamma_arg(s: &str) -> Result<f64, String> {
    parse_gamma(s).map_err(|e| e.to_string())
}

fn parse_lottery(s: &str) -> Result<DiscreteLottery, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug)]
enum CliError {
    Core(Error),
    Usage(String),
    Io(io::Error),
    /// `tables` ran but some cells are outside tolerance.
    TablesFailed(usize),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::TablesFailed(_) => 1,
            CliError::Core(e) if e.is_solver_failure() => 3,
            CliError::Core(Error::Domain { .. } | Error::Range { .. }) => 4,
            _ => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Usage(m) => m.clone(),
            CliError::Io(e) => e.to_string(),
            CliError::TablesFailed(n) => format!("{n} table cell(s) outside tolerance"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn require(ok: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Usage(msg()))
    }
}

fn gamma_field(u: &UtilityFamily) -> Field {
    u.gamma().map_or(Field::Missing, Field::Real)
}

fn run(cli: Cli, out: &mut impl Write) -> Result<(), CliError> {
    let format = cli.format.unwrap_or(match cli.command {
        Command::Sweep(_) => Format::Csv,
        _ => Format::Table,
    });
    let table = match cli.command {
        Command::NaiveBound { r, p } => {
            require(r > 0.0 && r.is_finite(), || format!("--r must be > 0, got {r}"))?;
            require(p > 0.0 && p < 1.0, || format!("--p must lie in (0, 1), got {p}"))?;
            Table::record(vec![("naive_bound", Field::Money(naive_life_bound(Money(r), p).0))])
        }
        Command::ImpliedLife { utility, r, p } => {
            let u = utility.utility()?;
            PillDeal::new(1.0, r, p)?;
            let l = implied_life(&u, Money(r), p)?;
            Table::record(vec![
                ("family", Field::Text(u.name().into())),
                ("gamma", gamma_field(&u)),
                ("implied_life", Field::Money(l.0)),
            ])
        }
        Command::CalibrateGamma { family, life, r, p } => {
            require(family != FamilyKind::Linear, || "the linear family has no gamma to calibrate".into())?;
            PillDeal::new(life, r, p)?;
            let g = calibrate_gamma(family, Money(life), Money(r), p)?;
            Table::record(vec![
                ("family", Field::Text(family.name().into())),
                ("life", Field::Money(life)),
                ("gamma", Field::Real(g)),
                ("log10_gamma", Field::Real(g.log10())),
            ])
        }
        Command::Ce { utility, lottery } => {
            let u = utility.utility()?;
            let ce = certainty_equivalent(&u, &lottery)?;
            let mean = lottery.mean();
            Table::record(vec![
                ("family", Field::Text(u.name().into())),
                ("gamma", gamma_field(&u)),
                ("certainty_equivalent", Field::Money(ce.0)),
                ("mean", Field::Money(mean.0)),
                ("risk_premium", Field::Money(mean.0 - ce.0)),
            ])
        }
        Command::PillValue { utility, l, r, p } => {
            let u = utility.utility()?;
            let value = deal_value(&u, &PillDeal::new(l, r, p)?)?;
            Table::record(vec![
                ("family", Field::Text(u.name().into())),
                ("gamma", gamma_field(&u)),
                ("deal_value", Field::Money(value.0)),
                ("l", Field::Money(l)),
                ("acceptable", Field::Bool(value.0 > l)),
            ])
        }
        Command::PThreshold { utility, l, r } => {
            let u = utility.utility()?;
            let p_star = acceptance_probability_threshold(&u, Money(l), Money(r))?;
            Table::record(vec![
                ("family", Field::Text(u.name().into())),
                ("gamma", gamma_field(&u)),
                ("p_star", Field::Real(p_star)),
                ("inv_p_star", Field::Real(1.0 / p_star)),
            ])
        }
        Command::LambdaThreshold { l, r } => Table::record(vec![("lambda0", Field::Real(lambda_threshold(l, r)?))]),
        Command::WLambda { l, r, p, lambda } => {
            PillDeal::new(l, r, p)?;
            let class = classification_record(l, r, lambda)?;
            Table::record(vec![
                ("lambda", Field::Real(lambda)),
                ("p", Field::Real(p)),
                ("w_value", Field::Money(w_lambda(l, r, p, lambda))),
                ("limit", Field::Money(w_lambda_limit(l, r, lambda))),
                ("accepts", Field::Bool(w_lambda(l, r, p, lambda) > l)),
                ("lambda0", Field::Real(class.lambda0)),
            ])
        }
        Command::Classify { l, r, lambda } => {
            let record = classification_record(l, r, lambda)?;
            if format == Format::Json {
                return write_json(out, &record);
            }
            let (class, p_star) = match record.class {
                AgentClass::NeverAccepts => ("never", Field::Missing),
                AgentClass::AcceptsBelow { p_star } => ("accepts_below", Field::Real(p_star)),
            };
            Table::record(vec![
                ("lambda", Field::Real(record.lambda)),
                ("lambda0", Field::Real(record.lambda0)),
                ("class", Field::Text(class.into())),
                ("p_star", p_star),
            ])
        }
        Command::Sweep(args) => sweep(&args)?,
        Command::Simulate(args) => return run_simulate(args, format, out),
        Command::Tables => return run_tables(format, out),
    };
    table.write(format, out)?;
    Ok(())
}

fn write_json(out: &mut impl Write, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.into()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn sweep(args: &SweepArgs) -> Result<Table, CliError> {
    require(args.inv_p_from > 1.0 && args.inv_p_to > 1.0, || {
        format!("1/p bounds must exceed 1, got {} and {}", args.inv_p_from, args.inv_p_to)
    })?;
    let grid = log_grid(args.inv_p_from, args.inv_p_to, args.points)?;
    let r = Money(args.r);
    match args.model {
        Model::Eu => {
            let l = Money(args.l.unwrap_or(2e6));
            let curve = |u: &UtilityFamily| sweep_deal_value(u, l, r, &grid);
            if args.gamma.is_some() || args.family == FamilyKind::Linear {
                let u = UtilityArgs { family: args.family, gamma: args.gamma }.utility()?;
                let mut t = Table::new(&["inv_p", "value"]);
                for pt in curve(&u)? {
                    t.push(vec![Field::Real(pt.inv_p), Field::Money(pt.value)]);
                }
                Ok(t)
            } else {
                let mut t = Table::new(&["gamma", "inv_p", "value"]);
                for e in [-5.0, -4.5, -4.95] {
                    let u = args.family.with_gamma(10f64.powf(e))?;
                    for pt in curve(&u)? {
                        t.push(vec![gamma_field(&u), Field::Real(pt.inv_p), Field::Money(pt.value)]);
                    }
                }
                Ok(t)
            }
        }
        Model::Cat => {
            let l = args.l.unwrap_or(3e6);
            let curve = |lambda: f64| -> Result<Vec<(f64, f64)>, CliError> {
                classification_record(l, r.0, lambda)?;
                Ok(grid.iter().map(|&inv_p| (inv_p, w_lambda(l, r.0, 1.0 / inv_p, lambda))).collect())
            };
            match args.lambda {
                Some(lambda) => {
                    let mut t = Table::new(&["inv_p", "w_value"]);
                    for (inv_p, w) in curve(lambda)? {
                        t.push(vec![Field::Real(inv_p), Field::Money(w)]);
                    }
                    Ok(t)
                }
                None => {
                    let mut t = Table::new(&["lambda", "inv_p", "w_value"]);
                    for lambda in [0.95, 0.90] {
                        for (inv_p, w) in curve(lambda)? {
                            t.push(vec![Field::Real(lambda), Field::Real(inv_p), Field::Money(w)]);
                        }
                    }
                    Ok(t)
                }
            }
        }
    }
}

fn simulation_config(args: &SimulateArgs) -> Result<SimConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => SimConfig::load(path).map_err(CliError::Usage)?,
        None => SimConfig::default(),
    };
    let s = &mut cfg.spec;
    if let Some(v) = args.n_agents {
        s.n_agents = v;
    }
    let overrides = [
        (&mut s.eu_fraction, args.eu_fraction),
        (&mut s.l_min, args.l_min),
        (&mut s.l_max, args.l_max),
        (&mut s.gamma_exp_lo, args.gamma_exp_lo),
        (&mut s.gamma_exp_hi, args.gamma_exp_hi),
        (&mut s.lambda_lo, args.lambda_lo),
        (&mut s.lambda_hi, args.lambda_hi),
        (&mut cfg.r, args.r),
        (&mut cfg.p, args.p),
    ];
    for (slot, value) in overrides {
        if let Some(v) = value {
            *slot = v;
        }
    }
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }
    Ok(cfg)
}

fn run_simulate(args: SimulateArgs, format: Format, out: &mut impl Write) -> Result<(), CliError> {
    let mut cfg = simulation_config(&args)?;
    let seed = match cfg.seed {
        Some(seed) => seed,
        None => {
            let seed = rand::random::<u64>();
            eprintln!("seed: {seed} (chosen at random; pass --seed {seed} to reproduce)");
            seed
        }
    };
    cfg.spec.seed = seed;
    let deal = PillDeal::new(cfg.spec.l_min, cfg.r, cfg.p)?;
    let outcome = simulate(&cfg.spec, &deal)?;
    let summary = summarize(&outcome);

    if let Some(path) = &args.agents_csv {
        let mut w = csv::Writer::from_writer(File::create(path)?);
        w.write_record(["agent", "kind", "l", "gamma_or_lambda", "decision", "never_taker"])?;
        for rec in &outcome.records {
            w.write_record([
                rec.agent.index.to_string(),
                rec.agent.kind.label().to_string(),
                output::full_precision(rec.agent.l),
                output::full_precision(rec.agent.kind.parameter()),
                if rec.accepted { "accept" } else { "reject" }.to_string(),
                rec.never_taker.to_string(),
            ])?;
        }
        w.flush()?;
    }

    if format == Format::Json {
        #[derive(Serialize)]
        struct Report<'a> {
            seed: u64,
            r: f64,
            p: f64,
            spec: &'a catrisk_core::PopulationSpec,
            accept_count: usize,
            reject_count: usize,
            never_count: usize,
            summary: &'a catrisk_core::Summary,
        }
        return write_json(
            out,
            &Report {
                seed,
                r: cfg.r,
                p: cfg.p,
                spec: &cfg.spec,
                accept_count: outcome.accept_count,
                reject_count: outcome.reject_count,
                never_count: outcome.never_count,
                summary: &summary,
            },
        );
    }
    let median_l = |g: &catrisk_core::population::GroupQuartiles| g.l.map_or(Field::Missing, |q| Field::Money(q.median));
    Table::record(vec![
        ("seed", Field::Text(seed.to_string())),
        ("n_agents", Field::Count(summary.n_agents)),
        ("r", Field::Money(cfg.r)),
        ("p", Field::Real(cfg.p)),
        ("accept_count", Field::Count(outcome.accept_count)),
        ("reject_count", Field::Count(outcome.reject_count)),
        ("never_count", Field::Count(outcome.never_count)),
        ("accept_fraction", Field::Real(summary.accept_fraction)),
        ("conditional_reject_fraction", Field::Real(summary.conditional_reject_fraction)),
        ("never_fraction", Field::Real(summary.never_fraction)),
        ("median_l_accepted", median_l(&summary.accepted)),
        ("median_l_rejected", median_l(&summary.rejected)),
        ("median_l_never", median_l(&summary.never)),
    ])
    .write(format, out)?;
    Ok(())
}

fn run_tables(format: Format, out: &mut impl Write) -> Result<(), CliError> {
    let report = emit_tables_report();
    let failed = report.failures().count();
    if format == Format::Json {
        #[derive(Serialize)]
        struct Report<'a> {
            all_pass: bool,
            cells: &'a [Cell],
        }
        write_json(out, &Report { all_pass: report.all_pass(), cells: &report.cells })?;
    } else {
        let mut t = Table::new(&["table", "cell", "computed", "expected", "tolerance", "status"]);
        for c in &report.cells {
            let computed = match (&c.computed, &c.error) {
                (Some(v), _) => Field::Real(*v),
                (None, Some(e)) => Field::Text(format!("error: {e}")),
                (None, None) => Field::Missing,
            };
            t.push(vec![
                Field::Text(c.table.into()),
                Field::Text(c.label.clone()),
                computed,
                Field::Real(c.expected),
                Field::Text(c.tolerance.describe()),
                Field::Text(if c.pass { "PASS" } else { "FAIL" }.into()),
            ]);
        }
        t.write(format, out)?;
        if format == Format::Table {
            writeln!(out, "\n{} cells: {} pass, {failed} fail", report.cells.len(), report.cells.len() - failed)?;
        }
    }
    if failed > 0 {
        return Err(CliError::TablesFailed(failed));
    }
    Ok(())
}
