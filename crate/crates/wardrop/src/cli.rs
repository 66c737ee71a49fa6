//! `cg` command-line front end. Thin wrapper over the library: each
//! subcommand parses flags, calls one library entry point, and serializes the
//! result. Exit codes: 0 success, 1 invalid input, 2 non-convergence.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::atomic::{
    monomial_basis, solve_lp, Budget, DiscreteLatency, DEFAULT_PIVOT_CAP,
};
use crate::incentive::{
    affine_mechanism, mc_toll, nominal_equivalent, opt_bounded_subsidy_affine,
    opt_bounded_toll_affine, scaled_mc_toll, Mechanism, SignClass,
};
use crate::network::RoutingProblem;
use crate::poa::{
    closed_form_bound, fig1_instance, parallel_affine_instance, pigou_instance, poa_instance,
    run_sweep, SweepPreset,
};
use crate::solver::SolverConfig;
use crate::{invalid, Error, Result};

#[derive(Parser)]
#[command(name = "cg", version, about = "Congestion-game equilibria, incentives, and efficiency bounds")]
struct Cli {
    /// RNG seed for solver restarts (falls back to CG_SEED, then 0)
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute worst-case equilibrium vs optimum on one instance
    Analyze(AnalyzeArgs),
    /// Evaluate a preset bound curve, optionally with empirical ratios
    Sweep(SweepArgs),
    /// Solve the finite-player smoothness program for a latency basis
    AtomicLp(AtomicLpArgs),
    /// Re-derive the built-in verification scenarios and report pass/fail
    Verify(VerifyArgs),
    /// Emit a reference instance as JSON
    Gen(GenArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Instance file (.cg.json)
    #[arg(long)]
    instance: PathBuf,
    /// Built-in mechanism: none|mc|smc|affine|opt-toll|opt-subsidy
    #[arg(long, default_value = "none")]
    mechanism: String,
    /// JSON mechanism description (overrides --mechanism)
    #[arg(long)]
    mechanism_file: Option<PathBuf>,
    /// Wrap the mechanism in its budget-shifted equivalent with this factor
    #[arg(long)]
    lambda: Option<f64>,
    /// Budget parameter for opt-toll / opt-subsidy
    #[arg(long)]
    beta: Option<f64>,
    /// Slope coefficient for the affine mechanism
    #[arg(long)]
    k1: Option<f64>,
    /// Offset coefficient for the affine mechanism
    #[arg(long)]
    k2: Option<f64>,
    /// Lower sensitivity bound (also the smc design range)
    #[arg(long, default_value_t = 1.0)]
    s_l: f64,
    /// Upper sensitivity bound (also the smc design range)
    #[arg(long, default_value_t = 1.0)]
    s_u: f64,
    /// Guarantee to compare against (default: closed form when one applies)
    #[arg(long)]
    bound: Option<f64>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// fig3 | fig4 | fig5
    #[arg(long)]
    preset: String,
    /// Also measure equilibrium ratios on the preset's instances
    #[arg(long)]
    empirical: bool,
    /// Worker threads (output is identical for any value)
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// csv | json
    #[arg(long, default_value = "csv")]
    format: String,
    /// Write here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AtomicLpArgs {
    /// "poly<k>" for monomials up to degree k, or a JSON file of basis rows
    /// (each an array of n+1 values starting at 0)
    #[arg(long, default_value = "poly1")]
    basis: String,
    /// Number of players
    #[arg(long)]
    n: usize,
    /// Budget parameter; omit for the unconstrained program
    #[arg(long)]
    beta: Option<f64>,
    /// toll | subsidy (required with --beta)
    #[arg(long)]
    sign: Option<String>,
    /// Simplex pivot cap
    #[arg(long, default_value_t = DEFAULT_PIVOT_CAP)]
    pivot_cap: usize,
    /// Write the constraint systems in text form here
    #[arg(long)]
    lp_dump: Option<PathBuf>,
    /// Write the JSON result here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Only run scenarios whose name contains this substring
    #[arg(long)]
    filter: Option<String>,
}

#[derive(Args)]
struct GenArgs {
    /// fig1 | pigou | parallel
    #[arg(long)]
    kind: String,
    /// Pigou exponent
    #[arg(long)]
    p: Option<u32>,
    /// Comma-separated slopes for --kind parallel, e.g. "1,0"
    #[arg(long)]
    a: Option<String>,
    /// Comma-separated offsets for --kind parallel, e.g. "0,1"
    #[arg(long)]
    b: Option<String>,
    /// Demand rate for --kind parallel
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
    /// Write here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let seed = match resolve_seed(cli.seed) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match run(cli.command, seed) {
        Ok(code) => code,
        Err(Error::NonConvergence(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("CG_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| invalid(format!("CG_SEED must be an unsigned integer (got {v:?})"))),
        Err(_) => Ok(0),
    }
}

fn run(command: Command, seed: u64) -> Result<ExitCode> {
    let cfg = SolverConfig { seed, ..SolverConfig::default() };
    match command {
        Command::Analyze(args) => analyze(args, &cfg),
        Command::Sweep(args) => sweep(args, &cfg),
        Command::AtomicLp(args) => atomic_lp(args),
        Command::Verify(args) => verify(args, &cfg),
        Command::Gen(args) => gen(args, &cfg),
    }
}

fn write_out(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn analyze(args: AnalyzeArgs, cfg: &SolverConfig) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&args.instance)
        .map_err(|e| invalid(format!("cannot read {}: {e}", args.instance.display())))?;
    let problem = RoutingProblem::from_json(&text)?;
    let mechanism = build_mechanism(&args)?;
    let bound = args.bound.or_else(|| {
        mechanism.as_ref().and_then(|m| closed_form_bound(m, args.s_l, args.s_u))
    });
    let report = poa_instance(&problem, mechanism.as_ref(), args.s_l, args.s_u, bound, cfg)?;
    let mut out = serde_json::to_string_pretty(&report)?;
    out.push('\n');
    write_out(args.output.as_deref(), &out)?;
    if !report.converged {
        return Err(Error::NonConvergence(format!(
            "equilibrium tolerance {} not reached on {:?}",
            cfg.epsilon, report.instance
        )));
    }
    Ok(ExitCode::SUCCESS)
}

fn build_mechanism(args: &AnalyzeArgs) -> Result<Option<Mechanism>> {
    let base = if let Some(path) = &args.mechanism_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        let m: Mechanism = serde_json::from_str(&text)?;
        m.validate()?;
        Some(m)
    } else {
        match args.mechanism.as_str() {
            "none" => None,
            "mc" => Some(mc_toll()),
            "smc" => Some(scaled_mc_toll(args.s_l, args.s_u)?),
            "affine" => {
                let k1 = args.k1.ok_or_else(|| invalid("--mechanism affine needs --k1"))?;
                let k2 = args.k2.ok_or_else(|| invalid("--mechanism affine needs --k2"))?;
                Some(affine_mechanism(k1, k2)?)
            }
            "opt-toll" => {
                let beta = args.beta.ok_or_else(|| invalid("--mechanism opt-toll needs --beta"))?;
                Some(opt_bounded_toll_affine(beta)?)
            }
            "opt-subsidy" => {
                let beta =
                    args.beta.ok_or_else(|| invalid("--mechanism opt-subsidy needs --beta"))?;
                Some(opt_bounded_subsidy_affine(beta)?)
            }
            other => {
                return Err(invalid(format!(
                    "unknown mechanism {other:?} (want none|mc|smc|affine|opt-toll|opt-subsidy)"
                )))
            }
        }
    };
    match (base, args.lambda) {
        (Some(m), Some(lambda)) => Ok(Some(nominal_equivalent(m, lambda)?)),
        (None, Some(_)) => Err(invalid("--lambda needs a mechanism to transform")),
        (m, None) => Ok(m),
    }
}

fn sweep(args: SweepArgs, cfg: &SolverConfig) -> Result<ExitCode> {
    let preset = SweepPreset::parse(&args.preset)?;
    if args.jobs == 0 {
        return Err(invalid("--jobs must be at least 1"));
    }
    let curve = run_sweep(preset, args.empirical, cfg, args.jobs)?;
    let out = match args.format.as_str() {
        "csv" => curve.to_csv(),
        "json" => {
            let mut s = serde_json::to_string_pretty(&curve)?;
            s.push('\n');
            s
        }
        other => return Err(invalid(format!("unknown format {other:?} (want csv|json)"))),
    };
    write_out(args.output.as_deref(), &out)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct AtomicOut {
    n: usize,
    rho: Vec<f64>,
    poa: f64,
    incentives: Vec<Vec<f64>>,
}

fn atomic_lp(args: AtomicLpArgs) -> Result<ExitCode> {
    let basis = parse_basis(&args.basis, args.n)?;
    let budget = match (args.beta, args.sign.as_deref()) {
        (None, None) => None,
        (None, Some(_)) => return Err(invalid("--sign needs --beta")),
        (Some(_), None) => return Err(invalid("--beta needs --sign toll|subsidy")),
        (Some(beta), Some(sign)) => {
            let sign = match sign {
                "toll" => SignClass::Toll,
                "subsidy" => SignClass::Subsidy,
                other => return Err(invalid(format!("unknown sign {other:?} (want toll|subsidy)"))),
            };
            Some(Budget { beta, sign })
        }
    };
    let mut rho = Vec::new();
    let mut incentives = Vec::new();
    let mut dumps = Vec::new();
    for (j, b) in basis.iter().enumerate() {
        if args.lp_dump.is_some() {
            let mut lp = crate::atomic::build_lp(b, args.n)?;
            if let Some(budget) = budget {
                crate::atomic::add_budget_constraints(&mut lp, b, args.n, budget)?;
            }
            dumps.push(format!("# basis[{j}]\n{}", lp.dump()));
        }
        let sol = solve_lp(b, args.n, budget, args.pivot_cap)?;
        incentives.push(crate::atomic::optimal_incentive_from_lp(&sol, b)?);
        rho.push(sol.rho);
    }
    if let Some(path) = &args.lp_dump {
        std::fs::write(path, dumps.join("\n"))?;
    }
    let worst = rho.iter().cloned().fold(f64::INFINITY, f64::min);
    if worst <= 1e-12 {
        return Err(Error::Lp("smoothness factor collapsed to zero".into()));
    }
    let report = AtomicOut { n: args.n, rho, poa: (1.0 / worst).max(1.0), incentives };
    let mut out = serde_json::to_string_pretty(&report)?;
    out.push('\n');
    write_out(args.output.as_deref(), &out)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_basis(spec: &str, n: usize) -> Result<Vec<DiscreteLatency>> {
    if let Some(deg) = spec.strip_prefix("poly") {
        let degree: u32 = deg
            .parse()
            .map_err(|_| invalid(format!("bad basis {spec:?}: want poly<k> or a JSON file")))?;
        return Ok(monomial_basis(degree, n));
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| invalid(format!("basis {spec:?} is neither poly<k> nor a readable file: {e}")))?;
    let rows: Vec<Vec<f64>> = serde_json::from_str(&text)?;
    if rows.is_empty() {
        return Err(invalid("basis file holds no rows"));
    }
    rows.into_iter()
        .map(|values| {
            if values.len() != n + 1 {
                return Err(invalid(format!(
                    "basis row has {} values; need n+1 = {} (loads 0..=n)",
                    values.len(),
                    n + 1
                )));
            }
            DiscreteLatency::new(values)
        })
        .collect()
}

fn verify(args: VerifyArgs, cfg: &SolverConfig) -> Result<ExitCode> {
    let mut ran = 0;
    let mut failed = 0;
    for scenario in crate::checks::scenarios() {
        if let Some(f) = &args.filter {
            if !scenario.name.contains(f.as_str()) {
                continue;
            }
        }
        ran += 1;
        match (scenario.run)(cfg) {
            Ok(()) => println!("ok {} — {}", scenario.name, scenario.what),
            Err(e) => {
                failed += 1;
                println!("FAIL {} — {}: {e}", scenario.name, scenario.what);
            }
        }
    }
    if ran == 0 {
        return Err(invalid(format!("no scenario matches filter {:?}", args.filter)));
    }
    println!("{ran} scenarios, {failed} failures");
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn gen(args: GenArgs, cfg: &SolverConfig) -> Result<ExitCode> {
    let problem = match args.kind.as_str() {
        "fig1" => fig1_instance(),
        "pigou" => pigou_instance(args.p.ok_or_else(|| invalid("--kind pigou needs --p"))?)?,
        "parallel" => {
            let a = parse_list(
                args.a.as_deref().ok_or_else(|| invalid("--kind parallel needs --a"))?,
            )?;
            let b = parse_list(
                args.b.as_deref().ok_or_else(|| invalid("--kind parallel needs --b"))?,
            )?;
            parallel_affine_instance(&a, &b, args.rate, cfg)?.0
        }
        other => {
            return Err(invalid(format!("unknown kind {other:?} (want fig1|pigou|parallel)")))
        }
    };
    write_out(args.output.as_deref(), &problem.to_json())?;
    Ok(ExitCode::SUCCESS)
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| invalid(format!("bad number {tok:?} in list {s:?}")))
        })
        .collect()
}
