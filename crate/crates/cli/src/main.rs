//! `thciz` — command-line frontend: regime classification, leading-order
//! enumeration, exact coefficients, trace-invariants, scaling fits, exact
//! moments and Monte Carlo convergence tables.
//!
//! Exit codes: 0 on success, 2 on invalid input, 3 when a size cap would be
//! exceeded, 1 on any other failure.

mod parse;

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use thciz::coeff::{exact_moment, leading_weingarten};
use thciz::montecarlo::{convergence_csv, convergence_table, ConvergenceConfig};
use thciz::regimes::{
    brute_force_leading, classify, enumerate_leading, leading_graphs_csv, Family, LeadingGraph, Regime, ScalingAnsatz,
    SideExponents,
};
use thciz::tensors::{
    build_state, closed_form_invariant, evaluate_trace_invariant, fit_scaling, scaling_samples, trace_table, DenseOperator,
    StateSpec,
};
use thciz::{Error, PermTuple};

#[derive(Debug, Parser, Serialize)]
#[command(name = "thciz", version, about = "Leading-order asymptotics of the tensor HCIZ integral")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Serialize)]
struct Global {
    /// Seed of the counter-based random streams.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format (each command has its own default).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Classify a scaling ansatz into its asymptotic regime.
    Classify(ClassifyArgs),
    /// List the leading-order pairs (σ, τ) with their coefficients.
    Enumerate(EnumerateArgs),
    /// Exact leading-order coefficient f[σ, τ].
    Coefficient(CoefficientArgs),
    /// Monte Carlo cumulants against the leading-order prediction.
    Simulate(SimulateArgs),
    /// Fit the scaling exponents (β, ε) of a state family.
    Fit(FitArgs),
    /// Evaluate a trace-invariant Tr_σ of a state or tensor file.
    Invariant(InvariantArgs),
    /// Exact finite-N moments and cumulants from the exact Weingarten calculus.
    OracleExact(OracleArgs),
    /// Write a state to the binary tensor format.
    ExportState(ExportArgs),
}

#[derive(Debug, Args, Serialize)]
struct AnsatzArgs {
    /// Number of tensor factors.
    #[arg(long = "D")]
    d: usize,
    /// Family: D1, micro-a or symmetric (default: D1 for D = 1, micro-a otherwise).
    #[arg(long, value_parser = parse::family)]
    family: Option<Family>,
    /// β of B (micro-a) or of both sides (symmetric); rationals such as 1/2 accepted.
    #[arg(long, value_parser = parse::real)]
    beta: Option<f64>,
    /// ε of B (micro-a) or of both sides (symmetric).
    #[arg(long, value_parser = parse::real)]
    eps: Option<f64>,
    #[arg(long = "beta-a", value_parser = parse::real)]
    beta_a: Option<f64>,
    #[arg(long = "beta-b", value_parser = parse::real)]
    beta_b: Option<f64>,
    #[arg(long = "eps-a", value_parser = parse::real)]
    eps_a: Option<f64>,
    #[arg(long = "eps-b", value_parser = parse::real)]
    eps_b: Option<f64>,
}

impl AnsatzArgs {
    fn family(&self) -> Family {
        self.family.unwrap_or(if self.d == 1 { Family::D1 } else { Family::MicroA })
    }

    fn ansatz(&self) -> Result<ScalingAnsatz, Error> {
        let pick = |a: Option<f64>, b: Option<f64>| a.or(b).unwrap_or(0.0);
        Ok(match self.family() {
            Family::D1 => {
                if self.eps.is_some() || self.eps_a.is_some() || self.eps_b.is_some() {
                    return Err(Error::InvalidArgument("ε is meaningless for D = 1".into()));
                }
                ScalingAnsatz::d1(self.beta_a.unwrap_or(0.0), pick(self.beta_b, self.beta))
            }
            Family::MicroA => {
                let a = SideExponents { alpha: 0.0, beta: self.beta_a.unwrap_or(0.0), eps: self.eps_a.unwrap_or(0.0) };
                let b = SideExponents { alpha: 0.0, beta: pick(self.beta_b, self.beta), eps: pick(self.eps_b, self.eps) };
                ScalingAnsatz::new(a, b)
            }
            Family::Symmetric => {
                let beta = self.beta.or(self.beta_b).or(self.beta_a).unwrap_or(0.0);
                let eps = self.eps.or(self.eps_b).or(self.eps_a).unwrap_or(0.0);
                ScalingAnsatz::symmetric(beta, eps)
            }
        })
    }
}

#[derive(Debug, Args, Serialize)]
struct ClassifyArgs {
    #[command(flatten)]
    ansatz: AnsatzArgs,
}

#[derive(Debug, Args, Serialize)]
struct EnumerateArgs {
    #[command(flatten)]
    ansatz: AnsatzArgs,
    /// Order of the cumulant.
    #[arg(long)]
    n: usize,
    /// Regime label (I..VIII, S-I..S-VIII, D1-1..D1-6); overrides the ansatz.
    #[arg(long, value_parser = parse::regime)]
    regime: Option<Regime>,
    /// Maximize the total exponent over all pairs instead of using the structured generator.
    #[arg(long = "brute-force")]
    brute_force: bool,
}

#[derive(Debug, Args, Serialize)]
struct CoefficientArgs {
    /// σ as comma-separated images per factor, factors separated by ';' (e.g. "2,1;2,1").
    #[arg(long, value_parser = parse::tuple)]
    sigma: String,
    #[arg(long, value_parser = parse::tuple)]
    tau: String,
}

#[derive(Debug, Args, Serialize)]
struct SimulateArgs {
    /// Regime whose standard witness states are used when --state-a/--state-b are absent (V or VI).
    #[arg(long, value_parser = parse::regime)]
    regime: Option<Regime>,
    #[arg(long = "state-a", value_parser = parse::state)]
    state_a: Option<StateSpec>,
    #[arg(long = "state-b", value_parser = parse::state)]
    state_b: Option<StateSpec>,
    #[arg(long, value_parser = parse::family)]
    family: Option<Family>,
    #[arg(long = "D")]
    d: usize,
    /// Local dimensions, comma separated.
    #[arg(long = "N", value_delimiter = ',', required = true)]
    dims: Vec<usize>,
    /// Cumulant orders, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    n: Vec<usize>,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
}

#[derive(Debug, Args, Serialize)]
struct FitArgs {
    /// State family (shorthand, JSON or @file); e.g. max-mixed, one-uniform, interpolation:1,2,2.
    #[arg(long, value_parser = parse::state)]
    family: StateSpec,
    #[arg(long = "D")]
    d: usize,
    #[arg(long = "N", value_delimiter = ',', required = true)]
    dims: Vec<usize>,
    /// Orders n whose tuples S_n^D enter the fit.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    n: Vec<usize>,
}

#[derive(Debug, Args, Serialize)]
struct InvariantArgs {
    /// State family; ignored when --tensor is given.
    #[arg(long, value_parser = parse::state)]
    state: Option<StateSpec>,
    /// Binary tensor file (THCIZ1 format).
    #[arg(long)]
    tensor: Option<std::path::PathBuf>,
    #[arg(long = "D")]
    d: Option<usize>,
    #[arg(long = "N")]
    dim: Option<usize>,
    #[arg(long, value_parser = parse::tuple)]
    sigma: String,
}

#[derive(Debug, Args, Serialize)]
struct OracleArgs {
    #[arg(long = "state-a", value_parser = parse::state)]
    state_a: StateSpec,
    #[arg(long = "state-b", value_parser = parse::state)]
    state_b: StateSpec,
    #[arg(long = "D")]
    d: usize,
    #[arg(long = "N")]
    dim: usize,
    /// Highest moment order.
    #[arg(long)]
    n: usize,
}

#[derive(Debug, Args, Serialize)]
struct ExportArgs {
    #[arg(long, value_parser = parse::state)]
    state: StateSpec,
    #[arg(long = "D")]
    d: usize,
    #[arg(long = "N")]
    dim: usize,
    #[arg(long)]
    out: std::path::PathBuf,
}

fn parse_tuple(s: &str) -> Result<PermTuple, Error> {
    s.parse()
}

fn json_string(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable output") + "\n"
}

fn classify_cmd(a: &ClassifyArgs, fmt: Format) -> Result<String, Error> {
    let report = classify(a.ansatz.d, &a.ansatz.ansatz()?, a.ansatz.family())?;
    Ok(match fmt {
        Format::Json => json_string(&report),
        Format::Csv => format!(
            "family,regime,gamma,delta,prolific\n{},{},{},{},{}\n",
            report.family,
            report.regime.label(),
            report.effective_gamma(),
            report.delta,
            report.prolific
        ),
    })
}

fn enumerate_cmd(a: &EnumerateArgs, fmt: Format) -> Result<String, Error> {
    let d = a.ansatz.d;
    let graphs: Vec<LeadingGraph> = if a.brute_force {
        let ans = a.ansatz.ansatz()?;
        let report = classify(d, &ans, a.ansatz.family())?;
        let bf = brute_force_leading(d, a.n, &ans, report.gamma)?;
        eprintln!("# brute force: regime {}, max exponent {}", report.regime.label(), bf.max_exponent);
        bf.argmax
            .into_iter()
            .map(|(sigma, tau)| Ok(LeadingGraph { coeff: leading_weingarten(&sigma, &tau)?, sigma, tau }))
            .collect::<Result<_, Error>>()?
    } else {
        let regime = match a.regime {
            Some(r) => r,
            None => classify(d, &a.ansatz.ansatz()?, a.ansatz.family())?.regime,
        };
        eprintln!("# regime {}", regime.label());
        enumerate_leading(d, a.n, regime)?
    };
    eprintln!("# {} leading pairs", graphs.len());
    Ok(match fmt {
        Format::Csv => leading_graphs_csv(&graphs),
        Format::Json => json_string(&graphs),
    })
}

fn coefficient_cmd(a: &CoefficientArgs, fmt: Format) -> Result<String, Error> {
    let sigma = parse_tuple(&a.sigma)?;
    let tau = parse_tuple(&a.tau)?;
    let f = leading_weingarten(&sigma, &tau)?;
    let decimal = f.to_decimal_string(12);
    Ok(match fmt {
        Format::Json => json_string(&json!({ "sigma": a.sigma, "tau": a.tau, "exact": f.to_string(), "decimal": decimal })),
        Format::Csv => format!("sigma,tau,exact,decimal\n\"{}\",\"{}\",{},{}\n", a.sigma, a.tau, f, decimal),
    })
}

fn simulate_cmd(a: &SimulateArgs, seed: u64, fmt: Format) -> Result<String, Error> {
    let (state_a, state_b) = match (&a.state_a, &a.state_b, a.regime) {
        (Some(x), Some(y), _) => (x.clone(), y.clone()),
        (None, None, Some(r)) if r.family == Family::MicroA && r.index == 5 => {
            (StateSpec::PureSeparable { seed: None }, StateSpec::OneUniform)
        }
        (None, None, Some(r)) if r.family == Family::MicroA && r.index == 6 => {
            (StateSpec::PureSeparable { seed: None }, StateSpec::PureSeparable { seed: Some(seed) })
        }
        (None, None, Some(r)) => {
            return Err(Error::InvalidArgument(format!(
                "no built-in witness states for regime {}; pass --state-a and --state-b",
                r.label()
            )))
        }
        _ => return Err(Error::InvalidArgument("give --regime or both --state-a and --state-b".into())),
    };
    let family = a.family.or(a.regime.map(|r| r.family)).unwrap_or(if a.d == 1 { Family::D1 } else { Family::MicroA });
    let cfg = ConvergenceConfig {
        state_a,
        state_b,
        d: a.d,
        dims: a.dims.clone(),
        orders: a.n.clone(),
        samples: a.samples,
        seed,
        family,
    };
    let rows = convergence_table(&cfg)?;
    if let Some(expected) = a.regime {
        if let Some(r) = rows.iter().find(|r| r.regime != expected.label()) {
            eprintln!("# warning: states classify as {} at N = {}, not {}", r.regime, r.dim, expected.label());
        }
    }
    Ok(match fmt {
        Format::Csv => convergence_csv(&rows),
        Format::Json => json_string(&rows),
    })
}

fn fit_cmd(a: &FitArgs, fmt: Format) -> Result<String, Error> {
    let tuples: Vec<PermTuple> = a.n.iter().flat_map(|&n| PermTuple::all(n, a.d)).collect();
    let samples = scaling_samples(&a.family, &a.dims, a.d, &tuples)?;
    let fit = fit_scaling(&samples)?;
    Ok(match fmt {
        Format::Json => json_string(&fit),
        Format::Csv => format!("beta,eps,residual\n{},{},{:e}\n", fit.beta_hat, fit.eps_hat, fit.residual),
    })
}

fn invariant_cmd(a: &InvariantArgs, fmt: Format) -> Result<String, Error> {
    let sigma = parse_tuple(&a.sigma)?;
    let (op, exact): (DenseOperator, Option<String>) = match (&a.tensor, &a.state) {
        (Some(path), _) => (DenseOperator::load(path)?.0, None),
        (None, Some(spec)) => {
            let (d, dim) = match (a.d, a.dim) {
                (Some(d), Some(n)) => (d, n),
                _ => return Err(Error::InvalidArgument("--D and --N are required with --state".into())),
            };
            let op = build_state(spec, dim, d)?;
            let exact = closed_form_invariant(spec, dim, d, &sigma)?.map(|r| r.to_string());
            (op, exact)
        }
        (None, None) => return Err(Error::InvalidArgument("give --state or --tensor".into())),
    };
    let v = evaluate_trace_invariant(&op, &sigma)?;
    Ok(match fmt {
        Format::Json => json_string(&json!({ "sigma": a.sigma, "re": v.re, "im": v.im, "exact": exact })),
        Format::Csv => format!("sigma,re,im,exact\n\"{}\",{},{},{}\n", a.sigma, v.re, v.im, exact.unwrap_or_default()),
    })
}

fn oracle_cmd(a: &OracleArgs, fmt: Format) -> Result<String, Error> {
    if a.n == 0 {
        return Err(Error::InvalidArgument("moment order must be positive".into()));
    }
    let op_a = build_state(&a.state_a, a.dim, a.d)?;
    let op_b = build_state(&a.state_b, a.dim, a.d)?;
    let mut moments = Vec::new();
    for n in 1..=a.n {
        let ta = trace_table(&op_a, n)?;
        let tb = trace_table(&op_b, n)?;
        moments.push(exact_moment(&ta, &tb, a.dim as u64)?);
    }
    let re: Vec<f64> = moments.iter().map(|m| m.re).collect();
    let cumulants = real_cumulants(&re);
    Ok(match fmt {
        Format::Csv => {
            let mut s = String::from("n,moment_re,moment_im,cumulant\n");
            for (k, (m, c)) in moments.iter().zip(&cumulants).enumerate() {
                let _ = writeln!(s, "{},{:.15e},{:.3e},{:.15e}", k + 1, m.re, m.im, c);
            }
            s
        }
        Format::Json => json_string(
            &moments
                .iter()
                .zip(&cumulants)
                .enumerate()
                .map(|(k, (m, c))| json!({ "n": k + 1, "moment_re": m.re, "moment_im": m.im, "cumulant": c }))
                .collect::<Vec<_>>(),
        ),
    })
}

fn real_cumulants(mu: &[f64]) -> Vec<f64> {
    let mut kappa: Vec<f64> = Vec::new();
    for n in 1..=mu.len() {
        let mut v = mu[n - 1];
        let mut binom = 1.0;
        for m in 1..n {
            v -= binom * kappa[m - 1] * mu[n - m - 1];
            binom = binom * (n - m) as f64 / m as f64;
        }
        kappa.push(v);
    }
    kappa
}

fn export_cmd(a: &ExportArgs) -> Result<String, Error> {
    let op = build_state(&a.state, a.dim, a.d)?;
    let flags = op.density_flags(thciz::tensors::CHECK_TOLERANCE);
    op.save(&a.out, flags)?;
    Ok(format!("{}\n", a.out.display()))
}

fn run(cli: &Cli) -> Result<String, Error> {
    let g = &cli.global;
    let fmt = |default: Format| g.format.unwrap_or(default);
    match &cli.command {
        Command::Classify(a) => classify_cmd(a, fmt(Format::Json)),
        Command::Enumerate(a) => enumerate_cmd(a, fmt(Format::Csv)),
        Command::Coefficient(a) => coefficient_cmd(a, fmt(Format::Json)),
        Command::Simulate(a) => simulate_cmd(a, g.seed, fmt(Format::Csv)),
        Command::Fit(a) => fit_cmd(a, fmt(Format::Json)),
        Command::Invariant(a) => invariant_cmd(a, fmt(Format::Json)),
        Command::OracleExact(a) => oracle_cmd(a, fmt(Format::Csv)),
        Command::ExportState(a) => export_cmd(a),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CapExceeded { .. } => 3,
        Error::Io(_) | Error::Numerical(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    eprintln!("# config: {}", serde_json::to_string(&cli).expect("serializable config"));
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot configure {t} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
