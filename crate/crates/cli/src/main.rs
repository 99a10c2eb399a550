//! `spinboson`: kernel norms, radius certificates, simulation of `Z(α, T)`,
//! cluster coefficients, the energy series, and self-verification suites.
//!
//! Numbers go to stdout as JSON (CSV only for `coefficient --per-term`),
//! diagnostics to stderr. Exit codes: 0 success, 1 computation or
//! verification failure, 2 usage or configuration error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use spinboson::combinatorics::{DEFAULT_P_MAX, P_HARD_CAP};
use spinboson::integrator::{coefficient_terms, combine, Budget, Method, Mode};
use spinboson::series;
use spinboson::{jump, verify, Error, Kernel, KernelSpec};

#[derive(Parser, Debug)]
#[command(name = "spinboson", version, about = "Cluster-expansion engine for the massless spin-boson ground-state energy")]
struct Cli {
    /// Kernel configuration (JSON). Defaults to the indicator form factor with cutoff 1.
    #[arg(long, global = true, env = "SPINBOSON_KERNEL")]
    kernel: Option<PathBuf>,

    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Largest order allowed for enumeration (at most 6).
    #[arg(long, global = true, default_value_t = DEFAULT_P_MAX)]
    p_max: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kernel norms and h(0).
    Norms,
    /// Radius certificate R_min, its λ counterpart and the constant K.
    Radius {
        /// Interpolation constant in (0, 1).
        #[arg(long, default_value_t = series::DEFAULT_GAMMA)]
        gamma: f64,
    },
    /// Monte Carlo estimate of Z(α, T).
    Simulate {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long)]
        horizon: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Connected coefficient c_p (pinned) or 𝒞_p(T) (with --finite-t).
    Coefficient {
        #[arg(long)]
        p: usize,
        /// Finite horizon T; pinned infinite-volume coefficient when absent.
        #[arg(long)]
        finite_t: Option<f64>,
        /// Point fixed at time 0 in pinned mode.
        #[arg(long, default_value_t = 0)]
        pin: usize,
        #[command(flatten)]
        numerics: Numerics,
        /// Emit one CSV row per term instead of the JSON total.
        #[arg(long)]
        per_term: bool,
    },
    /// Truncated energy series with its remainder bound.
    Energy {
        #[arg(long, conflicts_with = "alpha", required_unless_present = "alpha", allow_hyphen_values = true)]
        lambda: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        /// Truncation order.
        #[arg(long, default_value_t = 2)]
        pmax: usize,
        #[arg(long, default_value_t = series::DEFAULT_GAMMA)]
        gamma: f64,
        #[command(flatten)]
        numerics: Numerics,
    },
    /// Matching, connecting-pair and per-tree counts at order p.
    Counts {
        #[arg(long)]
        p: usize,
    },
    /// Self-verification suites; exit code 1 on failure.
    #[command(subcommand)]
    Verify(Verify),
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// Monte Carlo spin moments against their closed form.
    Moments {
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        tuples: usize,
    },
    /// Forest interpolation identity at random times.
    Bkar {
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Taylor coefficients of Z(α, T) against the exponential of 𝒞_p(T).
    Resummation {
        /// Horizons to test (repeat the flag).
        #[arg(long = "horizon", default_values_t = vec![2.0, 5.0])]
        horizons: Vec<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Combinatorial census up to --p-max and tree counts up to 6.
    Counts,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Quad,
    Mc,
}

#[derive(Args, Debug)]
struct Numerics {
    #[arg(long, value_enum, default_value_t = MethodArg::Quad)]
    method: MethodArg,
    /// Monte Carlo samples per term.
    #[arg(long, default_value_t = 100_000)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative tolerance per quadrature level.
    #[arg(long, default_value_t = 1e-6)]
    rel_tol: f64,
}

impl Numerics {
    fn method(&self) -> Method {
        match self.method {
            MethodArg::Quad => Method::Quadrature,
            MethodArg::Mc => Method::MonteCarlo,
        }
    }

    fn budget(&self) -> Budget {
        Budget {
            samples: self.budget,
            seed: self.seed,
            rel_tol: self.rel_tol,
            ..Budget::default()
        }
    }
}

enum Failure {
    Usage(String),
    Compute(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Json(_) | Error::Argument(_) | Error::Resource { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

fn load_kernel(path: Option<&PathBuf>) -> Result<Kernel, Failure> {
    let spec = match path {
        None => KernelSpec::indicator(1.0),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", p.display())))?;
            KernelSpec::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?
        }
    };
    Kernel::new(spec).map_err(|e| match e {
        Error::Config(_) => Failure::Usage(e.to_string()),
        other => Failure::Compute(other.to_string()),
    })
}

fn emit<T: Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Compute(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn emit_verdict<T: Serialize>(report: &T, pass: bool, what: &str) -> Result<(), Failure> {
    emit(report)?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{what} failed")))
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if cli.p_max > P_HARD_CAP || cli.p_max == 0 {
        return Err(Failure::Usage(format!("--p-max must lie in 1..={P_HARD_CAP}")));
    }
    match &cli.command {
        Command::Norms => {
            let k = load_kernel(cli.kernel.as_ref())?;
            emit(&json!({
                "kernel": k.spec(),
                "norm_inf": k.norm_inf(),
                "norm_l1": k.norm_l1(),
                "h0": k.h(0.0),
            }))
        }
        Command::Radius { gamma } => {
            let k = load_kernel(cli.kernel.as_ref())?;
            let r = series::radius_bound_gamma(&k, *gamma)?;
            emit(&json!({
                "R_min": r,
                "lambda_radius": series::lambda_radius(r),
                "K": series::k_constant(&k, *gamma)?,
                "gamma": gamma,
                "delta": series::delta_gamma(*gamma)?,
            }))
        }
        Command::Simulate { alpha, horizon, samples, seed } => {
            if !(*horizon > 0.0) {
                return Err(Failure::Usage("--horizon must be positive".into()));
            }
            let k = load_kernel(cli.kernel.as_ref())?;
            emit(&jump::estimate_z(*alpha, *horizon, &k, *samples, *seed)?)
        }
        Command::Coefficient { p, finite_t, pin, numerics, per_term } => {
            let k = load_kernel(cli.kernel.as_ref())?;
            let mode = match finite_t {
                Some(t) => Mode::finite(*t),
                None => Mode::Pinned { point: *pin },
            };
            let terms = coefficient_terms(*p, cli.p_max, &k, mode, numerics.method(), &numerics.budget())?;
            let total = combine(*p, mode, numerics.method(), &terms);
            if !total.converged {
                eprintln!("warning: quadrature did not reach the requested tolerance");
            }
            if *per_term {
                println!("index,matching,forest,sign,value,statistical_error,quadrature_tolerance");
                for (i, t) in terms.iter().enumerate() {
                    let pairs = |v: &[(usize, usize)]| v.iter().map(|(a, b)| format!("{a}-{b}")).collect::<Vec<_>>().join(" ");
                    println!(
                        "{i},{},{},{},{},{},{}",
                        pairs(&t.matching),
                        pairs(&t.forest),
                        if t.forest.len() % 2 == 0 { 1 } else { -1 },
                        t.estimate.value,
                        t.estimate.statistical_error,
                        t.estimate.quadrature_tolerance
                    );
                }
                Ok(())
            } else {
                emit(&total)
            }
        }
        Command::Energy { lambda, alpha, pmax, gamma, numerics } => {
            let k = load_kernel(cli.kernel.as_ref())?;
            let a = match (lambda, alpha) {
                (Some(l), _) => series::alpha_from_lambda(*l),
                (None, Some(a)) => *a,
                (None, None) => unreachable!("clap requires one of them"),
            };
            let result = series::energy(a, *pmax, cli.p_max, &k, numerics.method(), &numerics.budget(), *gamma)?;
            if !result.certified {
                eprintln!("warning: |alpha|*K >= 1, the truncated series carries no remainder bound");
            }
            let mut value = serde_json::to_value(&result).map_err(|e| Failure::Compute(e.to_string()))?;
            if let Some(l) = lambda {
                value["lambda"] = json!(l);
            }
            emit(&value)
        }
        Command::Counts { p } => {
            let level = verify::census_level(*p, cli.p_max)?;
            emit(&json!({
                "p": p,
                "matchings": level.matchings,
                "connecting_pairs": level.connecting_pairs,
                "per_tree_max": level.per_tree_max,
                "bound": level.bound,
            }))
        }
        Command::Verify(v) => match v {
            Verify::Moments { samples, seed, tuples } => {
                let r = verify::moment_suite(*tuples, *samples, *seed)?;
                for c in &r.cases {
                    eprintln!(
                        "{} q={} closed={:.6} mc={:.6}±{:.6}",
                        if c.pass { "pass" } else { "FAIL" },
                        c.times.len(),
                        c.closed_form,
                        c.estimate,
                        c.std_error
                    );
                }
                emit_verdict(&r, r.pass, "moment suite")
            }
            Verify::Bkar { p, trials, seed } => {
                let r = verify::bkar_suite(*p, *trials, *seed, cli.p_max)?;
                emit_verdict(&r, r.pass, "forest identity")
            }
            Verify::Resummation { horizons, samples, seed } => {
                let k = load_kernel(cli.kernel.as_ref())?;
                let r = verify::resummation_suite(&k, horizons, *samples, *seed)?;
                emit_verdict(&r, r.pass, "resummation")
            }
            Verify::Counts => {
                let r = verify::census_suite(cli.p_max)?;
                emit_verdict(&r, r.pass, "census")
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.workers {
        Some(0) => Err(Failure::Usage("--workers must be >= 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(Failure::Compute(e.to_string())),
        },
        None => run(&cli),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(m)) | Err(Failure::Verification(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
