//! Command-line front end. [`dispatch`] runs one invocation and returns
//! its exit status and captured output.

mod output;

use std::fs;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::amplification::subsample;
use crate::asymptotics::{clt_gap, clt_mu};
use crate::composition::{compose_exact, compose_kairouz, compose_types_approx};
use crate::curves::{curve_from_budget, PrivacyBudget};
use crate::divergences::{DiscretePair, DivergenceSpec};
use crate::dpsgd::{report, sgd_baseline_region, sgd_region, SgdConfig};
use crate::error::{Error, Result};
use crate::localdp::{
    be_ratio_lower_bound, binary_erasure_mechanism, chi2_output_bound, dobrushin, eta_kl_estimate_detail,
    kl_contraction_bound, ldp_epsilon, max_fdiv, opt_conversion_factor, q_star, Channel,
};
use crate::mechanisms::{
    dominating_approx, gaussian_tv, laplace_tv, staircase_tv, GaussianParams, StaircaseSpec,
};

pub use output::render_json;
use output::{curve_json, ledger_json, num};

/// Environment variable capping ε for TV-only regions.
pub const MAX_EPS_VAR: &str = "TVDP_MAX_EPS";
const DEFAULT_MAX_EPS: f64 = 50.0;

/// Exit status and captured streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser)]
#[command(
    name = "tvdp",
    version,
    about = "Privacy accounting for (eps, delta)-DP combined with eta total variation",
    allow_negative_numbers = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tradeoff curve of an (eps, delta, eta) budget
    Region(RegionArgs),
    /// k-fold composition ledger
    Compose(ComposeArgs),
    /// Budget after subsampling with rate p
    Amplify(AmplifyArgs),
    /// Distance between the composed pure-DP curve and its Gaussian limit
    Clt(CltArgs),
    /// Mechanism total variations and dominating pairs
    #[command(subcommand)]
    Mech(MechCommand),
    /// Local-DP channels and contraction bounds
    #[command(subcommand)]
    Ldp(LdpCommand),
    /// Noisy-SGD accounting over a grid of eps values
    Sgd(SgdArgs),
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long)]
    eta: f64,
}

impl BudgetArgs {
    fn budget(&self) -> Result<PrivacyBudget> {
        PrivacyBudget::new(self.eps, self.delta, self.eta)
    }
}

#[derive(Args)]
struct RegionArgs {
    #[arg(long, required_unless_present = "pure_tv")]
    eps: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long)]
    eta: f64,
    /// TV-only region: eps is replaced by the TVDP_MAX_EPS cap (default 50)
    #[arg(long)]
    pure_tv: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    out: Format,
    /// Add N uniformly spaced points to CSV output
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Baseline {
    Kairouz,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Mode {
    Exact,
    Types,
}

#[derive(Args)]
struct ComposeArgs {
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(short = 'k', long)]
    k: usize,
    /// Use the (eps, delta)-only composition theorem instead
    #[arg(long, value_enum)]
    baseline: Option<Baseline>,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Relative tolerance of the types mode
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    out: Format,
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Args)]
struct AmplifyArgs {
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(short = 'p', long)]
    p: f64,
}

#[derive(Args)]
struct CltArgs {
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    eta: f64,
    #[arg(short = 'k', long)]
    k: usize,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum MechKind {
    Laplace,
    Gaussian,
    Staircase,
}

#[derive(Subcommand)]
enum MechCommand {
    /// Total variation of a noise mechanism
    Tv {
        #[arg(long, value_enum)]
        kind: MechKind,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        sensitivity: f64,
    },
    /// Dominating pair of a budget
    Pair(BudgetArgs),
}

#[derive(Subcommand)]
enum LdpCommand {
    /// eps and TV of a channel given as JSON {"matrix": [[...], ...]}
    Check {
        /// Path to the channel JSON, or the JSON text itself
        #[arg(long)]
        channel: String,
    },
    /// Dominating channel of Q_{eps,eta}
    Qstar {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        eta: f64,
    },
    /// Binary mechanism with erasure for a pair
    Bemech {
        /// Comma-separated pmf
        #[arg(long)]
        p0: String,
        /// Comma-separated pmf
        #[arg(long)]
        p1: String,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        eta: f64,
    },
    /// Closed-form bounds for Q_{eps,eta}
    Bounds {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        eta: f64,
        /// Input TV for the chi-square output bound
        #[arg(long, default_value_t = 1.0)]
        tv_in: f64,
    },
}

#[derive(Args)]
struct SgdArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    batch: usize,
    #[arg(long)]
    epochs: f64,
    /// Per-step GDP parameter
    #[arg(long)]
    mu: f64,
    #[arg(long, default_value_t = 0.5)]
    eps_from: f64,
    #[arg(long, default_value_t = 3.4)]
    eps_to: f64,
    #[arg(long, default_value_t = 0.1)]
    eps_step: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    out: Format,
    #[arg(long)]
    grid: Option<usize>,
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn dispatch<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: format!("{}\n", text.lines().next().unwrap_or("error: invalid arguments")),
                },
            };
        }
    };
    match run(cli.command) {
        Ok(stdout) => Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: if matches!(e, Error::Capacity(_)) { 1 } else { 2 },
            stdout: String::new(),
            stderr: format!("error: {}\n", e.to_string().replace('\n', " ")),
        },
    }
}

fn max_eps() -> Result<f64> {
    match std::env::var(MAX_EPS_VAR) {
        Err(_) => Ok(DEFAULT_MAX_EPS),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
            _ => Err(Error::Validation(format!("{MAX_EPS_VAR} must be a positive number (got {s:?})"))),
        },
    }
}

fn parse_pmf(name: &str, s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Validation(format!("{name}: cannot parse {:?} as a number", t.trim())))
        })
        .collect()
}

fn run(cmd: Command) -> Result<String> {
    match cmd {
        Command::Region(a) => {
            let eps = if a.pure_tv { max_eps()? } else { a.eps.unwrap_or_default() };
            let curve = curve_from_budget(&PrivacyBudget::new(eps, a.delta, a.eta)?);
            Ok(match a.out {
                Format::Json => render_json(&curve_json(&curve)),
                Format::Csv => curve.to_csv(a.grid),
            })
        }
        Command::Compose(a) => {
            let b = a.budget.budget()?;
            let ledger = match (a.baseline, a.mode) {
                (Some(Baseline::Kairouz), _) => compose_kairouz(b.epsilon(), b.delta(), a.k)?,
                (None, Mode::Exact) => compose_exact(&b, a.k)?,
                (None, Mode::Types) => compose_types_approx(&b, a.k, a.tol)?,
            };
            Ok(match a.out {
                Format::Json => render_json(&ledger_json(&ledger)),
                Format::Csv => ledger.to_curve().to_csv(a.grid),
            })
        }
        Command::Amplify(a) => {
            let s = subsample(&a.budget.budget()?, a.p)?;
            Ok(render_json(&json!({"eps": num(s.epsilon()), "delta": num(s.delta()), "eta": num(s.eta())})))
        }
        Command::Clt(a) => {
            let gap = clt_gap(a.eps, a.eta, a.k)?;
            let mu = clt_mu(&[(a.eps, a.eta)]) * (a.k as f64).sqrt();
            Ok(render_json(&json!({"mu": num(mu), "gap": num(gap)})))
        }
        Command::Mech(MechCommand::Tv {
            kind,
            eps,
            mu,
            gamma,
            sensitivity,
        }) => {
            let need = |v: Option<f64>, flag: &str| {
                v.ok_or_else(|| Error::Validation(format!("--{flag} is required for this kind")))
            };
            let tv = match kind {
                MechKind::Laplace => laplace_tv(need(eps, "eps")?)?,
                MechKind::Gaussian => gaussian_tv(&GaussianParams::new(need(mu, "mu")?)?),
                MechKind::Staircase => {
                    staircase_tv(&StaircaseSpec::new(need(gamma, "gamma")?, need(eps, "eps")?, sensitivity)?)
                }
            };
            Ok(render_json(&num(tv)))
        }
        Command::Mech(MechCommand::Pair(a)) => {
            let p = dominating_approx(&a.budget()?)?;
            Ok(render_json(&pair_json(&p)))
        }
        Command::Ldp(LdpCommand::Check { channel }) => {
            let text = if channel.trim_start().starts_with('{') {
                channel
            } else {
                fs::read_to_string(&channel)
                    .map_err(|e| Error::Validation(format!("cannot read {channel}: {e}")))?
            };
            let raw: Value = serde_json::from_str(&text)
                .map_err(|e| Error::Validation(format!("channel JSON: {e}")))?;
            let matrix: Vec<Vec<f64>> = serde_json::from_value(raw.get("matrix").cloned().unwrap_or(Value::Null))
                .map_err(|_| Error::Validation("channel JSON needs a \"matrix\" of number rows".into()))?;
            let ch = Channel::normalized(matrix, 1e-9)?;
            let est = eta_kl_estimate_detail(&ch, 1001).ok();
            Ok(render_json(&json!({
                "eps": num(ldp_epsilon(&ch)),
                "tv": num(dobrushin(&ch)),
                "eta_kl_estimate": est.map(|e| num(e.value)),
            })))
        }
        Command::Ldp(LdpCommand::Qstar { eps, eta }) => Ok(render_json(&channel_json(&q_star(eps, eta)?))),
        Command::Ldp(LdpCommand::Bemech { p0, p1, eps, eta }) => {
            let pair = DiscretePair::new(parse_pmf("p0", &p0)?, parse_pmf("p1", &p1)?)?;
            Ok(render_json(&channel_json(&binary_erasure_mechanism(&pair, eps, eta)?)))
        }
        Command::Ldp(LdpCommand::Bounds { eps, eta, tv_in }) => {
            let opt = if eps > 0.0 { Some(num(opt_conversion_factor(eps, eta)?)) } else { None };
            let ratio = if eps > 0.0 { Some(num(be_ratio_lower_bound(eps, eta)?)) } else { None };
            Ok(render_json(&json!({
                "max_kl": num(max_fdiv(eps, eta, &DivergenceSpec::Kl)?),
                "max_chi2": num(max_fdiv(eps, eta, &DivergenceSpec::ChiSquared)?),
                "max_tv": num(max_fdiv(eps, eta, &DivergenceSpec::Tv)?),
                "kl_contraction": num(kl_contraction_bound(eps, eta)),
                "chi2_output_bound": num(chi2_output_bound(eps, eta, tv_in)?),
                "opt_conversion_factor": opt,
                "be_ratio_lower_bound": ratio,
            })))
        }
        Command::Sgd(a) => {
            let grid = SgdConfig::grid(a.eps_from, a.eps_to, a.eps_step)?;
            let cfg = SgdConfig::new(a.n, a.batch, a.epochs, a.mu, grid)?;
            let refined = sgd_region(&cfg)?;
            match a.out {
                Format::Csv => {
                    let mut s = refined.curve.to_csv(a.grid);
                    s.push_str("\ngrid_eps,j,eps,delta\n");
                    for (g, l) in &refined.ledgers {
                        for e in &l.entries {
                            s.push_str(&format!(
                                "{},{},{},{}\n",
                                output::fmt(*g),
                                e.j,
                                output::fmt(e.eps),
                                output::fmt(e.delta)
                            ));
                        }
                    }
                    Ok(s)
                }
                Format::Json => {
                    let baseline = sgd_baseline_region(&cfg)?;
                    let rep = report(&cfg, &refined, &baseline);
                    let ledgers: Vec<Value> = refined
                        .ledgers
                        .iter()
                        .map(|(g, l)| json!({"grid_eps": num(*g), "ledger": ledger_json(l)}))
                        .collect();
                    Ok(render_json(&json!({
                        "steps": refined.steps,
                        "curve": curve_json(&refined.curve),
                        "baseline_curve": curve_json(&baseline.curve),
                        "report": serde_json::to_value(&rep).map_err(|e| Error::Argument(e.to_string()))?,
                        "ledgers": ledgers,
                    })))
                }
            }
        }
    }
}

fn pair_json(p: &DiscretePair) -> Value {
    json!({
        "p0": p.p0().iter().map(|&v| num(v)).collect::<Vec<_>>(),
        "p1": p.p1().iter().map(|&v| num(v)).collect::<Vec<_>>(),
    })
}

fn channel_json(c: &Channel) -> Value {
    json!({
        "matrix": c.to_rows().iter().map(|r| r.iter().map(|&v| num(v)).collect::<Vec<_>>()).collect::<Vec<_>>()
    })
}
