//! Command-line front end.
//!
//! Exit codes: `0` success or verdict true, `1` verdict false (the report
//! carries the refuting witness), `2` usage, descriptor or size-guard error.
//! Reports are canonical JSON; `flow` and `frontier` can also emit CSV.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::curvature::{be_check, cbe_check, frontier, poincare_check, BeConfig};
use crate::descriptor::SemigroupSpec;
use crate::error::{Error, Result};
use crate::flowfunc::{
    bonnet_myers_check, connes_distance, entropy_power_concavity_check, flow, mlsi_check, BonnetMyersMode,
};
use crate::matcore::identity;
use crate::means_ge::{cge_check, ge_check, sample_state, GeConfig, OperatorMean};
use crate::report::{canonical_json, float, matrix, CurvatureReport};
use crate::semigroups::{intertwining_k, markov_validate, tensor, LindbladGenerator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Dimensions, spectrum, ergodicity and intertwining constant.
    Describe,
    /// Markov properties of `P_t` at t in {0, 0.1, 1, 5}.
    Validate,
    /// Sampled BE(K,N) search for a counterexample.
    CheckBe,
    /// CBE(K,N) kernel certificate.
    CheckCbe,
    /// Sampled GE(K,N) for the chosen mean.
    CheckGe,
    /// Sampled GE(K,N) on matrix amplifications.
    CheckCge,
    /// Largest CBE constant K for each N (default grid 1, 2, 4, 8, inf).
    Frontier,
    /// Entropy functionals along the heat flow.
    Flow,
    /// Damped concavity of the entropy power along the flow.
    EntropyPower,
    /// Dimensional modified log-Sobolev inequality on sampled states.
    Mlsi,
    /// Spectral gap against the Poincaré bound.
    Poincare,
    /// Lower estimate of the spectral distance from a sampled state to the trace state.
    Distance,
    /// Per-state Bonnet–Myers bound (BE mode, or GE mode with --mean).
    BonnetMyers,
    /// Describe the tensor product of --spec and --spec2.
    Tensor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Parsed command line.
#[derive(Clone, Debug, Parser)]
#[command(
    name = "qmscurv",
    version,
    about = "Curvature diagnostics for quantum Markov semigroups"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Semigroup descriptor (JSON).
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    /// Second descriptor, for `tensor`.
    #[arg(long, global = true)]
    pub spec2: Option<PathBuf>,
    /// Curvature constant.
    #[arg(long = "K", global = true, allow_hyphen_values = true)]
    pub k: Option<f64>,
    /// Dimension constant; `inf` allowed.
    #[arg(long = "N", global = true, value_parser = parse_dimension)]
    pub n: Option<f64>,
    /// Operator mean: log, left, right, arithmetic, geometric, harmonic.
    #[arg(long, global = true)]
    pub mean: Option<OperatorMean>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub tmax: Option<f64>,
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    #[arg(long, global = true)]
    pub amplify: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

fn parse_dimension(s: &str) -> std::result::Result<f64, String> {
    match s {
        "inf" | "infinity" | "Inf" => Ok(f64::INFINITY),
        _ => s.parse::<f64>().map_err(|e| e.to_string()),
    }
}

/// Rendered output and its verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub verdict: bool,
}

impl Outcome {
    fn json(v: &Value, verdict: bool) -> Self {
        Self {
            text: canonical_json(v) + "\n",
            verdict,
        }
    }

    fn report(r: &CurvatureReport) -> Self {
        Self::json(&r.to_value(), r.verdict)
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

impl RunConfig {
    fn generator(&self) -> Result<LindbladGenerator> {
        let path = self.spec.as_ref().ok_or_else(|| usage("--spec is required"))?;
        SemigroupSpec::from_path(path)?.build()
    }

    fn k(&self) -> Result<f64> {
        self.k.ok_or_else(|| usage("--K is required"))
    }

    fn n(&self) -> Result<f64> {
        self.n.ok_or_else(|| usage("--N is required"))
    }

    fn mean(&self) -> OperatorMean {
        self.mean.unwrap_or(OperatorMean::Log)
    }

    fn ge_config(&self) -> GeConfig {
        let d = GeConfig::default();
        GeConfig {
            samples: self.samples.unwrap_or(d.samples),
            tol: self.tol.unwrap_or(d.tol),
            seed: self.seed,
        }
    }

    fn json_only(&self) -> Result<()> {
        match self.format {
            Format::Json => Ok(()),
            Format::Csv => Err(usage(format!("--format csv is not available for {:?}", self.command))),
        }
    }
}

fn describe_value(gen: &LindbladGenerator) -> Value {
    let inter = intertwining_k(gen);
    json!({
        "label": gen.label(),
        "n": gen.dim(),
        "num_derivations": gen.num_derivations(),
        "kernel_dim": gen.kernel_dim(),
        "ambient_kernel_dim": gen.ambient_kernel_dim(),
        "ergodic": gen.is_ergodic(),
        "spectral_gap": gen.spectral_gap().map(float).unwrap_or(Value::Null),
        "norm": float(gen.norm()),
        "spectrum": gen.reference_spectrum().into_iter().map(float).collect::<Vec<_>>(),
        "intertwining": {
            "K": inter.k.map(float).unwrap_or(Value::Null),
            "fitted_K": float(inter.fitted_k),
            "relative_residual": float(inter.relative_residual),
        },
    })
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

/// Runs one command without touching the process streams.
pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    if !matches!(cfg.command, Command::Flow | Command::Frontier) {
        cfg.json_only()?;
    }
    let gen = cfg.generator()?;
    let n = gen.dim();
    match cfg.command {
        Command::Describe => Ok(Outcome::json(&describe_value(&gen), true)),
        Command::Validate => {
            gen.check_invariants()?;
            let r = markov_validate(&gen, &[0.0, 0.1, 1.0, 5.0]);
            Ok(Outcome::json(&to_value(&r), r.passed))
        }
        Command::CheckBe => {
            let d = BeConfig::default();
            let config = BeConfig {
                samples: cfg.samples.unwrap_or(d.samples),
                tol: cfg.tol.unwrap_or(d.tol),
                seed: cfg.seed,
                ..d
            };
            Ok(Outcome::report(&be_check(&gen, cfg.k()?, cfg.n()?, config)?))
        }
        Command::CheckCbe => Ok(Outcome::report(&cbe_check(
            &gen,
            cfg.k()?,
            cfg.n()?,
            cfg.tol.unwrap_or(1e-8),
        )?)),
        Command::CheckGe => Ok(Outcome::report(&ge_check(
            &gen,
            cfg.mean(),
            cfg.k()?,
            cfg.n()?,
            cfg.ge_config(),
        )?)),
        Command::CheckCge => {
            let m = cfg.amplify.unwrap_or(2);
            Ok(Outcome::report(&cge_check(
                &gen,
                cfg.mean(),
                cfg.k()?,
                cfg.n()?,
                m,
                cfg.ge_config(),
            )?))
        }
        Command::Frontier => {
            let grid = match cfg.n {
                Some(v) => vec![v],
                None => vec![1.0, 2.0, 4.0, 8.0, f64::INFINITY],
            };
            let points = frontier(&gen, &grid, cfg.tol.unwrap_or(1e-8))?;
            let text = match cfg.format {
                Format::Json => {
                    let rows: Vec<Value> = points
                        .iter()
                        .map(|&(nd, k)| json!({"N": float(nd), "K_max": float(k)}))
                        .collect();
                    canonical_json(&json!({"label": gen.label(), "frontier": rows})) + "\n"
                }
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["N", "K_max"])?;
                    for &(nd, k) in &points {
                        let nd = if nd.is_infinite() {
                            "inf".to_string()
                        } else {
                            format!("{nd:.16e}")
                        };
                        w.write_record([nd, format!("{k:.16e}")])?;
                    }
                    String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
                        .expect("csv output is UTF-8")
                }
            };
            Ok(Outcome { text, verdict: true })
        }
        Command::Flow => {
            let rho0 = sample_state(n, cfg.seed, 1);
            let trace = flow(&gen, &rho0, cfg.tmax.unwrap_or(5.0), cfg.steps.unwrap_or(200), cfg.n()?)?;
            let text = match cfg.format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    trace.write_csv(&mut buf)?;
                    String::from_utf8(buf).expect("csv output is UTF-8")
                }
                Format::Json => {
                    let col = |v: &[f64]| v.iter().copied().map(float).collect::<Vec<_>>();
                    let v = json!({
                        "N": float(trace.n_dim),
                        "rho0": matrix(&rho0),
                        "t": col(&trace.times),
                        "entropy": col(&trace.entropy),
                        "fisher": col(&trace.fisher),
                        "entropy_power": col(&trace.entropy_power),
                        "d1_entropy_power": col(&trace.d1_entropy_power),
                        "d2_entropy_power": col(&trace.d2_entropy_power),
                    });
                    canonical_json(&v) + "\n"
                }
            };
            Ok(Outcome { text, verdict: true })
        }
        Command::EntropyPower => {
            let rho0 = sample_state(n, cfg.seed, 1);
            let r = entropy_power_concavity_check(
                &gen,
                &rho0,
                cfg.k()?,
                cfg.n()?,
                cfg.tmax.unwrap_or(5.0),
                cfg.steps.unwrap_or(5000),
            )?;
            let mut v = to_value(&r);
            v["K"] = float(cfg.k()?);
            v["N"] = float(cfg.n()?);
            Ok(Outcome::json(&v, r.verdict))
        }
        Command::Mlsi => {
            let (k, nd) = (cfg.k()?, cfg.n()?);
            let reports = (0..cfg.samples.unwrap_or(50))
                .map(|i| mlsi_check(&gen, &sample_state(n, cfg.seed, i), k, nd))
                .collect::<Result<Vec<_>>>()?;
            let verdict = reports.iter().all(|r| r.verdict);
            let min_slack = reports.iter().map(|r| r.fisher - r.lhs).fold(f64::INFINITY, f64::min);
            let v = json!({
                "K": float(k),
                "N": float(nd),
                "checks": reports.len(),
                "min_slack": float(min_slack),
                "verdict": verdict,
            });
            Ok(Outcome::json(&v, verdict))
        }
        Command::Poincare => {
            let r = poincare_check(&gen, cfg.k()?, cfg.n()?)?;
            Ok(Outcome::json(&to_value(&r), r.verdict))
        }
        Command::Distance => {
            let rho = sample_state(n, cfg.seed, 1);
            let d = connes_distance(&gen, &rho, &identity(n), cfg.samples.unwrap_or(8), cfg.seed)?;
            let v = json!({
                "rho": matrix(&rho),
                "value": float(d.value),
                "witness": matrix(&d.witness),
                "history": d.history.into_iter().map(float).collect::<Vec<_>>(),
            });
            Ok(Outcome::json(&v, true))
        }
        Command::BonnetMyers => {
            let mode = match cfg.mean {
                Some(m) => BonnetMyersMode::Ge(m),
                None => BonnetMyersMode::Be,
            };
            let r = bonnet_myers_check(&gen, cfg.k()?, cfg.n()?, mode, cfg.samples.unwrap_or(20), cfg.seed)?;
            Ok(Outcome::json(&to_value(&r), r.verdict))
        }
        Command::Tensor => {
            let path = cfg
                .spec2
                .as_ref()
                .ok_or_else(|| usage("--spec2 is required for tensor"))?;
            let other = SemigroupSpec::from_path(path)?.build()?;
            let t = tensor(&gen, &other)?;
            let mut v = describe_value(&t);
            let mut factors = Map::new();
            factors.insert("first".into(), describe_value(&gen));
            factors.insert("second".into(), describe_value(&other));
            v["factors"] = Value::Object(factors);
            Ok(Outcome::json(&v, true))
        }
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(argv) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cfg).and_then(|o| emit(&cfg, &o.text).map(|()| o.verdict)) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
