//! Experiment configuration: JSON in, validated config out.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use mompc_core::mpc::{AlgorithmVariant, FirstSelection, MpcConfig, SelectionRule};
use mompc_core::objectives::ComparisonFn;
use mompc_core::problems::{self, BenchmarkSpec};

use crate::CliError;

/// Raw JSON shape. Unknown keys are rejected by name.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    benchmark: String,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    algorithm: Option<String>,
    first_selection: Option<RawFirstSelection>,
    subsequent_rule: Option<String>,
    x0: Option<Vec<f64>>,
    seed: Option<u64>,
    restarts: Option<u32>,
    feasibility_tol: Option<f64>,
    dominance_tol: Option<f64>,
    front_budget: Option<usize>,
    front_gap: Option<f64>,
    front_at: Option<Vec<usize>>,
    figures: Option<Vec<String>>,
    use_physical_b_balance: Option<bool>,
    avg_tol: Option<f64>,
    envelope: Option<RawEnvelope>,
    out: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
enum RawFirstSelection {
    /// `{"type": "rule", "rule": "ideal" | "min<i>"}`
    #[serde(rename = "rule")]
    Rule { rule: String },
    /// `{"type": "target", "target": [..]}`
    #[serde(rename = "target")]
    Target { target: Vec<f64> },
    /// `{"type": "stability_bounded", "coeff": c}`: quadratic bound
    /// `J_1 ≤ c·‖x0−x^e‖² + N·ℓ_1^e`.
    #[serde(rename = "stability_bounded")]
    StabilityBounded { coeff: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnvelope {
    /// 1-based objective index.
    objective: usize,
    delta: f64,
    k_min: Option<usize>,
}

/// Which plots the generated script renders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Trajectory,
    Averaged,
    Cumulative,
    Front,
}

impl Figure {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "trajectory" => Ok(Figure::Trajectory),
            "averaged" => Ok(Figure::Averaged),
            "cumulative" => Ok(Figure::Cumulative),
            "front" => Ok(Figure::Front),
            other => Err(CliError::Config(format!("unknown figure `{other}`"))),
        }
    }

    pub fn all() -> Vec<Figure> {
        vec![
            Figure::Trajectory,
            Figure::Averaged,
            Figure::Cumulative,
            Figure::Front,
        ]
    }
}

/// A validated experiment: benchmark name, loop configuration, and
/// reporting options.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub benchmark: String,
    pub use_physical_b_balance: bool,
    pub x0: Option<Vec<f64>>,
    pub mpc: MpcConfig,
    pub figures: Vec<Figure>,
    pub avg_tol: f64,
    pub envelope: Option<mompc_core::diagnostics::EnvelopeSpec>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Instantiates the benchmark this experiment runs on.
    pub fn benchmark_spec(&self) -> Result<BenchmarkSpec, CliError> {
        let spec = match self.benchmark.as_str() {
            "cstr2" => problems::make_cstr2_variant(self.use_physical_b_balance),
            "cstr3" => problems::make_cstr3_variant(self.use_physical_b_balance),
            "econ" => problems::make_econ(),
            other => return Err(CliError::Config(format!("unknown benchmark `{other}`"))),
        };
        Ok(spec)
    }

    pub fn initial_state(&self, spec: &BenchmarkSpec) -> Vec<f64> {
        self.x0.clone().unwrap_or_else(|| spec.default_x0.clone())
    }
}

fn parse_rule(s: &str) -> Result<SelectionRule, CliError> {
    if s == "ideal" {
        return Ok(SelectionRule::Ideal);
    }
    if let Some(idx) = s.strip_prefix("min") {
        let i: usize = idx
            .parse()
            .map_err(|_| CliError::Config(format!("unknown selection rule `{s}`")))?;
        if i == 0 {
            return Err(CliError::Config(
                "selection rules use 1-based objective indices".into(),
            ));
        }
        return Ok(SelectionRule::MinObjective(i - 1));
    }
    Err(CliError::Config(format!("unknown selection rule `{s}`")))
}

/// Parses and validates a config file, filling defaults.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig, CliError> {
    let mut deserializer = serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(&mut deserializer)
        .map_err(|e| CliError::Config(format!("{e}")))?;

    if raw.n < 2 {
        return Err(CliError::Config("N must be at least 2".into()));
    }
    if raw.k < 1 {
        return Err(CliError::Config("K must be at least 1".into()));
    }

    let mut mpc = MpcConfig::new(raw.n, raw.k);
    mpc.variant = match raw.algorithm.as_deref() {
        None | Some("bound_j1") => AlgorithmVariant::BoundJ1Only,
        Some("bound_all") => AlgorithmVariant::BoundAllJi,
        Some(other) => {
            return Err(CliError::Config(format!(
                "unknown algorithm `{other}` (expected `bound_j1` or `bound_all`)"
            )))
        }
    };
    mpc.first_selection = match raw.first_selection {
        None => FirstSelection::Rule(SelectionRule::Ideal),
        Some(RawFirstSelection::Rule { rule }) => FirstSelection::Rule(parse_rule(&rule)?),
        Some(RawFirstSelection::Target { target }) => {
            FirstSelection::Rule(SelectionRule::FixedCostTarget(target))
        }
        Some(RawFirstSelection::StabilityBounded { coeff }) => {
            if coeff <= 0.0 {
                return Err(CliError::Config(
                    "stability_bounded coeff must be positive".into(),
                ));
            }
            FirstSelection::StabilityBounded {
                gamma: ComparisonFn::Quadratic { coeff },
            }
        }
    };
    mpc.subsequent_rule = match raw.subsequent_rule.as_deref() {
        None => SelectionRule::Ideal,
        Some(s) => parse_rule(s)?,
    };
    if let Some(tol) = raw.feasibility_tol {
        if tol <= 0.0 {
            return Err(CliError::Config("feasibility_tol must be positive".into()));
        }
        mpc.solver.feasibility_tol = tol;
    }
    if let Some(tol) = raw.dominance_tol {
        if tol <= 0.0 {
            return Err(CliError::Config("dominance_tol must be positive".into()));
        }
        mpc.solver.dominance_tol = tol;
    }
    if let Some(seed) = raw.seed {
        mpc.solver.seed = seed;
    }
    if let Some(restarts) = raw.restarts {
        mpc.solver.restarts = restarts;
    }
    if let Some(budget) = raw.front_budget {
        if budget < 2 {
            return Err(CliError::Config("front_budget must be at least 2".into()));
        }
        mpc.front_budget = budget;
    }
    if let Some(gap) = raw.front_gap {
        mpc.front_gap = gap;
    }
    if let Some(front_at) = raw.front_at {
        if let Some(&bad) = front_at.iter().find(|&&j| j >= raw.k) {
            return Err(CliError::Config(format!(
                "front_at iteration {bad} is beyond K = {}",
                raw.k
            )));
        }
        mpc.front_at = front_at;
    }

    let figures = match raw.figures {
        None => Figure::all(),
        Some(list) => list
            .iter()
            .map(|s| Figure::parse(s))
            .collect::<Result<Vec<_>, _>>()?,
    };

    let envelope = raw
        .envelope
        .map(|e| -> Result<_, CliError> {
            if e.objective == 0 {
                return Err(CliError::Config(
                    "envelope.objective is 1-based and must be at least 1".into(),
                ));
            }
            Ok(mompc_core::diagnostics::EnvelopeSpec {
                objective: e.objective - 1,
                delta: e.delta,
                k_min: e.k_min,
            })
        })
        .transpose()?;

    let cfg = ExperimentConfig {
        benchmark: raw.benchmark,
        use_physical_b_balance: raw.use_physical_b_balance.unwrap_or(false),
        x0: raw.x0,
        mpc,
        figures,
        avg_tol: raw.avg_tol.unwrap_or(0.1),
        envelope,
        out: raw.out.map(PathBuf::from),
    };

    // Resolve the benchmark now so bad names fail at parse time, and
    // check rule indices and x0 against it.
    let spec = cfg.benchmark_spec()?;
    let s = spec.objectives.num_objectives();
    let check_rule = |rule: &SelectionRule| -> Result<(), CliError> {
        match rule {
            SelectionRule::MinObjective(i) if *i >= s => Err(CliError::Config(format!(
                "selection rule min{} exceeds the {} objectives of `{}`",
                i + 1,
                s,
                cfg.benchmark
            ))),
            SelectionRule::FixedCostTarget(t) if t.len() != s => Err(CliError::Config(format!(
                "target has {} entries but `{}` has {} objectives",
                t.len(),
                cfg.benchmark,
                s
            ))),
            _ => Ok(()),
        }
    };
    if let FirstSelection::Rule(rule) = &cfg.mpc.first_selection {
        check_rule(rule)?;
    }
    check_rule(&cfg.mpc.subsequent_rule)?;
    if let Some(x0) = &cfg.x0 {
        if x0.len() != spec.model.state_dim() {
            return Err(CliError::Config(format!(
                "x0 has {} entries but `{}` has state dimension {}",
                x0.len(),
                cfg.benchmark,
                spec.model.state_dim()
            )));
        }
    }
    if let Some(env) = &cfg.envelope {
        if env.objective >= s {
            return Err(CliError::Config(format!(
                "envelope.objective {} exceeds the {} objectives of `{}`",
                env.objective + 1,
                s,
                cfg.benchmark
            )));
        }
    }
    Ok(cfg)
}
