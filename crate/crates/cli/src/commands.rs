use cellplan::montecarlo::{compare_budget, mc_budget, Agreement};
use cellplan::planner::{feasibility_from_curve, sweep, PlanError};
use cellplan::scenario::ScenarioError;
use cellplan::{fleet_comparison, Architecture, McConfig, Rounding, ThroughputReport};
use thiserror::Error;

use crate::config::{ConfigError, ScenarioConfig};
use crate::table::{mbps, plain, sig, ResultTable};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Throughput(#[from] cellplan::throughput::ThroughputError),
    #[error(transparent)]
    MonteCarlo(#[from] cellplan::montecarlo::McError),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Infeasible plan or oracle disagreement.
    Failed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Failed => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub table: ResultTable,
    pub status: Status,
    /// Human-readable notes for stderr.
    pub notes: Vec<String>,
}

impl CommandOutput {
    fn ok(table: ResultTable) -> Self {
        CommandOutput {
            table,
            status: Status::Ok,
            notes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Range {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub step: Option<f64>,
}

impl Range {
    fn resolve(&self, cfg: &ScenarioConfig) -> (f64, f64, f64) {
        (
            self.min.unwrap_or(cfg.sweep.min_m),
            self.max.unwrap_or(cfg.sweep.max_m),
            self.step.unwrap_or(cfg.sweep.step_m),
        )
    }
}

fn rate_columns(arch: Architecture) -> Vec<(&'static str, &'static str)> {
    let mut cols = vec![("routine_rate", "Mbps"), ("incident_rate", "Mbps")];
    if arch.has_backhaul() {
        cols.push(("backhaul_rate", "Mbps"));
    }
    cols
}

fn rate_cells(report: &ThroughputReport) -> Vec<String> {
    let mut cells = vec![mbps(report.routine_bps), mbps(report.incident_bps)];
    if let Some(rb) = report.backhaul_bps {
        cells.push(mbps(rb));
    }
    cells
}

/// Throughput against cell side length. Side lengths where the scene does
/// not fit in the cell are kept as rows of `NaN`.
pub fn cmd_sweep(
    cfg: &ScenarioConfig,
    arch: Architecture,
    range: Range,
) -> Result<CommandOutput, CliError> {
    let (min, max, step) = range.resolve(cfg);
    let curve = sweep(arch, &cfg.scenario(), min, max, step)?;

    let mut cols = vec![("side_length", "m")];
    cols.extend(rate_columns(arch));
    let mut table = ResultTable::new(&cols);
    let mut points = curve.points.iter().peekable();
    let mut skipped = curve.skipped.iter().peekable();
    loop {
        let take_point = match (points.peek(), skipped.peek()) {
            (Some(p), Some(s)) => p.side_length < s.0,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => break,
        };
        if take_point {
            let p = points.next().unwrap();
            let mut row = vec![plain(p.side_length)];
            row.extend(rate_cells(&p.report));
            table.push(row);
        } else {
            let s = skipped.next().unwrap();
            let mut row = vec![plain(s.0)];
            row.extend(std::iter::repeat_n("NaN".to_string(), cols.len() - 1));
            table.push(row);
        }
    }
    let mut out = CommandOutput::ok(table);
    out.notes = curve
        .skipped
        .iter()
        .map(|(side, why)| format!("skipped L = {side} m: {why}"))
        .collect();
    Ok(out)
}

pub fn cmd_feasible(
    cfg: &ScenarioConfig,
    arch: Architecture,
    range: Range,
) -> Result<CommandOutput, CliError> {
    let (min, max, step) = range.resolve(cfg);
    let requirements = cfg.requirements();
    requirements.validate()?;
    let curve = sweep(arch, &cfg.scenario(), min, max, step)?;

    let mut cols = vec![("architecture", "-"), ("max_side_length", "m")];
    cols.extend(rate_columns(arch));
    cols.extend([("binding", "-"), ("next_side_length", "m")]);
    let mut table = ResultTable::new(&cols);

    match feasibility_from_curve(&curve, &requirements) {
        Some(f) => {
            let mut row = vec![arch.label().to_string(), plain(f.side_length)];
            row.extend(rate_cells(&f.report));
            row.push(f.binding.map_or("none".to_string(), |c| c.to_string()));
            row.push(f.next_side_length.map_or("NaN".to_string(), plain));
            table.push(row);
            Ok(CommandOutput::ok(table))
        }
        None => Ok(CommandOutput {
            table,
            status: Status::Failed,
            notes: vec![PlanError::NoFeasibleSide { min, max }.to_string()],
        }),
    }
}

pub fn cmd_fleet(cfg: &ScenarioConfig, rounding: Rounding) -> Result<CommandOutput, CliError> {
    let f = &cfg.fleet;
    let c = fleet_comparison(
        f.conventional_side_m,
        f.proposed_side_m,
        f.fire_stations,
        f.stationary_baseline,
        f.dispatch_time_factor,
        rounding,
    )?;
    let mut table = ResultTable::new(&[
        ("conventional_side", "m"),
        ("proposed_side", "m"),
        ("stationary_reduction", "fraction"),
        ("mobile_bts", "count"),
        ("total_ratio", "fraction"),
        ("fire_stations", "count"),
        ("stationary_baseline", "count"),
        ("dispatch_time_factor", "ratio"),
    ]);
    table.push(vec![
        plain(c.conv_side),
        plain(c.prop_side),
        format!("{:.4}", c.stationary_reduction),
        c.mobile_bts_count.to_string(),
        format!("{:.4}", c.total_ratio),
        c.fire_stations.to_string(),
        c.stationary_bts_baseline.to_string(),
        plain(c.dispatch_time_factor),
    ]);
    Ok(CommandOutput::ok(table))
}

pub fn cmd_report(
    cfg: &ScenarioConfig,
    arch: Architecture,
    side: Option<f64>,
) -> Result<CommandOutput, CliError> {
    let side = side.unwrap_or(cfg.geometry.side_length_m);
    let report = cfg.scenario().report(arch, side)?;
    let mut cols = vec![("architecture", "-"), ("side_length", "m")];
    cols.extend(rate_columns(arch));
    if arch.has_backhaul() {
        cols.extend([
            ("routine_bw", "MHz"),
            ("backhaul_bw", "MHz"),
            ("incident_bw", "MHz"),
            ("backhaul_time_frac", "fraction"),
            ("incident_time_frac", "fraction"),
        ]);
    }
    let mut table = ResultTable::new(&cols);
    let mut row = vec![arch.label().to_string(), plain(side)];
    row.extend(rate_cells(&report));
    if let Some(s) = report.sharing {
        row.extend([
            sig(s.routine_bw_hz / 1e6, 4),
            sig(s.backhaul_bw_hz / 1e6, 4),
            sig(s.incident_bw_hz / 1e6, 4),
            sig(s.backhaul_time_frac, 4),
            sig(s.incident_time_frac, 4),
        ]);
    }
    table.push(row);
    Ok(CommandOutput::ok(table))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateArgs {
    /// All three architectures when empty.
    pub architectures: Vec<Architecture>,
    pub side: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub sigma: f64,
    /// Also compare and list every per-UE success probability.
    pub per_ue: bool,
    pub parallel: bool,
}

impl Default for ValidateArgs {
    fn default() -> Self {
        ValidateArgs {
            architectures: Vec::new(),
            side: None,
            trials: None,
            seed: None,
            sigma: 3.0,
            per_ue: false,
            parallel: true,
        }
    }
}

const SET_NAMES: [&str; 3] = ["routine", "incident", "backhaul"];

/// Closed forms against the fading oracle. Fails if any compared quantity
/// is more than `sigma` standard errors from its estimate.
pub fn cmd_validate(cfg: &ScenarioConfig, args: &ValidateArgs) -> Result<CommandOutput, CliError> {
    if !(args.sigma.is_finite() && args.sigma > 0.0) {
        return Err(CliError::Usage(format!(
            "--sigma must be positive, got {}",
            args.sigma
        )));
    }
    let side = args.side.unwrap_or(cfg.geometry.side_length_m);
    let trials = args.trials.unwrap_or(cfg.mc.trials);
    let mc = McConfig {
        trials,
        seed: args.seed.unwrap_or(cfg.mc.seed),
        batch: if args.trials.is_some() {
            McConfig::new(trials, 0).batch
        } else {
            cfg.mc.batch
        },
        parallel: args.parallel,
    };
    let archs = if args.architectures.is_empty() {
        Architecture::ALL.to_vec()
    } else {
        args.architectures.clone()
    };

    let scenario = cfg.scenario();
    let layout = scenario.layout(side).map_err(ScenarioError::from)?;
    let mut table = ResultTable::new(&[
        ("architecture", "-"),
        ("quantity", "-"),
        ("closed_form", "-"),
        ("mc_mean", "-"),
        ("mc_std_error", "-"),
        ("z", "sigma"),
        ("pass", "-"),
    ]);
    let mut status = Status::Ok;
    let mut notes = Vec::new();
    let mut emit =
        |arch: Architecture, quantity: String, a: &Agreement, scale: f64, digits: usize| {
            let pass = a.within(args.sigma);
            if !pass {
                status = Status::Failed;
                notes.push(format!(
                    "{arch} {quantity}: z = {:.3} exceeds {}",
                    a.z_score(),
                    args.sigma
                ));
            }
            table.push(vec![
                arch.label().to_string(),
                quantity,
                sig(a.closed_form / scale, digits),
                sig(a.estimate.mean / scale, digits),
                sig(a.estimate.std_error / scale, digits),
                format!("{:.3}", a.z_score()),
                if pass { "1" } else { "0" }.to_string(),
            ]);
        };

    for arch in archs {
        let budget = scenario.budget(arch, &layout)?;
        let report = mc_budget(&budget, &mc)?;
        let agreement = compare_budget(&budget, &report);
        for (name, rate) in SET_NAMES.iter().zip(&agreement.rates) {
            emit(arch, format!("{name}_rate_mbps"), rate, 1e6, 6);
        }
        if args.per_ue {
            for (name, ues) in SET_NAMES.iter().zip(&agreement.per_ue) {
                for (i, a) in ues.iter().enumerate() {
                    emit(arch, format!("{name}_p[{i}]"), a, 1.0, 6);
                }
            }
        }
    }
    Ok(CommandOutput {
        table,
        status,
        notes,
    })
}
