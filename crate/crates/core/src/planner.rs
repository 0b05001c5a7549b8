//! Cell-size sweeps, feasibility search and fleet sizing.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::scenario::{Scenario, ScenarioError};
use crate::throughput::{Architecture, ThroughputReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("sweep range must satisfy 0 < L_min < L_max with a positive step (got {min}..{max} step {step})")]
    BadRange { min: f64, max: f64, step: f64 },
    #[error("no feasible side length in {min}..{max} m")]
    NoFeasibleSide { min: f64, max: f64 },
    #[error("invalid requirements: {0}")]
    BadRequirements(String),
    #[error("invalid fleet inputs: {0}")]
    BadFleet(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

/// Minimum aggregate rates, bits/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Requirements {
    pub routine_bps: f64,
    pub incident_bps: f64,
    pub backhaul_bps: f64,
}

impl Default for Requirements {
    fn default() -> Self {
        Requirements {
            routine_bps: 2e6,
            incident_bps: 8e6,
            backhaul_bps: 4e6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constraint {
    Routine,
    Incident,
    Backhaul,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::Routine => "routine",
            Constraint::Incident => "incident",
            Constraint::Backhaul => "backhaul",
        })
    }
}

impl Requirements {
    pub fn validate(&self) -> Result<(), PlanError> {
        for (name, v) in [
            ("routine", self.routine_bps),
            ("incident", self.incident_bps),
            ("backhaul", self.backhaul_bps),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(PlanError::BadRequirements(format!(
                    "{name} rate must be non-negative, got {v}"
                )));
            }
        }
        if self.backhaul_bps > self.incident_bps {
            return Err(PlanError::BadRequirements(format!(
                "backhaul rate {} exceeds incident rate {}",
                self.backhaul_bps, self.incident_bps
            )));
        }
        Ok(())
    }

    /// Achieved-to-required ratio of every applicable requirement that is
    /// not met, most severe first.
    pub fn shortfalls(&self, report: &ThroughputReport) -> Vec<(Constraint, f64)> {
        let mut checks = vec![
            (Constraint::Routine, report.routine_bps, self.routine_bps),
            (Constraint::Incident, report.incident_bps, self.incident_bps),
        ];
        if let Some(rb) = report.backhaul_bps {
            checks.push((Constraint::Backhaul, rb, self.backhaul_bps));
        }
        let mut out: Vec<(Constraint, f64)> = checks
            .into_iter()
            .filter(|&(_, got, need)| got < need)
            .map(|(c, got, need)| (c, got / need))
            .collect();
        out.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        out
    }

    pub fn met_by(&self, report: &ThroughputReport) -> bool {
        self.shortfalls(report).is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub side_length: f64,
    pub report: ThroughputReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCurve {
    pub architecture: Architecture,
    /// Strictly increasing in side length.
    pub points: Vec<SweepPoint>,
    /// Sweep positions that were not evaluated, with the reason.
    pub skipped: Vec<(f64, String)>,
}

/// Side lengths `L_min + i·step` up to and including `L_max`.
pub fn sweep_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>, PlanError> {
    if !(min.is_finite()
        && max.is_finite()
        && step.is_finite()
        && min > 0.0
        && max > min
        && step > 0.0)
    {
        return Err(PlanError::BadRange { min, max, step });
    }
    let n = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| min + i as f64 * step).collect())
}

pub fn sweep(
    architecture: Architecture,
    scenario: &Scenario,
    min: f64,
    max: f64,
    step: f64,
) -> Result<SweepCurve, PlanError> {
    let grid = sweep_grid(min, max, step)?;
    let evaluated: Vec<Result<SweepPoint, (f64, String)>> = grid
        .par_iter()
        .map(|&side| {
            if scenario.scene_exceeds_cell(side) {
                return Err((side, "incident scene larger than the cell".to_string()));
            }
            scenario
                .report(architecture, side)
                .map(|report| SweepPoint {
                    side_length: side,
                    report,
                })
                .map_err(|e| (side, e.to_string()))
        })
        .collect();

    let mut curve = SweepCurve {
        architecture,
        points: Vec::new(),
        skipped: Vec::new(),
    };
    for r in evaluated {
        match r {
            Ok(p) => curve.points.push(p),
            Err(s) => curve.skipped.push(s),
        }
    }
    Ok(curve)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    pub side_length: f64,
    pub report: ThroughputReport,
    /// Most severely violated requirement at the next evaluated sweep point;
    /// `None` when the sweep ends feasible.
    pub binding: Option<Constraint>,
    pub next_side_length: Option<f64>,
}

/// Largest swept side length meeting every applicable requirement. No
/// monotonicity is assumed; every point is evaluated.
pub fn max_feasible_side(
    architecture: Architecture,
    scenario: &Scenario,
    requirements: &Requirements,
    min: f64,
    max: f64,
    step: f64,
) -> Result<Feasibility, PlanError> {
    requirements.validate()?;
    let curve = sweep(architecture, scenario, min, max, step)?;
    feasibility_from_curve(&curve, requirements).ok_or(PlanError::NoFeasibleSide { min, max })
}

pub fn feasibility_from_curve(
    curve: &SweepCurve,
    requirements: &Requirements,
) -> Option<Feasibility> {
    let idx = curve
        .points
        .iter()
        .rposition(|p| requirements.met_by(&p.report))?;
    let best = &curve.points[idx];
    let next = curve.points.get(idx + 1);
    Some(Feasibility {
        side_length: best.side_length,
        report: best.report,
        binding: next.and_then(|p| requirements.shortfalls(&p.report).first().map(|s| s.0)),
        next_side_length: next.map(|p| p.side_length),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rounding {
    /// Whole stations are needed to cover a fractional count.
    #[default]
    Ceil,
    Floor,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FleetComparison {
    pub conv_side: f64,
    pub prop_side: f64,
    /// `1 − (conv_side / prop_side)²`
    pub stationary_reduction: f64,
    /// `fire_stations / dispatch_time_factor²`, rounded per `rounding`.
    pub mobile_bts_count: u64,
    /// `(conv_side / prop_side)² + mobile_bts_count / stationary_bts_baseline`
    pub total_ratio: f64,
    pub fire_stations: u64,
    pub stationary_bts_baseline: u64,
    pub dispatch_time_factor: f64,
    pub rounding: Rounding,
}

/// Station counts of the two-tier network relative to a conventional one.
///
/// A mobile BTS reaching the scene within `dispatch_time_factor` times the
/// fire-engine response time covers `factor²` times a fire station's area.
pub fn fleet_comparison(
    conv_side: f64,
    prop_side: f64,
    fire_stations: u64,
    stationary_bts_baseline: u64,
    dispatch_time_factor: f64,
    rounding: Rounding,
) -> Result<FleetComparison, PlanError> {
    if !(conv_side > 0.0 && conv_side.is_finite())
        || !(prop_side.is_finite() && prop_side >= conv_side)
    {
        return Err(PlanError::BadFleet(format!(
            "need 0 < conv_side ≤ prop_side, got {conv_side} and {prop_side}"
        )));
    }
    if fire_stations == 0 || stationary_bts_baseline == 0 {
        return Err(PlanError::BadFleet(
            "station counts must be positive".into(),
        ));
    }
    if !(dispatch_time_factor.is_finite() && dispatch_time_factor > 0.0) {
        return Err(PlanError::BadFleet(format!(
            "dispatch time factor must be positive, got {dispatch_time_factor}"
        )));
    }
    let density = (conv_side * conv_side) / (prop_side * prop_side);
    let mobiles = fire_stations as f64 / (dispatch_time_factor * dispatch_time_factor);
    let mobile_bts_count = match rounding {
        Rounding::Ceil => mobiles.ceil(),
        Rounding::Floor => mobiles.floor(),
    } as u64;
    Ok(FleetComparison {
        conv_side,
        prop_side,
        stationary_reduction: 1.0 - density,
        mobile_bts_count,
        total_ratio: density + mobile_bts_count as f64 / stationary_bts_baseline as f64,
        fire_stations,
        stationary_bts_baseline,
        dispatch_time_factor,
        rounding,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes() {
        assert_eq!(sweep_grid(100.0, 1000.0, 10.0).unwrap().len(), 91);
        assert_eq!(sweep_grid(100.0, 1500.0, 10.0).unwrap().len(), 141);
        assert_eq!(sweep_grid(100.0, 150.0, 100.0).unwrap(), vec![100.0]);
        assert!(sweep_grid(0.0, 10.0, 1.0).is_err());
        assert!(sweep_grid(10.0, 10.0, 1.0).is_err());
        assert!(sweep_grid(10.0, 20.0, 0.0).is_err());
    }

    #[test]
    fn fleet_reference_numbers() {
        let f = fleet_comparison(300.0, 900.0, 48_800, 44_000, 3.0, Rounding::Ceil).unwrap();
        assert!((f.stationary_reduction - 8.0 / 9.0).abs() <= 1e-12);
        assert_eq!(f.mobile_bts_count, 5423);
        assert!((f.total_ratio - (1.0 / 9.0 + 5423.0 / 44_000.0)).abs() <= 1e-12);
        assert!((f.total_ratio - 0.2344).abs() < 5e-5);

        let f = fleet_comparison(300.0, 900.0, 48_800, 44_000, 3.0, Rounding::Floor).unwrap();
        assert_eq!(f.mobile_bts_count, 5422);
    }

    #[test]
    fn fleet_small_cases() {
        let f = fleet_comparison(100.0, 200.0, 400, 400, 2.0, Rounding::Ceil).unwrap();
        assert!((f.stationary_reduction - 0.75).abs() <= 1e-12);
        assert_eq!(f.mobile_bts_count, 100);
        assert!((f.total_ratio - 0.5).abs() <= 1e-12);

        let f = fleet_comparison(300.0, 300.0, 48_800, 44_000, 1.0, Rounding::Ceil).unwrap();
        assert_eq!(f.stationary_reduction, 0.0);
        assert!(f.total_ratio > 1.0);

        assert!(fleet_comparison(900.0, 300.0, 1, 1, 1.0, Rounding::Ceil).is_err());
        assert!(fleet_comparison(300.0, 900.0, 0, 1, 1.0, Rounding::Ceil).is_err());
        assert!(fleet_comparison(300.0, 900.0, 1, 1, 0.0, Rounding::Ceil).is_err());
    }

    #[test]
    fn zero_requirements_feasible_everywhere() {
        let zero = Requirements {
            routine_bps: 0.0,
            incident_bps: 0.0,
            backhaul_bps: 0.0,
        };
        let s = Scenario::default();
        for arch in Architecture::ALL {
            let f = max_feasible_side(arch, &s, &zero, 300.0, 1500.0, 100.0).unwrap();
            assert_eq!(f.side_length, 1500.0);
            assert_eq!(f.binding, None);
        }
    }

    #[test]
    fn requirement_validation() {
        let r = Requirements {
            backhaul_bps: 9e6,
            ..Requirements::default()
        };
        assert!(r.validate().is_err());
        let r = Requirements {
            routine_bps: -1.0,
            ..Requirements::default()
        };
        assert!(r.validate().is_err());
    }

    #[test]
    fn single_point_sweep() {
        let s = Scenario::default();
        let c = sweep(Architecture::ProposedTdrs, &s, 900.0, 950.0, 100.0).unwrap();
        assert_eq!(c.points.len(), 1);
        assert_eq!(
            c.points[0].report,
            s.report(Architecture::ProposedTdrs, 900.0).unwrap()
        );
    }

    #[test]
    fn small_cells_are_skipped() {
        let s = Scenario::default();
        let c = sweep(Architecture::Conventional, &s, 100.0, 300.0, 50.0).unwrap();
        assert_eq!(
            c.skipped.iter().map(|x| x.0).collect::<Vec<_>>(),
            vec![100.0, 150.0]
        );
        assert_eq!(c.points.len(), 3);
        assert!(c
            .points
            .windows(2)
            .all(|w| w[0].side_length < w[1].side_length));
    }

    #[test]
    fn infeasible_range_is_an_error() {
        let impossible = Requirements {
            routine_bps: 1e12,
            ..Requirements::default()
        };
        let err = max_feasible_side(
            Architecture::Conventional,
            &Scenario::default(),
            &impossible,
            200.0,
            400.0,
            100.0,
        )
        .unwrap_err();
        assert!(matches!(err, PlanError::NoFeasibleSide { .. }));
    }

    #[test]
    fn shortfall_ordering() {
        let r = Requirements::default();
        let report = ThroughputReport {
            architecture: Architecture::ProposedTdrs,
            routine_bps: 1.5e6,
            incident_bps: 4e6,
            backhaul_bps: Some(5e6),
            sharing: None,
        };
        let s = r.shortfalls(&report);
        assert_eq!(
            s.iter().map(|x| x.0).collect::<Vec<_>>(),
            vec![Constraint::Incident, Constraint::Routine]
        );
    }
}
