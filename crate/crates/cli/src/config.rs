//! TOML scenario files.
//!
//! Every field is optional; anything left out takes the reference-system
//! value. Unknown keys are rejected so typos do not silently fall back to
//! defaults.

use std::path::Path;

use cellplan::{
    Architecture, GeometryParams, IncidentInterferers, LinkModels, McConfig, PathLossModel,
    PowerConfig, RadioConfig, Requirements, ResourceSharing, Scenario, SharingMode,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid config: {field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySection {
    /// Cell side length for single-point commands (`report`, `validate`).
    pub side_length_m: f64,
    pub tiers: usize,
    pub routine_ues: usize,
    pub incident_ues: usize,
    pub scene_width_m: f64,
    pub scene_height_m: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        let g = GeometryParams::default();
        GeometrySection {
            side_length_m: 900.0,
            tiers: g.tiers,
            routine_ues: g.n_routine,
            incident_ues: g.n_incident,
            scene_width_m: g.scene_width,
            scene_height_m: g.scene_height,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub min_m: f64,
    pub max_m: f64,
    pub step_m: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            min_m: 100.0,
            max_m: 1500.0,
            step_m: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerSection {
    pub stationary_dbm: f64,
    /// Omit or set to `"none"`-free configs by leaving the default; a
    /// backhaul power is required by the two-tier architectures.
    pub backhaul_dbm: f64,
    pub mobile_dbm: f64,
    pub noise_dbm_per_hz: f64,
}

impl Default for PowerSection {
    fn default() -> Self {
        let p = PowerConfig::default();
        PowerSection {
            stationary_dbm: p.stationary_total_dbm,
            backhaul_dbm: p.backhaul_dbm.unwrap_or(45.0),
            mobile_dbm: p.mobile_total_dbm,
            noise_dbm_per_hz: p.noise_psd_dbm_hz,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioSection {
    pub sinr_threshold_db: f64,
    pub resource_blocks: u32,
    pub subcarriers_per_block: u32,
    pub subcarrier_spacing_hz: f64,
}

impl Default for RadioSection {
    fn default() -> Self {
        RadioSection {
            sinr_threshold_db: 10.0,
            resource_blocks: 50,
            subcarriers_per_block: 12,
            subcarrier_spacing_hz: 15e3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Tdrs,
    Fdrs,
}

impl From<ModeName> for SharingMode {
    fn from(m: ModeName) -> Self {
        match m {
            ModeName::Tdrs => SharingMode::Tdrs,
            ModeName::Fdrs => SharingMode::Fdrs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SharingSection {
    /// Two-tier mode used when a command is given no `--arch`.
    pub mode: ModeName,
    /// Resource blocks for stationary-to-routine traffic (`W_u`).
    pub routine_rbs: u32,
    /// FDRS only: resource blocks for the backhaul (`W_b`); the rest of
    /// `W − W_u` goes to the mobile BTS access link.
    pub backhaul_rbs: u32,
    /// TDRS only: share of air time given to the backhaul (`ρ_b`).
    pub backhaul_time_frac: f64,
}

impl Default for SharingSection {
    fn default() -> Self {
        SharingSection {
            mode: ModeName::Tdrs,
            routine_rbs: 25,
            backhaul_rbs: 10,
            backhaul_time_frac: 0.4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RequirementSection {
    pub routine_mbps: f64,
    pub incident_mbps: f64,
    pub backhaul_mbps: f64,
}

impl Default for RequirementSection {
    fn default() -> Self {
        RequirementSection {
            routine_mbps: 2.0,
            incident_mbps: 8.0,
            backhaul_mbps: 4.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub intercept_db: f64,
    pub slope_db_per_decade: f64,
}

impl From<PathLossModel> for ModelSection {
    fn from(m: PathLossModel) -> Self {
        ModelSection {
            intercept_db: m.intercept_db,
            slope_db_per_decade: m.slope_db_per_decade,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IncidentInterfererName {
    AllStationary,
    ExcludeServing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathLossSection {
    pub access: ModelSection,
    pub backhaul: ModelSection,
    /// Stationary BTSs that interfere with UEs served by the mobile BTS.
    pub incident_interferers: IncidentInterfererName,
}

impl Default for PathLossSection {
    fn default() -> Self {
        PathLossSection {
            access: PathLossModel::ACCESS.into(),
            backhaul: PathLossModel::BACKHAUL.into(),
            incident_interferers: IncidentInterfererName::AllStationary,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSection {
    pub trials: u64,
    pub seed: u64,
    pub batch: u64,
}

impl Default for McSection {
    fn default() -> Self {
        let c = McConfig::default();
        McSection {
            trials: c.trials,
            seed: c.seed,
            batch: c.batch,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FleetSection {
    pub conventional_side_m: f64,
    pub proposed_side_m: f64,
    pub fire_stations: u64,
    pub stationary_baseline: u64,
    pub dispatch_time_factor: f64,
}

impl Default for FleetSection {
    fn default() -> Self {
        FleetSection {
            conventional_side_m: 300.0,
            proposed_side_m: 900.0,
            fire_stations: 48_800,
            stationary_baseline: 44_000,
            dispatch_time_factor: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub geometry: GeometrySection,
    pub sweep: SweepSection,
    pub powers: PowerSection,
    pub radio: RadioSection,
    pub sharing: SharingSection,
    pub requirements: RequirementSection,
    pub path_loss: PathLossSection,
    pub mc: McSection,
    pub fleet: FleetSection,
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: shown.clone(),
        source,
    })?;
    parse_config(&text).map_err(|e| match e {
        ConfigError::Parse { message, .. } => ConfigError::Parse {
            path: shown,
            message,
        },
        other => other,
    })
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
        path: "<input>".into(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn check(ok: bool, field: &str, message: impl FnOnce() -> String) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(invalid(field, message()))
    }
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    check(v.is_finite() && v > 0.0, field, || {
        format!("must be positive and finite, got {v}")
    })
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let g = &self.geometry;
        positive("geometry.side_length_m", g.side_length_m)?;
        check(g.tiers >= 1, "geometry.tiers", || {
            format!("must be at least 1, got {}", g.tiers)
        })?;
        check(g.routine_ues >= 1, "geometry.routine_ues", || {
            "must be at least 1".into()
        })?;
        check(g.incident_ues >= 1, "geometry.incident_ues", || {
            "must be at least 1".into()
        })?;
        positive("geometry.scene_width_m", g.scene_width_m)?;
        positive("geometry.scene_height_m", g.scene_height_m)?;

        let s = &self.sweep;
        positive("sweep.min_m", s.min_m)?;
        positive("sweep.step_m", s.step_m)?;
        check(
            s.max_m.is_finite() && s.max_m > s.min_m,
            "sweep.max_m",
            || format!("must exceed sweep.min_m ({}), got {}", s.min_m, s.max_m),
        )?;

        let p = &self.powers;
        for (field, v) in [
            ("powers.stationary_dbm", p.stationary_dbm),
            ("powers.backhaul_dbm", p.backhaul_dbm),
            ("powers.mobile_dbm", p.mobile_dbm),
            ("powers.noise_dbm_per_hz", p.noise_dbm_per_hz),
        ] {
            check(v.is_finite(), field, || format!("must be finite, got {v}"))?;
        }
        check(
            p.backhaul_dbm < p.stationary_dbm,
            "powers.backhaul_dbm",
            || {
                format!(
                    "must be below powers.stationary_dbm ({}), got {}",
                    p.stationary_dbm, p.backhaul_dbm
                )
            },
        )?;

        let r = &self.radio;
        check(
            r.sinr_threshold_db.is_finite(),
            "radio.sinr_threshold_db",
            || "must be finite".into(),
        )?;
        check(r.resource_blocks >= 2, "radio.resource_blocks", || {
            format!("must be at least 2, got {}", r.resource_blocks)
        })?;
        check(
            r.subcarriers_per_block >= 1,
            "radio.subcarriers_per_block",
            || "must be at least 1".into(),
        )?;
        positive("radio.subcarrier_spacing_hz", r.subcarrier_spacing_hz)?;

        let sh = &self.sharing;
        check(
            sh.routine_rbs >= 1 && sh.routine_rbs < r.resource_blocks,
            "sharing.routine_rbs",
            || {
                format!(
                    "must lie in 1..{}, got {}",
                    r.resource_blocks, sh.routine_rbs
                )
            },
        )?;
        let rest = r.resource_blocks - sh.routine_rbs;
        check(
            sh.backhaul_rbs >= 1 && sh.backhaul_rbs < rest,
            "sharing.backhaul_rbs",
            || {
                format!(
                    "must lie in 1..{rest} so the incident link keeps at least one block, got {}",
                    sh.backhaul_rbs
                )
            },
        )?;
        check(
            sh.backhaul_time_frac > 0.0 && sh.backhaul_time_frac < 1.0,
            "sharing.backhaul_time_frac",
            || format!("must lie in (0, 1), got {}", sh.backhaul_time_frac),
        )?;

        let q = &self.requirements;
        for (field, v) in [
            ("requirements.routine_mbps", q.routine_mbps),
            ("requirements.incident_mbps", q.incident_mbps),
            ("requirements.backhaul_mbps", q.backhaul_mbps),
        ] {
            check(v.is_finite() && v >= 0.0, field, || {
                format!("must be non-negative, got {v}")
            })?;
        }
        check(
            q.backhaul_mbps <= q.incident_mbps,
            "requirements.backhaul_mbps",
            || {
                format!(
                    "must not exceed requirements.incident_mbps ({})",
                    q.incident_mbps
                )
            },
        )?;

        for (name, m) in [
            ("path_loss.access", &self.path_loss.access),
            ("path_loss.backhaul", &self.path_loss.backhaul),
        ] {
            check(
                m.slope_db_per_decade.is_finite() && m.slope_db_per_decade > 0.0,
                &format!("{name}.slope_db_per_decade"),
                || format!("must be positive, got {}", m.slope_db_per_decade),
            )?;
            check(
                m.intercept_db.is_finite() && m.intercept_db >= 0.0,
                &format!("{name}.intercept_db"),
                || format!("must be non-negative, got {}", m.intercept_db),
            )?;
        }

        let mc = &self.mc;
        check(mc.trials >= 1, "mc.trials", || "must be at least 1".into())?;
        check(
            mc.batch >= 1 && mc.trials.is_multiple_of(mc.batch),
            "mc.batch",
            || format!("must divide mc.trials ({}), got {}", mc.trials, mc.batch),
        )?;

        let f = &self.fleet;
        positive("fleet.conventional_side_m", f.conventional_side_m)?;
        check(
            f.proposed_side_m.is_finite() && f.proposed_side_m >= f.conventional_side_m,
            "fleet.proposed_side_m",
            || {
                format!(
                    "must be at least fleet.conventional_side_m ({})",
                    f.conventional_side_m
                )
            },
        )?;
        check(f.fire_stations >= 1, "fleet.fire_stations", || {
            "must be at least 1".into()
        })?;
        check(
            f.stationary_baseline >= 1,
            "fleet.stationary_baseline",
            || "must be at least 1".into(),
        )?;
        positive("fleet.dispatch_time_factor", f.dispatch_time_factor)?;
        Ok(())
    }

    pub fn radio(&self) -> RadioConfig {
        let r = &self.radio;
        RadioConfig::from_db(
            r.sinr_threshold_db,
            r.resource_blocks,
            r.subcarriers_per_block,
            r.subcarrier_spacing_hz,
        )
    }

    pub fn scenario(&self) -> Scenario {
        let g = &self.geometry;
        let p = &self.powers;
        let radio = self.radio();
        let w = radio.total_bw_hz();
        let sh = &self.sharing;
        let model = |m: &ModelSection| PathLossModel {
            intercept_db: m.intercept_db,
            slope_db_per_decade: m.slope_db_per_decade,
        };
        Scenario {
            geometry: GeometryParams {
                tiers: g.tiers,
                n_routine: g.routine_ues,
                n_incident: g.incident_ues,
                scene_width: g.scene_width_m,
                scene_height: g.scene_height_m,
            },
            powers: PowerConfig {
                stationary_total_dbm: p.stationary_dbm,
                backhaul_dbm: Some(p.backhaul_dbm),
                mobile_total_dbm: p.mobile_dbm,
                noise_psd_dbm_hz: p.noise_dbm_per_hz,
            },
            radio,
            models: LinkModels {
                access: model(&self.path_loss.access),
                backhaul: model(&self.path_loss.backhaul),
                incident_interferers: match self.path_loss.incident_interferers {
                    IncidentInterfererName::AllStationary => IncidentInterferers::AllStationary,
                    IncidentInterfererName::ExcludeServing => IncidentInterferers::ExcludeServing,
                },
            },
            tdrs: ResourceSharing::tdrs(w, radio.blocks_hz(sh.routine_rbs), sh.backhaul_time_frac),
            fdrs: ResourceSharing::fdrs(
                w,
                radio.blocks_hz(sh.routine_rbs),
                radio.blocks_hz(sh.backhaul_rbs),
            ),
        }
    }

    pub fn requirements(&self) -> Requirements {
        let q = &self.requirements;
        Requirements {
            routine_bps: q.routine_mbps * 1e6,
            incident_bps: q.incident_mbps * 1e6,
            backhaul_bps: q.backhaul_mbps * 1e6,
        }
    }

    pub fn mc(&self) -> McConfig {
        McConfig {
            trials: self.mc.trials,
            seed: self.mc.seed,
            batch: self.mc.batch,
            parallel: true,
        }
    }

    /// Two-tier architecture selected by `sharing.mode`.
    pub fn default_architecture(&self) -> Architecture {
        Architecture::from_mode(self.sharing.mode.into())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
