//! Closed-form downlink throughputs under Rayleigh block fading.
//!
//! A BTS serving a set `Z` of UEs with bandwidth `W_o` and flat transmit
//! PSD `S_o`, with round-robin scheduling, delivers
//!
//! ```text
//! R = ρ · W_o · log2(1+γ) · (1/|Z|) · Σ_u P{SINR_u > γ}
//! P{SINR_u > γ} = exp(−η γ / (g_uo S_o)) · Π_a (g_ua S_a γ / (g_uo S_o) + 1)⁻¹
//! ```
//!
//! Each architecture is reduced to a [`LinkBudget`]: the per-UE serving and
//! interfering links of every served set, plus the bandwidth, air-time and
//! round-robin weight applied to it. The closed forms here and the sampling
//! estimator in [`crate::montecarlo`] both consume the same budget.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::channel::{
    path_gain, routine_tx_power, ChannelError, LinkGain, PathLossModel, PowerConfig,
};
use crate::geometry::{distance, CellLayout, Point};

/// Relative tolerance for the resource-sharing identities.
pub const SHARING_RTOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThroughputError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("invalid resource sharing: {0}")]
    Sharing(#[from] SharingViolation),
    #[error("cannot aggregate over an empty UE set")]
    EmptyUeSet,
    #[error("round-robin weight {n_sharing} is smaller than the {n_ues} UEs being summed")]
    SharingWeightTooSmall { n_sharing: usize, n_ues: usize },
    #[error("invalid radio configuration: {0}")]
    Radio(String),
    #[error("sharing total bandwidth {sharing_hz} Hz does not match the radio's {radio_hz} Hz")]
    BandwidthMismatch { sharing_hz: f64, radio_hz: f64 },
    #[error("{0:?} has no resource sharing")]
    NoSharing(Architecture),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SharingMode {
    /// Backhaul and incident links alternate in time on `W − W_u`.
    Tdrs,
    /// Backhaul and incident links split `W − W_u` in frequency.
    Fdrs,
}

/// Partition of the downlink band between routine traffic, the backhaul and
/// the mobile BTS's access link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceSharing {
    pub mode: SharingMode,
    pub total_bw_hz: f64,
    pub routine_bw_hz: f64,
    pub backhaul_bw_hz: f64,
    pub incident_bw_hz: f64,
    pub backhaul_time_frac: f64,
    pub incident_time_frac: f64,
}

impl ResourceSharing {
    pub fn tdrs(total_bw_hz: f64, routine_bw_hz: f64, backhaul_time_frac: f64) -> Self {
        let rest = total_bw_hz - routine_bw_hz;
        ResourceSharing {
            mode: SharingMode::Tdrs,
            total_bw_hz,
            routine_bw_hz,
            backhaul_bw_hz: rest,
            incident_bw_hz: rest,
            backhaul_time_frac,
            incident_time_frac: 1.0 - backhaul_time_frac,
        }
    }

    pub fn fdrs(total_bw_hz: f64, routine_bw_hz: f64, backhaul_bw_hz: f64) -> Self {
        ResourceSharing {
            mode: SharingMode::Fdrs,
            total_bw_hz,
            routine_bw_hz,
            backhaul_bw_hz,
            incident_bw_hz: total_bw_hz - routine_bw_hz - backhaul_bw_hz,
            backhaul_time_frac: 1.0,
            incident_time_frac: 1.0,
        }
    }

    /// Band over which each stationary interferer spreads its total power
    /// while the access links are active. Stationary BTSs stay silent on the
    /// backhaul band under FDRS.
    pub fn interferer_bw_hz(&self) -> f64 {
        match self.mode {
            SharingMode::Tdrs => self.total_bw_hz,
            SharingMode::Fdrs => self.total_bw_hz - self.backhaul_bw_hz,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SharingViolation {
    #[error("{name} must be a positive finite bandwidth, got {value} Hz")]
    NonPositiveBandwidth { name: &'static str, value: f64 },
    #[error("0 < W_u < W required (W_u = {routine_bw_hz} Hz, W = {total_bw_hz} Hz)")]
    RoutineBandwidth {
        routine_bw_hz: f64,
        total_bw_hz: f64,
    },
    #[error("{name} must lie in (0, 1], got {value}")]
    TimeFraction { name: &'static str, value: f64 },
    #[error("TDRS: W_b = W_c = W − W_u required (W_b = {backhaul_bw_hz} Hz, W_c = {incident_bw_hz} Hz, W − W_u = {remaining_hz} Hz)")]
    TdrsBandwidth {
        backhaul_bw_hz: f64,
        incident_bw_hz: f64,
        remaining_hz: f64,
    },
    #[error("TDRS: ρ_b + ρ_c = 1 required (ρ_b = {backhaul}, ρ_c = {incident})")]
    TdrsTime { backhaul: f64, incident: f64 },
    #[error(
        "FDRS: W_b + W_c = W − W_u required (W_b + W_c = {sum_hz} Hz, W − W_u = {remaining_hz} Hz)"
    )]
    FdrsBandwidth { sum_hz: f64, remaining_hz: f64 },
    #[error("FDRS: ρ_b = ρ_c = 1 required (ρ_b = {backhaul}, ρ_c = {incident})")]
    FdrsTime { backhaul: f64, incident: f64 },
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= SHARING_RTOL * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Checks the mode-specific identities; the first one that fails is returned.
pub fn validate_sharing(s: &ResourceSharing) -> Result<(), SharingViolation> {
    for (name, value) in [
        ("total_bw_hz", s.total_bw_hz),
        ("routine_bw_hz", s.routine_bw_hz),
        ("backhaul_bw_hz", s.backhaul_bw_hz),
        ("incident_bw_hz", s.incident_bw_hz),
    ] {
        if !(value.is_finite() && value > 0.0) {
            return Err(SharingViolation::NonPositiveBandwidth { name, value });
        }
    }
    if s.routine_bw_hz >= s.total_bw_hz {
        return Err(SharingViolation::RoutineBandwidth {
            routine_bw_hz: s.routine_bw_hz,
            total_bw_hz: s.total_bw_hz,
        });
    }
    for (name, value) in [
        ("backhaul_time_frac", s.backhaul_time_frac),
        ("incident_time_frac", s.incident_time_frac),
    ] {
        if !(value > 0.0 && value <= 1.0) {
            return Err(SharingViolation::TimeFraction { name, value });
        }
    }

    let remaining_hz = s.total_bw_hz - s.routine_bw_hz;
    match s.mode {
        SharingMode::Tdrs => {
            if !(close(s.backhaul_bw_hz, remaining_hz) && close(s.incident_bw_hz, remaining_hz)) {
                return Err(SharingViolation::TdrsBandwidth {
                    backhaul_bw_hz: s.backhaul_bw_hz,
                    incident_bw_hz: s.incident_bw_hz,
                    remaining_hz,
                });
            }
            if !close(s.backhaul_time_frac + s.incident_time_frac, 1.0) {
                return Err(SharingViolation::TdrsTime {
                    backhaul: s.backhaul_time_frac,
                    incident: s.incident_time_frac,
                });
            }
        }
        SharingMode::Fdrs => {
            let sum_hz = s.backhaul_bw_hz + s.incident_bw_hz;
            if !close(sum_hz, remaining_hz) {
                return Err(SharingViolation::FdrsBandwidth {
                    sum_hz,
                    remaining_hz,
                });
            }
            if !(close(s.backhaul_time_frac, 1.0) && close(s.incident_time_frac, 1.0)) {
                return Err(SharingViolation::FdrsTime {
                    backhaul: s.backhaul_time_frac,
                    incident: s.incident_time_frac,
                });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConfig {
    /// SINR threshold γ, linear.
    pub gamma: f64,
    pub resource_block_hz: f64,
    pub n_resource_blocks: u32,
}

impl Default for RadioConfig {
    fn default() -> Self {
        RadioConfig::from_db(10.0, 50, 12, 15e3)
    }
}

impl RadioConfig {
    pub fn from_db(
        gamma_db: f64,
        n_resource_blocks: u32,
        subcarriers_per_block: u32,
        subcarrier_spacing_hz: f64,
    ) -> Self {
        RadioConfig {
            gamma: crate::channel::db_to_linear(gamma_db),
            resource_block_hz: subcarriers_per_block as f64 * subcarrier_spacing_hz,
            n_resource_blocks,
        }
    }

    pub fn total_bw_hz(&self) -> f64 {
        self.n_resource_blocks as f64 * self.resource_block_hz
    }

    pub fn blocks_hz(&self, n: u32) -> f64 {
        n as f64 * self.resource_block_hz
    }

    /// bits/s/Hz credited to a successful subcarrier: `log2(1+γ)`.
    pub fn spectral_eff_bits(&self) -> f64 {
        (1.0 + self.gamma).log2()
    }

    pub fn validate(&self) -> Result<(), ThroughputError> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(ThroughputError::Radio(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if !(self.resource_block_hz.is_finite() && self.resource_block_hz > 0.0) {
            return Err(ThroughputError::Radio(format!(
                "resource block bandwidth must be positive, got {} Hz",
                self.resource_block_hz
            )));
        }
        if self.n_resource_blocks == 0 {
            return Err(ThroughputError::Radio(
                "at least one resource block required".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Architecture {
    /// Dense stationary BTSs serve routine and incident UEs alike.
    Conventional,
    ProposedTdrs,
    ProposedFdrs,
}

impl Architecture {
    pub const ALL: [Architecture; 3] = [
        Architecture::Conventional,
        Architecture::ProposedTdrs,
        Architecture::ProposedFdrs,
    ];

    pub fn mode(&self) -> Option<SharingMode> {
        match self {
            Architecture::Conventional => None,
            Architecture::ProposedTdrs => Some(SharingMode::Tdrs),
            Architecture::ProposedFdrs => Some(SharingMode::Fdrs),
        }
    }

    pub fn from_mode(mode: SharingMode) -> Self {
        match mode {
            SharingMode::Tdrs => Architecture::ProposedTdrs,
            SharingMode::Fdrs => Architecture::ProposedFdrs,
        }
    }

    pub fn has_backhaul(&self) -> bool {
        self.mode().is_some()
    }

    pub fn label(&self) -> &'static str {
        match self {
            Architecture::Conventional => "conv",
            Architecture::ProposedTdrs => "tdrs",
            Architecture::ProposedFdrs => "fdrs",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Architecture {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "conv" | "conventional" => Ok(Architecture::Conventional),
            "tdrs" => Ok(Architecture::ProposedTdrs),
            "fdrs" => Ok(Architecture::ProposedFdrs),
            other => Err(format!(
                "unknown architecture `{other}` (expected conv, tdrs or fdrs)"
            )),
        }
    }
}

/// Which stationary BTSs interfere with incident-scene UEs served by the
/// mobile BTS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IncidentInterferers {
    /// Every stationary BTS, including the one whose cell hosts the scene.
    #[default]
    AllStationary,
    /// Every stationary BTS except the serving cell's own.
    ExcludeServing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkModels {
    pub access: PathLossModel,
    pub backhaul: PathLossModel,
    pub incident_interferers: IncidentInterferers,
}

impl Default for LinkModels {
    fn default() -> Self {
        LinkModels::table_defaults()
    }
}

impl LinkModels {
    pub fn table_defaults() -> Self {
        LinkModels {
            access: PathLossModel::ACCESS,
            backhaul: PathLossModel::BACKHAUL,
            incident_interferers: IncidentInterferers::AllStationary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputReport {
    pub architecture: Architecture,
    pub routine_bps: f64,
    pub incident_bps: f64,
    /// Present for the proposed architectures only.
    pub backhaul_bps: Option<f64>,
    pub sharing: Option<ResourceSharing>,
}

/// Serving link and interfering links seen by one receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct UeLinks {
    pub serving: LinkGain,
    pub interferers: Vec<LinkGain>,
}

/// A set of receivers served by one transmitter with round-robin sharing.
#[derive(Debug, Clone, PartialEq)]
pub struct ServedSet {
    pub bw_hz: f64,
    pub time_frac: f64,
    /// Round-robin weight `|Z|`; may exceed `links.len()` when only part of
    /// the served population is summed.
    pub n_sharing: usize,
    pub links: Vec<UeLinks>,
}

impl ServedSet {
    /// Rate credited per unit of success probability of one UE.
    pub fn rate_per_success(&self, gamma: f64) -> f64 {
        if self.n_sharing == 0 {
            return 0.0;
        }
        self.time_frac * self.bw_hz * (1.0 + gamma).log2() / self.n_sharing as f64
    }

    /// Aggregate rate from per-UE success probabilities; zero for an empty set.
    pub fn aggregate(&self, probabilities: &[f64], gamma: f64) -> f64 {
        if probabilities.is_empty() {
            0.0
        } else {
            self.rate_per_success(gamma) * probabilities.iter().sum::<f64>()
        }
    }

    pub fn success_probabilities(&self, noise_psd: f64, gamma: f64) -> Vec<f64> {
        self.links
            .iter()
            .map(|l| success_probability(&l.serving, &l.interferers, noise_psd, gamma))
            .collect()
    }
}

/// Everything needed to evaluate one architecture on one layout.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudget {
    pub architecture: Architecture,
    pub noise_psd: f64,
    pub gamma: f64,
    pub routine: ServedSet,
    pub incident: ServedSet,
    pub backhaul: Option<ServedSet>,
    pub sharing: Option<ResourceSharing>,
}

fn links_to(
    rx: Point,
    server: Point,
    serving_psd: f64,
    interferers: &[Point],
    interferer_psd: f64,
    model: &PathLossModel,
) -> UeLinks {
    UeLinks {
        serving: LinkGain::new(path_gain(model, distance(rx, server)).value, serving_psd),
        interferers: interferers
            .iter()
            .map(|&a| LinkGain::new(path_gain(model, distance(rx, a)).value, interferer_psd))
            .collect(),
    }
}

impl LinkBudget {
    /// One stationary BTS serves `U ∪ C` on the whole band; every other
    /// stationary BTS interferes at the same PSD `P/W`.
    pub fn conventional(
        layout: &CellLayout,
        models: &LinkModels,
        powers: &PowerConfig,
        radio: &RadioConfig,
    ) -> Result<Self, ThroughputError> {
        powers.validate()?;
        radio.validate()?;
        let w = radio.total_bw_hz();
        let psd = powers.stationary_total_w() / w;
        let n_sharing = layout.routine_ues.len() + layout.incident.ues.len();
        let set = |ues: &[Point]| ServedSet {
            bw_hz: w,
            time_frac: 1.0,
            n_sharing,
            links: ues
                .iter()
                .map(|&u| {
                    links_to(
                        u,
                        layout.serving_bts,
                        psd,
                        &layout.interferer_bts,
                        psd,
                        &models.access,
                    )
                })
                .collect(),
        };
        Ok(LinkBudget {
            architecture: Architecture::Conventional,
            noise_psd: powers.noise_psd_w_hz(),
            gamma: radio.gamma,
            routine: set(&layout.routine_ues),
            incident: set(&layout.incident.ues),
            backhaul: None,
            sharing: None,
        })
    }

    /// Stationary BTS serves `U` on `W_u` with `P − P_b`; the mobile BTS at
    /// the scene center serves `C` on `W_c` with `P′`; the backhaul runs
    /// interference-free on `W_b` with `P_b`.
    pub fn proposed(
        layout: &CellLayout,
        models: &LinkModels,
        powers: &PowerConfig,
        sharing: &ResourceSharing,
        radio: &RadioConfig,
    ) -> Result<Self, ThroughputError> {
        validate_sharing(sharing)?;
        radio.validate()?;
        check_total_bw(sharing, radio)?;
        let routine_power = routine_tx_power(powers)?;
        let backhaul = backhaul_set(layout, models, powers, sharing)?;

        let interferer_psd = powers.stationary_total_w() / sharing.interferer_bw_hz();
        let routine_psd = routine_power / sharing.routine_bw_hz;
        let mobile_psd = powers.mobile_total_w() / sharing.incident_bw_hz;

        let routine = ServedSet {
            bw_hz: sharing.routine_bw_hz,
            time_frac: 1.0,
            n_sharing: layout.routine_ues.len(),
            links: layout
                .routine_ues
                .iter()
                .map(|&u| {
                    links_to(
                        u,
                        layout.serving_bts,
                        routine_psd,
                        &layout.interferer_bts,
                        interferer_psd,
                        &models.access,
                    )
                })
                .collect(),
        };

        let incident_interferers: Vec<Point> = match models.incident_interferers {
            IncidentInterferers::AllStationary => layout.stationary_bts().collect(),
            IncidentInterferers::ExcludeServing => layout.interferer_bts.clone(),
        };
        let incident = ServedSet {
            bw_hz: sharing.incident_bw_hz,
            time_frac: sharing.incident_time_frac,
            n_sharing: layout.incident.ues.len(),
            links: layout
                .incident
                .ues
                .iter()
                .map(|&c| {
                    links_to(
                        c,
                        layout.incident.center,
                        mobile_psd,
                        &incident_interferers,
                        interferer_psd,
                        &models.access,
                    )
                })
                .collect(),
        };

        Ok(LinkBudget {
            architecture: Architecture::from_mode(sharing.mode),
            noise_psd: powers.noise_psd_w_hz(),
            gamma: radio.gamma,
            routine,
            incident,
            backhaul: Some(backhaul),
            sharing: Some(*sharing),
        })
    }

    pub fn closed_form(&self) -> ThroughputReport {
        let rate = |set: &ServedSet| {
            set.aggregate(
                &set.success_probabilities(self.noise_psd, self.gamma),
                self.gamma,
            )
        };
        ThroughputReport {
            architecture: self.architecture,
            routine_bps: rate(&self.routine),
            incident_bps: rate(&self.incident),
            backhaul_bps: self.backhaul.as_ref().map(rate),
            sharing: self.sharing,
        }
    }

    /// Served sets in a fixed order: routine, incident, then backhaul.
    pub fn sets(&self) -> impl Iterator<Item = &ServedSet> {
        [
            Some(&self.routine),
            Some(&self.incident),
            self.backhaul.as_ref(),
        ]
        .into_iter()
        .flatten()
    }
}

fn check_total_bw(sharing: &ResourceSharing, radio: &RadioConfig) -> Result<(), ThroughputError> {
    if close(sharing.total_bw_hz, radio.total_bw_hz()) {
        Ok(())
    } else {
        Err(ThroughputError::BandwidthMismatch {
            sharing_hz: sharing.total_bw_hz,
            radio_hz: radio.total_bw_hz(),
        })
    }
}

fn backhaul_set(
    layout: &CellLayout,
    models: &LinkModels,
    powers: &PowerConfig,
    sharing: &ResourceSharing,
) -> Result<ServedSet, ThroughputError> {
    let pb = powers.backhaul_dbm.ok_or(ChannelError::NoBackhaulPower)?;
    let g = path_gain(
        &models.backhaul,
        distance(layout.serving_bts, layout.incident.center),
    )
    .value;
    Ok(ServedSet {
        bw_hz: sharing.backhaul_bw_hz,
        time_frac: sharing.backhaul_time_frac,
        n_sharing: 1,
        // all stationary BTSs are muted while the backhaul is active
        links: vec![UeLinks {
            serving: LinkGain::new(g, crate::channel::dbm_to_watts(pb) / sharing.backhaul_bw_hz),
            interferers: Vec::new(),
        }],
    })
}

/// `P{SINR > γ}` for exponential (unit-mean) fading on every link.
pub fn success_probability(
    serving: &LinkGain,
    interferers: &[LinkGain],
    noise_psd: f64,
    gamma: f64,
) -> f64 {
    let signal = serving.received_psd();
    let noise_term = (-noise_psd * gamma / signal).exp();
    interferers.iter().fold(noise_term, |acc, a| {
        acc / (a.received_psd() * gamma / signal + 1.0)
    })
}

/// Round-robin aggregate `ρ · W · log2(1+γ) · Σ p_u / |Z|` over the summed UEs.
pub fn aggregate_throughput(
    bw_hz: f64,
    time_frac: f64,
    probabilities: &[f64],
    n_sharing: usize,
    gamma: f64,
) -> Result<f64, ThroughputError> {
    if probabilities.is_empty() {
        return Err(ThroughputError::EmptyUeSet);
    }
    if n_sharing < probabilities.len() {
        return Err(ThroughputError::SharingWeightTooSmall {
            n_sharing,
            n_ues: probabilities.len(),
        });
    }
    let set = ServedSet {
        bw_hz,
        time_frac,
        n_sharing,
        links: Vec::new(),
    };
    Ok(set.aggregate(probabilities, gamma))
}

pub fn conventional_throughputs(
    layout: &CellLayout,
    models: &LinkModels,
    powers: &PowerConfig,
    radio: &RadioConfig,
) -> Result<ThroughputReport, ThroughputError> {
    Ok(LinkBudget::conventional(layout, models, powers, radio)?.closed_form())
}

/// Backhaul rate `ρ_b W_b log2(1+γ) exp(−η W_b γ / (g(o,o′) P_b))`.
///
/// The sharing identities are not checked here, so degenerate splits such
/// as `ρ_b = 0` simply yield zero.
pub fn proposed_backhaul_throughput(
    layout: &CellLayout,
    models: &LinkModels,
    powers: &PowerConfig,
    sharing: &ResourceSharing,
    radio: &RadioConfig,
) -> Result<f64, ThroughputError> {
    powers.validate()?;
    let set = backhaul_set(layout, models, powers, sharing)?;
    let noise = powers.noise_psd_w_hz();
    Ok(set.aggregate(&set.success_probabilities(noise, radio.gamma), radio.gamma))
}

pub fn proposed_access_throughputs(
    layout: &CellLayout,
    models: &LinkModels,
    powers: &PowerConfig,
    sharing: &ResourceSharing,
    radio: &RadioConfig,
) -> Result<ThroughputReport, ThroughputError> {
    Ok(LinkBudget::proposed(layout, models, powers, sharing, radio)?.closed_form())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_layout;
    use proptest::prelude::*;

    const W: f64 = 9e6;

    fn tdrs_reference() -> ResourceSharing {
        ResourceSharing::tdrs(W, 4.5e6, 0.4)
    }

    fn fdrs_reference() -> ResourceSharing {
        ResourceSharing::fdrs(W, 4.5e6, 1.8e6)
    }

    #[test]
    fn success_probability_spot_values() {
        let s = LinkGain::new(1e-10, 1e-6);
        assert_eq!(success_probability(&s, &[], 0.0, 10.0), 1.0);
        let p = success_probability(&s, &[s], 0.0, 10.0);
        assert!((p - 1.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn aggregate_spot_values() {
        let r = aggregate_throughput(9e6, 1.0, &[1.0], 1, 10.0).unwrap();
        assert!((r - 9e6 * 11f64.log2()).abs() < 1e-6);
        assert!((r / 1e6 - 31.13).abs() < 0.01);
        assert_eq!(
            aggregate_throughput(9e6, 1.0, &[0.0; 5], 5, 10.0).unwrap(),
            0.0
        );
        assert_eq!(
            aggregate_throughput(9e6, 1.0, &[], 3, 10.0),
            Err(ThroughputError::EmptyUeSet)
        );
        assert!(matches!(
            aggregate_throughput(9e6, 1.0, &[0.5, 0.5], 1, 10.0),
            Err(ThroughputError::SharingWeightTooSmall { .. })
        ));
    }

    #[test]
    fn equal_interferer_throughput() {
        // |Z| = 1, η = 0, one interferer of equal received PSD
        let s = LinkGain::new(1e-12, 4e-6);
        let p = success_probability(&s, &[s], 0.0, 10.0);
        let r = aggregate_throughput(W, 1.0, &[p], 1, 10.0).unwrap();
        assert!((r - W * 11f64.log2() / 11.0).abs() < 1e-6);
    }

    #[test]
    fn sharing_validation() {
        assert_eq!(validate_sharing(&tdrs_reference()), Ok(()));
        assert_eq!(validate_sharing(&fdrs_reference()), Ok(()));

        let fdrs_bad_time = ResourceSharing {
            backhaul_time_frac: 0.5,
            ..fdrs_reference()
        };
        let err = validate_sharing(&fdrs_bad_time).unwrap_err();
        assert!(matches!(err, SharingViolation::FdrsTime { .. }));
        assert!(err.to_string().contains("ρ_b = ρ_c = 1 required"));

        let tdrs_bad_bw = ResourceSharing {
            backhaul_bw_hz: 3e6,
            ..tdrs_reference()
        };
        let err = validate_sharing(&tdrs_bad_bw).unwrap_err();
        assert!(err.to_string().contains("W_b = W_c = W − W_u"));

        let tdrs_bad_time = ResourceSharing {
            incident_time_frac: 0.7,
            ..tdrs_reference()
        };
        assert!(matches!(
            validate_sharing(&tdrs_bad_time),
            Err(SharingViolation::TdrsTime { .. })
        ));

        let fdrs_bad_bw = ResourceSharing {
            incident_bw_hz: 3e6,
            ..fdrs_reference()
        };
        assert!(matches!(
            validate_sharing(&fdrs_bad_bw),
            Err(SharingViolation::FdrsBandwidth { .. })
        ));

        let too_much = ResourceSharing::tdrs(W, 9e6, 0.4);
        assert!(validate_sharing(&too_much).is_err());
        let over_one = ResourceSharing::tdrs(W, 4.5e6, 1.3);
        assert!(matches!(
            validate_sharing(&over_one),
            Err(SharingViolation::TimeFraction {
                name: "backhaul_time_frac",
                ..
            })
        ));
    }

    #[test]
    fn reference_bandwidths() {
        let radio = RadioConfig::default();
        assert_eq!(radio.total_bw_hz(), 9e6);
        assert_eq!(radio.blocks_hz(25), 4.5e6);
        assert_eq!(radio.blocks_hz(10), 1.8e6);
        assert_eq!(radio.blocks_hz(15), 2.7e6);
        assert!((radio.gamma - 10.0).abs() < 1e-12);
    }

    #[test]
    fn conventional_without_incident_ues() {
        let mut layout = build_layout(500.0, 2, 12, 200.0, 200.0, 4).unwrap();
        layout.incident.ues.clear();
        let models = LinkModels::table_defaults();
        let powers = PowerConfig::default();
        let radio = RadioConfig::default();
        let report = conventional_throughputs(&layout, &models, &powers, &radio).unwrap();
        assert_eq!(report.incident_bps, 0.0);
        assert_eq!(report.backhaul_bps, None);

        let psd = powers.stationary_total_w() / W;
        let probs: Vec<f64> = layout
            .routine_ues
            .iter()
            .map(|&u| {
                let s = LinkGain::new(
                    path_gain(&models.access, distance(u, layout.serving_bts)).value,
                    psd,
                );
                let i: Vec<_> = layout
                    .interferer_bts
                    .iter()
                    .map(|&a| LinkGain::new(path_gain(&models.access, distance(u, a)).value, psd))
                    .collect();
                success_probability(&s, &i, powers.noise_psd_w_hz(), radio.gamma)
            })
            .collect();
        let direct = aggregate_throughput(W, 1.0, &probs, 12, radio.gamma).unwrap();
        assert!((report.routine_bps - direct).abs() <= 1e-9 * direct);
    }

    #[test]
    fn backhaul_limits() {
        let layout = build_layout(900.0, 2, 80, 200.0, 200.0, 50).unwrap();
        let models = LinkModels::table_defaults();
        let powers = PowerConfig::default();
        let radio = RadioConfig::default();
        let rb =
            proposed_backhaul_throughput(&layout, &models, &powers, &tdrs_reference(), &radio).unwrap();
        assert!(rb >= 4e6, "R_b = {rb}");

        let mut colocated = layout.clone();
        colocated.incident.center = colocated.serving_bts;
        let rb = proposed_backhaul_throughput(&colocated, &models, &powers, &tdrs_reference(), &radio)
            .unwrap();
        let ceiling = 0.4 * 4.5e6 * 11f64.log2();
        assert!(rb < ceiling && (ceiling - rb) / ceiling < 1e-9);

        let silent = ResourceSharing {
            backhaul_time_frac: 0.0,
            ..tdrs_reference()
        };
        assert_eq!(
            proposed_backhaul_throughput(&layout, &models, &powers, &silent, &radio).unwrap(),
            0.0
        );

        let no_pb = PowerConfig {
            backhaul_dbm: None,
            ..powers
        };
        assert!(
            proposed_backhaul_throughput(&layout, &models, &no_pb, &tdrs_reference(), &radio).is_err()
        );
    }

    #[test]
    fn proposed_meets_requirements_at_900m() {
        let layout = build_layout(900.0, 2, 80, 200.0, 200.0, 50).unwrap();
        let models = LinkModels::table_defaults();
        let powers = PowerConfig::default();
        let radio = RadioConfig::default();
        for sharing in [tdrs_reference(), fdrs_reference()] {
            let r =
                proposed_access_throughputs(&layout, &models, &powers, &sharing, &radio).unwrap();
            assert!(r.routine_bps >= 2e6, "{r:?}");
            assert!(r.incident_bps >= 8e6, "{r:?}");
            assert!(r.backhaul_bps.unwrap() >= 4e6, "{r:?}");
        }
    }

    #[test]
    fn excluding_serving_bts_helps_incident_ues() {
        let layout = build_layout(900.0, 2, 80, 200.0, 200.0, 50).unwrap();
        let all = LinkModels::table_defaults();
        let excl = LinkModels {
            incident_interferers: IncidentInterferers::ExcludeServing,
            ..all
        };
        let p = PowerConfig::default();
        let radio = RadioConfig::default();
        let a = proposed_access_throughputs(&layout, &all, &p, &tdrs_reference(), &radio).unwrap();
        let b = proposed_access_throughputs(&layout, &excl, &p, &tdrs_reference(), &radio).unwrap();
        assert!(b.incident_bps > a.incident_bps);
        assert_eq!(a.routine_bps, b.routine_bps);
    }

    #[test]
    fn mismatched_total_bandwidth_rejected() {
        let layout = build_layout(900.0, 1, 4, 200.0, 200.0, 4).unwrap();
        let sharing = ResourceSharing::tdrs(10e6, 5e6, 0.4);
        let err = proposed_access_throughputs(
            &layout,
            &LinkModels::table_defaults(),
            &PowerConfig::default(),
            &sharing,
            &RadioConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, ThroughputError::BandwidthMismatch { .. }));
    }

    #[test]
    fn routine_limits_coincide() {
        // FDRS with W_b → 0 and TDRS with ρ_b → 0 both put interferers at P/W
        let layout = build_layout(700.0, 2, 20, 200.0, 200.0, 10).unwrap();
        let m = LinkModels::table_defaults();
        let p = PowerConfig::default();
        let radio = RadioConfig::default();
        let eps = 1e-3;
        let t = proposed_access_throughputs(
            &layout,
            &m,
            &p,
            &ResourceSharing::tdrs(W, 4.5e6, eps),
            &radio,
        )
        .unwrap();
        let f = proposed_access_throughputs(
            &layout,
            &m,
            &p,
            &ResourceSharing::fdrs(W, 4.5e6, eps),
            &radio,
        )
        .unwrap();
        assert!((t.routine_bps - f.routine_bps).abs() / t.routine_bps < 1e-8);
    }

    fn link() -> impl Strategy<Value = LinkGain> {
        (-16.0f64..-6.0, -9.0f64..-4.0)
            .prop_map(|(g, s)| LinkGain::new(10f64.powf(g), 10f64.powf(s)))
    }

    proptest! {
        #[test]
        fn probability_in_unit_interval_and_monotone(
            serving in link(),
            interferers in prop::collection::vec(link(), 0..30),
            extra in link(),
            noise_exp in -23.0f64..-17.0,
            gamma in 0.1f64..100.0,
        ) {
            let noise = 10f64.powf(noise_exp);
            let p = success_probability(&serving, &interferers, noise, gamma);
            // exact zero only through floating-point underflow
            prop_assert!((0.0..=1.0).contains(&p));

            let mut more = interferers.clone();
            more.push(extra);
            let q = success_probability(&serving, &more, noise, gamma);
            prop_assert!(q < p || p < 1e-300);

            let r = success_probability(&serving, &interferers, noise, gamma * 1.5);
            prop_assert!(r < p || p < 1e-300);
        }

        #[test]
        fn conventional_split_is_a_decomposition(side in 150.0f64..1500.0, tiers in 1usize..4, nu in 1usize..40, nc in 1usize..30) {
            let layout = build_layout(side, tiers, nu, 200.0, 200.0, nc).unwrap();
            let budget = LinkBudget::conventional(&layout, &LinkModels::table_defaults(), &PowerConfig::default(), &RadioConfig::default()).unwrap();
            let report = budget.closed_form();
            let mut all = budget.routine.success_probabilities(budget.noise_psd, budget.gamma);
            all.extend(budget.incident.success_probabilities(budget.noise_psd, budget.gamma));
            let joint = aggregate_throughput(W, 1.0, &all, nu + nc, budget.gamma).unwrap();
            let sum = report.routine_bps + report.incident_bps;
            prop_assert!((sum - joint).abs() <= 1e-9 * joint.max(1.0));
        }

        #[test]
        fn tdrs_incident_rate_linear_in_air_time(rho_c in 0.05f64..0.95) {
            let layout = build_layout(900.0, 2, 20, 200.0, 200.0, 10).unwrap();
            let m = LinkModels::table_defaults();
            let p = PowerConfig::default();
            let radio = RadioConfig::default();
            let full = proposed_access_throughputs(&layout, &m, &p, &ResourceSharing::tdrs(W, 4.5e6, 0.5), &radio).unwrap();
            let part = proposed_access_throughputs(&layout, &m, &p, &ResourceSharing::tdrs(W, 4.5e6, 1.0 - rho_c), &radio).unwrap();
            prop_assert!((part.incident_bps - full.incident_bps * rho_c / 0.5).abs() <= 1e-9 * full.incident_bps);
        }

        #[test]
        fn backhaul_ignores_interferers(tiers in 1usize..5) {
            let a = build_layout(900.0, 1, 4, 200.0, 200.0, 4).unwrap();
            let b = build_layout(900.0, tiers, 4, 200.0, 200.0, 4).unwrap();
            let m = LinkModels::table_defaults();
            let p = PowerConfig::default();
            let radio = RadioConfig::default();
            let ra = proposed_backhaul_throughput(&a, &m, &p, &tdrs_reference(), &radio).unwrap();
            let rb = proposed_backhaul_throughput(&b, &m, &p, &tdrs_reference(), &radio).unwrap();
            prop_assert_eq!(ra, rb);
        }

        #[test]
        fn noise_free_interference_is_scale_invariant(alpha in 0.2f64..5.0, side in 300.0f64..1500.0) {
            let layout = build_layout(side, 2, 12, 200.0, 200.0, 8).unwrap();
            let m = LinkModels::table_defaults();
            let p = PowerConfig::default();
            let radio = RadioConfig::default();
            // evaluated with η = 0 below; every distance stays above the 1 m clamp
            let a = LinkBudget::conventional(&layout, &m, &p, &radio).unwrap();
            let b = LinkBudget::conventional(&layout.scaled(alpha), &m, &p, &radio).unwrap();
            for (sa, sb) in a.sets().zip(b.sets()) {
                for (pa, pb) in sa.success_probabilities(0.0, radio.gamma).iter().zip(sb.success_probabilities(0.0, radio.gamma)) {
                    prop_assert!((pa - pb).abs() <= 1e-12);
                }
            }
        }

        #[test]
        fn translation_leaves_throughputs_unchanged(dx in -5e3f64..5e3, dy in -5e3f64..5e3) {
            let layout = build_layout(800.0, 2, 20, 200.0, 200.0, 10).unwrap();
            let m = LinkModels::table_defaults();
            let p = PowerConfig::default();
            let radio = RadioConfig::default();
            let a = proposed_access_throughputs(&layout, &m, &p, &tdrs_reference(), &radio).unwrap();
            let b = proposed_access_throughputs(&layout.translated(dx, dy), &m, &p, &tdrs_reference(), &radio).unwrap();
            prop_assert!((a.routine_bps - b.routine_bps).abs() <= 1e-9 * a.routine_bps);
            prop_assert!((a.incident_bps - b.incident_bps).abs() <= 1e-9 * a.incident_bps);
            prop_assert!((a.backhaul_bps.unwrap() - b.backhaul_bps.unwrap()).abs() <= 1e-9 * a.backhaul_bps.unwrap());
        }
    }
}
