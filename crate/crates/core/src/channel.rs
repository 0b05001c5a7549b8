//! Path loss, power and noise conversions.
//!
//! Everything downstream works in linear SI units (W, W/Hz, Hz, m); dB and
//! dBm only appear on configuration boundaries.

use thiserror::Error;

/// Distances below this are clamped before evaluating the log-distance model.
pub const MIN_DISTANCE_M: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("path loss slope must be positive, got {0} dB/decade")]
    NonPositiveSlope(f64),
    #[error("path loss intercept must be non-negative, got {0} dB")]
    NegativeIntercept(f64),
    #[error("{name} must be finite, got {value}")]
    NotFinite { name: &'static str, value: f64 },
    #[error(
        "backhaul power {backhaul_dbm} dBm must be below the stationary total {total_dbm} dBm"
    )]
    BackhaulNotBelowTotal { backhaul_dbm: f64, total_dbm: f64 },
    #[error("no backhaul transmit power configured")]
    NoBackhaulPower,
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// `PL(d) = intercept + slope · log10(d)` in dB, `d` in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossModel {
    pub intercept_db: f64,
    pub slope_db_per_decade: f64,
}

impl PathLossModel {
    /// Stationary BTS to mobile BTS.
    pub const BACKHAUL: PathLossModel = PathLossModel {
        intercept_db: 34.5,
        slope_db_per_decade: 35.0,
    };
    /// Any BTS to a routine or incident-scene UE.
    pub const ACCESS: PathLossModel = PathLossModel {
        intercept_db: 39.3,
        slope_db_per_decade: 37.6,
    };

    pub fn new(intercept_db: f64, slope_db_per_decade: f64) -> Result<Self, ChannelError> {
        let model = PathLossModel {
            intercept_db,
            slope_db_per_decade,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(self.slope_db_per_decade.is_finite() && self.slope_db_per_decade > 0.0) {
            return Err(ChannelError::NonPositiveSlope(self.slope_db_per_decade));
        }
        if !(self.intercept_db.is_finite() && self.intercept_db >= 0.0) {
            return Err(ChannelError::NegativeIntercept(self.intercept_db));
        }
        Ok(())
    }

    /// Path loss in dB, after clamping to [`MIN_DISTANCE_M`].
    pub fn loss_db(&self, d: f64) -> f64 {
        self.intercept_db + self.slope_db_per_decade * d.max(MIN_DISTANCE_M).log10()
    }
}

/// Linear path gain `g = 10^(−PL/10)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathGain {
    pub value: f64,
    /// The distance was below [`MIN_DISTANCE_M`] and was clamped.
    pub clamped: bool,
}

pub fn path_gain(model: &PathLossModel, d: f64) -> PathGain {
    PathGain {
        value: 10f64.powf(-model.loss_db(d) / 10.0),
        clamped: d < MIN_DISTANCE_M,
    }
}

/// A transmitter as seen by one receiver: path gain and the transmit power
/// spectral density on the shared subcarrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGain {
    pub gain: f64,
    /// W/Hz
    pub psd: f64,
}

impl LinkGain {
    pub fn new(gain: f64, psd: f64) -> Self {
        LinkGain { gain, psd }
    }

    /// Mean received power spectral density `g · S`.
    pub fn received_psd(&self) -> f64 {
        self.gain * self.psd
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerConfig {
    /// Total stationary BTS power `P`.
    pub stationary_total_dbm: f64,
    /// Stationary-to-mobile backhaul power `P_b`; `None` when no backhaul
    /// is allocated.
    pub backhaul_dbm: Option<f64>,
    /// Total mobile BTS power `P′`.
    pub mobile_total_dbm: f64,
    /// Noise power spectral density `η`.
    pub noise_psd_dbm_hz: f64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig {
            stationary_total_dbm: 46.0,
            backhaul_dbm: Some(45.0),
            mobile_total_dbm: 43.0,
            noise_psd_dbm_hz: -174.0,
        }
    }
}

impl PowerConfig {
    pub fn validate(&self) -> Result<(), ChannelError> {
        let finite = |name, value: f64| {
            if value.is_finite() {
                Ok(())
            } else {
                Err(ChannelError::NotFinite { name, value })
            }
        };
        finite("stationary_total_dbm", self.stationary_total_dbm)?;
        finite("mobile_total_dbm", self.mobile_total_dbm)?;
        finite("noise_psd_dbm_hz", self.noise_psd_dbm_hz)?;
        if let Some(pb) = self.backhaul_dbm {
            finite("backhaul_dbm", pb)?;
            if pb >= self.stationary_total_dbm {
                return Err(ChannelError::BackhaulNotBelowTotal {
                    backhaul_dbm: pb,
                    total_dbm: self.stationary_total_dbm,
                });
            }
        }
        Ok(())
    }

    pub fn stationary_total_w(&self) -> f64 {
        dbm_to_watts(self.stationary_total_dbm)
    }

    pub fn mobile_total_w(&self) -> f64 {
        dbm_to_watts(self.mobile_total_dbm)
    }

    /// Zero when no backhaul is allocated.
    pub fn backhaul_w(&self) -> f64 {
        self.backhaul_dbm.map_or(0.0, dbm_to_watts)
    }

    pub fn noise_psd_w_hz(&self) -> f64 {
        dbm_to_watts(self.noise_psd_dbm_hz)
    }
}

/// Power left for routine UEs once the backhaul share is taken: `P − P_b`.
pub fn routine_tx_power(p: &PowerConfig) -> Result<f64, ChannelError> {
    p.validate()?;
    Ok(p.stationary_total_w() - p.backhaul_w())
}
