//! A complete experiment apart from the cell side length.

use thiserror::Error;

use crate::channel::PowerConfig;
use crate::geometry::{build_layout, CellLayout, LayoutError};
use crate::throughput::{
    validate_sharing, Architecture, LinkBudget, LinkModels, RadioConfig, ResourceSharing,
    ThroughputError, ThroughputReport,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Throughput(#[from] ThroughputError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryParams {
    pub tiers: usize,
    pub n_routine: usize,
    pub n_incident: usize,
    pub scene_width: f64,
    pub scene_height: f64,
}

impl Default for GeometryParams {
    fn default() -> Self {
        GeometryParams {
            tiers: 2,
            n_routine: 80,
            n_incident: 50,
            scene_width: 200.0,
            scene_height: 200.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub geometry: GeometryParams,
    pub powers: PowerConfig,
    pub radio: RadioConfig,
    pub models: LinkModels,
    pub tdrs: ResourceSharing,
    pub fdrs: ResourceSharing,
}

impl Default for Scenario {
    /// Reference system: 80 routine and 50 incident UEs, a 200 m scene,
    /// 46/45/43 dBm, −174 dBm/Hz, γ = 10 dB, 50 × 180 kHz resource blocks;
    /// TDRS with 25 routine blocks and ρ_b = 0.4, FDRS with 25/10/15 blocks.
    fn default() -> Self {
        let radio = RadioConfig::default();
        let w = radio.total_bw_hz();
        Scenario {
            geometry: GeometryParams::default(),
            powers: PowerConfig::default(),
            radio,
            models: LinkModels::table_defaults(),
            tdrs: ResourceSharing::tdrs(w, radio.blocks_hz(25), 0.4),
            fdrs: ResourceSharing::fdrs(w, radio.blocks_hz(25), radio.blocks_hz(10)),
        }
    }
}

impl Scenario {
    pub fn layout(&self, side_length: f64) -> Result<CellLayout, LayoutError> {
        let g = &self.geometry;
        build_layout(
            side_length,
            g.tiers,
            g.n_routine,
            g.scene_width,
            g.scene_height,
            g.n_incident,
        )
    }

    /// Scene does not fit inside a cell of this size.
    pub fn scene_exceeds_cell(&self, side_length: f64) -> bool {
        self.geometry.scene_width > side_length || self.geometry.scene_height > side_length
    }

    pub fn sharing(&self, architecture: Architecture) -> Option<&ResourceSharing> {
        match architecture {
            Architecture::Conventional => None,
            Architecture::ProposedTdrs => Some(&self.tdrs),
            Architecture::ProposedFdrs => Some(&self.fdrs),
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.layout(1000.0)?;
        self.powers.validate().map_err(ThroughputError::from)?;
        self.radio.validate()?;
        self.models
            .access
            .validate()
            .map_err(ThroughputError::from)?;
        self.models
            .backhaul
            .validate()
            .map_err(ThroughputError::from)?;
        validate_sharing(&self.tdrs).map_err(ThroughputError::from)?;
        validate_sharing(&self.fdrs).map_err(ThroughputError::from)?;
        Ok(())
    }

    pub fn budget(
        &self,
        architecture: Architecture,
        layout: &CellLayout,
    ) -> Result<LinkBudget, ThroughputError> {
        match self.sharing(architecture) {
            None => LinkBudget::conventional(layout, &self.models, &self.powers, &self.radio),
            Some(s) => LinkBudget::proposed(layout, &self.models, &self.powers, s, &self.radio),
        }
    }

    pub fn report(
        &self,
        architecture: Architecture,
        side_length: f64,
    ) -> Result<ThroughputReport, ScenarioError> {
        let layout = self.layout(side_length)?;
        Ok(self.budget(architecture, &layout)?.closed_form())
    }
}
