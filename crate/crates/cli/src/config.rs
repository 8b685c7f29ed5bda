//! Flat experiment configuration. Every physical quantity carries its unit
//! in the key name and unknown keys are rejected.

use std::path::Path;

use flee_core::feasibility::{HalfwayConvention, ScenarioKind};
use flee_core::model::PhysicalParams;
use flee_core::montecarlo::McMode;
use flee_core::reliability::log_space;
use flee_core::sim::DamageModel;
use flee_core::sweep::{linear_range, SweepParameter};
use flee_core::FleeError;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioChoice {
    #[default]
    Both,
    Halfway,
    AtHole,
}

impl ScenarioChoice {
    pub fn kinds(&self) -> Vec<ScenarioKind> {
        match self {
            ScenarioChoice::Both => ScenarioKind::BOTH.to_vec(),
            ScenarioChoice::Halfway => vec![ScenarioKind::Halfway],
            ScenarioChoice::AtHole => vec![ScenarioKind::AtHole],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MappingChoice {
    #[default]
    Tiled,
    Isolated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub l_mm: f64,
    pub d: u32,
    pub v_p_mm_per_us: f64,
    pub delta_cycles: u32,
    pub t_c_us: f64,
    pub r_max_mm: f64,
    pub move_displacement_mm: f64,

    pub scenario: ScenarioChoice,
    pub halfway_convention: HalfwayConvention,
    pub d_max: u32,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_stop: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_step: Option<f64>,

    pub replicate_parameter: SweepParameter,
    pub replicate_delta_min_cycles: u32,
    pub replicate_delta_max_cycles: u32,
    pub replicate_move_min_mm: f64,
    pub replicate_move_max_mm: f64,

    pub lambda_per_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_s: Option<Vec<f64>>,
    pub tau_min_s: f64,
    pub tau_max_s: f64,
    pub tau_points: usize,
    pub p_hole_hit: f64,
    pub n_trials: u64,
    pub mc_mode: McMode,
    pub seed: u64,

    pub mapping: MappingChoice,
    pub mapping_rows: usize,
    pub mapping_cols: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epicenter_x_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epicenter_y_mm: Option<f64>,
    pub strike_cycle: u64,
    pub damage_model: DamageModel,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dwell_cycles: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let p = PhysicalParams::reference();
        ExperimentConfig {
            l_mm: p.l,
            d: p.d,
            v_p_mm_per_us: p.v_p,
            delta_cycles: p.delta,
            t_c_us: p.t_c,
            r_max_mm: p.r_max,
            move_displacement_mm: p.move_displacement,
            scenario: ScenarioChoice::Both,
            halfway_convention: HalfwayConvention::default(),
            d_max: flee_core::feasibility::DEFAULT_D_MAX,
            sweep_values: None,
            sweep_start: None,
            sweep_stop: None,
            sweep_step: None,
            replicate_parameter: SweepParameter::L,
            replicate_delta_min_cycles: 1,
            replicate_delta_max_cycles: 25,
            replicate_move_min_mm: 1.0,
            replicate_move_max_mm: 1_000_000.0,
            lambda_per_s: 0.1,
            tau_s: None,
            tau_min_s: 1e-4,
            tau_max_s: 1.0,
            tau_points: 41,
            p_hole_hit: 2.0 / 50.0,
            n_trials: 0,
            mc_mode: McMode::PaperAligned,
            seed: 1,
            mapping: MappingChoice::Tiled,
            mapping_rows: 1,
            mapping_cols: 1,
            epicenter_x_mm: None,
            epicenter_y_mm: None,
            strike_cycle: 0,
            damage_model: DamageModel::Disc,
            dwell_cycles: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn physical(&self) -> Result<PhysicalParams, CliError> {
        let p = PhysicalParams {
            l: self.l_mm,
            d: self.d,
            v_p: self.v_p_mm_per_us,
            delta: self.delta_cycles,
            t_c: self.t_c_us,
            r_max: self.r_max_mm,
            move_displacement: self.move_displacement_mm,
        };
        p.validate()?;
        Ok(p)
    }

    /// Sweep values: the explicit list, else the start/stop/step range,
    /// else the default range for `parameter`.
    pub fn sweep_values_for(&self, parameter: SweepParameter) -> Result<Vec<f64>, CliError> {
        let range = (self.sweep_start, self.sweep_stop, self.sweep_step);
        match (&self.sweep_values, range) {
            (Some(_), (Some(_), _, _) | (_, Some(_), _) | (_, _, Some(_))) => {
                Err(CliError::Config(
                    "give either sweep_values or sweep_start/sweep_stop/sweep_step, not both"
                        .into(),
                ))
            }
            (Some(v), _) if v.is_empty() => Err(CliError::Config("sweep_values is empty".into())),
            (Some(v), _) => Ok(v.clone()),
            (None, (Some(a), Some(b), Some(s))) => {
                let v = linear_range(a, b, s);
                if v.is_empty() {
                    return Err(CliError::Range("sweep range is empty".into()));
                }
                Ok(v)
            }
            (None, (None, None, None)) => Ok(match parameter {
                SweepParameter::L => linear_range(1.0, 60.0, 1.0),
                SweepParameter::RMax => linear_range(1.0, 100.0, 1.0),
                SweepParameter::Delta => linear_range(1.0, 25.0, 1.0),
            }),
            _ => Err(CliError::Config(
                "sweep_start, sweep_stop and sweep_step must be given together".into(),
            )),
        }
    }

    pub fn tau_grid(&self) -> Result<Vec<f64>, CliError> {
        match &self.tau_s {
            Some(v) if v.is_empty() => Err(CliError::Config("tau_s is empty".into())),
            Some(v) => Ok(v.clone()),
            None => Ok(log_space(self.tau_min_s, self.tau_max_s, self.tau_points)?),
        }
    }
}

impl From<FleeError> for CliError {
    fn from(e: FleeError) -> Self {
        match e {
            FleeError::EmptyRange | FleeError::Format(_) => CliError::Config(e.to_string()),
            FleeError::Unescapable { .. } => CliError::Unescapable(e.to_string()),
            FleeError::Io(_) | FleeError::Csv(_) => CliError::Io(e.to_string()),
            _ => CliError::Range(e.to_string()),
        }
    }
}
