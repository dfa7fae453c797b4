use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::qsim::NoiseModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviceMode {
    Simulator,
    #[serde(rename = "hardware")]
    HardwareEmulation,
}

impl FromStr for DeviceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "simulator" | "sim" => Ok(DeviceMode::Simulator),
            "hardware" | "real" => Ok(DeviceMode::HardwareEmulation),
            other => Err(invalid(format!("unknown device mode {other:?}"))),
        }
    }
}

impl fmt::Display for DeviceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeviceMode::Simulator => "simulator",
            DeviceMode::HardwareEmulation => "hardware",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Quantum,
    Classical,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "quantum" => Ok(Variant::Quantum),
            "classical" | "classic" => Ok(Variant::Classical),
            other => Err(invalid(format!("unknown variant {other:?}"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Quantum => "quantum",
            Variant::Classical => "classical",
        })
    }
}

/// How the altitude fraction becomes a U3 angle.
///
/// `RawTheta` uses θ = frac·π, so P(1) = sin²(frac·π/2). `LinearProbability`
/// uses θ = 2·arcsin(√frac), so P(1) = frac.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InversionMode {
    #[default]
    RawTheta,
    LinearProbability,
}

impl InversionMode {
    pub fn theta(self, frac: f64) -> f64 {
        match self {
            InversionMode::RawTheta => frac * std::f64::consts::PI,
            InversionMode::LinearProbability => 2.0 * frac.sqrt().asin(),
        }
    }
}

impl FromStr for InversionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "raw" | "raw_theta" => Ok(InversionMode::RawTheta),
            "linear" | "linear_probability" => Ok(InversionMode::LinearProbability),
            other => Err(invalid(format!("unknown inversion mode {other:?}"))),
        }
    }
}

pub const BASE_SHOTS: u64 = 1024;
pub const HARDWARE_ERROR_BUFFER: u64 = 75;
pub const DEFAULT_MODIFIER: i64 = 150;
pub const DEFAULT_ENCOUNTER_PROB: f64 = 0.2;
pub const ENCOUNTER_REWARD: u64 = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameConfig {
    pub device_mode: DeviceMode,
    pub variant: Variant,
    pub error_buffer: u64,
    pub base_shots: u64,
    pub modifier_up: i64,
    pub modifier_down: i64,
    pub encounter_prob: f64,
    pub encounter_reward: u64,
    pub inversion_mode: InversionMode,
}

impl GameConfig {
    /// Defaults for a mode/variant pair. Only quantum games on emulated
    /// hardware carry an error buffer.
    pub fn new(device_mode: DeviceMode, variant: Variant) -> Self {
        let error_buffer = match (variant, device_mode) {
            (Variant::Quantum, DeviceMode::HardwareEmulation) => HARDWARE_ERROR_BUFFER,
            _ => 0,
        };
        Self {
            device_mode,
            variant,
            error_buffer,
            base_shots: BASE_SHOTS,
            modifier_up: DEFAULT_MODIFIER,
            modifier_down: -DEFAULT_MODIFIER,
            encounter_prob: DEFAULT_ENCOUNTER_PROB,
            encounter_reward: ENCOUNTER_REWARD,
            inversion_mode: InversionMode::default(),
        }
    }

    pub fn with_inversion(mut self, mode: InversionMode) -> Self {
        self.inversion_mode = mode;
        self
    }

    pub fn with_encounter_prob(mut self, p: f64) -> Self {
        self.encounter_prob = p;
        self
    }

    pub fn goal(&self) -> u64 {
        self.base_shots - self.error_buffer
    }

    pub fn shots(&self) -> u64 {
        self.goal() + self.error_buffer
    }

    pub fn noise(&self) -> NoiseModel {
        match self.device_mode {
            DeviceMode::Simulator => NoiseModel::ideal(),
            DeviceMode::HardwareEmulation => NoiseModel::hardware(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.base_shots == 0 {
            return Err(invalid("base_shots must be positive"));
        }
        if self.error_buffer >= self.base_shots {
            return Err(invalid(format!(
                "error buffer {} must be below base shots {}",
                self.error_buffer, self.base_shots
            )));
        }
        if self.modifier_up <= 0 || self.modifier_down >= 0 {
            return Err(invalid("modifier_up must be positive and modifier_down negative"));
        }
        if !(0.0..=1.0).contains(&self.encounter_prob) {
            return Err(invalid(format!(
                "encounter probability {} outside [0, 1]",
                self.encounter_prob
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn goals_by_mode() {
        let sim = GameConfig::new(DeviceMode::Simulator, Variant::Quantum);
        assert_eq!((sim.goal(), sim.shots(), sim.error_buffer), (1024, 1024, 0));
        let hw = GameConfig::new(DeviceMode::HardwareEmulation, Variant::Quantum);
        assert_eq!((hw.goal(), hw.shots(), hw.error_buffer), (949, 1024, 75));
        let classic = GameConfig::new(DeviceMode::HardwareEmulation, Variant::Classical);
        assert_eq!(classic.goal(), 1024);
    }

    #[test]
    fn parse_names() {
        assert_eq!("hardware".parse::<DeviceMode>().unwrap(), DeviceMode::HardwareEmulation);
        assert_eq!("Simulator".parse::<DeviceMode>().unwrap(), DeviceMode::Simulator);
        assert!("warp".parse::<DeviceMode>().is_err());
        assert_eq!("classical".parse::<Variant>().unwrap(), Variant::Classical);
        assert_eq!(
            "linear".parse::<InversionMode>().unwrap(),
            InversionMode::LinearProbability
        );
    }

    #[test]
    fn validation() {
        let mut cfg = GameConfig::new(DeviceMode::Simulator, Variant::Quantum);
        assert!(cfg.validate().is_ok());
        cfg.error_buffer = 1024;
        assert!(cfg.validate().is_err());
        let cfg = GameConfig::new(DeviceMode::Simulator, Variant::Quantum).with_encounter_prob(1.5);
        assert!(cfg.validate().is_err());
    }
}
