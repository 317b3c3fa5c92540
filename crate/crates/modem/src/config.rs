use crate::{ModemError, Result};
use serde::{Deserialize, Serialize};

/// Pulse shaping applied to PSK/QAM symbol streams. Rect is sample-and-hold;
/// RRC is the root-raised-cosine filter used for the actual dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum PulseShape {
    Rrc { rolloff: f64, span_symbols: usize },
    Rect,
}

impl PulseShape {
    pub fn validate(&self) -> Result<()> {
        if let PulseShape::Rrc {
            rolloff,
            span_symbols,
        } = self
        {
            if !(*rolloff > 0.0 && *rolloff <= 1.0) {
                return Err(ModemError::InvalidArgument(format!(
                    "RRC rolloff must lie in (0, 1], got {rolloff}"
                )));
            }
            if *span_symbols == 0 {
                return Err(ModemError::InvalidArgument(
                    "RRC span must be at least 1 symbol".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Waveform parameters shared by all modulators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModemConfig {
    /// Nominal sample rate in Hz; informational (all math is in samples).
    pub sample_rate: f64,
    /// Samples per symbol.
    pub sps: usize,
    pub pulse: PulseShape,
    /// Gaussian filter bandwidth-time product for GFSK.
    pub gfsk_bt: f64,
    /// GFSK modulation index; peak deviation is h/(2 T_symbol).
    pub gfsk_h: f64,
}

impl Default for ModemConfig {
    fn default() -> Self {
        ModemConfig {
            sample_rate: 1e6,
            sps: 8,
            pulse: PulseShape::Rrc {
                rolloff: 0.35,
                span_symbols: 11,
            },
            gfsk_bt: 0.35,
            gfsk_h: 1.0,
        }
    }
}

impl ModemConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate > 0.0) {
            return Err(ModemError::InvalidArgument(format!(
                "sample_rate must be positive, got {}",
                self.sample_rate
            )));
        }
        if self.sps < 2 {
            return Err(ModemError::InvalidArgument(format!(
                "sps must be at least 2, got {}",
                self.sps
            )));
        }
        if !(self.gfsk_bt > 0.0) {
            return Err(ModemError::InvalidArgument(format!(
                "gfsk_bt must be positive, got {}",
                self.gfsk_bt
            )));
        }
        if !(self.gfsk_h > 0.0) {
            return Err(ModemError::InvalidArgument(format!(
                "gfsk_h must be positive, got {}",
                self.gfsk_h
            )));
        }
        self.pulse.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        ModemConfig::default().validate().unwrap();
    }

    #[test]
    fn out_of_range_fields_rejected() {
        let mut cfg = ModemConfig::default();
        cfg.sps = 1;
        assert!(cfg.validate().is_err());

        let mut cfg = ModemConfig::default();
        cfg.gfsk_h = 0.0;
        assert!(cfg.validate().is_err());

        let mut cfg = ModemConfig::default();
        cfg.pulse = PulseShape::Rrc {
            rolloff: 1.5,
            span_symbols: 11,
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn serde_round_trip() {
        let cfg = ModemConfig::default();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: ModemConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_fields_rejected() {
        let json = r#"{"sample_rate": 1.0, "sps": 8, "pulse": "rect",
                       "gfsk_bt": 0.35, "gfsk_h": 1.0, "extra": 3}"#;
        assert!(serde_json::from_str::<ModemConfig>(json).is_err());
    }
}
