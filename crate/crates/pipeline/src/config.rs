//! Experiment configuration. One value of [`ExperimentConfig`] pins every
//! byte of every artifact a run produces.

use hybridsig_modem::ModemConfig;
use hybridsig_raster::Representation;
use serde::{Deserialize, Serialize};

use crate::{PipelineError, Result};

/// Seed used when neither config file, flag, nor environment provides one.
pub const DEFAULT_SEED: u64 = 15;

/// JSON cannot hold IEEE infinities, so a noiseless channel is spelled as
/// the string "inf" wherever an SNR appears.
pub(crate) mod snr_serde {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) if v.is_finite() => Ok(v),
            Raw::Number(v) => Err(D::Error::custom(format!(
                "numeric SNR must be finite, got {v}; use \"inf\" for a noiseless channel"
            ))),
            Raw::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Raw::Text(t) => Err(D::Error::custom(format!(
                "SNR must be a number or \"inf\", got {t:?}"
            ))),
        }
    }
}

/// Parses an SNR the way the config file spells it: a number or "inf".
pub fn parse_snr(text: &str) -> Result<f64> {
    if text == "inf" {
        return Ok(f64::INFINITY);
    }
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(PipelineError::InvalidArgument(format!(
            "SNR must be a finite number or \"inf\", got {text:?}"
        ))),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Per-sample parallelism inside a batch. 1 is the reference mode;
    /// results for other values are deterministic per value but may differ
    /// from the reference in the last float bit.
    pub jobs: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 32,
            epochs: 20,
            learning_rate: 1e-3,
            jobs: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(PipelineError::InvalidArgument(
                "batch size must be at least 1".into(),
            ));
        }
        if self.epochs == 0 {
            return Err(PipelineError::InvalidArgument(
                "epoch count must be at least 1".into(),
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(PipelineError::InvalidArgument(format!(
                "learning rate must be positive and finite, got {}",
                self.learning_rate
            )));
        }
        if self.jobs == 0 {
            return Err(PipelineError::InvalidArgument(
                "jobs must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    #[serde(with = "snr_serde")]
    pub snr_db: f64,
    pub seed: u64,
    /// Train+validation segments per class.
    pub per_class: usize,
    /// Held-out test segments per class, from an independent realization.
    pub test_per_class: usize,
    pub train_fraction: f64,
    /// Square image edge in pixels; must suit the model (multiple of 8).
    pub canvas: usize,
    /// Dynamic range mapped onto pixel intensity for dB-scaled renders.
    pub db_range: f64,
    /// Preselected representation for single-representation commands; the
    /// comparison always runs all four.
    pub representation: Option<Representation>,
    pub modem: ModemConfig,
    pub train: TrainConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            snr_db: 10.0,
            seed: DEFAULT_SEED,
            per_class: 50,
            test_per_class: 20,
            train_fraction: 0.8,
            canvas: 128,
            db_range: 80.0,
            representation: None,
            modem: ModemConfig::default(),
            train: TrainConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return Err(PipelineError::InvalidArgument(format!(
                "SNR must be a real level or +inf, got {}",
                self.snr_db
            )));
        }
        if self.per_class < 2 {
            return Err(PipelineError::InvalidArgument(format!(
                "need at least 2 train+val segments per class, got {}",
                self.per_class
            )));
        }
        if self.test_per_class == 0 {
            return Err(PipelineError::InvalidArgument(
                "need at least 1 test segment per class".into(),
            ));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(PipelineError::InvalidArgument(format!(
                "train fraction must lie strictly inside (0, 1), got {}",
                self.train_fraction
            )));
        }
        if self.canvas < 8 || self.canvas % 8 != 0 {
            return Err(PipelineError::InvalidArgument(format!(
                "canvas must be a positive multiple of 8, got {}",
                self.canvas
            )));
        }
        if !(self.db_range > 0.0 && self.db_range.is_finite()) {
            return Err(PipelineError::InvalidArgument(format!(
                "db_range must be positive and finite, got {}",
                self.db_range
            )));
        }
        self.modem.validate()?;
        self.train.validate()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| PipelineError::Format(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("config serializes");
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_json() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        let again = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn infinite_snr_spelled_as_inf() {
        let cfg = ExperimentConfig {
            snr_db: f64::INFINITY,
            ..Default::default()
        };
        let text = cfg.to_json();
        assert!(text.contains("\"inf\""));
        let again = ExperimentConfig::from_json(&text).unwrap();
        assert!(again.snr_db.is_infinite());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ExperimentConfig::from_json("{\"snr\": 10}").is_err());
        assert!(ExperimentConfig::from_json("{\"seed\": 1, \"extra\": true}").is_err());
    }

    #[test]
    fn partial_configs_fill_defaults() {
        let cfg = ExperimentConfig::from_json("{\"seed\": 99, \"snr_db\": 5}").unwrap();
        assert_eq!(cfg.seed, 99);
        assert_eq!(cfg.snr_db, 5.0);
        assert_eq!(cfg.per_class, 50);
        assert_eq!(cfg.train.batch_size, 32);
        assert_eq!(cfg.train.epochs, 20);
    }

    #[test]
    fn bad_values_rejected() {
        let bad = |mutate: fn(&mut ExperimentConfig)| {
            let mut cfg = ExperimentConfig::default();
            mutate(&mut cfg);
            cfg.validate().is_err()
        };
        assert!(bad(|c| c.snr_db = f64::NAN));
        assert!(bad(|c| c.snr_db = f64::NEG_INFINITY));
        assert!(bad(|c| c.per_class = 1));
        assert!(bad(|c| c.test_per_class = 0));
        assert!(bad(|c| c.train_fraction = 1.0));
        assert!(bad(|c| c.train_fraction = 0.0));
        assert!(bad(|c| c.canvas = 100));
        assert!(bad(|c| c.db_range = 0.0));
        assert!(bad(|c| c.train.epochs = 0));
        assert!(bad(|c| c.train.batch_size = 0));
        assert!(bad(|c| c.train.jobs = 0));
    }

    #[test]
    fn snr_text_parsing() {
        assert_eq!(parse_snr("10.5").unwrap(), 10.5);
        assert!(parse_snr("inf").unwrap().is_infinite());
        assert!(parse_snr("garbage").is_err());
        assert!(parse_snr("nan").is_err());
    }
}
