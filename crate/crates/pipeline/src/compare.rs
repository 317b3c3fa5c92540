//! The head-to-head experiment: synthesize one dataset, render it into all
//! four representations, train an identically configured classifier on
//! each, and score them on the shared test split.

use std::fmt::Write as _;
use std::path::Path;

use hybridsig_modem::rng::derive_seed;
use hybridsig_nn::save_model;
use hybridsig_raster::Representation;
use serde::{Deserialize, Serialize};

use crate::eval::{evaluate, ConfusionMatrix};
use crate::manifest::MANIFEST_VERSION;
use crate::render::render_dataset;
use crate::train::{train, EpochStats};
use crate::{generate_dataset, streams, ExperimentConfig, PipelineError, Result};

/// Outcome for a single representation: test accuracy, the full confusion
/// matrix behind it, and the per-epoch training history.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepReport {
    pub representation: Representation,
    pub accuracy: f64,
    pub confusion: ConfusionMatrix,
    pub history: Vec<EpochStats>,
}

/// Full experiment record: the config that produced it plus one report per
/// representation, in `Representation::ALL` order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub version: u32,
    pub config: ExperimentConfig,
    pub results: Vec<RepReport>,
}

impl ComparisonReport {
    pub fn result(&self, rep: Representation) -> Option<&RepReport> {
        self.results.iter().find(|r| r.representation == rep)
    }

    /// Plain-text twin of report.json: an accuracy table and the four
    /// confusion matrices, class order bpsk/qpsk/qam16/gfsk.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<10} {:>8}", "rep", "accuracy");
        for r in &self.results {
            let _ = writeln!(out, "{:<10} {:>8.4}", r.representation.name(), r.accuracy);
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "confusion matrices (rows actual, cols predicted)");
        for r in &self.results {
            let _ = writeln!(out);
            out.push_str(&r.confusion.to_text(r.representation.name()));
        }
        out
    }
}

/// Runs the whole experiment under `out_dir`, leaving behind the dataset
/// tree, one image tree and saved model per representation, and the report
/// as both `report.json` and `report.txt`. `jobs` parallelizes rendering;
/// training parallelism comes from `cfg.train.jobs`. `log` receives one
/// line per stage and per epoch.
pub fn compare_representations(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    jobs: usize,
    mut log: impl FnMut(&str),
) -> Result<ComparisonReport> {
    cfg.validate()?;
    log(&format!("synthesizing dataset under {}", out_dir.display()));
    let dataset = generate_dataset(cfg, out_dir)?;

    let models_dir = out_dir.join("models");
    std::fs::create_dir_all(&models_dir).map_err(|e| PipelineError::io(&models_dir, e))?;

    let mut results = Vec::with_capacity(Representation::ALL.len());
    for (rep_index, rep) in Representation::ALL.into_iter().enumerate() {
        let images_dir = out_dir.join("images").join(rep.name());
        log(&format!("[{}] rendering images", rep.name()));
        let images = render_dataset(
            out_dir,
            &dataset,
            rep,
            cfg.canvas,
            cfg.db_range,
            &images_dir,
            jobs,
        )?;

        let seed = derive_seed(cfg.seed, &[streams::REP_TRAIN, rep_index as u64]);
        let (model, history) = train(&images, &images_dir, &cfg.train, seed, |e| {
            log(&format!(
                "[{}] epoch {:>3}  loss {:.4}  train acc {:.4}  val acc {:.4}",
                rep.name(),
                e.epoch,
                e.train_loss,
                e.train_accuracy,
                e.val_accuracy
            ));
        })?;

        save_model(&models_dir.join(format!("{}.bin", rep.name())), &model, None)?;
        let confusion = evaluate(&model, &images, &images_dir)?;
        log(&format!(
            "[{}] test accuracy {:.4}",
            rep.name(),
            confusion.accuracy()
        ));
        results.push(RepReport {
            representation: rep,
            accuracy: confusion.accuracy(),
            confusion,
            history,
        });
    }

    let report = ComparisonReport {
        version: MANIFEST_VERSION,
        config: cfg.clone(),
        results,
    };
    let json_path = out_dir.join("report.json");
    let mut json = serde_json::to_string_pretty(&report)
        .map_err(|e| PipelineError::Format(e.to_string()))?;
    json.push('\n');
    std::fs::write(&json_path, json).map_err(|e| PipelineError::io(&json_path, e))?;
    let text_path = out_dir.join("report.txt");
    std::fs::write(&text_path, report.to_text()).map_err(|e| PipelineError::io(&text_path, e))?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report_fixture() -> ComparisonReport {
        let mut confusion = ConfusionMatrix::new();
        for i in 0..4 {
            confusion.counts[i][i] = 5;
        }
        confusion.counts[0][1] = 2;
        ComparisonReport {
            version: MANIFEST_VERSION,
            config: ExperimentConfig::default(),
            results: Representation::ALL
                .into_iter()
                .map(|rep| RepReport {
                    representation: rep,
                    accuracy: confusion.accuracy(),
                    confusion,
                    history: vec![],
                })
                .collect(),
        }
    }

    #[test]
    fn text_report_lists_all_representations_and_classes() {
        let text = report_fixture().to_text();
        for name in ["time", "psd", "spec", "hybrid"] {
            assert!(text.contains(name), "missing {name} in:\n{text}");
        }
        for name in ["bpsk", "qpsk", "qam16", "gfsk"] {
            assert!(text.contains(name), "missing {name} in:\n{text}");
        }
        assert!(text.contains("0.9091"), "accuracy cell missing:\n{text}");
    }

    #[test]
    fn report_json_round_trips() {
        let report = report_fixture();
        let json = serde_json::to_string(&report).unwrap();
        let back: ComparisonReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.results.len(), 4);
        assert_eq!(back.result(Representation::Hybrid).unwrap().accuracy, report.results[3].accuracy);
        assert_eq!(back.config.seed, report.config.seed);
    }
}
