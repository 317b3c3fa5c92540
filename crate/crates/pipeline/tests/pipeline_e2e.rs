//! End-to-end pipeline checks on a deliberately tiny experiment: the full
//! compare flow leaves a complete artifact tree behind, the report is
//! internally consistent, and repeating the run reproduces it byte for byte.

use hybridsig_modem::ModulationScheme;
use hybridsig_nn::load_model;
use hybridsig_pipeline::{
    compare_representations, load_image_manifest, ExperimentConfig, Split, TrainConfig,
};
use hybridsig_raster::Representation;
use std::path::Path;

fn tiny_cfg() -> ExperimentConfig {
    ExperimentConfig {
        per_class: 6,
        test_per_class: 2,
        canvas: 16,
        train: TrainConfig {
            batch_size: 4,
            epochs: 1,
            learning_rate: 1e-3,
            jobs: 1,
        },
        ..Default::default()
    }
}

#[test]
fn compare_leaves_a_complete_consistent_tree() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let report = compare_representations(&tiny_cfg(), out, 1, |_| {}).unwrap();

    assert_eq!(report.results.len(), 4);
    for (result, rep) in report.results.iter().zip(Representation::ALL) {
        assert_eq!(result.representation, rep);
        assert_eq!(result.confusion.total(), 8, "2 test segments x 4 classes");
        assert!((0.0..=1.0).contains(&result.accuracy));
        assert_eq!(result.accuracy, result.confusion.accuracy());
        assert_eq!(result.history.len(), 1);

        let images = load_image_manifest(&out.join("images").join(rep.name()).join("images.json"))
            .unwrap();
        assert_eq!(images.canvas, 16);
        assert_eq!(images.representation, rep);
        // 6 trainval + 2 test per class, every listed file present on disk.
        assert_eq!(images.entries.len(), 32);
        assert_eq!(images.split_entries(Split::Val).count(), 4);
        for entry in &images.entries {
            for rel in &entry.paths {
                assert!(
                    out.join("images").join(rep.name()).join(rel).is_file(),
                    "missing {rel}"
                );
            }
        }

        let (model, opt) = load_model(&out.join("models").join(format!("{}.bin", rep.name())))
            .unwrap();
        assert!(opt.is_none(), "compare stores weights only");
        assert_eq!(model.input_channels, rep.model_channels());
        assert_eq!(model.canvas, 16);
    }

    // The JSON on disk describes the same run the call returned.
    let json = std::fs::read_to_string(out.join("report.json")).unwrap();
    let parsed: hybridsig_pipeline::ComparisonReport = serde_json::from_str(&json).unwrap();
    assert_eq!(parsed.results.len(), 4);
    for (a, b) in parsed.results.iter().zip(&report.results) {
        assert_eq!(a.accuracy, b.accuracy);
        assert_eq!(a.confusion, b.confusion);
    }
    let text = std::fs::read_to_string(out.join("report.txt")).unwrap();
    for scheme in ModulationScheme::ALL {
        assert!(text.contains(scheme.name()));
    }
}

fn tree_digest(root: &Path) -> Vec<(String, u64, u32)> {
    // (relative path, length, cheap checksum) for every file under root.
    fn walk(root: &Path, dir: &Path, out: &mut Vec<(String, u64, u32)>) {
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        paths.sort();
        for path in paths {
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let bytes = std::fs::read(&path).unwrap();
                let mut sum = 0u32;
                for b in &bytes {
                    sum = sum.wrapping_mul(31).wrapping_add(*b as u32);
                }
                let rel = path.strip_prefix(root).unwrap().display().to_string();
                out.push((rel, bytes.len() as u64, sum));
            }
        }
    }
    let mut out = Vec::new();
    walk(root, root, &mut out);
    out
}

#[test]
fn repeated_runs_reproduce_every_artifact() {
    let cfg = tiny_cfg();
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    compare_representations(&cfg, dir_a.path(), 1, |_| {}).unwrap();
    // Second run uses parallel rendering to confirm jobs do not leak into
    // the artifacts.
    compare_representations(&cfg, dir_b.path(), 3, |_| {}).unwrap();

    let a = tree_digest(dir_a.path());
    let b = tree_digest(dir_b.path());
    assert_eq!(a.len(), b.len(), "different file counts");
    for (fa, fb) in a.iter().zip(&b) {
        assert_eq!(fa, fb, "artifact mismatch");
    }
}
