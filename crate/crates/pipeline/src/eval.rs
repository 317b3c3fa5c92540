//! Held-out evaluation: run the classifier over every test segment and
//! tally a confusion matrix, rows = true class, columns = predicted.

use std::path::Path;

use hybridsig_modem::ModulationScheme;
use hybridsig_nn::{CnnModel, NUM_CLASSES};
use serde::{Deserialize, Serialize};

use crate::manifest::{ImageManifest, Split};
use crate::render::load_input;
use crate::{PipelineError, Result};

/// Counts of (true class, predicted class) pairs. Serializes as the bare
/// 4x4 array so reports stay compact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConfusionMatrix {
    pub counts: [[u32; NUM_CLASSES]; NUM_CLASSES],
}

impl ConfusionMatrix {
    pub fn new() -> Self {
        ConfusionMatrix {
            counts: [[0; NUM_CLASSES]; NUM_CLASSES],
        }
    }

    pub fn record(&mut self, actual: usize, predicted: usize) {
        self.counts[actual][predicted] += 1;
    }

    pub fn total(&self) -> u32 {
        self.counts.iter().flatten().sum()
    }

    /// How many test segments of `class` there were.
    pub fn row_sum(&self, class: usize) -> u32 {
        self.counts[class].iter().sum()
    }

    /// How many segments were predicted as `class`.
    pub fn col_sum(&self, class: usize) -> u32 {
        self.counts.iter().map(|row| row[class]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        let trace: u32 = (0..NUM_CLASSES).map(|i| self.counts[i][i]).sum();
        trace as f64 / self.total() as f64
    }

    /// Off-diagonal mass in `class`'s row and column: segments of the class
    /// predicted as something else plus other classes predicted as it.
    /// Zero means the class is perfectly separated from the rest.
    pub fn cross_class_errors(&self, class: usize) -> u32 {
        self.row_sum(class) + self.col_sum(class) - 2 * self.counts[class][class]
    }

    /// Fixed-width text table, classes in index order; `corner` labels the
    /// top-left header cell.
    pub fn to_text(&self, corner: &str) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let _ = write!(out, "{corner:<8}");
        for scheme in ModulationScheme::ALL {
            let _ = write!(out, " {:>6}", scheme.name());
        }
        out.push('\n');
        for scheme in ModulationScheme::ALL {
            let _ = write!(out, "{:<8}", scheme.name());
            for count in self.counts[scheme.index()] {
                let _ = write!(out, " {count:>6}");
            }
            out.push('\n');
        }
        out
    }
}

impl Default for ConfusionMatrix {
    fn default() -> Self {
        Self::new()
    }
}

/// Classifies every test-split entry of `images` and returns the tally.
pub fn evaluate(
    model: &CnnModel<f32>,
    images: &ImageManifest,
    images_root: &Path,
) -> Result<ConfusionMatrix> {
    let mut matrix = ConfusionMatrix::new();
    for entry in images.split_entries(Split::Test) {
        let (x, label) = load_input(images_root, entry, images.representation)?;
        let (predicted, _) = model.predict(&x)?;
        matrix.record(label, predicted);
    }
    if matrix.total() == 0 {
        return Err(PipelineError::InvalidArgument(
            "image manifest has no test entries".into(),
        ));
    }
    Ok(matrix)
}
