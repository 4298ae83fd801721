//! Fusion strategies: feature-level concatenation and Kalman filtering.
//! (Decision-level voting lives with the classifiers.)

pub mod kalman;
pub mod mat;

use crate::data::{Dataset, SensorKind};
use crate::error::FusionError;

/// A column-selected view of a dataset: the channels of the chosen
/// sensors concatenated in canonical sensor order, width 3·|sensors|.
#[derive(Debug, Clone)]
pub struct FeatureView<'a> {
    dataset: &'a Dataset,
    sensors: Vec<SensorKind>,
}

/// Builds the feature-level fusion view over a sensor selection. The
/// selection is deduplicated and ordered accelerometer, gyroscope,
/// magnetometer regardless of input order.
pub fn feature_fuse<'a>(
    dataset: &'a Dataset,
    sensors: &[SensorKind],
) -> Result<FeatureView<'a>, FusionError> {
    if sensors.is_empty() {
        return Err(FusionError::EmptySensorSet);
    }
    let selected: Vec<SensorKind> = SensorKind::ALL
        .into_iter()
        .filter(|kind| sensors.contains(kind))
        .collect();
    Ok(FeatureView {
        dataset,
        sensors: selected,
    })
}

impl<'a> FeatureView<'a> {
    pub fn dataset(&self) -> &'a Dataset {
        self.dataset
    }

    /// Selected sensors in canonical order.
    pub fn sensors(&self) -> &[SensorKind] {
        &self.sensors
    }

    /// Feature-vector width d = 3·|sensors|.
    pub fn width(&self) -> usize {
        3 * self.sensors.len()
    }

    pub fn n_rows(&self) -> usize {
        self.dataset.len()
    }

    /// Channel headers of the selected columns, in view order.
    pub fn column_names(&self) -> Vec<&'static str> {
        self.sensors
            .iter()
            .flat_map(|kind| {
                let offset = kind.column_offset();
                crate::data::CHANNEL_COLUMNS[offset..offset + 3].iter().copied()
            })
            .collect()
    }

    /// One feature row.
    pub fn row(&self, index: usize) -> Vec<f64> {
        let record = &self.dataset.rows()[index];
        let mut out = Vec::with_capacity(self.width());
        for kind in &self.sensors {
            out.extend_from_slice(&record.sensor(*kind));
        }
        out
    }

    /// Feature rows for a list of dataset row indices.
    pub fn rows_at(&self, indices: &[usize]) -> Vec<Vec<f64>> {
        indices.iter().map(|&i| self.row(i)).collect()
    }

    /// The full N×d feature matrix.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n_rows()).map(|i| self.row(i)).collect()
    }

    /// Label indices aligned with [`matrix`](Self::matrix) rows.
    pub fn labels(&self) -> Vec<usize> {
        self.dataset.label_indices()
    }
}
