//! Driver identification from ordinal features.
//!
//! Sensor windows (9 channels x 30 samples) are summarized per channel by
//! normalized permutation entropy and statistical complexity, giving an
//! 18-value feature vector per window. Small native classifiers (kNN and
//! One-vs-Rest Gaussian naive Bayes) are evaluated on seeded stratified
//! splits. A synthetic four-driver generator stands in for real on-board
//! recordings.

mod classify;
mod ordinal;
mod synth;

pub use classify::{
    evaluate, stratified_split, train_gnb_ovr, train_knn, Classifier, ClassifierKind, EvalReport,
    GnbOvrClassifier, KnnClassifier,
};
pub use ordinal::{
    entropy_complexity, jensen_shannon, ordinal_distribution, permutation_entropy,
    statistical_complexity, OrdinalConfig, OrdinalDistribution,
};
pub use synth::{
    generate_synthetic_drivers, noise_window, LARGE_WINDOWS_PER_DRIVER, SMALL_WINDOWS_PER_DRIVER,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Sensor channels per window, in canonical order.
pub const CHANNEL_COUNT: usize = 9;
/// Samples per channel (one reading per second over a 30-second window).
pub const WINDOW_LEN: usize = 30;
/// Number of drivers to identify.
pub const DRIVER_COUNT: usize = 4;

/// Canonical channel order for datasets and feature vectors.
pub const CHANNEL_NAMES: [&str; CHANNEL_COUNT] = [
    "accelerator_pedal",
    "intake_air_pressure",
    "throttle_position",
    "long_term_fuel",
    "engine_speed",
    "friction_torque",
    "coolant_temperature",
    "engine_torque",
    "vehicle_speed",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DriverIdError {
    #[error("embedding dimension must be in 2..=7, got {0}")]
    InvalidDimension(usize),
    #[error("delay must be at least 1")]
    InvalidDelay,
    #[error("series of length {len} is shorter than the required {required}")]
    SeriesTooShort { len: usize, required: usize },
    #[error("non-finite sample at position {0}")]
    NonFiniteSample(usize),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("bad window shape: {0}")]
    WindowShape(String),
    #[error("window {index}: {source}")]
    Window {
        index: usize,
        source: Box<DriverIdError>,
    },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("feature vectors have inconsistent lengths")]
    InconsistentFeatureLength,
    #[error("neighbor count must be odd and at least 1, got {0}")]
    InvalidNeighborCount(usize),
    #[error("split fraction must be in (0, 1), got {0}")]
    InvalidSplitFraction(f64),
    #[error("class {label} has only {count} samples; need at least 2")]
    ClassTooSmall { label: u8, count: usize },
    #[error("windows per driver must be at least 1")]
    InvalidWindowsPerDriver,
    #[error("malformed dataset csv: {0}")]
    CsvFormat(String),
}

/// One labeled sensor window: exactly 9 channels of exactly 30 finite
/// samples each, in canonical channel order.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorWindow {
    driver: u8,
    channels: Vec<Vec<f64>>,
}

impl SensorWindow {
    pub fn new(driver: u8, channels: Vec<Vec<f64>>) -> Result<Self, DriverIdError> {
        if channels.len() != CHANNEL_COUNT {
            return Err(DriverIdError::WindowShape(format!(
                "expected {CHANNEL_COUNT} channels, got {}",
                channels.len()
            )));
        }
        for (c, channel) in channels.iter().enumerate() {
            if channel.len() != WINDOW_LEN {
                return Err(DriverIdError::WindowShape(format!(
                    "channel {c} has {} samples, expected {WINDOW_LEN}",
                    channel.len()
                )));
            }
            if let Some(pos) = channel.iter().position(|v| !v.is_finite()) {
                return Err(DriverIdError::WindowShape(format!(
                    "channel {c} sample {pos} is not finite"
                )));
            }
        }
        Ok(SensorWindow { driver, channels })
    }

    pub fn driver(&self) -> u8 {
        self.driver
    }

    pub fn channel(&self, index: usize) -> &[f64] {
        &self.channels[index]
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.channels
    }
}

/// 18 features per window: (H, C) per channel in channel-major order
/// (H1, C1, H2, C2, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub label: u8,
    pub values: Vec<f64>,
}

/// Extracts entropy-complexity features from every window; errors carry
/// the offending window index.
pub fn extract_features(
    windows: &[SensorWindow],
    config: &OrdinalConfig,
) -> Result<Vec<FeatureVector>, DriverIdError> {
    if config.required_len() > WINDOW_LEN {
        return Err(DriverIdError::SeriesTooShort {
            len: WINDOW_LEN,
            required: config.required_len(),
        });
    }
    windows
        .iter()
        .enumerate()
        .map(|(index, window)| {
            let mut values = Vec::with_capacity(2 * CHANNEL_COUNT);
            for channel in window.channels() {
                let (h, c) =
                    entropy_complexity(channel, config).map_err(|e| DriverIdError::Window {
                        index,
                        source: Box::new(e),
                    })?;
                values.push(h);
                values.push(c);
            }
            Ok(FeatureVector {
                label: window.driver(),
                values,
            })
        })
        .collect()
}

/// Serializes windows as `driver,window_id,sample_idx,ch1..ch9` rows.
/// Window ids are global and ascending.
pub fn dataset_to_csv(windows: &[SensorWindow]) -> String {
    let mut out = String::from("driver,window_id,sample_idx");
    for i in 1..=CHANNEL_COUNT {
        out.push_str(&format!(",ch{i}"));
    }
    out.push('\n');
    for (window_id, window) in windows.iter().enumerate() {
        for sample in 0..WINDOW_LEN {
            out.push_str(&format!("{},{window_id},{sample}", window.driver()));
            for channel in window.channels() {
                out.push_str(&format!(",{}", channel[sample]));
            }
            out.push('\n');
        }
    }
    out
}

/// Parses a `driver,window_id,sample_idx,ch1..ch9` dataset.
pub fn dataset_from_csv(text: &str) -> Result<Vec<SensorWindow>, DriverIdError> {
    use std::collections::BTreeMap;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    // (window_id, driver) -> per-channel sample lists indexed by sample_idx
    let mut buckets: BTreeMap<(u64, u8), BTreeMap<u64, Vec<f64>>> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| DriverIdError::CsvFormat(e.to_string()))?;
        if record.len() != 3 + CHANNEL_COUNT {
            return Err(DriverIdError::CsvFormat(format!(
                "expected {} fields, got {}",
                3 + CHANNEL_COUNT,
                record.len()
            )));
        }
        let parse = |i: usize| -> Result<f64, DriverIdError> {
            record
                .get(i)
                .unwrap_or_default()
                .parse()
                .map_err(|_| DriverIdError::CsvFormat(format!("bad number in field {i}")))
        };
        let driver: u8 = record
            .get(0)
            .unwrap_or_default()
            .parse()
            .map_err(|_| DriverIdError::CsvFormat("bad driver label".into()))?;
        let window_id: u64 = record
            .get(1)
            .unwrap_or_default()
            .parse()
            .map_err(|_| DriverIdError::CsvFormat("bad window id".into()))?;
        let sample_idx: u64 = record
            .get(2)
            .unwrap_or_default()
            .parse()
            .map_err(|_| DriverIdError::CsvFormat("bad sample index".into()))?;
        let mut row = Vec::with_capacity(CHANNEL_COUNT);
        for i in 0..CHANNEL_COUNT {
            row.push(parse(3 + i)?);
        }
        buckets
            .entry((window_id, driver))
            .or_default()
            .insert(sample_idx, row);
    }
    let mut windows = Vec::with_capacity(buckets.len());
    for ((window_id, driver), samples) in buckets {
        if samples.len() != WINDOW_LEN {
            return Err(DriverIdError::CsvFormat(format!(
                "window {window_id} has {} samples, expected {WINDOW_LEN}",
                samples.len()
            )));
        }
        let mut channels: Vec<Vec<f64>> = (0..CHANNEL_COUNT)
            .map(|_| Vec::with_capacity(WINDOW_LEN))
            .collect();
        for (expected, (sample_idx, row)) in samples.into_iter().enumerate() {
            if sample_idx != expected as u64 {
                return Err(DriverIdError::CsvFormat(format!(
                    "window {window_id} missing sample {expected}"
                )));
            }
            for (channel, value) in channels.iter_mut().zip(row) {
                channel.push(value);
            }
        }
        windows.push(SensorWindow::new(driver, channels)?);
    }
    Ok(windows)
}

/// Serializes feature vectors as `driver,window_id,H1,C1,...,H9,C9`.
pub fn features_to_csv(features: &[FeatureVector]) -> String {
    let mut out = String::from("driver,window_id");
    for i in 1..=CHANNEL_COUNT {
        out.push_str(&format!(",H{i},C{i}"));
    }
    out.push('\n');
    for (window_id, f) in features.iter().enumerate() {
        out.push_str(&format!("{},{window_id}", f.label));
        for v in &f.values {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}
