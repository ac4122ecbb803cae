//! Native classifiers and the evaluation harness.
//!
//! Two small models are implemented from scratch: k-nearest neighbors
//! (Euclidean metric) and Gaussian naive Bayes wrapped One-vs-Rest, plus a
//! constant-prediction baseline. Evaluation performs a seeded stratified
//! split, trains each requested model on the training side only and
//! reports accuracy with a confusion matrix.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::seed::rng_for;

use super::{DriverIdError, FeatureVector};

/// A fitted classifier.
pub trait Classifier {
    fn name(&self) -> String;
    fn predict(&self, features: &[f64]) -> u8;
}

/// Which model to train; carries the hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierKind {
    Knn {
        k: usize,
    },
    GaussianNbOvr,
    /// Always predicts the given label; a sanity baseline.
    Constant {
        label: u8,
    },
}

impl ClassifierKind {
    pub fn name(&self) -> String {
        match self {
            ClassifierKind::Knn { k } => format!("knn(k={k})"),
            ClassifierKind::GaussianNbOvr => "gaussian-nb-ovr".to_owned(),
            ClassifierKind::Constant { label } => format!("constant({label})"),
        }
    }

    pub fn train(&self, data: &[FeatureVector]) -> Result<Box<dyn Classifier>, DriverIdError> {
        match self {
            ClassifierKind::Knn { k } => Ok(Box::new(train_knn(data, *k)?)),
            ClassifierKind::GaussianNbOvr => Ok(Box::new(train_gnb_ovr(data)?)),
            ClassifierKind::Constant { label } => {
                Ok(Box::new(ConstantClassifier { label: *label }))
            }
        }
    }
}

fn check_training_data(data: &[FeatureVector]) -> Result<usize, DriverIdError> {
    let first = data.first().ok_or(DriverIdError::EmptyTrainingSet)?;
    let dim = first.values.len();
    if data.iter().any(|f| f.values.len() != dim) {
        return Err(DriverIdError::InconsistentFeatureLength);
    }
    Ok(dim)
}

/// k-nearest neighbors over the stored training set, Euclidean metric.
/// Votes tie toward the smaller class label; equal distances rank by
/// training order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KnnClassifier {
    k: usize,
    points: Vec<(Vec<f64>, u8)>,
}

/// Fits a kNN model. `k` must be odd and at least 1.
pub fn train_knn(data: &[FeatureVector], k: usize) -> Result<KnnClassifier, DriverIdError> {
    if k == 0 || k.is_multiple_of(2) {
        return Err(DriverIdError::InvalidNeighborCount(k));
    }
    check_training_data(data)?;
    Ok(KnnClassifier {
        k,
        points: data.iter().map(|f| (f.values.clone(), f.label)).collect(),
    })
}

impl Classifier for KnnClassifier {
    fn name(&self) -> String {
        format!("knn(k={})", self.k)
    }

    fn predict(&self, features: &[f64]) -> u8 {
        let mut distances: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, (p, _))| {
                let d2: f64 = p.iter().zip(features).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2, i)
            })
            .collect();
        distances.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut votes: BTreeMap<u8, usize> = BTreeMap::new();
        for (_, i) in distances.iter().take(self.k) {
            *votes.entry(self.points[*i].1).or_insert(0) += 1;
        }
        // BTreeMap iterates labels ascending; strict > keeps the smaller
        // label on ties
        let mut best = (0u8, 0usize);
        for (label, count) in votes {
            if count > best.1 {
                best = (label, count);
            }
        }
        best.0
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ClassStats {
    label: u8,
    log_prior: f64,
    means: Vec<f64>,
    variances: Vec<f64>,
}

/// Gaussian naive Bayes wrapped One-vs-Rest: one binary scorer per class
/// (the class's log joint against the log-sum of the rest), prediction by
/// argmax score with ties toward the smaller label.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GnbOvrClassifier {
    classes: Vec<ClassStats>,
}

const VARIANCE_FLOOR: f64 = 1e-9;

/// Fits per-class, per-feature Gaussian statistics.
pub fn train_gnb_ovr(data: &[FeatureVector]) -> Result<GnbOvrClassifier, DriverIdError> {
    let dim = check_training_data(data)?;
    let mut by_label: BTreeMap<u8, Vec<&FeatureVector>> = BTreeMap::new();
    for f in data {
        by_label.entry(f.label).or_default().push(f);
    }
    let total = data.len() as f64;
    let classes = by_label
        .into_iter()
        .map(|(label, members)| {
            let n = members.len() as f64;
            let mut means = vec![0.0; dim];
            for m in &members {
                for (acc, v) in means.iter_mut().zip(&m.values) {
                    *acc += v;
                }
            }
            for mean in means.iter_mut() {
                *mean /= n;
            }
            let mut variances = vec![0.0; dim];
            for m in &members {
                for ((acc, v), mean) in variances.iter_mut().zip(&m.values).zip(&means) {
                    *acc += (v - mean) * (v - mean);
                }
            }
            for var in variances.iter_mut() {
                *var = (*var / n).max(VARIANCE_FLOOR);
            }
            ClassStats {
                label,
                log_prior: (n / total).ln(),
                means,
                variances,
            }
        })
        .collect();
    Ok(GnbOvrClassifier { classes })
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

impl GnbOvrClassifier {
    fn log_joint(&self, stats: &ClassStats, features: &[f64]) -> f64 {
        let mut lp = stats.log_prior;
        for ((x, mean), var) in features.iter().zip(&stats.means).zip(&stats.variances) {
            lp += -0.5 * (std::f64::consts::TAU * var).ln() - (x - mean) * (x - mean) / (2.0 * var);
        }
        lp
    }
}

impl Classifier for GnbOvrClassifier {
    fn name(&self) -> String {
        "gaussian-nb-ovr".to_owned()
    }

    fn predict(&self, features: &[f64]) -> u8 {
        let joints: Vec<f64> = self
            .classes
            .iter()
            .map(|c| self.log_joint(c, features))
            .collect();
        let mut best: Option<(f64, u8)> = None;
        for (i, class) in self.classes.iter().enumerate() {
            let rest: Vec<f64> = joints
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, v)| *v)
                .collect();
            // one-vs-rest log odds for this class
            let score = joints[i] - log_sum_exp(&rest);
            let better = match best {
                None => true,
                Some((s, _)) => score > s,
            };
            if better {
                best = Some((score, class.label));
            }
        }
        best.map(|(_, label)| label).unwrap_or(0)
    }
}

struct ConstantClassifier {
    label: u8,
}

impl Classifier for ConstantClassifier {
    fn name(&self) -> String {
        format!("constant({})", self.label)
    }

    fn predict(&self, _features: &[f64]) -> u8 {
        self.label
    }
}

/// Accuracy and confusion matrix of one model on one split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub classifier: String,
    /// Class labels in ascending order; confusion rows/columns follow it.
    pub labels: Vec<u8>,
    pub accuracy: f64,
    /// `confusion[actual][predicted]` counts over the test set.
    pub confusion: Vec<Vec<usize>>,
    pub train_size: usize,
    pub test_size: usize,
}

impl EvalReport {
    /// Row sums of the confusion matrix: per-class test counts.
    pub fn per_class_test_counts(&self) -> Vec<usize> {
        self.confusion.iter().map(|row| row.iter().sum()).collect()
    }
}

/// Seeded stratified train/test split of dataset indices. Every class
/// keeps at least one sample on each side.
pub fn stratified_split(
    data: &[FeatureVector],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), DriverIdError> {
    if !train_fraction.is_finite() || train_fraction <= 0.0 || train_fraction >= 1.0 {
        return Err(DriverIdError::InvalidSplitFraction(train_fraction));
    }
    if data.is_empty() {
        return Err(DriverIdError::EmptyTrainingSet);
    }
    let mut by_label: BTreeMap<u8, Vec<usize>> = BTreeMap::new();
    for (i, f) in data.iter().enumerate() {
        by_label.entry(f.label).or_default().push(i);
    }
    let mut rng = rng_for(seed, &[4]);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (label, mut indices) in by_label {
        if indices.len() < 2 {
            return Err(DriverIdError::ClassTooSmall {
                label,
                count: indices.len(),
            });
        }
        indices.shuffle(&mut rng);
        let n = indices.len();
        let n_train = ((n as f64 * train_fraction).round() as usize).clamp(1, n - 1);
        train.extend_from_slice(&indices[..n_train]);
        test.extend_from_slice(&indices[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Trains every requested model on a seeded stratified split and reports
/// accuracy and confusion on the held-out side. Deterministic given the
/// seed.
pub fn evaluate(
    kinds: &[ClassifierKind],
    data: &[FeatureVector],
    train_fraction: f64,
    seed: u64,
) -> Result<Vec<EvalReport>, DriverIdError> {
    let (train_idx, test_idx) = stratified_split(data, train_fraction, seed)?;
    let train: Vec<FeatureVector> = train_idx.iter().map(|&i| data[i].clone()).collect();

    let mut labels: Vec<u8> = data.iter().map(|f| f.label).collect();
    labels.sort_unstable();
    labels.dedup();
    let label_index: BTreeMap<u8, usize> =
        labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();

    let mut reports = Vec::with_capacity(kinds.len());
    for kind in kinds {
        let model = kind.train(&train)?;
        let mut confusion = vec![vec![0usize; labels.len()]; labels.len()];
        let mut correct = 0usize;
        for &i in &test_idx {
            let actual = data[i].label;
            let predicted = model.predict(&data[i].values);
            confusion[label_index[&actual]][*label_index.get(&predicted).unwrap_or(&0)] += 1;
            if predicted == actual {
                correct += 1;
            }
        }
        reports.push(EvalReport {
            classifier: model.name(),
            labels: labels.clone(),
            accuracy: correct as f64 / test_idx.len() as f64,
            confusion,
            train_size: train_idx.len(),
            test_size: test_idx.len(),
        });
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(label: u8, values: &[f64]) -> FeatureVector {
        FeatureVector {
            label,
            values: values.to_vec(),
        }
    }

    fn blobs(per_class: usize, seed: u64, spread: f64) -> Vec<FeatureVector> {
        use rand::Rng;
        let centers = [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0), (10.0, 10.0)];
        let mut rng = rng_for(seed, &[5]);
        let mut data = Vec::new();
        for (label, (cx, cy)) in centers.iter().enumerate() {
            for _ in 0..per_class {
                data.push(fv(
                    label as u8,
                    &[
                        cx + rng.random_range(-spread..spread),
                        cy + rng.random_range(-spread..spread),
                    ],
                ));
            }
        }
        data
    }

    #[test]
    fn knn_k1_returns_the_label_of_a_training_point() {
        let data = vec![fv(0, &[0.0, 0.0]), fv(1, &[10.0, 10.0])];
        let model = train_knn(&data, 1).unwrap();
        assert_eq!(model.predict(&[0.0, 0.0]), 0);
        assert_eq!(model.predict(&[10.0, 10.0]), 1);
        assert_eq!(model.predict(&[1.0, 1.0]), 0);
    }

    #[test]
    fn knn_requires_odd_k_and_data() {
        let data = vec![fv(0, &[0.0]), fv(1, &[1.0])];
        assert!(train_knn(&data, 2).is_err());
        assert!(train_knn(&data, 0).is_err());
        assert!(train_knn(&[], 1).is_err());
        let ragged = vec![fv(0, &[0.0]), fv(1, &[1.0, 2.0])];
        assert!(train_knn(&ragged, 1).is_err());
    }

    #[test]
    fn knn_votes_break_ties_toward_the_smaller_label() {
        // k=3 with one neighbor each of labels 0,1 plus a farther 1 makes
        // it 2:1; flip the geometry so counts tie at 1:1:1 instead
        let data = vec![fv(2, &[0.0, 1.0]), fv(1, &[1.0, 0.0]), fv(0, &[-1.0, 0.0])];
        let model = train_knn(&data, 3).unwrap();
        // all three are equidistant from the origin: counts tie, label 0
        assert_eq!(model.predict(&[0.0, 0.0]), 0);
    }

    #[test]
    fn knn_is_perfect_when_test_equals_train() {
        let data = blobs(10, 1, 2.0);
        let model = train_knn(&data, 1).unwrap();
        for f in &data {
            assert_eq!(model.predict(&f.values), f.label);
        }
    }

    #[test]
    fn gnb_separates_wide_blobs() {
        let data = blobs(50, 2, 2.0);
        let model = train_gnb_ovr(&data).unwrap();
        let correct = data
            .iter()
            .filter(|f| model.predict(&f.values) == f.label)
            .count();
        assert!(correct as f64 / data.len() as f64 >= 0.99);
    }

    #[test]
    fn gnb_handles_zero_variance_features() {
        let data = vec![
            fv(0, &[1.0, 5.0]),
            fv(0, &[1.0, 6.0]),
            fv(1, &[2.0, 5.0]),
            fv(1, &[2.0, 4.0]),
        ];
        let model = train_gnb_ovr(&data).unwrap();
        assert_eq!(model.predict(&[1.0, 5.5]), 0);
        assert_eq!(model.predict(&[2.0, 4.5]), 1);
    }

    #[test]
    fn stratified_split_is_deterministic_and_balanced() {
        let data = blobs(20, 3, 1.0);
        let (train, test) = stratified_split(&data, 0.75, 42).unwrap();
        assert_eq!(train.len(), 60);
        assert_eq!(test.len(), 20);
        let (train2, test2) = stratified_split(&data, 0.75, 42).unwrap();
        assert_eq!(train, train2);
        assert_eq!(test, test2);
        let (train3, _) = stratified_split(&data, 0.75, 43).unwrap();
        assert_ne!(train, train3);

        // per-class counts balanced
        for label in 0..4u8 {
            let n = test.iter().filter(|&&i| data[i].label == label).count();
            assert_eq!(n, 5);
        }
    }

    #[test]
    fn split_rejects_bad_inputs() {
        let data = blobs(5, 4, 1.0);
        assert!(stratified_split(&data, 0.0, 1).is_err());
        assert!(stratified_split(&data, 1.0, 1).is_err());
        assert!(stratified_split(&[], 0.75, 1).is_err());
        let mut tiny = blobs(2, 5, 1.0);
        tiny.push(fv(9, &[50.0, 50.0]));
        assert!(matches!(
            stratified_split(&tiny, 0.75, 1).unwrap_err(),
            DriverIdError::ClassTooSmall { label: 9, count: 1 }
        ));
    }

    #[test]
    fn constant_model_scores_the_base_rate() {
        let data = blobs(20, 6, 1.0);
        let reports = evaluate(&[ClassifierKind::Constant { label: 0 }], &data, 0.75, 7).unwrap();
        assert_eq!(reports[0].accuracy, 0.25);
    }

    #[test]
    fn perfect_model_has_identity_confusion() {
        let data = blobs(20, 7, 0.5);
        let reports = evaluate(&[ClassifierKind::Knn { k: 1 }], &data, 0.75, 8).unwrap();
        let report = &reports[0];
        assert_eq!(report.accuracy, 1.0);
        for (i, row) in report.confusion.iter().enumerate() {
            for (j, &count) in row.iter().enumerate() {
                if i == j {
                    assert_eq!(count, 5);
                } else {
                    assert_eq!(count, 0);
                }
            }
        }
        // row sums equal per-class test counts and trace/total = accuracy
        assert_eq!(report.per_class_test_counts(), vec![5, 5, 5, 5]);
    }

    #[test]
    fn evaluate_is_deterministic_per_seed() {
        let data = blobs(15, 8, 3.0);
        let kinds = [ClassifierKind::Knn { k: 3 }, ClassifierKind::GaussianNbOvr];
        let a = evaluate(&kinds, &data, 0.75, 11).unwrap();
        let b = evaluate(&kinds, &data, 0.75, 11).unwrap();
        assert_eq!(a, b);
    }
}
