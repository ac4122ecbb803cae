//! Ordinal pattern statistics: pattern distributions from delay
//! embeddings, normalized permutation entropy and statistical complexity.
//!
//! A series is symbolized by the rank pattern of each length-D delay
//! vector; ties rank by order of appearance (the earlier index ranks
//! lower). Entropy is Shannon entropy of the pattern distribution
//! normalized by `ln(D!)`; complexity is the entropy times the
//! Jensen–Shannon disequilibrium to the uniform distribution, normalized
//! so both land in [0, 1].

use super::DriverIdError;

/// Delay-embedding configuration: dimension `D` (pattern length) and
/// delay `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrdinalConfig {
    dim: usize,
    delay: usize,
}

impl Default for OrdinalConfig {
    /// D=3, tau=1: six patterns, suitable for 30-sample windows.
    fn default() -> Self {
        OrdinalConfig { dim: 3, delay: 1 }
    }
}

impl OrdinalConfig {
    /// Dimension must be in `2..=7` (so D! stays tractable), delay at
    /// least 1.
    pub fn new(dim: usize, delay: usize) -> Result<Self, DriverIdError> {
        if !(2..=7).contains(&dim) {
            return Err(DriverIdError::InvalidDimension(dim));
        }
        if delay == 0 {
            return Err(DriverIdError::InvalidDelay);
        }
        Ok(OrdinalConfig { dim, delay })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn delay(&self) -> usize {
        self.delay
    }

    /// Minimum series length: `(D - 1) * tau + 1`.
    pub fn required_len(&self) -> usize {
        (self.dim - 1) * self.delay + 1
    }

    /// Number of possible patterns, `D!`.
    pub fn pattern_count(&self) -> usize {
        factorial(self.dim)
    }
}

pub(crate) fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Empirical distribution over the `D!` ordinal patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct OrdinalDistribution {
    counts: Vec<u64>,
    probabilities: Vec<f64>,
}

impl OrdinalDistribution {
    /// Builds a synthetic distribution from probabilities alone (no
    /// counts); used for analytic and property tests.
    pub fn from_probabilities(probabilities: Vec<f64>) -> Result<Self, DriverIdError> {
        if probabilities.len() < 2 {
            return Err(DriverIdError::InvalidDistribution(
                "need at least two patterns".into(),
            ));
        }
        if probabilities.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(DriverIdError::InvalidDistribution(
                "probabilities must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(DriverIdError::InvalidDistribution(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(OrdinalDistribution {
            counts: Vec::new(),
            probabilities,
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Pattern occurrence counts; empty for synthetic distributions.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Total number of embedded vectors behind the counts.
    pub fn total_count(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Lehmer index of a permutation of `0..d`, in `0..d!`.
fn lehmer_index(perm: &[usize]) -> usize {
    let d = perm.len();
    let mut index = 0;
    for i in 0..d {
        let smaller_after = perm[i + 1..].iter().filter(|&&x| x < perm[i]).count();
        index = index * (d - i) + smaller_after;
    }
    index
}

/// Counts ordinal patterns over all `len - (D-1)*tau` delay vectors of
/// the series and normalizes into a distribution.
pub fn ordinal_distribution(
    series: &[f64],
    config: &OrdinalConfig,
) -> Result<OrdinalDistribution, DriverIdError> {
    if series.len() < config.required_len() {
        return Err(DriverIdError::SeriesTooShort {
            len: series.len(),
            required: config.required_len(),
        });
    }
    if let Some(pos) = series.iter().position(|v| !v.is_finite()) {
        return Err(DriverIdError::NonFiniteSample(pos));
    }
    let d = config.dim();
    let tau = config.delay();
    let n_vectors = series.len() - (d - 1) * tau;
    let mut counts = vec![0u64; config.pattern_count()];
    let mut ranks: Vec<usize> = Vec::with_capacity(d);
    for start in 0..n_vectors {
        ranks.clear();
        ranks.extend(0..d);
        // stable sort by value: equal values keep index order, so the
        // earlier sample ranks lower
        ranks.sort_by(|&a, &b| {
            series[start + a * tau]
                .partial_cmp(&series[start + b * tau])
                .expect("finite samples")
        });
        counts[lehmer_index(&ranks)] += 1;
    }
    let probabilities = counts
        .iter()
        .map(|&c| c as f64 / n_vectors as f64)
        .collect();
    Ok(OrdinalDistribution {
        counts,
        probabilities,
    })
}

fn shannon_entropy_nats(probabilities: &[f64]) -> f64 {
    probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum()
}

/// Normalized permutation entropy: `H = -sum p ln p / ln(M)` with
/// `0 ln 0 = 0`, where `M` is the number of patterns.
pub fn permutation_entropy(dist: &OrdinalDistribution) -> f64 {
    let m = dist.probabilities().len() as f64;
    shannon_entropy_nats(dist.probabilities()) / m.ln()
}

/// Jensen–Shannon divergence between two distributions over the same
/// support (natural log).
pub fn jensen_shannon(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "distributions must share support");
    let mix: Vec<f64> = p.iter().zip(q).map(|(a, b)| (a + b) / 2.0).collect();
    let js = shannon_entropy_nats(&mix) - (shannon_entropy_nats(p) + shannon_entropy_nats(q)) / 2.0;
    js.max(0.0)
}

/// Statistical complexity `C = Q_J(P, U) * H(P)`, where `Q_J` is the
/// Jensen–Shannon divergence to the uniform distribution normalized by its
/// maximum (attained by a degenerate distribution), so `C` lies in [0, 1].
pub fn statistical_complexity(dist: &OrdinalDistribution) -> f64 {
    let m = dist.probabilities().len();
    let uniform = vec![1.0 / m as f64; m];
    let mut degenerate = vec![0.0; m];
    degenerate[0] = 1.0;
    let q0 = jensen_shannon(&degenerate, &uniform);
    let qj = jensen_shannon(dist.probabilities(), &uniform) / q0;
    qj * permutation_entropy(dist)
}

/// Convenience: entropy and complexity of a series in one call.
pub fn entropy_complexity(
    series: &[f64],
    config: &OrdinalConfig,
) -> Result<(f64, f64), DriverIdError> {
    let dist = ordinal_distribution(series, config)?;
    Ok((permutation_entropy(&dist), statistical_complexity(&dist)))
}
