//! Averaged versus individual distance guarantees.
//!
//! An ensemble is a finite weighted collection of per-instance distances. The
//! average is what a security proof bounds; Markov's inequality turns it into
//! an individual level that holds outside a small exception set.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dist::{KeyDistribution, KeySubset};
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};

/// Absolute slack between a stated distance and the attached distribution's `δ(P, U)`.
pub const DISTANCE_MATCH_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleEntry<T> {
    pub weight: T,
    pub distance: T,
    pub distribution: Option<KeyDistribution<T>>,
}

impl<T: Scalar> EnsembleEntry<T> {
    pub fn new(weight: T, distance: T) -> Self {
        EnsembleEntry { weight, distance, distribution: None }
    }

    /// Entry whose distance is taken from `δ(P, U)`.
    pub fn with_distribution(weight: T, distribution: KeyDistribution<T>) -> Self {
        EnsembleEntry { weight, distance: distribution.distance_to_uniform(), distribution: Some(distribution) }
    }
}

/// Weighted collection of per-instance distances.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceEnsemble<T> {
    entries: Vec<EnsembleEntry<T>>,
}

impl<T: Scalar> DistanceEnsemble<T> {
    pub fn new(entries: Vec<EnsembleEntry<T>>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidEnsemble("no entries".into()));
        }
        for (i, e) in entries.iter().enumerate() {
            if !(e.weight > T::zero() && e.weight.is_finite()) {
                return Err(Error::InvalidEnsemble(format!("entry {i}: weight {} is not positive", e.weight)));
            }
            if !(e.distance >= T::zero() && e.distance <= T::one()) {
                return Err(Error::InvalidEnsemble(format!("entry {i}: distance {} outside [0, 1]", e.distance)));
            }
            if let Some(p) = &e.distribution {
                let actual = p.distance_to_uniform();
                if (actual - e.distance).abs() > T::lit(DISTANCE_MATCH_TOL) {
                    return Err(Error::InvalidEnsemble(format!(
                        "entry {i}: stated distance {} but distribution is at {}",
                        e.distance, actual
                    )));
                }
            }
        }
        let total = compensated_sum(entries.iter().map(|e| e.weight));
        if (total - T::one()).abs() > T::normalization_tol() {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}, not 1")));
        }
        Ok(DistanceEnsemble { entries })
    }

    pub fn from_pairs(pairs: &[(T, T)]) -> Result<Self> {
        Self::new(pairs.iter().map(|(w, d)| EnsembleEntry::new(*w, *d)).collect())
    }

    /// Two-point ensemble meeting Markov's bound with equality at threshold `t`:
    /// weight `mean / t` at distance `t`, the rest at 0.
    pub fn two_point_tight(mean: T, threshold: T) -> Result<Self> {
        if !(mean > T::zero() && threshold >= mean && threshold <= T::one()) {
            return Err(Error::InvalidEnsemble(format!("need 0 < mean <= threshold <= 1, got {mean}, {threshold}")));
        }
        let w = mean / threshold;
        if w >= T::one() {
            return Self::from_pairs(&[(T::one(), threshold)]);
        }
        Self::from_pairs(&[(w, threshold), (T::one() - w, T::zero())])
    }

    /// Reproducible random ensemble of `size` entries whose average distance is `mean`.
    ///
    /// Weights are Dirichlet(1); distances are heavy-tailed towards zero and then
    /// mapped affinely onto the requested mean, staying inside `[0, 1]`.
    pub fn sample(seed: u64, size: usize, mean: f64) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidEnsemble("sample size must be positive".into()));
        }
        if !(mean >= 0.0 && mean <= 1.0) {
            return Err(Error::InvalidEnsemble(format!("mean {mean} outside [0, 1]")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..size).map(|_| -rng.sample::<f64, _>(Open01).ln()).collect();
        let total: f64 = compensated_sum(raw.iter().copied());
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let distances: Vec<f64> = (0..size).map(|_| rng.gen::<f64>().powi(4)).collect();
        let current: f64 = compensated_sum(weights.iter().zip(&distances).map(|(w, d)| w * d));
        let shifted: Vec<f64> = if mean <= current {
            distances.iter().map(|d| d * mean / current).collect()
        } else {
            distances.iter().map(|d| 1.0 - (1.0 - d) * (1.0 - mean) / (1.0 - current)).collect()
        };
        let entries = weights
            .into_iter()
            .zip(shifted)
            .map(|(w, d)| EnsembleEntry::new(T::lit(w), T::lit(d.clamp(0.0, 1.0))))
            .collect();
        Self::new(entries)
    }

    pub fn entries(&self) -> &[EnsembleEntry<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Σ w_j d_j`.
    pub fn average_distance(&self) -> T {
        compensated_sum(self.entries.iter().map(|e| e.weight * e.distance))
    }

    /// Total weight of entries with distance at least `threshold`.
    pub fn exceedance_fraction(&self, threshold: T) -> Result<T> {
        check_threshold(threshold)?;
        Ok(compensated_sum(self.entries.iter().filter(|e| e.distance >= threshold).map(|e| e.weight)))
    }

    /// Markov's bound `average / threshold` on the exceedance fraction.
    pub fn markov_bound(&self, threshold: T) -> Result<T> {
        check_threshold(threshold)?;
        Ok(self.average_distance() / threshold)
    }
}

fn check_threshold<T: Scalar>(threshold: T) -> Result<()> {
    if !(threshold > T::zero()) {
        return Err(Error::param("threshold", format!("{threshold} must be positive")));
    }
    Ok(())
}

/// One Markov step: instances above `d^a` have total weight at most `d^(1-a)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarkovSplit<T> {
    pub threshold_exponent: T,
    pub exception_probability: T,
    pub conditional_epsilon: T,
}

/// Splits an averaged level `d` at threshold `d^threshold_exponent`.
pub fn markov_split<T: Scalar>(d_avg: T, threshold_exponent: T) -> Result<MarkovSplit<T>> {
    if !(d_avg > T::zero() && d_avg < T::one()) {
        return Err(Error::param("d_avg", format!("{d_avg} outside (0, 1)")));
    }
    if !(threshold_exponent > T::zero() && threshold_exponent < T::one()) {
        return Err(Error::param("threshold_exponent", format!("{threshold_exponent} outside (0, 1)")));
    }
    Ok(MarkovSplit {
        threshold_exponent,
        exception_probability: d_avg.powf(T::one() - threshold_exponent),
        conditional_epsilon: d_avg.powf(threshold_exponent),
    })
}

/// Symmetric single-level split `(d^(1/2), d^(1/2))`.
pub fn individual_guarantee_split<T: Scalar>(d_avg: T) -> Result<MarkovSplit<T>> {
    let mut s = markov_split(d_avg, T::lit(0.5))?;
    // sqrt is exact-rounded where powf(0.5) need not be
    s.exception_probability = d_avg.sqrt();
    s.conditional_epsilon = d_avg.sqrt();
    Ok(s)
}

/// Two averaging levels with equal exception probability `d^(1/3)` at each.
///
/// The outer level (privacy-amplification codes) leaves a conditional average
/// `d^(2/3)`; the inner level (key values) splits that symmetrically, ending at
/// the individual level `d^(1/3)`.
pub fn two_level_split<T: Scalar>(d_avg: T) -> Result<[MarkovSplit<T>; 2]> {
    let outer = markov_split(d_avg, T::lit(2.0 / 3.0))?;
    let inner = individual_guarantee_split(outer.conditional_epsilon)?;
    Ok([outer, inner])
}

/// Result of checking attached distributions against an individual level.
#[derive(Clone, Debug, PartialEq)]
pub struct IndividualCheck<T> {
    pub checked: usize,
    pub excepted: usize,
    pub excepted_weight: T,
    /// `(entry index, subset)` pairs where `p1 > 2^(-m) + ε`.
    pub violations: Vec<(usize, KeySubset)>,
}

/// For every entry outside the exception set (`distance < conditional_epsilon`)
/// with an attached distribution, checks `p1(S) <= 2^(-|S|) + conditional_epsilon`.
pub fn check_individual_guarantee<T: Scalar>(
    ensemble: &DistanceEnsemble<T>,
    split: &MarkovSplit<T>,
    subsets: &[KeySubset],
) -> Result<IndividualCheck<T>> {
    let eps = split.conditional_epsilon;
    let mut out = IndividualCheck { checked: 0, excepted: 0, excepted_weight: T::zero(), violations: Vec::new() };
    for (i, e) in ensemble.entries.iter().enumerate() {
        if e.distance >= eps {
            out.excepted += 1;
            out.excepted_weight = out.excepted_weight + e.weight;
            continue;
        }
        let Some(p) = &e.distribution else { continue };
        out.checked += 1;
        for s in subsets.iter().filter(|s| s.validate(p.key_length()).is_ok()) {
            let bound = T::pow2_neg(s.len() as u64) + eps;
            if p.optimal_guess_prob(s)? > bound + T::normalization_tol() {
                out.violations.push((i, s.clone()));
            }
        }
    }
    Ok(out)
}
