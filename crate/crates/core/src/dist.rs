//! Dense adversary posteriors over l-bit keys.
//!
//! Keys are indexed by their integer value with bit 0 as the most significant
//! bit, so key `0b101` of a 3-bit key has bit 0 = 1, bit 1 = 0, bit 2 = 1.
//! Subset outcomes use the same convention: the first listed position is the
//! most significant bit of the outcome value.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};

/// Largest key length representable as a dense table.
pub const MAX_KEY_LENGTH: u32 = 24;

/// Ordered set of bit positions within a key.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KeySubset {
    positions: Vec<u32>,
}

impl KeySubset {
    /// Builds a subset from arbitrary positions; they are stored in increasing order.
    pub fn new(mut positions: Vec<u32>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::EmptySubset);
        }
        positions.sort_unstable();
        if let Some(w) = positions.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePosition(w[0]));
        }
        Ok(KeySubset { positions })
    }

    /// All `l` positions.
    pub fn whole(key_length: u32) -> Result<Self> {
        Self::new((0..key_length).collect())
    }

    /// The first `m` positions.
    pub fn prefix(m: u32) -> Result<Self> {
        Self::new((0..m).collect())
    }

    pub fn positions(&self) -> &[u32] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn contains(&self, position: u32) -> bool {
        self.positions.binary_search(&position).is_ok()
    }

    /// Checks every position lies inside a key of `key_length` bits.
    pub fn validate(&self, key_length: u32) -> Result<()> {
        match self.positions.last() {
            Some(&p) if p >= key_length => Err(Error::PositionOutOfRange { position: p, key_length }),
            _ => Ok(()),
        }
    }

    /// Positions of an `l`-bit key not in this subset, if any.
    pub fn complement(&self, key_length: u32) -> Option<KeySubset> {
        let rest: Vec<u32> = (0..key_length).filter(|p| !self.contains(*p)).collect();
        KeySubset::new(rest).ok()
    }

    /// First shared position with `other`, if any.
    pub fn first_overlap(&self, other: &KeySubset) -> Option<u32> {
        self.positions.iter().copied().find(|p| other.contains(*p))
    }

    /// Bits of `key` at this subset's positions, packed most significant first.
    #[inline]
    pub fn project(&self, key: u64, key_length: u32) -> u64 {
        self.positions
            .iter()
            .fold(0u64, |acc, &pos| (acc << 1) | ((key >> (key_length - 1 - pos)) & 1))
    }
}

impl fmt::Display for KeySubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.positions.iter().map(|p| p.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Parses `"0,3,5"` or ranges such as `"0-7,12"`.
impl FromStr for KeySubset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: String| Error::param("subset", reason);
        let mut positions = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if let Some((a, b)) = part.split_once('-') {
                let a: u32 = a.trim().parse().map_err(|_| bad(format!("bad position '{a}'")))?;
                let b: u32 = b.trim().parse().map_err(|_| bad(format!("bad position '{b}'")))?;
                if a > b {
                    return Err(bad(format!("empty range '{part}'")));
                }
                positions.extend(a..=b);
            } else {
                positions.push(part.parse().map_err(|_| bad(format!("bad position '{part}'")))?);
            }
        }
        KeySubset::new(positions)
    }
}

/// A concrete value of the bits at a subset's positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubsetOutcome {
    subset: KeySubset,
    value: u64,
}

impl SubsetOutcome {
    pub fn new(subset: KeySubset, value: u64) -> Result<Self> {
        let bits = subset.len();
        if bits < 64 && value >> bits != 0 {
            return Err(Error::OutcomeOutOfRange { value, bits });
        }
        Ok(SubsetOutcome { subset, value })
    }

    /// Outcome from a bitstring such as `"101"`, first character for the first position.
    pub fn from_bits(subset: KeySubset, bits: &str) -> Result<Self> {
        if bits.len() != subset.len() {
            return Err(Error::param(
                "outcome",
                format!("{} bits given for a subset of size {}", bits.len(), subset.len()),
            ));
        }
        let mut value = 0u64;
        for c in bits.chars() {
            let b = match c {
                '0' => 0,
                '1' => 1,
                _ => return Err(Error::param("outcome", format!("'{c}' is not a bit"))),
            };
            value = (value << 1) | b;
        }
        Self::new(subset, value)
    }

    pub fn subset(&self) -> &KeySubset {
        &self.subset
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// Whether a full key agrees with this outcome.
    pub fn matches(&self, key: u64, key_length: u32) -> bool {
        self.subset.project(key, key_length) == self.value
    }

    /// The outcome as a bitstring, first position first.
    pub fn bits(&self) -> String {
        let m = self.subset.len();
        (0..m).map(|j| if (self.value >> (m - 1 - j)) & 1 == 1 { '1' } else { '0' }).collect()
    }
}

/// Probability distribution over all `2^l` values of an `l`-bit key.
#[derive(Clone, Debug, PartialEq)]
pub struct KeyDistribution<T> {
    key_length: u32,
    probs: Vec<T>,
}

fn check_key_length(key_length: u32) -> Result<()> {
    if key_length == 0 || key_length > MAX_KEY_LENGTH {
        return Err(Error::KeyLengthOutOfRange { length: key_length as u64, max: MAX_KEY_LENGTH as u64 });
    }
    Ok(())
}

impl<T: Scalar> KeyDistribution<T> {
    /// Validates and wraps a dense probability table. Inputs are never renormalized.
    pub fn new(key_length: u32, probs: Vec<T>) -> Result<Self> {
        check_key_length(key_length)?;
        let expected = 1usize << key_length;
        if probs.len() != expected {
            return Err(Error::LengthMismatch { expected, found: probs.len() });
        }
        if let Some((index, p)) = probs.iter().enumerate().find(|(_, p)| !p.is_finite() || **p < T::zero()) {
            return Err(Error::InvalidProbability { index, value: p.to_f64().unwrap_or(f64::NAN) });
        }
        let sum = compensated_sum(probs.iter().copied());
        if (sum - T::one()).abs() > T::normalization_tol() {
            return Err(Error::NotNormalized {
                sum: sum.to_f64().unwrap_or(f64::NAN),
                tolerance: T::normalization_tol().to_f64().unwrap_or(0.0),
            });
        }
        Ok(KeyDistribution { key_length, probs })
    }

    /// Table produced by an exact transformation of a valid distribution.
    pub(crate) fn from_parts(key_length: u32, probs: Vec<T>) -> Self {
        debug_assert_eq!(probs.len(), 1usize << key_length);
        KeyDistribution { key_length, probs }
    }

    /// The uniform distribution U.
    pub fn uniform(key_length: u32) -> Result<Self> {
        check_key_length(key_length)?;
        let p = T::pow2_neg(key_length as u64);
        Ok(KeyDistribution { key_length, probs: vec![p; 1usize << key_length] })
    }

    /// All mass on a single key.
    pub fn point_mass(key_length: u32, key: u64) -> Result<Self> {
        check_key_length(key_length)?;
        let n = 1usize << key_length;
        if key as usize >= n {
            return Err(Error::OutcomeOutOfRange { value: key, bits: key_length as usize });
        }
        let mut probs = vec![T::zero(); n];
        probs[key as usize] = T::one();
        Ok(KeyDistribution { key_length, probs })
    }

    pub fn key_length(&self) -> u32 {
        self.key_length
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn prob(&self, key: u64) -> T {
        self.probs[key as usize]
    }

    pub fn into_probs(self) -> Vec<T> {
        self.probs
    }

    fn keys(&self) -> impl Iterator<Item = (u64, T)> + '_ {
        self.probs.iter().enumerate().map(|(k, p)| (k as u64, *p))
    }

    /// Half the L1 distance to `other`.
    pub fn variational_distance(&self, other: &KeyDistribution<T>) -> Result<T> {
        if self.key_length != other.key_length {
            return Err(Error::KeyLengthMismatch { left: self.key_length, right: other.key_length });
        }
        let l1 = compensated_sum(self.probs.iter().zip(&other.probs).map(|(p, q)| (*p - *q).abs()));
        Ok(l1 / T::lit(2.0))
    }

    /// `δ(P, U)` without materializing U.
    pub fn distance_to_uniform(&self) -> T {
        let u = T::pow2_neg(self.key_length as u64);
        compensated_sum(self.probs.iter().map(|p| (*p - u).abs())) / T::lit(2.0)
    }

    /// Distribution of the bits at `subset`, as a distribution over `|subset|`-bit outcomes.
    pub fn marginal(&self, subset: &KeySubset) -> Result<KeyDistribution<T>> {
        subset.validate(self.key_length)?;
        let m = subset.len() as u32;
        let mut out = vec![T::zero(); 1usize << m];
        for (k, p) in self.keys() {
            let v = subset.project(k, self.key_length) as usize;
            out[v] = out[v] + p;
        }
        Ok(KeyDistribution::from_parts(m, out))
    }

    /// Probability that the key agrees with `obs`.
    pub fn outcome_probability(&self, obs: &SubsetOutcome) -> Result<T> {
        obs.subset().validate(self.key_length)?;
        Ok(compensated_sum(
            self.keys().filter(|(k, _)| obs.matches(*k, self.key_length)).map(|(_, p)| p),
        ))
    }

    /// Bayes conditioning on the bits at `obs.subset()` taking `obs.value()`.
    pub fn condition(&self, obs: &SubsetOutcome) -> Result<KeyDistribution<T>> {
        let mass = self.outcome_probability(obs)?;
        if mass <= T::zero() {
            return Err(Error::ZeroProbabilityCondition);
        }
        let probs = self
            .keys()
            .map(|(k, p)| if obs.matches(k, self.key_length) { p / mass } else { T::zero() })
            .collect();
        Ok(KeyDistribution::from_parts(self.key_length, probs))
    }

    /// Optimal probability of guessing the bits at `subset`: the largest marginal entry.
    pub fn optimal_guess_prob(&self, subset: &KeySubset) -> Result<T> {
        let marginal = self.marginal(subset)?;
        Ok(marginal.max_prob())
    }

    /// Optimal guessing probability for `target` after learning `known`.
    pub fn conditional_guess_prob(&self, known: &SubsetOutcome, target: &KeySubset) -> Result<T> {
        if let Some(p) = known.subset().first_overlap(target) {
            return Err(Error::OverlappingSubsets(p));
        }
        target.validate(self.key_length)?;
        self.condition(known)?.optimal_guess_prob(target)
    }

    /// Largest single-key probability.
    pub fn max_prob(&self) -> T {
        self.probs.iter().copied().fold(T::zero(), T::max)
    }

    /// `P(K_i = 0)` for every bit position.
    pub fn bit_zero_probabilities(&self) -> Vec<T> {
        let l = self.key_length;
        (0..l)
            .map(|i| {
                let shift = l - 1 - i;
                compensated_sum(self.keys().filter(|(k, _)| (k >> shift) & 1 == 0).map(|(_, p)| p))
            })
            .collect()
    }

    /// Average per-bit error of the bitwise maximum-posterior estimator,
    /// with the true key drawn from this distribution. Lies in `[0, 1/2]`.
    pub fn eve_bit_error_rate(&self) -> T {
        let zeros = self.bit_zero_probabilities();
        let errs = zeros.iter().map(|q0| {
            let q1 = (T::one() - *q0).max(T::zero());
            q0.min(q1)
        });
        compensated_sum(errs) / T::lit(self.key_length as f64)
    }

    /// Whether every entry is within `tol` of `2^(-l)`.
    pub fn is_uniform(&self, tol: T) -> bool {
        let u = T::pow2_neg(self.key_length as u64);
        self.probs.iter().all(|p| (*p - u).abs() <= tol)
    }
}

/// Free-function form of [`KeyDistribution::variational_distance`].
pub fn variational_distance<T: Scalar>(p: &KeyDistribution<T>, q: &KeyDistribution<T>) -> Result<T> {
    p.variational_distance(q)
}
