//! Closed-form guarantees for arbitrary key lengths.
//!
//! Everything touching `2^(-l)` is evaluated in the log domain so that key
//! lengths in the millions stay exact where it matters.

use crate::error::{Error, Result};
use crate::scalar::{log2_add_exp2, Scalar};

/// Key length, trace distance and optional QBER of a scenario.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecurityParameters<T> {
    key_length: u64,
    trace_distance: T,
    qber: Option<T>,
}

impl<T: Scalar> SecurityParameters<T> {
    pub fn new(key_length: u64, trace_distance: T, qber: Option<T>) -> Result<Self> {
        if key_length == 0 {
            return Err(Error::param("key_length", "must be at least 1"));
        }
        if !(trace_distance >= T::zero() && trace_distance <= T::one()) {
            return Err(Error::param("trace_distance", format!("{trace_distance} is outside [0, 1]")));
        }
        if let Some(q) = qber {
            if !(q >= T::zero() && q <= T::lit(0.5)) {
                return Err(Error::param("qber", format!("{q} is outside [0, 1/2]")));
            }
        }
        Ok(SecurityParameters { key_length, trace_distance, qber })
    }

    pub fn key_length(&self) -> u64 {
        self.key_length
    }

    pub fn trace_distance(&self) -> T {
        self.trace_distance
    }

    pub fn qber(&self) -> Option<T> {
        self.qber
    }
}

/// `log2(2^(-m) + ε)`.
pub fn raw_guess_bound_log2<T: Scalar>(m: u64, epsilon: T) -> T {
    log2_add_exp2(-T::lit(m as f64), epsilon.log2())
}

/// Upper bound `2^(-m) + ε'` on guessing an `m`-bit subset.
pub fn raw_guess_bound<T: Scalar>(m: u64, epsilon_prime: T) -> T {
    if m < 64 {
        T::pow2_neg(m) + epsilon_prime
    } else {
        raw_guess_bound_log2(m, epsilon_prime).exp2()
    }
}

/// Known-plaintext form: bound `2^(-m) + ε''` on a target of `m` bits
/// after another segment of the key is revealed.
pub fn known_plaintext_guess_bound<T: Scalar>(m: u64, epsilon_second: T) -> T {
    raw_guess_bound(m, epsilon_second)
}

/// Individual level obtained from an averaged distance `d` by Markov's inequality.
///
/// One averaging level gives `d^(1/2)`; two (key values and privacy
/// amplification codes) give `d^(1/3)`.
pub fn markov_individual_epsilon<T: Scalar>(d: T, averaging_levels: u8) -> Result<T> {
    if !(d >= T::zero() && d <= T::one()) {
        return Err(Error::param("trace_distance", format!("{d} is outside [0, 1]")));
    }
    match averaging_levels {
        1 => Ok(d.sqrt()),
        2 => Ok(d.cbrt()),
        n => Err(Error::InvalidAveragingLevels(n)),
    }
}

/// `d^(1/4) / (2 sqrt(log2 e))`, the guaranteed bound on `1/2 - p_b` for the whole key.
pub fn ber_gap_bound<T: Scalar>(d: T) -> T {
    d.sqrt().sqrt() / (T::lit(2.0) * T::LOG2_E().sqrt())
}

/// Length `n` of a uniform key with the same whole-key guessing bound:
/// `-log2(2^(-l) + ε)`.
pub fn effective_uniform_bits<T: Scalar>(key_length: u64, epsilon: T) -> T {
    if epsilon <= T::zero() {
        return T::lit(key_length as f64);
    }
    -raw_guess_bound_log2(key_length, epsilon)
}

/// Integer display of an effective key length (floored).
pub fn whole_bits<T: Scalar>(bits: T) -> u64 {
    bits.floor().max(T::zero()).to_u64().unwrap_or(0)
}

/// `λ = -log2(d) / l`, the exponent in `d ~ 2^(-λ l)`.
pub fn convergence_exponent<T: Scalar>(key_length: u64, d: T) -> Result<T> {
    if key_length == 0 {
        return Err(Error::param("key_length", "must be at least 1"));
    }
    if !(d > T::zero() && d < T::one()) {
        return Err(Error::param("trace_distance", format!("exponent undefined for d = {d}")));
    }
    Ok(-d.log2() / T::lit(key_length as f64))
}

/// Binary entropy `h(q)` in bits.
pub fn binary_entropy<T: Scalar>(q: T) -> T {
    let term = |x: T| if x > T::zero() { -x * x.log2() } else { T::zero() };
    term(q) + term(T::one() - q)
}

/// Error-correction leak `h(QBER)`.
pub fn leak_ec<T: Scalar>(qber: T) -> Result<T> {
    if !(qber >= T::zero() && qber <= T::lit(0.5)) {
        return Err(Error::param("qber", format!("{qber} is outside [0, 1/2]")));
    }
    Ok(binary_entropy(qber))
}

/// Whether `d` is small on the scale of `2^(-l)` (at most a tenth of it).
pub fn is_near_ideal<T: Scalar>(key_length: u64, d: T) -> bool {
    d <= T::zero() || d.log2() <= -T::lit(key_length as f64) - T::lit(10.0).log2()
}

/// Default subset sizes: single bit, byte, block and whole key.
pub fn default_subset_sizes(key_length: u64) -> Vec<u64> {
    let mut sizes: Vec<u64> = [1, 8, 64, key_length].into_iter().filter(|m| *m <= key_length).collect();
    sizes.dedup();
    sizes
}

/// One row of the subset guessing table.
#[derive(Clone, Debug, PartialEq)]
pub struct SubsetBound<T> {
    pub subset_size: u64,
    /// `log2` of the uniform guessing probability, i.e. `-m`.
    pub uniform_log2: T,
    /// `2^(-m) + d`, capped at 1.
    pub averaged: T,
    pub averaged_log2: T,
    /// `2^(-m) + d^(1/3)`, capped at 1.
    pub individual: T,
    pub individual_log2: T,
}

impl<T: Scalar> SubsetBound<T> {
    fn new(m: u64, averaged_eps: T, individual_eps: T) -> Self {
        let cap = |log2: T| log2.min(T::zero());
        let averaged_log2 = cap(raw_guess_bound_log2(m, averaged_eps));
        let individual_log2 = cap(raw_guess_bound_log2(m, individual_eps));
        SubsetBound {
            subset_size: m,
            uniform_log2: -T::lit(m as f64),
            averaged: raw_guess_bound(m, averaged_eps).min(T::one()),
            averaged_log2,
            individual: raw_guess_bound(m, individual_eps).min(T::one()),
            individual_log2,
        }
    }
}

/// Where `d` sits relative to `2^(-l)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScaleAssessment {
    /// `d <= 2^(-l) / 10`: the key is close to uniform on its own scale.
    NearIdeal,
    /// `d` may be small in absolute terms but not relative to `2^(-l)`.
    FarFromUniform,
}

/// The error-correction leak together with whether subtracting it is justified.
#[derive(Clone, Debug, PartialEq)]
pub struct LeakEcAssessment<T> {
    pub qber: T,
    pub leak_ec: T,
    /// Subtracting `leak_ec` presumes a near-uniform key. It is never
    /// subtracted from any figure in the report.
    pub subtraction_justified: bool,
}

/// Side-by-side rendering of the failure-probability reading of `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct InterpretationComparison<T> {
    /// "ideal with probability at least 1 - d", refuted.
    pub claimed_ideal_probability: T,
    /// Individual level the refuted reading would give (one Markov step, `d^(1/2)`).
    pub claimed_individual_epsilon: T,
    /// `true`: under the correct reading, `d > 0` means the key distribution
    /// differs from uniform with certainty.
    pub uniform_with_certainty_fails: bool,
}

impl<T> InterpretationComparison<T> {
    pub const REFUTED_CLAIM: &'static str = "key is ideal (uniform) with probability >= 1 - d";
    pub const CORRECT_READING: &'static str =
        "d > 0 means the key distribution is not uniform, with certainty; d bounds guessing advantages";
}

/// Every closed-form guarantee for a scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct GuaranteeReport<T> {
    pub params: SecurityParameters<T>,
    pub log2_trace_distance: T,
    /// Raw-security subset bounds with `ε' = d` (averaged) and `d^(1/3)` (individual).
    pub raw_subset_bound_avg: Vec<SubsetBound<T>>,
    /// Known-plaintext target bounds with `ε'' = d`; targets leave at least one known bit.
    pub kpa_bound_avg: Vec<SubsetBound<T>>,
    pub individual_epsilon: T,
    pub individual_epsilon_single_avg: T,
    pub ber_gap_bound: T,
    pub effective_uniform_bits_avg: T,
    pub effective_uniform_bits_individual: T,
    /// `None` when `d` is 0 or 1.
    pub lambda: Option<T>,
    /// `log2(d) + l`: how many bits `d` sits above `2^(-l)`.
    pub scale_margin_bits: T,
    pub scale: ScaleAssessment,
    pub leak_ec: Option<LeakEcAssessment<T>>,
    pub wrong_interpretation_claim: InterpretationComparison<T>,
}

/// Builds the full report. `subset_sizes` must lie in `[1, l]`.
pub fn build_report<T: Scalar>(params: SecurityParameters<T>, subset_sizes: &[u64]) -> Result<GuaranteeReport<T>> {
    let l = params.key_length;
    let d = params.trace_distance;
    if let Some(m) = subset_sizes.iter().find(|m| **m == 0 || **m > l) {
        return Err(Error::param("subset_sizes", format!("size {m} outside [1, {l}]")));
    }
    let individual = markov_individual_epsilon(d, 2)?;
    let single = markov_individual_epsilon(d, 1)?;
    let row = |m: &u64| SubsetBound::new(*m, d, individual);
    let leak = match params.qber {
        Some(q) => Some(LeakEcAssessment { qber: q, leak_ec: leak_ec(q)?, subtraction_justified: is_near_ideal(l, d) }),
        None => None,
    };
    let clamp_bits = |b: T| b.max(T::zero()).min(T::lit(l as f64));
    Ok(GuaranteeReport {
        params,
        log2_trace_distance: d.log2(),
        raw_subset_bound_avg: subset_sizes.iter().map(row).collect(),
        kpa_bound_avg: subset_sizes.iter().filter(|m| **m < l).map(row).collect(),
        individual_epsilon: individual,
        individual_epsilon_single_avg: single,
        ber_gap_bound: ber_gap_bound(d),
        effective_uniform_bits_avg: clamp_bits(effective_uniform_bits(l, d)),
        effective_uniform_bits_individual: clamp_bits(effective_uniform_bits(l, individual)),
        lambda: convergence_exponent(l, d).ok(),
        scale_margin_bits: d.log2() + T::lit(l as f64),
        scale: if is_near_ideal(l, d) { ScaleAssessment::NearIdeal } else { ScaleAssessment::FarFromUniform },
        leak_ec: leak,
        wrong_interpretation_claim: InterpretationComparison {
            claimed_ideal_probability: T::one() - d,
            claimed_individual_epsilon: single,
            uniform_with_certainty_fails: d > T::zero(),
        },
    })
}
