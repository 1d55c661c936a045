//! Adversary posteriors that meet the subset guessing bound with equality,
//! and a greedy oracle for the largest guessing probability reachable under
//! a variational-distance budget.

use crate::dist::{KeyDistribution, KeySubset, SubsetOutcome, MAX_KEY_LENGTH};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest key length the greedy oracle accepts.
pub const ORACLE_MAX_KEY_LENGTH: u32 = 12;

/// Parameters of a bound-saturating distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalRecipe<T> {
    key_length: u32,
    budget: T,
    favored: SubsetOutcome,
}

impl<T: Scalar> ExtremalRecipe<T> {
    /// `favored` fixes both the target subset and the outcome that receives the extra mass.
    pub fn new(key_length: u32, budget: T, favored: SubsetOutcome) -> Result<Self> {
        if key_length == 0 || key_length > MAX_KEY_LENGTH {
            return Err(Error::KeyLengthOutOfRange { length: key_length as u64, max: MAX_KEY_LENGTH as u64 });
        }
        favored.subset().validate(key_length)?;
        if !budget.is_finite() || budget < T::zero() {
            return Err(Error::param("epsilon", "must be a finite nonnegative real"));
        }
        let limit = feasibility_limit::<T>(favored.subset().len() as u32);
        if budget > limit {
            return Err(Error::InfeasibleBudget {
                budget: budget.to_f64().unwrap_or(f64::NAN),
                limit: limit.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(ExtremalRecipe { key_length, budget, favored })
    }

    pub fn key_length(&self) -> u32 {
        self.key_length
    }

    pub fn budget(&self) -> T {
        self.budget
    }

    pub fn target(&self) -> &KeySubset {
        self.favored.subset()
    }

    pub fn favored(&self) -> &SubsetOutcome {
        &self.favored
    }
}

/// Largest budget for a target of `m` bits: `1 - 2^(-m)`.
///
/// Removing `ε` uniformly from the `2^l - 2^(l-m)` keys that disagree with the
/// favored outcome keeps them nonnegative exactly when `ε <= 1 - 2^(-m)`.
pub fn feasibility_limit<T: Scalar>(m: u32) -> T {
    T::one() - T::pow2_neg(m as u64)
}

/// Adds `ε` spread evenly over keys consistent with the favored outcome and
/// removes `ε` spread evenly over the rest.
///
/// The raised and lowered sets are disjoint, so `δ(P, U) = ε` and the favored
/// marginal entry is `2^(-m) + ε`.
pub fn construct_equality_distribution<T: Scalar>(recipe: &ExtremalRecipe<T>) -> KeyDistribution<T> {
    let l = recipe.key_length;
    let m = recipe.target().len() as u32;
    let base = T::pow2_neg(l as u64);
    let favored_count = T::lit((1u64 << (l - m)) as f64);
    let rest_count = T::lit(((1u64 << l) - (1u64 << (l - m))) as f64);
    let up = base + recipe.budget / favored_count;
    let down = if rest_count > T::zero() { (base - recipe.budget / rest_count).max(T::zero()) } else { base };
    let probs = (0..1u64 << l).map(|k| if recipe.favored.matches(k, l) { up } else { down }).collect();
    KeyDistribution::from_parts(l, probs)
}

/// Greedily moves mass from the smallest entries onto the largest one until
/// `budget` is spent, returning the final value of the largest entry.
///
/// Each unit moved raises the distance from the starting table by exactly one
/// unit, so this maximizes one coordinate over a total-variation ball.
pub fn greedy_max_coordinate<T: Scalar>(entries: &[T], budget: T) -> T {
    let Some((top, _)) = entries
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
    else {
        return T::zero();
    };
    let mut favored = entries[top];
    let mut rest: Vec<T> = entries.iter().enumerate().filter(|(i, _)| *i != top).map(|(_, p)| *p).collect();
    rest.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut remaining = budget;
    for mass in rest {
        if remaining <= T::zero() {
            break;
        }
        let take = mass.min(remaining);
        favored = favored + take;
        remaining = remaining - take;
    }
    favored.min(T::one())
}

/// Supremum of the optimal guessing probability of `subset` over all
/// distributions within variational distance `budget` of U.
pub fn max_guess_given_budget<T: Scalar>(key_length: u32, subset: &KeySubset, budget: T) -> Result<T> {
    if key_length > ORACLE_MAX_KEY_LENGTH {
        return Err(Error::OracleScaleExceeded { length: key_length, max: ORACLE_MAX_KEY_LENGTH });
    }
    if !(budget >= T::zero()) {
        return Err(Error::param("epsilon", "must be nonnegative"));
    }
    let marginal = KeyDistribution::<T>::uniform(key_length)?.marginal(subset)?;
    Ok(greedy_max_coordinate(marginal.probs(), budget))
}

/// Independent bits, each 0 with probability `1/2 + bias`.
pub fn construct_biased_bits_distribution<T: Scalar>(key_length: u32, bias: T) -> Result<KeyDistribution<T>> {
    let half = T::lit(0.5);
    if !(bias >= T::zero() && bias <= half) {
        return Err(Error::BiasOutOfRange(bias.to_f64().unwrap_or(f64::NAN)));
    }
    if key_length == 0 || key_length > MAX_KEY_LENGTH {
        return Err(Error::KeyLengthOutOfRange { length: key_length as u64, max: MAX_KEY_LENGTH as u64 });
    }
    let zero = half + bias;
    let one = half - bias;
    let probs = (0..1u64 << key_length)
        .map(|k| {
            let ones = k.count_ones() as i32;
            zero.powi(key_length as i32 - ones) * one.powi(ones)
        })
        .collect();
    KeyDistribution::new(key_length, probs)
}

/// Whole-key guessing probability of the biased-bits distribution, `(1/2 + bias)^l`.
pub fn biased_bits_guess_prob<T: Scalar>(key_length: u32, bias: T) -> T {
    (T::lit(0.5) + bias).powi(key_length as i32)
}
