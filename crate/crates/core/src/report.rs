//! Text and JSON rendering of reports, analyses and ensemble verifications.
//!
//! Machine-readable numbers are rounded to the requested number of significant
//! digits; `*_log2` fields keep full precision.

use std::fmt::Write as _;

use serde::Serialize;

use crate::analysis::{BoundStatus, DistributionAnalysis, EnsembleVerification, SubsetCheck};
use crate::bounds::{whole_bits, GuaranteeReport, InterpretationComparison, ScaleAssessment, SubsetBound};
use crate::scalar::Scalar;

/// Significant digits used for the headline lines of text reports.
pub const HEADLINE_DIGITS: usize = 4;

/// Rounds to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

/// Compact decimal form with `digits` significant digits: plain notation for
/// moderate magnitudes, otherwise `2.154e-7` style.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let a = x.abs();
    if (1e-4..1e6).contains(&a) {
        return round_sig(x, digits).to_string();
    }
    let s = format!("{:.*e}", digits.saturating_sub(1), x);
    match s.split_once('e') {
        Some((mantissa, exp)) if mantissa.contains('.') => {
            format!("{}e{}", mantissa.trim_end_matches('0').trim_end_matches('.'), exp)
        }
        _ => s,
    }
}

fn f<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn num(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Serialize)]
struct SubsetBoundDoc {
    subset_size: u64,
    uniform_log2: f64,
    averaged: f64,
    averaged_log2: f64,
    individual: f64,
    individual_log2: f64,
}

#[derive(Serialize)]
struct LeakEcDoc {
    qber: f64,
    leak_ec: f64,
    subtracted: bool,
    subtraction_justified: bool,
    note: &'static str,
}

#[derive(Serialize)]
struct InterpretationDoc {
    claim: &'static str,
    status: &'static str,
    claimed_ideal_probability: f64,
    claimed_individual_epsilon: f64,
    correct_reading: &'static str,
    uniform_with_certainty_fails: bool,
}

#[derive(Serialize)]
struct ReportDoc {
    key_length: u64,
    trace_distance: f64,
    log2_trace_distance: Option<f64>,
    qber: Option<f64>,
    raw_subset_bound_avg: Vec<SubsetBoundDoc>,
    kpa_bound_avg: Vec<SubsetBoundDoc>,
    individual_epsilon: f64,
    individual_epsilon_single_avg: f64,
    ber_gap_bound: f64,
    ber_bound_reading: &'static str,
    effective_uniform_bits_avg: f64,
    effective_uniform_bits_avg_whole: u64,
    effective_uniform_bits_individual: f64,
    effective_uniform_bits_individual_whole: u64,
    lambda: Option<f64>,
    scale_margin_bits: Option<f64>,
    scale: &'static str,
    leak_ec: Option<LeakEcDoc>,
    wrong_interpretation_claim: InterpretationDoc,
}

const BER_READING: &str = "d^(1/4) / (2 * sqrt(log2 e)); the alternative grouping (d^(1/4) / 2) * sqrt(log2 e) is larger by log2 e";
const LEAK_NOTE: &str = "reported only; subtracting leak_ec presumes a near-uniform key and is never applied here";

fn scale_str(s: ScaleAssessment) -> &'static str {
    match s {
        ScaleAssessment::NearIdeal => "near_ideal",
        ScaleAssessment::FarFromUniform => "far_from_uniform",
    }
}

/// Machine-readable report document.
pub fn report_to_json<T: Scalar>(r: &GuaranteeReport<T>, precision: usize) -> String {
    let rs = |x: T| round_sig(f(x), precision);
    let rows = |v: &[SubsetBound<T>]| {
        v.iter()
            .map(|b| SubsetBoundDoc {
                subset_size: b.subset_size,
                uniform_log2: f(b.uniform_log2),
                averaged: rs(b.averaged),
                averaged_log2: f(b.averaged_log2),
                individual: rs(b.individual),
                individual_log2: f(b.individual_log2),
            })
            .collect()
    };
    let w = &r.wrong_interpretation_claim;
    let doc = ReportDoc {
        key_length: r.params.key_length(),
        trace_distance: rs(r.params.trace_distance()),
        log2_trace_distance: num(f(r.log2_trace_distance)),
        qber: r.params.qber().map(rs),
        raw_subset_bound_avg: rows(&r.raw_subset_bound_avg),
        kpa_bound_avg: rows(&r.kpa_bound_avg),
        individual_epsilon: rs(r.individual_epsilon),
        individual_epsilon_single_avg: rs(r.individual_epsilon_single_avg),
        ber_gap_bound: rs(r.ber_gap_bound),
        ber_bound_reading: BER_READING,
        effective_uniform_bits_avg: rs(r.effective_uniform_bits_avg),
        effective_uniform_bits_avg_whole: whole_bits(r.effective_uniform_bits_avg),
        effective_uniform_bits_individual: rs(r.effective_uniform_bits_individual),
        effective_uniform_bits_individual_whole: whole_bits(r.effective_uniform_bits_individual),
        lambda: r.lambda.map(rs),
        scale_margin_bits: num(f(r.scale_margin_bits)),
        scale: scale_str(r.scale),
        leak_ec: r.leak_ec.as_ref().map(|x| LeakEcDoc {
            qber: rs(x.qber),
            leak_ec: rs(x.leak_ec),
            subtracted: false,
            subtraction_justified: x.subtraction_justified,
            note: LEAK_NOTE,
        }),
        wrong_interpretation_claim: InterpretationDoc {
            claim: InterpretationComparison::<T>::REFUTED_CLAIM,
            status: "refuted",
            claimed_ideal_probability: rs(w.claimed_ideal_probability),
            claimed_individual_epsilon: rs(w.claimed_individual_epsilon),
            correct_reading: InterpretationComparison::<T>::CORRECT_READING,
            uniform_with_certainty_fails: w.uniform_with_certainty_fails,
        },
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

/// Human-readable report.
pub fn report_to_text<T: Scalar>(r: &GuaranteeReport<T>, precision: usize) -> String {
    let p = |x: T| fmt_sig(f(x), precision);
    let h = |x: T| fmt_sig(f(x), HEADLINE_DIGITS);
    let l = r.params.key_length();
    let mut o = String::new();
    let _ = writeln!(o, "guarantee report");
    let _ = writeln!(o, "  key length l:        {l} bits");
    let _ = writeln!(o, "  trace distance d:    {}  (log2 d = {})", p(r.params.trace_distance()), p(r.log2_trace_distance));
    let _ = writeln!(o, "  d relative to 2^-l:  {} bits above", p(r.scale_margin_bits));
    let _ = writeln!(
        o,
        "  scale:               {}",
        match r.scale {
            ScaleAssessment::NearIdeal => "near ideal (d <= 2^-l / 10)",
            ScaleAssessment::FarFromUniform => "far from uniform (d small relative to 1, not to 2^-l)",
        }
    );
    let _ = writeln!(o);
    let _ = writeln!(o, "headline");
    let _ = writeln!(
        o,
        "  effective uniform bits: {} ({} averaged, eps = d)",
        whole_bits(r.effective_uniform_bits_avg),
        p(r.effective_uniform_bits_avg)
    );
    let _ = writeln!(
        o,
        "  effective uniform bits (individual): {} ({}, eps = d^1/3)",
        whole_bits(r.effective_uniform_bits_individual),
        p(r.effective_uniform_bits_individual)
    );
    let _ = writeln!(o, "  averaged (d): {}", h(r.params.trace_distance()));
    let _ = writeln!(o, "  individual (d^1/3): {}", h(r.individual_epsilon));
    let _ = writeln!(o, "  individual, single averaging (d^1/2): {}", h(r.individual_epsilon_single_avg));
    match r.lambda {
        Some(lam) => {
            let _ = writeln!(o, "  convergence exponent lambda: {}", p(lam));
        }
        None => {
            let _ = writeln!(o, "  convergence exponent lambda: undefined (d = 0 or d = 1)");
        }
    }
    let _ = writeln!(o, "  BER gap bound (1/2 - p_b <=): {}  [d^(1/4) / (2 sqrt(log2 e))]", p(r.ber_gap_bound));
    let _ = writeln!(o);
    let table = |o: &mut String, title: &str, rows: &[SubsetBound<T>]| {
        let _ = writeln!(o, "{title}");
        let _ = writeln!(o, "  {:>10}  {:>14}  {:>16}  {:>16}", "m", "log2 2^-m", "averaged (d)", "individual (d^1/3)");
        for b in rows {
            let _ = writeln!(
                o,
                "  {:>10}  {:>14}  {:>16}  {:>16}",
                b.subset_size,
                format!("-{}", b.subset_size),
                p(b.averaged),
                p(b.individual)
            );
        }
        let _ = writeln!(o);
    };
    table(&mut o, "subset guessing bounds, raw security (p1 <= 2^-m + eps')", &r.raw_subset_bound_avg);
    if !r.kpa_bound_avg.is_empty() {
        table(&mut o, "target guessing bounds, known plaintext (p1 <= 2^-m + eps'')", &r.kpa_bound_avg);
    }
    if let Some(x) = &r.leak_ec {
        let _ = writeln!(o, "error-correction leak");
        let _ = writeln!(o, "  qber: {}  leak_ec = h(qber): {} bits per bit", p(x.qber), p(x.leak_ec));
        let _ = writeln!(
            o,
            "  subtraction justified: {}  ({LEAK_NOTE})",
            if x.subtraction_justified { "yes" } else { "no" }
        );
        let _ = writeln!(o);
    }
    let w = &r.wrong_interpretation_claim;
    let _ = writeln!(o, "interpretation comparison");
    let _ = writeln!(o, "  {:<44}  {}", "refuted reading", "correct reading");
    let _ = writeln!(
        o,
        "  {:<44}  {}",
        format!("ideal with probability >= 1 - {}", h(r.params.trace_distance())),
        if w.uniform_with_certainty_fails { "not uniform, with certainty (d > 0)" } else { "uniform (d = 0)" }
    );
    let _ = writeln!(
        o,
        "  {:<44}  {}",
        format!("individual level d^1/2 = {}", h(w.claimed_individual_epsilon)),
        format!("individual level d^1/3 = {}", h(r.individual_epsilon))
    );
    let _ = writeln!(o, "  status: refuted");
    o
}

#[derive(Serialize)]
struct CheckDoc {
    subset: String,
    size: usize,
    guess_prob: f64,
    bound: f64,
    status: &'static str,
}

#[derive(Serialize)]
struct AnalysisDoc {
    key_length: u32,
    distance_to_uniform: f64,
    subsets: Vec<CheckDoc>,
    known: Option<String>,
    conditional: Vec<CheckDoc>,
    bit_error_rate: f64,
    ber_gap: f64,
    ber_gap_bound: f64,
    ber_status: Option<&'static str>,
    passed: bool,
}

fn check_docs<T: Scalar>(rows: &[SubsetCheck<T>], precision: usize) -> Vec<CheckDoc> {
    rows.iter()
        .map(|c| CheckDoc {
            subset: c.subset.to_string(),
            size: c.subset.len(),
            guess_prob: round_sig(f(c.guess_prob), precision),
            bound: round_sig(f(c.bound), precision),
            status: c.status.as_str(),
        })
        .collect()
}

pub fn analysis_to_json<T: Scalar>(a: &DistributionAnalysis<T>, precision: usize) -> String {
    let rs = |x: T| round_sig(f(x), precision);
    let doc = AnalysisDoc {
        key_length: a.key_length,
        distance_to_uniform: rs(a.distance_to_uniform),
        subsets: check_docs(&a.subsets, precision),
        known: a.known.as_ref().map(|k| format!("{}={}", k.subset(), k.bits())),
        conditional: check_docs(&a.conditional, precision),
        bit_error_rate: rs(a.bit_error_rate),
        ber_gap: rs(a.ber_gap),
        ber_gap_bound: rs(a.ber_gap_bound),
        ber_status: a.ber_status.map(BoundStatus::as_str),
        passed: a.passed,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("analysis serializes");
    s.push('\n');
    s
}

pub fn analysis_to_text<T: Scalar>(a: &DistributionAnalysis<T>, precision: usize) -> String {
    let p = |x: T| fmt_sig(f(x), precision);
    let mut o = String::new();
    let _ = writeln!(o, "distribution analysis ({} bits)", a.key_length);
    let _ = writeln!(o, "  distance to uniform: {}", p(a.distance_to_uniform));
    let _ = writeln!(o, "  subset guessing (bound 2^-m + delta):");
    for c in &a.subsets {
        let _ = writeln!(o, "    [{}] m={} p1={} bound={} {}", c.subset, c.subset.len(), p(c.guess_prob), p(c.bound), c.status.as_str());
    }
    if let Some(k) = &a.known {
        let _ = writeln!(o, "  known segment {} = {} (bound holds on average over segments):", k.subset(), k.bits());
        for c in &a.conditional {
            let _ = writeln!(o, "    [{}] m={} p1={} bound={} {}", c.subset, c.subset.len(), p(c.guess_prob), p(c.bound), c.status.as_str());
        }
    }
    let _ = writeln!(o, "  bit error rate p_b: {}", p(a.bit_error_rate));
    let _ = writeln!(
        o,
        "  1/2 - p_b: {}  bound: {}  {}",
        p(a.ber_gap),
        p(a.ber_gap_bound),
        a.ber_status.map_or("not checked (delta > 0.3)", BoundStatus::as_str)
    );
    let _ = writeln!(o, "  result: {}", if a.passed { "pass" } else { "FAIL" });
    o
}

#[derive(Serialize)]
struct EnsembleDoc {
    entries: usize,
    average_distance: f64,
    threshold: f64,
    exceedance_fraction: f64,
    markov_bound: f64,
    status: &'static str,
    exception_probability: Option<f64>,
    conditional_epsilon: Option<f64>,
    individual_checked: Option<usize>,
    individual_excepted: Option<usize>,
    individual_violations: Option<usize>,
    passed: bool,
}

pub fn ensemble_to_json<T: Scalar>(v: &EnsembleVerification<T>, precision: usize) -> String {
    let rs = |x: T| round_sig(f(x), precision);
    let doc = EnsembleDoc {
        entries: v.entries,
        average_distance: rs(v.average_distance),
        threshold: rs(v.threshold),
        exceedance_fraction: rs(v.exceedance_fraction),
        markov_bound: rs(v.markov_bound),
        status: v.status.as_str(),
        exception_probability: v.split.map(|s| rs(s.exception_probability)),
        conditional_epsilon: v.split.map(|s| rs(s.conditional_epsilon)),
        individual_checked: v.individual.as_ref().map(|c| c.checked),
        individual_excepted: v.individual.as_ref().map(|c| c.excepted),
        individual_violations: v.individual.as_ref().map(|c| c.violations.len()),
        passed: v.passed,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("ensemble serializes");
    s.push('\n');
    s
}

pub fn ensemble_to_text<T: Scalar>(v: &EnsembleVerification<T>, precision: usize) -> String {
    let p = |x: T| fmt_sig(f(x), precision);
    let mut o = String::new();
    let _ = writeln!(o, "ensemble verification ({} entries)", v.entries);
    let _ = writeln!(o, "  average distance: {}", p(v.average_distance));
    let _ = writeln!(o, "  threshold: {}", p(v.threshold));
    let _ = writeln!(o, "  exceedance: {}", p(v.exceedance_fraction));
    let _ = writeln!(o, "  markov bound: {}", p(v.markov_bound));
    let verdict = match v.status {
        BoundStatus::Tight => "exceedance = bound (tight)",
        BoundStatus::Within => "exceedance <= bound",
        BoundStatus::Exceeded => "exceedance > bound (VIOLATION)",
    };
    let _ = writeln!(o, "  {verdict}");
    if let Some(s) = v.split {
        let _ = writeln!(
            o,
            "  square-root split: exception probability {}, individual epsilon {}",
            p(s.exception_probability),
            p(s.conditional_epsilon)
        );
    }
    if let Some(c) = &v.individual {
        let _ = writeln!(
            o,
            "  attached distributions: {} checked, {} excepted (weight {}), {} violations",
            c.checked,
            c.excepted,
            p(c.excepted_weight),
            c.violations.len()
        );
    }
    let _ = writeln!(o, "  result: {}", if v.passed { "pass" } else { "FAIL" });
    o
}
