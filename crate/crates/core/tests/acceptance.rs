//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_distribution, subsets_up_to};
use tracesec::bounds::{ber_gap_bound, convergence_exponent, effective_uniform_bits, leak_ec, markov_individual_epsilon, whole_bits};
use tracesec::dist::KeyDistribution;
use tracesec::ensemble::DistanceEnsemble;
use tracesec::extremal::{construct_equality_distribution, max_guess_given_budget, ExtremalRecipe};
use tracesec::{KeySubset, SubsetOutcome};

/// Slack for floating-point comparisons that are exact in real arithmetic.
const ROUNDING_SLACK: f64 = 1e-12;

type Check = Result<String, String>;

/// Mean wall time of `f` over `reps` calls.
fn per_call<F: FnMut() -> R, R>(reps: u32, mut f: F) -> Duration {
    let start = Instant::now();
    for _ in 0..reps {
        std::hint::black_box(f());
    }
    start.elapsed() / reps
}

fn within_time(label: &str, took: Duration, limit: Duration) -> Result<(), String> {
    if took < limit {
        Ok(())
    } else {
        Err(format!("{label} took {took:?}, limit {limit:?}"))
    }
}

fn ac1_66_bit_equivalence() -> Check {
    let bits = effective_uniform_bits(1_000_000, 1e-20);
    within_time("effective_uniform_bits", per_call(1000, || effective_uniform_bits(1_000_000, 1e-20)), Duration::from_millis(1))?;
    if !(66.0..=66.5).contains(&bits) || whole_bits(bits) != 66 {
        return Err(format!("effective bits {bits}, displayed {}", whole_bits(bits)));
    }
    Ok(format!("{bits:.4} bits, displayed {}", whole_bits(bits)))
}

fn ac2_22_bit_equivalence() -> Check {
    let eps = 1e-20f64.cbrt();
    let bits = effective_uniform_bits(1_000_000, eps);
    within_time("effective_uniform_bits", per_call(1000, || effective_uniform_bits(1_000_000, eps)), Duration::from_millis(1))?;
    if !(22.0..=22.5).contains(&bits) || whole_bits(bits) != 22 {
        return Err(format!("effective bits {bits}, displayed {}", whole_bits(bits)));
    }
    Ok(format!("{bits:.4} bits, displayed {}", whole_bits(bits)))
}

fn ac3_lambda() -> Check {
    let lam = convergence_exponent(1_000_000, 1e-20f64).map_err(|e| e.to_string())?;
    within_time("convergence_exponent", per_call(1000, || convergence_exponent(1_000_000, 1e-20f64)), Duration::from_millis(1))?;
    if (lam - 6.64e-5).abs() > 1e-7 {
        return Err(format!("lambda {lam:e}"));
    }
    Ok(format!("lambda = {lam:.6e} (~ 2/3 x 1e-4)"))
}

fn ac4_cube_root_ladder() -> Check {
    let cases: [(f64, f64); 3] = [(1e-20, 2.154e-7), (1e-14, 2.154e-5), (1e-6, 1e-2)];
    let mut shown = Vec::new();
    for (d, expected) in cases {
        let eps = markov_individual_epsilon(d, 2).map_err(|e| e.to_string())?;
        within_time("markov_individual_epsilon", per_call(1000, || markov_individual_epsilon(d, 2)), Duration::from_millis(1))?;
        if ((eps - expected) / expected).abs() > 1e-3 {
            return Err(format!("d = {d:e}: {eps:e} vs {expected:e}"));
        }
        shown.push(format!("{d:e} -> {eps:.4e}"));
    }
    if markov_individual_epsilon(1e-20, 2).unwrap() <= 1e-7 || markov_individual_epsilon(1e-14, 2).unwrap() <= 1e-5 {
        return Err("ladder not above 1e-7 / 1e-5".into());
    }
    Ok(shown.join(", "))
}

/// Every (l, subset, favored, epsilon) case of the tightness grid.
fn extremal_grid() -> Vec<(u32, KeySubset, f64, KeyDistribution<f64>)> {
    let mut out = Vec::new();
    for l in 2..=8u32 {
        for s in subsets_up_to(l, l as usize) {
            let m = s.len();
            for eps in [0.001, 0.01, 0.1] {
                if eps > 1.0 - 2f64.powi(-(m as i32)) {
                    continue;
                }
                let favored = SubsetOutcome::new(s.clone(), (s.positions()[0] as u64 * 7 + l as u64) % (1 << m)).unwrap();
                let p = construct_equality_distribution(&ExtremalRecipe::new(l, eps, favored).unwrap());
                out.push((l, s.clone(), eps, p));
            }
        }
    }
    out
}

fn ac5_tightness() -> Check {
    let start = Instant::now();
    let grid = extremal_grid();
    for (l, s, eps, p) in &grid {
        let expected = 2f64.powi(-(s.len() as i32)) + eps;
        let g = p.optimal_guess_prob(s).map_err(|e| e.to_string())?;
        let d = p.distance_to_uniform();
        let oracle = max_guess_given_budget(*l, s, *eps).map_err(|e| e.to_string())?;
        if (g - expected).abs() > 1e-12 || (d - eps).abs() > 1e-12 || (oracle - g).abs() > 1e-12 {
            return Err(format!("l={l} S={s} eps={eps}: p1={g} delta={d} oracle={oracle}"));
        }
    }
    within_time("grid", start.elapsed(), Duration::from_secs(10))?;
    Ok(format!("{} cases, p1 = 2^-m + eps, delta = eps, oracle agrees ({:?})", grid.len(), start.elapsed()))
}

fn random_corpus() -> Vec<KeyDistribution<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    (0..10_000).map(|_| {
        let l = rng.gen_range(1..=10);
        random_distribution(&mut rng, l)
    }).collect()
}

fn ac6_pointwise_subset_bound(corpus: &[KeyDistribution<f64>]) -> Check {
    let start = Instant::now();
    let mut checks = 0usize;
    let mut violations = 0usize;
    let mut families: Vec<Vec<KeySubset>> = vec![Vec::new()];
    for l in 1..=10u32 {
        let mut f = subsets_up_to(l, 4);
        let whole = KeySubset::whole(l).unwrap();
        if !f.contains(&whole) {
            f.push(whole);
        }
        families.push(f);
    }
    for p in corpus {
        let d = p.distance_to_uniform();
        for s in &families[p.key_length() as usize] {
            let g = p.optimal_guess_prob(s).map_err(|e| e.to_string())?;
            checks += 1;
            if g > 2f64.powi(-(s.len() as i32)) + d + ROUNDING_SLACK {
                violations += 1;
            }
        }
    }
    within_time("corpus", start.elapsed(), Duration::from_secs(60))?;
    if violations > 0 {
        return Err(format!("{violations} violations in {checks} checks"));
    }
    Ok(format!("{} distributions, {checks} subset checks, 0 violations ({:?})", corpus.len(), start.elapsed()))
}

fn ac7_ber_consistency(corpus: &[KeyDistribution<f64>]) -> Check {
    let start = Instant::now();
    let mut checked = 0usize;
    let mut violations = 0usize;
    for p in corpus {
        let d = p.distance_to_uniform();
        if d > 0.3 {
            continue;
        }
        checked += 1;
        let gap = 0.5 - p.eve_bit_error_rate();
        if gap > d + ROUNDING_SLACK || d > ber_gap_bound(d) + ROUNDING_SLACK {
            violations += 1;
        }
    }
    within_time("corpus", start.elapsed(), Duration::from_secs(60))?;
    if violations > 0 || checked == 0 {
        return Err(format!("{violations} violations among {checked} distributions with delta <= 0.3"));
    }
    Ok(format!("{checked} distributions with delta <= 0.3, 0 violations ({:?})", start.elapsed()))
}

fn ac8_markov_exceedance() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut violations = 0usize;
    for i in 0..10_000u64 {
        let size = rng.gen_range(1..=200);
        let mean = 10f64.powf(rng.gen_range(-8.0..-0.3));
        let e = DistanceEnsemble::<f64>::sample(i, size, mean).map_err(|e| e.to_string())?;
        let avg = e.average_distance();
        for t in [avg.sqrt(), 10.0 * avg] {
            let frac = e.exceedance_fraction(t).map_err(|e| e.to_string())?;
            if frac > avg / t + ROUNDING_SLACK {
                violations += 1;
            }
        }
    }
    let tight = DistanceEnsemble::two_point_tight(1e-3f64, 1e-1).map_err(|e| e.to_string())?;
    let frac = tight.exceedance_fraction(1e-1).unwrap();
    let bound = tight.markov_bound(1e-1).unwrap();
    within_time("ensembles", start.elapsed(), Duration::from_secs(30))?;
    if violations > 0 {
        return Err(format!("{violations} violations"));
    }
    if (frac - bound).abs() > 1e-12 {
        return Err(format!("two-point ensemble: exceedance {frac} vs bound {bound}"));
    }
    Ok(format!("10000 ensembles, 0 violations; two-point exceedance {frac} = bound ({:?})", start.elapsed()))
}

fn ac9_non_uniformity() -> Check {
    let start = Instant::now();
    let grid = extremal_grid();
    for (l, s, eps, p) in &grid {
        if p.is_uniform(eps * 2f64.powi(-(*l as i32))) {
            return Err(format!("l={l} S={s} eps={eps} passed as uniform"));
        }
    }
    within_time("grid", start.elapsed(), Duration::from_secs(1))?;
    Ok(format!(
        "{} distributions with delta = eps > 0 are all non-uniform: frequency 1, not eps",
        grid.len()
    ))
}

fn ac10_leak_ec() -> Check {
    // 40-digit evaluation of h(0.11)
    const H_011: f64 = 0.49991595816452799564;
    let h0 = leak_ec(0.0).map_err(|e| e.to_string())?;
    let h5 = leak_ec(0.5).map_err(|e| e.to_string())?;
    let h11 = leak_ec(0.11).map_err(|e| e.to_string())?;
    within_time("leak_ec", per_call(1000, || leak_ec(0.11)), Duration::from_millis(1))?;
    if h0 != 0.0 || h5 != 1.0 || (h11 - H_011).abs() > 1e-9 {
        return Err(format!("h(0)={h0} h(0.5)={h5} h(0.11)={h11}"));
    }
    Ok(format!("h(0)=0, h(0.5)=1, h(0.11)={h11:.12}"))
}

fn tracesec(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_tracesec")).args(args).output().map_err(|e| e.to_string())
}

fn ac11_cli_round_trip() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let file = dir.path().join("extremal.json");
    let file_s = file.to_str().unwrap();
    let o = tracesec(&["extremal", "--key-length", "3", "--epsilon", "0.1", "--output", file_s])?;
    if o.status.code() != Some(0) {
        return Err(format!("extremal exited {:?}", o.status.code()));
    }
    let o = tracesec(&["analyze", file_s, "--subset", "0-2", "--format", "json"])?;
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).map_err(|e| e.to_string())?;
    let delta = v["distance_to_uniform"].as_f64().unwrap_or(f64::NAN);
    if (delta - 0.1).abs() > 1e-9 || v["subsets"][0]["status"] != "tight" {
        return Err(format!("round trip gave delta {delta}, status {}", v["subsets"][0]["status"]));
    }

    let args = ["report", "--key-length", "1000000", "--trace-distance", "1e-20", "--format", "json"];
    let first = tracesec(&args)?.stdout;
    let second = tracesec(&args)?.stdout;
    let golden_path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/report_l1000000_d1e-20.json");
    let golden = std::fs::read(&golden_path).map_err(|e| format!("{}: {e}", golden_path.display()))?;
    if first != second {
        return Err("report output differs between runs".into());
    }
    if first != golden {
        return Err("report output differs from golden file".into());
    }
    Ok(format!("extremal -> analyze delta = {delta}, tight; golden report byte-stable ({} bytes)", golden.len()))
}

fn main() {
    let corpus = random_corpus();
    let criteria: Vec<(&str, Box<dyn Fn() -> Check + '_>)> = vec![
        ("AC1  66-bit equivalence", Box::new(ac1_66_bit_equivalence)),
        ("AC2  22-bit post-Markov equivalence", Box::new(ac2_22_bit_equivalence)),
        ("AC3  convergence exponent", Box::new(ac3_lambda)),
        ("AC4  d^(1/3) ladder", Box::new(ac4_cube_root_ladder)),
        ("AC5  subset bound tightness", Box::new(ac5_tightness)),
        ("AC6  pointwise subset bound", Box::new(|| ac6_pointwise_subset_bound(&corpus))),
        ("AC7  BER consistency", Box::new(|| ac7_ber_consistency(&corpus))),
        ("AC8  Markov exceedance", Box::new(ac8_markov_exceedance)),
        ("AC9  non-uniformity", Box::new(ac9_non_uniformity)),
        ("AC10 leak_EC values", Box::new(ac10_leak_ec)),
        ("AC11 CLI round trip and golden report", Box::new(ac11_cli_round_trip)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        match check() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
