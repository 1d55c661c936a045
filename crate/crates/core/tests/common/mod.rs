#![allow(dead_code)]

use rand::Rng;
use tracesec::dist::KeyDistribution;
use tracesec::KeySubset;

/// Random posterior over `l`-bit keys drawn from a mix of shapes: smooth
/// perturbations of U, sparse supports and products of biased bits, each
/// mixed with U at a random weight so that small distances are well covered.
pub fn random_distribution<R: Rng>(rng: &mut R, l: u32) -> KeyDistribution<f64> {
    let n = 1usize << l;
    let shape: Vec<f64> = match rng.gen_range(0..4) {
        0 => {
            let k = [1, 4, 16][rng.gen_range(0..3)];
            (0..n).map(|_| rng.gen::<f64>().powi(k)).collect()
        }
        1 => {
            let support = rng.gen_range(1..=n);
            let mut v = vec![0.0; n];
            for _ in 0..support {
                v[rng.gen_range(0..n)] += rng.gen::<f64>() + 1e-3;
            }
            v
        }
        2 => {
            let zero_probs: Vec<f64> = (0..l).map(|_| rng.gen::<f64>()).collect();
            (0..n)
                .map(|k| {
                    (0..l)
                        .map(|i| {
                            let bit = (k >> (l - 1 - i)) & 1;
                            if bit == 0 { zero_probs[i as usize] } else { 1.0 - zero_probs[i as usize] }
                        })
                        .product()
                })
                .collect()
        }
        _ => {
            let mut v = vec![1.0; n];
            v[rng.gen_range(0..n)] += rng.gen::<f64>() * n as f64;
            v
        }
    };
    let total: f64 = shape.iter().sum();
    let weight = rng.gen::<f64>().powi(3);
    let u = 1.0 / n as f64;
    let mut probs: Vec<f64> = shape.iter().map(|s| (1.0 - weight) * u + weight * s / total).collect();
    let sum: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= sum);
    KeyDistribution::new(l, probs).expect("generator produces valid tables")
}

/// Every subset of `0..l` with at most `max_size` positions.
pub fn subsets_up_to(l: u32, max_size: usize) -> Vec<KeySubset> {
    (1u64..1 << l)
        .filter(|mask| mask.count_ones() as usize <= max_size)
        .map(|mask| KeySubset::new((0..l).filter(|i| mask >> i & 1 == 1).collect()).unwrap())
        .collect()
}
