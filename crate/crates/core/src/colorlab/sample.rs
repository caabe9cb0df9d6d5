use num_bigint::{BigInt, RandBigInt};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::measure::CylinderMeasure;
use super::word::ColorWord;

/// Draws a window of length `n` letter by letter from the conditional laws
/// `P(prefix a) / P(prefix)`. The choice compares a uniform integer with the
/// exact weights over their common denominator, so the sampled law is exactly
/// the cylinder law.
pub fn sample_window(measure: &CylinderMeasure, n: usize, seed: u64) -> ColorWord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(measure, n, &mut rng)
}

pub fn sample_with(measure: &CylinderMeasure, n: usize, rng: &mut ChaCha8Rng) -> ColorWord {
    let q = measure.q();
    let mut word = Vec::with_capacity(n);
    for _ in 0..n {
        let weights: Vec<BigRational> = (1..=q)
            .map(|a| {
                word.push(a);
                let p = measure.prob(&word);
                word.pop();
                p
            })
            .collect();
        let denom = weights.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let ints: Vec<BigInt> = weights
            .iter()
            .map(|w| (w * BigRational::from_integer(denom.clone())).to_integer())
            .collect();
        let total: BigInt = ints.iter().sum();
        let mut u = rng.gen_bigint_range(&BigInt::zero(), &total);
        let mut pick = q;
        for (a, w) in (1..=q).zip(&ints) {
            if u < *w {
                pick = a;
                break;
            }
            u -= w;
        }
        debug_assert!(!u.is_negative());
        word.push(pick);
    }
    ColorWord::new(q, word).expect("letters drawn from 1..=q")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_in_seed() {
        let m = CylinderMeasure::recursion(4).unwrap();
        let a = sample_window(&m, 12, 99);
        let b = sample_window(&m, 12, 99);
        assert_eq!(a, b);
        assert!(a.is_proper());
        assert_eq!(sample_window(&m, 0, 1).len(), 0);
    }
}
