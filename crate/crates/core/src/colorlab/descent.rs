//! Exact descent-set probabilities for uniform random permutations.

use dashmap::DashMap;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::word::Sign;

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Number of permutations of `1..=len` whose descent set is contained in
/// `cuts` (sorted, values in `1..len`): the multinomial coefficient for the
/// block lengths between consecutive cut points.
fn ascending_blocks(len: usize, cuts: &[usize]) -> BigInt {
    let mut denom = BigInt::one();
    let mut prev = 0;
    for &c in cuts.iter().chain(std::iter::once(&len)) {
        denom *= factorial(c - prev);
        prev = c;
    }
    factorial(len) / denom
}

/// Number of permutations of `1..=u.len()+1` with descent set exactly
/// `{i : u_i = -}` (1-based), by inclusion-exclusion over subsets.
pub fn descent_count(u: &[Sign]) -> BigInt {
    let len = u.len() + 1;
    let descents: Vec<usize> = u
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == Sign::Minus)
        .map(|(i, _)| i + 1)
        .collect();
    let d = descents.len();
    let mut total = BigInt::zero();
    let mut cuts = Vec::with_capacity(d);
    for mask in 0u64..(1u64 << d) {
        cuts.clear();
        cuts.extend((0..d).filter(|b| mask >> b & 1 == 1).map(|b| descents[b]));
        let term = ascending_blocks(len, &cuts);
        if (d - cuts.len()) % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Probability that a uniform permutation of length `u.len() + 1` has its
/// descents exactly at the `-` positions of `u`.
pub fn mu(u: &[Sign]) -> BigRational {
    BigRational::new(descent_count(u), factorial(u.len() + 1))
}

/// Memoized [`mu`], safe to share between threads.
#[derive(Default, Debug)]
pub struct DescentLaw {
    cache: DashMap<Vec<Sign>, BigRational>,
}

impl DescentLaw {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mu(&self, u: &[Sign]) -> BigRational {
        if let Some(v) = self.cache.get(u) {
            return v.clone();
        }
        let v = mu(u);
        self.cache.insert(u.to_vec(), v.clone());
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colorlab::word::parse_signs;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn permutations(len: usize) -> Vec<Vec<usize>> {
        if len == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(len - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, len);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn worked_values() {
        let m = |s: &str| mu(&parse_signs(s).unwrap());
        assert_eq!(m(""), BigRational::one());
        assert_eq!(m("+"), r(1, 2));
        assert_eq!(m("+-"), r(1, 3));
        assert_eq!(m("--"), r(1, 6));
        assert_eq!(m("+-+"), r(5, 24));
        assert_eq!(m("+++"), r(1, 24));
    }

    #[test]
    fn matches_permutation_enumeration() {
        for n in 0..=6usize {
            let mut counts = std::collections::HashMap::<Vec<Sign>, i64>::new();
            for p in permutations(n + 1) {
                let u: Vec<Sign> =
                    p.windows(2).map(|w| if w[0] > w[1] { Sign::Minus } else { Sign::Plus }).collect();
                *counts.entry(u).or_default() += 1;
            }
            for (u, c) in counts {
                assert_eq!(descent_count(&u), BigInt::from(c), "u = {u:?}");
            }
        }
    }

    #[test]
    fn sums_to_one() {
        for n in 0..=8usize {
            let total: BigRational = (0..1u32 << n)
                .map(|mask| {
                    let u: Vec<Sign> =
                        (0..n).map(|i| if mask >> i & 1 == 1 { Sign::Minus } else { Sign::Plus }).collect();
                    mu(&u)
                })
                .sum();
            assert_eq!(total, BigRational::one(), "n = {n}");
        }
    }
}
