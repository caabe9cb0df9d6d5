//! Exact k-dependence checks over finite windows.
//!
//! For every window length `n <= nmax` and every unordered pair of nonempty
//! position sets `A, B` of `{1..n}` at distance greater than `k`, the joint law
//! of `(X_A, X_B)` is compared with the product of its marginals. The pairs are
//! enumerated as ternary labelings of the window (`3^n` of them) and each check
//! is a single pass over the window law, so the cost is about
//! `3^nmax * |window law| + 3^nmax * q^nmax` operations per window.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::measure::CylinderMeasure;
use super::ColorError;

/// A family of finite-window laws: for each `n` the probability of every
/// word of length `n` that has positive mass.
pub trait WindowLaw: Sync {
    fn colors(&self) -> u8;
    fn window(&self, n: usize) -> Vec<(Vec<u8>, BigRational)>;
}

impl WindowLaw for CylinderMeasure {
    fn colors(&self) -> u8 {
        self.q()
    }

    fn window(&self, n: usize) -> Vec<(Vec<u8>, BigRational)> {
        CylinderMeasure::window(self, n)
    }
}

/// A factorization failure: `P(X_A = colors_a, X_B = colors_b)` differs from
/// `P(X_A = colors_a) P(X_B = colors_b)`. Positions are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub window: usize,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub colors_a: Vec<u8>,
    pub colors_b: Vec<u8>,
    #[serde(serialize_with = "crate::colorlab::serialize_rational")]
    pub joint: BigRational,
    #[serde(serialize_with = "crate::colorlab::serialize_rational")]
    pub product: BigRational,
}

impl Witness {
    /// The violating assignment as a pattern string over the window, `.` for
    /// positions outside `A ∪ B`.
    pub fn pattern(&self) -> String {
        let mut out = vec!['.'; self.window];
        for (&p, &c) in self.a.iter().zip(&self.colors_a).chain(self.b.iter().zip(&self.colors_b)) {
            out[p - 1] = char::from(b'0' + c);
        }
        out.into_iter().collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DependenceReport {
    pub k: usize,
    pub nmax: usize,
    pub holds: bool,
    pub witness: Option<Witness>,
    pub pairs_checked: u64,
}

pub fn is_k_dependent<L: WindowLaw + ?Sized>(law: &L, k: usize, nmax: usize) -> Result<DependenceReport, ColorError> {
    if nmax < k + 2 {
        return Err(ColorError::WindowTooSmall { k, nmax });
    }
    let mut pairs_checked = 0u64;
    for n in 1..=nmax {
        let entries = law.window(n);
        let pairs = separated_pairs(n, k);
        pairs_checked += pairs.len() as u64;
        if pairs.is_empty() {
            continue;
        }
        if let Some(w) = check_window(law.colors(), n, &entries, &pairs) {
            return Ok(DependenceReport { k, nmax, holds: false, witness: Some(w), pairs_checked });
        }
    }
    Ok(DependenceReport { k, nmax, holds: true, witness: None, pairs_checked })
}

/// Unordered pairs `(A, B)` with `min A < min B`, in a fixed order.
fn separated_pairs(n: usize, k: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        let mut a = Vec::new();
        let mut b = Vec::new();
        for pos in 0..n {
            match c % 3 {
                1 => a.push(pos),
                2 => b.push(pos),
                _ => {}
            }
            c /= 3;
        }
        if a.is_empty() || b.is_empty() || a[0] > b[0] {
            continue;
        }
        if a.iter().all(|&i| b.iter().all(|&j| i.abs_diff(j) > k)) {
            out.push((a, b));
        }
    }
    out
}

fn check_window(
    q: u8,
    n: usize,
    entries: &[(Vec<u8>, BigRational)],
    pairs: &[(Vec<usize>, Vec<usize>)],
) -> Option<Witness> {
    // scale to integers over a common denominator
    let denom = entries
        .iter()
        .fold(num_bigint::BigInt::one(), |acc, (_, p)| acc.lcm(p.denom()));
    let scaled: Vec<BigUint> = entries
        .iter()
        .map(|(_, p)| (p * BigRational::from_integer(denom.clone())).to_integer().to_biguint().expect("probabilities are nonnegative"))
        .collect();
    let denom_u = denom.to_biguint().expect("positive denominator");
    let words: Vec<&[u8]> = entries.iter().map(|(w, _)| w.as_slice()).collect();

    let fits = (&denom_u * &denom_u).to_u128().is_some();
    let found = if fits {
        let scaled: Vec<u128> = scaled.iter().map(|v| v.to_u128().expect("below denominator")).collect();
        let d = denom_u.to_u128().expect("checked");
        pairs.par_iter().find_map_first(|(a, b)| factorization_failure(q, &words, &scaled, &d, a, b))
    } else {
        pairs.par_iter().find_map_first(|(a, b)| factorization_failure(q, &words, &scaled, &denom_u, a, b))
    };
    found.map(|(a, b, ca, cb, joint, prod)| {
        let den = BigRational::from_integer(denom.clone());
        Witness {
            window: n,
            a: a.iter().map(|p| p + 1).collect(),
            b: b.iter().map(|p| p + 1).collect(),
            colors_a: ca,
            colors_b: cb,
            joint: BigRational::from_integer(joint.into()) / &den,
            product: BigRational::from_integer(prod.into()) / (&den * &den),
        }
    })
}

type Failure = (Vec<usize>, Vec<usize>, Vec<u8>, Vec<u8>, BigUint, BigUint);

trait Weight: Clone + Zero + PartialEq + Send + Sync + for<'a> std::ops::AddAssign<&'a Self> {
    fn times(&self, other: &Self) -> Self;
    fn to_big(&self) -> BigUint;
}

impl Weight for u128 {
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn to_big(&self) -> BigUint {
        BigUint::from(*self)
    }
}

impl Weight for BigUint {
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn to_big(&self) -> BigUint {
        self.clone()
    }
}

fn index_of(q: usize, word: &[u8], positions: &[usize]) -> usize {
    positions.iter().fold(0, |acc, &p| acc * q + (word[p] - 1) as usize)
}

fn colors_of(q: usize, mut idx: usize, len: usize) -> Vec<u8> {
    let mut out = vec![0u8; len];
    for slot in out.iter_mut().rev() {
        *slot = (idx % q) as u8 + 1;
        idx /= q;
    }
    out
}

fn factorization_failure<T: Weight>(
    q: u8,
    words: &[&[u8]],
    scaled: &[T],
    denom: &T,
    a: &[usize],
    b: &[usize],
) -> Option<Failure> {
    let q = q as usize;
    let size_a = q.pow(a.len() as u32);
    let size_b = q.pow(b.len() as u32);
    let mut joint = vec![T::zero(); size_a * size_b];
    for (w, weight) in words.iter().zip(scaled) {
        joint[index_of(q, w, a) * size_b + index_of(q, w, b)] += weight;
    }
    let mut marg_a = vec![T::zero(); size_a];
    let mut marg_b = vec![T::zero(); size_b];
    for ia in 0..size_a {
        for ib in 0..size_b {
            let v = &joint[ia * size_b + ib];
            marg_a[ia] += v;
            marg_b[ib] += v;
        }
    }
    for ia in 0..size_a {
        for ib in 0..size_b {
            let lhs = joint[ia * size_b + ib].times(denom);
            let rhs = marg_a[ia].times(&marg_b[ib]);
            if lhs != rhs {
                return Some((
                    a.to_vec(),
                    b.to_vec(),
                    colors_of(q, ia, a.len()),
                    colors_of(q, ib, b.len()),
                    joint[ia * size_b + ib].to_big(),
                    rhs.to_big(),
                ));
            }
        }
    }
    None
}
