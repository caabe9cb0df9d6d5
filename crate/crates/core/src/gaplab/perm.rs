//! Lehmer-code ranking of permutations stored as vertex -> label arrays.

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Rank in `0..n!` of a permutation of `0..n`, lexicographic order.
pub fn rank(perm: &[u8]) -> usize {
    let n = perm.len();
    let mut r = 0;
    for i in 0..n {
        let smaller = perm[i + 1..].iter().filter(|&&x| x < perm[i]).count();
        r = r * (n - i) + smaller;
    }
    r
}

pub fn unrank(n: usize, mut r: usize) -> Vec<u8> {
    let mut digits = vec![0usize; n];
    for i in (0..n).rev() {
        let base = n - i;
        digits[i] = r % base;
        r /= base;
    }
    let mut pool: Vec<u8> = (0..n as u8).collect();
    digits.into_iter().map(|d| pool.remove(d)).collect()
}

/// All permutations of `0..n` indexed by rank.
pub fn all(n: usize) -> Vec<Vec<u8>> {
    (0..factorial(n)).map(|r| unrank(n, r)).collect()
}
