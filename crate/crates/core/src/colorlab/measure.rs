use dashmap::DashMap;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::descent::DescentLaw;
use super::formula::formula_unchecked;
use super::word::{canonical_proper_words, canonicalize, distinct_colors, is_proper, proper_words, ColorWord};
use super::ColorError;

/// Largest `q` and window length at which the normalizer is checked against
/// `1 / (n (q - 2) + 2)` on every computation.
pub const NORMALIZER_CHECK_MAX_Q: u8 = 6;
pub const NORMALIZER_CHECK_MAX_N: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Formula,
    Recursion,
}

/// Exact cylinder probabilities of a stationary coloring, memoized.
///
/// The memo is a concurrent map: lookups and inserts from several threads are
/// fine because every key always maps to the same value.
#[derive(Debug)]
pub struct CylinderMeasure {
    q: u8,
    source: Source,
    canonical: bool,
    table: DashMap<Vec<u8>, BigRational>,
    normalizers: DashMap<usize, BigRational>,
    descents: DescentLaw,
}

impl CylinderMeasure {
    /// Measure defined by the deletion recursion, memoized by word.
    pub fn recursion(q: u8) -> Result<Self, ColorError> {
        if q < 2 {
            return Err(ColorError::ColorCount(q as usize));
        }
        Ok(Self::build(q, Source::Recursion, false))
    }

    /// The 4-coloring through the explicit formula.
    pub fn formula() -> Self {
        Self::build(4, Source::Formula, false)
    }

    fn build(q: u8, source: Source, canonical: bool) -> Self {
        Self {
            q,
            source,
            canonical,
            table: DashMap::new(),
            normalizers: DashMap::new(),
            descents: DescentLaw::new(),
        }
    }

    /// Key the memo by color-canonical form. Values are unchanged since the
    /// measure is invariant under color permutations; this only shrinks the
    /// table by roughly `q!`.
    pub fn with_canonical_memo(mut self, on: bool) -> Self {
        self.canonical = on;
        self.table.clear();
        self
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn memo_len(&self) -> usize {
        self.table.len()
    }

    pub fn prob_word(&self, x: &ColorWord) -> Result<BigRational, ColorError> {
        if x.q() != self.q {
            return Err(ColorError::ColorMismatch { measure: self.q, word: x.q() });
        }
        Ok(self.prob(x.letters()))
    }

    /// `P(x)` for a word over `1..=q`; zero when `x` is improper.
    pub fn prob(&self, x: &[u8]) -> BigRational {
        if !is_proper(x) {
            return BigRational::zero();
        }
        if x.is_empty() {
            return BigRational::one();
        }
        let key = if self.canonical { canonicalize(x) } else { x.to_vec() };
        if let Some(v) = self.table.get(&key) {
            return v.clone();
        }
        let value = match self.source {
            Source::Formula => formula_unchecked(&key, &self.descents),
            Source::Recursion => self.normalizer(key.len()) * self.deletion_sum(&key),
        };
        self.table.insert(key, value.clone());
        value
    }

    fn deletion_sum(&self, x: &[u8]) -> BigRational {
        let mut sum = BigRational::zero();
        let mut buf = Vec::with_capacity(x.len());
        for i in 0..x.len() {
            buf.clear();
            buf.extend_from_slice(&x[..i]);
            buf.extend_from_slice(&x[i + 1..]);
            sum += self.prob(&buf);
        }
        sum
    }

    /// The constant `c_{n,q}` making the recursion a probability measure at
    /// length `n`, computed from total mass one.
    ///
    /// Panics if the computed value disagrees with `1 / (n (q - 2) + 2)` within
    /// the checked range (`q <= 6`, `n <= 10`).
    pub fn normalizer(&self, n: usize) -> BigRational {
        if let Some(v) = self.normalizers.get(&n) {
            return v.clone();
        }
        if n == 0 {
            return BigRational::one();
        }
        // settle lower levels first so parallel workers below only hit the cache
        self.normalizer(n - 1);
        let mass = self.unnormalized_mass(n);
        let c = mass.recip();
        if let Err(e) = check_normalizer(self.q, n, &c) {
            panic!("{e}");
        }
        self.normalizers.insert(n, c.clone());
        c
    }

    /// Sum over every word of length `n` of the deletion sum. Improper words
    /// contribute zero, so only proper words are visited; in canonical mode
    /// each color orbit is visited once and weighted by its size.
    fn unnormalized_mass(&self, n: usize) -> BigRational {
        if n == 0 {
            return BigRational::one();
        }
        if self.canonical {
            canonical_proper_words(self.q, n)
                .par_iter()
                .map(|w| {
                    let orbit = (0..distinct_colors(w)).map(|i| self.q as u64 - i as u64).product::<u64>();
                    self.deletion_sum(w) * BigInt::from(orbit)
                })
                .reduce(BigRational::zero, |a, b| a + b)
        } else {
            proper_words(self.q, n)
                .par_iter()
                .map(|w| self.deletion_sum(w))
                .reduce(BigRational::zero, |a, b| a + b)
        }
    }

    /// All proper words of length `n` with their probabilities, in
    /// lexicographic order.
    pub fn window(&self, n: usize) -> Vec<(Vec<u8>, BigRational)> {
        let words = proper_words(self.q, n);
        words
            .into_par_iter()
            .map(|w| {
                let p = self.prob(&w);
                (w, p)
            })
            .collect()
    }
}

/// The conjectured closed form `1 / (n (q - 2) + 2)` for `n >= 1`.
pub fn closed_form_normalizer(q: u8, n: usize) -> BigRational {
    if n == 0 {
        return BigRational::one();
    }
    BigRational::new(BigInt::one(), BigInt::from(n * (q as usize - 2) + 2))
}

/// Compares a computed normalizer with the closed form inside the checked
/// range; outside it, anything is accepted.
pub fn check_normalizer(q: u8, n: usize, computed: &BigRational) -> Result<(), ColorError> {
    if q > NORMALIZER_CHECK_MAX_Q || n > NORMALIZER_CHECK_MAX_N {
        return Ok(());
    }
    let expected = closed_form_normalizer(q, n);
    if *computed != expected {
        return Err(ColorError::NormalizerMismatch {
            q,
            n,
            computed: computed.to_string(),
            expected: expected.to_string(),
        });
    }
    Ok(())
}

/// A position of a marginal pattern: a fixed color or a wildcard.
pub type Pattern = [Option<u8>];

/// Parses `"1.3"`: digits are fixed colors, `.` is a wildcard.
pub fn parse_pattern(q: u8, s: &str) -> Result<Vec<Option<u8>>, ColorError> {
    s.chars()
        .map(|ch| match ch {
            '.' | '*' => Ok(None),
            d => match d.to_digit(10) {
                Some(c) if c >= 1 && c <= q as u32 => Ok(Some(c as u8)),
                Some(c) => Err(ColorError::LetterOutOfRange { letter: c as u8, q }),
                None => Err(ColorError::Parse(format!("bad pattern symbol {d:?}"))),
            },
        })
        .collect()
}

/// Sum of `P(word)` over every completion of the wildcards in `pattern`.
pub fn marginalize(measure: &CylinderMeasure, pattern: &Pattern) -> BigRational {
    let mut total = BigRational::zero();
    let mut buf = Vec::with_capacity(pattern.len());
    complete(measure, pattern, &mut buf, &mut total);
    total
}

fn complete(measure: &CylinderMeasure, pattern: &Pattern, buf: &mut Vec<u8>, total: &mut BigRational) {
    let i = buf.len();
    if i == pattern.len() {
        *total += measure.prob(buf);
        return;
    }
    let choices: Vec<u8> = match pattern[i] {
        Some(c) => vec![c],
        None => (1..=measure.q()).collect(),
    };
    for c in choices {
        // improper prefixes carry no mass
        if buf.last() == Some(&c) {
            continue;
        }
        buf.push(c);
        complete(measure, pattern, buf, total);
        buf.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn word(q: u8, s: &str) -> Vec<u8> {
        ColorWord::parse(q, s).unwrap().into_letters()
    }

    #[test]
    fn recursion_examples() {
        let m4 = CylinderMeasure::recursion(4).unwrap();
        assert_eq!(m4.prob(&[]), r(1, 1));
        assert_eq!(m4.prob(&word(4, "1")), r(1, 4));
        assert_eq!(m4.prob(&word(4, "12")), r(1, 12));
        assert_eq!(m4.prob(&word(4, "121")), r(1, 48));
        assert_eq!(m4.prob(&word(4, "11")), r(0, 1));
        let m3 = CylinderMeasure::recursion(3).unwrap();
        assert_eq!(m3.normalizer(2), r(1, 4));
        assert_eq!(m3.prob(&word(3, "12")), r(1, 6));
    }

    #[test]
    fn rejects_small_q() {
        assert!(matches!(CylinderMeasure::recursion(1), Err(ColorError::ColorCount(1))));
    }

    #[test]
    fn canonical_memo_changes_nothing() {
        for q in 2..=5u8 {
            let plain = CylinderMeasure::recursion(q).unwrap();
            let canon = CylinderMeasure::recursion(q).unwrap().with_canonical_memo(true);
            for n in 0..=5 {
                assert_eq!(plain.normalizer(n), canon.normalizer(n));
                for w in proper_words(q, n) {
                    assert_eq!(plain.prob(&w), canon.prob(&w), "q={q} w={w:?}");
                }
            }
            assert!(canon.memo_len() < plain.memo_len() || q == 2);
        }
    }

    #[test]
    fn projection_and_stationarity() {
        for q in 2..=6u8 {
            let m = CylinderMeasure::recursion(q).unwrap().with_canonical_memo(true);
            let max_n = if q <= 4 { 6 } else { 5 };
            for n in 0..max_n {
                for w in proper_words(q, n) {
                    let p = m.prob(&w);
                    let mut right = BigRational::zero();
                    let mut left = BigRational::zero();
                    for a in 1..=q {
                        let mut xa = w.clone();
                        xa.push(a);
                        right += m.prob(&xa);
                        let mut ax = vec![a];
                        ax.extend_from_slice(&w);
                        left += m.prob(&ax);
                    }
                    assert_eq!(right, p, "q={q} w={w:?}");
                    assert_eq!(left, p, "q={q} w={w:?}");
                }
            }
        }
    }

    #[test]
    fn marginal_examples() {
        let m = CylinderMeasure::recursion(4).unwrap();
        assert_eq!(marginalize(&m, &parse_pattern(4, "1").unwrap()), r(1, 4));
        assert_eq!(marginalize(&m, &parse_pattern(4, "1.3").unwrap()), r(1, 16));
        assert_eq!(marginalize(&m, &parse_pattern(4, "11").unwrap()), r(0, 1));
        assert_eq!(marginalize(&m, &parse_pattern(4, "...").unwrap()), r(1, 1));
        assert_eq!(marginalize(&m, &parse_pattern(4, "").unwrap()), r(1, 1));
        assert!(parse_pattern(4, "15").is_err());
    }

    #[test]
    fn formula_source_agrees_on_short_words() {
        let f = CylinderMeasure::formula();
        let rec = CylinderMeasure::recursion(4).unwrap();
        for n in 0..=5 {
            for w in proper_words(4, n) {
                assert_eq!(f.prob(&w), rec.prob(&w), "w={w:?}");
            }
        }
    }

    #[test]
    fn normalizer_mismatch_is_reported() {
        let err = check_normalizer(4, 3, &r(1, 7)).unwrap_err();
        assert!(err.to_string().contains("1/8"), "{err}");
        assert!(check_normalizer(7, 3, &r(1, 7)).is_ok());
    }
}
