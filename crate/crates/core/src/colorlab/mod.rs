//! Exact construction and verification of the finitely dependent coloring
//! measures: the explicit 4-coloring formula, the deletion recursion for any
//! number of colors, marginal laws, dependence checks and sampling.
//!
//! Everything here is exact rational arithmetic.

mod dependence;
mod descent;
mod dyck;
mod formula;
mod measure;
mod pushforward;
mod sample;
mod word;

use num_rational::BigRational;
use thiserror::Error;

pub use dependence::{is_k_dependent, DependenceReport, WindowLaw, Witness};
pub use descent::{descent_count, mu, DescentLaw};
pub use dyck::{enum_dispersed_dyck, DispersedDyckWord, DyckSymbol};
pub use formula::{boundary_sign_product, flip_runs, formula_cylinder};
pub use measure::{
    check_normalizer, closed_form_normalizer, marginalize, parse_pattern, CylinderMeasure, Pattern, Source,
    NORMALIZER_CHECK_MAX_N, NORMALIZER_CHECK_MAX_Q,
};
pub use pushforward::{eliminate_four, eliminate_fours_pushforward, EliminatedFours};
pub use sample::{sample_window, sample_with};
pub use word::{
    canonical_proper_words, canonicalize, format_signs, is_proper, parse_signs, proper_words, ColorWord,
    RunDecomposition, Sign, SignMatrix,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColorError {
    #[error("color count must be at least 2, got {0}")]
    ColorCount(usize),
    #[error("letter {letter} outside 1..={q}")]
    LetterOutOfRange { letter: u8, q: u8 },
    #[error("operation needs q = 4, got q = {0}")]
    RequiresFourColors(u8),
    #[error("word {0} is not a proper coloring")]
    Improper(String),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid dispersed Dyck word: {0}")]
    InvalidDyck(String),
    #[error("measure has q = {measure} but word has q = {word}")]
    ColorMismatch { measure: u8, word: u8 },
    #[error("window bound nmax = {nmax} must be at least k + 2 = {}", k + 2)]
    WindowTooSmall { k: usize, nmax: usize },
    #[error("normalizer mismatch at q = {q}, n = {n}: mass condition gives {computed}, closed form gives {expected}")]
    NormalizerMismatch { q: u8, n: usize, computed: String, expected: String },
    #[error("parse error: {0}")]
    Parse(String),
}

/// `p/q` in lowest terms, always with an explicit denominator.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub(crate) fn serialize_rational<S: serde::Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

/// Inverse of [`format_rational`]; also accepts a bare integer.
pub fn parse_rational(s: &str) -> Result<BigRational, ColorError> {
    let bad = || ColorError::Parse(format!("not a rational: {s:?}"));
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p: num_bigint::BigInt = p.trim().parse().map_err(|_| bad())?;
    let q: num_bigint::BigInt = q.trim().parse().map_err(|_| bad())?;
    if q == num_bigint::BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rational_text_form() {
        let r = BigRational::new(2.into(), 96.into());
        assert_eq!(format_rational(&r), "1/48");
        assert_eq!(format_rational(&BigRational::from_integer(1.into())), "1/1");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    proptest! {
        #[test]
        fn rational_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
            let r = BigRational::new(p.into(), q.into());
            prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }

        #[test]
        fn sign_matrix_round_trip(letters in proptest::collection::vec(1u8..=4, 0..12)) {
            let w = ColorWord::new(4, letters).unwrap();
            let m = SignMatrix::from_word(&w).unwrap();
            prop_assert_eq!(m.to_word(), w);
        }
    }
}
