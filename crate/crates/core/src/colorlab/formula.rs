//! Closed-form cylinder probabilities of the 4-coloring as a signed sum over
//! dispersed Dyck words.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::descent::DescentLaw;
use super::dyck::{enum_dispersed_dyck, DispersedDyckWord, DyckSymbol};
use super::word::{ColorWord, RunDecomposition, Sign, SignMatrix};
use super::ColorError;

/// Flips runs of `y` so that exactly the run boundaries marked `⟨` or `⟩` in
/// `w` disappear.
pub fn flip_runs(y: &[Sign], w: &DispersedDyckWord) -> Result<Vec<Sign>, ColorError> {
    let runs = RunDecomposition::of(y);
    let internal = runs.count().saturating_sub(1);
    if w.len() != internal {
        return Err(ColorError::LengthMismatch { expected: internal, found: w.len() });
    }
    let mut out = Vec::with_capacity(y.len());
    let mut flip = false;
    for (j, &(sign, len)) in runs.runs.iter().enumerate() {
        if j > 0 && w.symbols()[j - 1] != DyckSymbol::Dot {
            flip = !flip;
        }
        let s = if flip { sign.flipped() } else { sign };
        out.extend(std::iter::repeat(s).take(len));
    }
    Ok(out)
}

/// `c(w, y, z)`: the product over internal run boundaries of `y` of the
/// `z`-sign just left of a `⟨` boundary or just right of a `⟩` boundary.
pub fn boundary_sign_product(w: &DispersedDyckWord, y: &[Sign], z: &[Sign]) -> Result<i32, ColorError> {
    if y.len() != z.len() {
        return Err(ColorError::LengthMismatch { expected: y.len(), found: z.len() });
    }
    let runs = RunDecomposition::of(y);
    if w.len() != runs.boundaries.len() {
        return Err(ColorError::LengthMismatch { expected: runs.boundaries.len(), found: w.len() });
    }
    Ok(w.symbols()
        .iter()
        .zip(&runs.boundaries)
        .map(|(&s, &last)| match s {
            DyckSymbol::Dot => 1,
            DyckSymbol::Open => z[last].value(),
            DyckSymbol::Close => z[last + 1].value(),
        })
        .product())
}

/// Evaluates the formula for a proper 4-color word.
pub fn formula_cylinder(x: &ColorWord) -> Result<BigRational, ColorError> {
    formula_cylinder_with(x, &DescentLaw::new())
}

pub(crate) fn formula_cylinder_with(x: &ColorWord, descents: &DescentLaw) -> Result<BigRational, ColorError> {
    if x.q() != 4 {
        return Err(ColorError::RequiresFourColors(x.q()));
    }
    if !x.is_proper() {
        return Err(ColorError::Improper(x.to_string()));
    }
    Ok(formula_unchecked(x.letters(), descents))
}

pub(crate) fn formula_unchecked(letters: &[u8], descents: &DescentLaw) -> BigRational {
    let SignMatrix { y, z } = SignMatrix::from_letters(letters);
    let m = RunDecomposition::of(&y).count();
    let mut sum = BigRational::zero();
    for w in enum_dispersed_dyck(m.saturating_sub(1)) {
        let sign = boundary_sign_product(&w, &y, &z).expect("lengths agree by construction")
            * if w.open_count() % 2 == 0 { 1 } else { -1 };
        let term = descents.mu(&flip_runs(&y, &w).expect("lengths agree by construction"));
        if sign > 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum / BigRational::from_integer(BigInt::from(1u64) << m)
}
