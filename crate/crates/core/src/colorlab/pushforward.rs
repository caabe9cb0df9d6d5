use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use super::dependence::WindowLaw;
use super::measure::CylinderMeasure;
use super::word::proper_words;

/// Replaces a 4 by the smallest color in `{1, 2, 3}` differing from both
/// neighbors. Other letters pass through.
pub fn eliminate_four(left: u8, mid: u8, right: u8) -> u8 {
    if mid != 4 {
        return mid;
    }
    (1..=3).find(|&c| c != left && c != right).expect("two neighbors exclude at most two colors")
}

/// Exact law of the window `1..=n` after eliminating every 4 from the
/// 4-coloring. Each output letter reads its two neighbors, so windows of
/// length `n + 2` of the source are pushed forward.
pub fn eliminate_fours_pushforward(source: &CylinderMeasure, n: usize) -> BTreeMap<Vec<u8>, BigRational> {
    assert_eq!(source.q(), 4, "the elimination map acts on 4-colorings");
    let mut out = BTreeMap::new();
    if n == 0 {
        out.insert(Vec::new(), num_traits::One::one());
        return out;
    }
    for word in proper_words(4, n + 2) {
        let image: Vec<u8> = word.windows(3).map(|w| eliminate_four(w[0], w[1], w[2])).collect();
        let p = source.prob(&word);
        *out.entry(image).or_insert_with(BigRational::zero) += p;
    }
    out
}

/// The pushed-forward process viewed as a family of window laws.
pub struct EliminatedFours<'a>(pub &'a CylinderMeasure);

impl WindowLaw for EliminatedFours<'_> {
    fn colors(&self) -> u8 {
        3
    }

    fn window(&self, n: usize) -> Vec<(Vec<u8>, BigRational)> {
        eliminate_fours_pushforward(self.0, n).into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colorlab::word::is_proper;
    use num_traits::One;

    #[test]
    fn local_rule() {
        assert_eq!(eliminate_four(1, 4, 3), 2);
        assert_eq!(eliminate_four(2, 4, 3), 1);
        assert_eq!(eliminate_four(2, 4, 2), 1);
        assert_eq!(eliminate_four(1, 4, 2), 3);
        assert_eq!(eliminate_four(4, 3, 1), 3);
    }

    #[test]
    fn small_windows() {
        let m = CylinderMeasure::recursion(4).unwrap();
        let d0 = eliminate_fours_pushforward(&m, 0);
        assert_eq!(d0.len(), 1);
        assert_eq!(d0[&Vec::new()], BigRational::one());
        // "smallest free color" favors 1 over 3, so the one-site law is not
        // uniform; values frozen from an independent exact evaluation
        let r = |p: i64, q: i64| BigRational::new(p.into(), q.into());
        for source in [CylinderMeasure::formula(), m] {
            let d1 = eliminate_fours_pushforward(&source, 1);
            let expected: Vec<(Vec<u8>, BigRational)> =
                vec![(vec![1], r(17, 48)), (vec![2], r(1, 3)), (vec![3], r(5, 16))];
            assert_eq!(d1.into_iter().collect::<Vec<_>>(), expected);
        }
        let m = CylinderMeasure::recursion(4).unwrap();
        for n in 2..=4 {
            let d = eliminate_fours_pushforward(&m, n);
            assert!(d.keys().all(|w| is_proper(w) && w.iter().all(|&c| c <= 3)));
            assert_eq!(d.values().sum::<BigRational>(), BigRational::one());
        }
    }
}
