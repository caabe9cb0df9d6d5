use std::fmt;

use super::ColorError;

/// A finite word over the colors `1..=q`.
///
/// Properness (no two equal adjacent letters) is a predicate, not a
/// construction invariant: improper words are legal inputs and have zero mass.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColorWord {
    q: u8,
    letters: Vec<u8>,
}

impl ColorWord {
    pub fn new(q: u8, letters: Vec<u8>) -> Result<Self, ColorError> {
        if q < 2 {
            return Err(ColorError::ColorCount(q as usize));
        }
        if let Some(&bad) = letters.iter().find(|&&c| c == 0 || c > q) {
            return Err(ColorError::LetterOutOfRange { letter: bad, q });
        }
        Ok(Self { q, letters })
    }

    /// Parses a digit string such as `"1213"`.
    pub fn parse(q: u8, s: &str) -> Result<Self, ColorError> {
        let letters = s
            .chars()
            .map(|ch| {
                ch.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| ColorError::Parse(format!("not a color digit: {ch:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(q, letters)
    }

    pub fn empty(q: u8) -> Self {
        Self { q, letters: Vec::new() }
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_proper(&self) -> bool {
        is_proper(&self.letters)
    }

    pub fn into_letters(self) -> Vec<u8> {
        self.letters
    }
}

impl fmt::Display for ColorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.letters {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

pub fn is_proper(letters: &[u8]) -> bool {
    letters.windows(2).all(|w| w[0] != w[1])
}

/// Relabels colors in order of first appearance, so that every orbit of the
/// color-permutation action has one representative.
pub fn canonicalize(letters: &[u8]) -> Vec<u8> {
    let mut map = [0u8; 256];
    let mut next = 1u8;
    letters
        .iter()
        .map(|&c| {
            if map[c as usize] == 0 {
                map[c as usize] = next;
                next += 1;
            }
            map[c as usize]
        })
        .collect()
}

/// Number of distinct letters in a word.
pub fn distinct_colors(letters: &[u8]) -> usize {
    let mut seen = [false; 256];
    letters.iter().filter(|&&c| !std::mem::replace(&mut seen[c as usize], true)).count()
}

/// All proper words of length `n` over `1..=q`, in lexicographic order.
pub fn proper_words(q: u8, n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut buf = Vec::with_capacity(n);
    fn rec(q: u8, n: usize, buf: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if buf.len() == n {
            out.push(buf.clone());
            return;
        }
        for c in 1..=q {
            if buf.last() != Some(&c) {
                buf.push(c);
                rec(q, n, buf, out);
                buf.pop();
            }
        }
    }
    rec(q, n, &mut buf, &mut out);
    out
}

/// Proper words of length `n` that are canonical (colors introduced in
/// increasing order starting at 1), using at most `q` colors.
pub fn canonical_proper_words(q: u8, n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut buf = Vec::with_capacity(n);
    fn rec(q: u8, n: usize, used: u8, buf: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if buf.len() == n {
            out.push(buf.clone());
            return;
        }
        let top = (used + 1).min(q);
        for c in 1..=top {
            if buf.last() != Some(&c) {
                buf.push(c);
                rec(q, n, used.max(c), buf, out);
                buf.pop();
            }
        }
    }
    rec(q, n, 0, &mut buf, &mut out);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flipped(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Parses a string of `+`/`-` characters.
pub fn parse_signs(s: &str) -> Result<Vec<Sign>, ColorError> {
    s.chars()
        .map(|ch| match ch {
            '+' => Ok(Sign::Plus),
            '-' => Ok(Sign::Minus),
            other => Err(ColorError::Parse(format!("not a sign: {other:?}"))),
        })
        .collect()
}

pub fn format_signs(signs: &[Sign]) -> String {
    signs.iter().map(|s| s.symbol()).collect()
}

/// Two rows of signs encoding a 4-color word column by column:
/// 1 = (+,+), 2 = (+,-), 3 = (-,+), 4 = (-,-).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignMatrix {
    pub y: Vec<Sign>,
    pub z: Vec<Sign>,
}

impl SignMatrix {
    pub fn new(y: Vec<Sign>, z: Vec<Sign>) -> Result<Self, ColorError> {
        if y.len() != z.len() {
            return Err(ColorError::LengthMismatch { expected: y.len(), found: z.len() });
        }
        Ok(Self { y, z })
    }

    pub fn from_word(word: &ColorWord) -> Result<Self, ColorError> {
        if word.q() != 4 {
            return Err(ColorError::RequiresFourColors(word.q()));
        }
        Ok(Self::from_letters(word.letters()))
    }

    pub(crate) fn from_letters(letters: &[u8]) -> Self {
        let (y, z) = letters
            .iter()
            .map(|&c| {
                let top = if c <= 2 { Sign::Plus } else { Sign::Minus };
                let bottom = if c % 2 == 1 { Sign::Plus } else { Sign::Minus };
                (top, bottom)
            })
            .unzip();
        Self { y, z }
    }

    pub fn to_word(&self) -> ColorWord {
        let letters = self
            .y
            .iter()
            .zip(&self.z)
            .map(|(&top, &bottom)| match (top, bottom) {
                (Sign::Plus, Sign::Plus) => 1,
                (Sign::Plus, Sign::Minus) => 2,
                (Sign::Minus, Sign::Plus) => 3,
                (Sign::Minus, Sign::Minus) => 4,
            })
            .collect();
        ColorWord { q: 4, letters }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn swapped(&self) -> Self {
        Self { y: self.z.clone(), z: self.y.clone() }
    }
}

/// Maximal constant runs of a sign sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunDecomposition {
    pub runs: Vec<(Sign, usize)>,
    /// `boundaries[j]` is the 0-based index of the last element of run `j`;
    /// the boundary sits between it and the next index.
    pub boundaries: Vec<usize>,
}

impl RunDecomposition {
    pub fn of(signs: &[Sign]) -> Self {
        let mut runs: Vec<(Sign, usize)> = Vec::new();
        for &s in signs {
            match runs.last_mut() {
                Some((sign, len)) if *sign == s => *len += 1,
                _ => runs.push((s, 1)),
            }
        }
        let mut boundaries = Vec::with_capacity(runs.len().saturating_sub(1));
        let mut end = 0;
        for (_, len) in runs.iter().take(runs.len().saturating_sub(1)) {
            end += len;
            boundaries.push(end - 1);
        }
        Self { runs, boundaries }
    }

    /// Run count `m`.
    pub fn count(&self) -> usize {
        self.runs.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_matrix_identification() {
        let w = ColorWord::parse(4, "1234").unwrap();
        let s = SignMatrix::from_word(&w).unwrap();
        assert_eq!(format_signs(&s.y), "++--");
        assert_eq!(format_signs(&s.z), "+-+-");
        assert_eq!(s.to_word(), w);
    }

    #[test]
    fn sign_matrix_rejects_other_q() {
        let w = ColorWord::parse(3, "12").unwrap();
        assert!(matches!(SignMatrix::from_word(&w), Err(ColorError::RequiresFourColors(3))));
    }

    #[test]
    fn runs_of_example() {
        let y = parse_signs("++--++-").unwrap();
        let r = RunDecomposition::of(&y);
        assert_eq!(r.count(), 4);
        assert_eq!(r.runs, vec![(Sign::Plus, 2), (Sign::Minus, 2), (Sign::Plus, 2), (Sign::Minus, 1)]);
        assert_eq!(r.boundaries, vec![1, 3, 5]);
        assert_eq!(RunDecomposition::of(&[]).count(), 0);
    }

    #[test]
    fn word_validation() {
        assert!(ColorWord::parse(4, "15").is_err());
        assert!(ColorWord::parse(4, "1a").is_err());
        assert!(ColorWord::new(1, vec![]).is_err());
        assert!(ColorWord::parse(4, "121").unwrap().is_proper());
        assert!(!ColorWord::parse(4, "11").unwrap().is_proper());
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(canonicalize(&[3, 1, 3, 4]), vec![1, 2, 1, 3]);
        assert_eq!(distinct_colors(&[3, 1, 3, 4]), 3);
        // 4 * 3^4 proper words of length 5 over 4 colors
        assert_eq!(proper_words(4, 5).len(), 324);
        let canon = canonical_proper_words(4, 5);
        let orbit_total: usize = canon
            .iter()
            .map(|w| (0..distinct_colors(w)).map(|i| 4 - i).product::<usize>())
            .sum();
        assert_eq!(orbit_total, 324);
    }
}
