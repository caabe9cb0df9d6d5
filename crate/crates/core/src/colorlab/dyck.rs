use std::fmt;

use super::ColorError;

/// Symbols are ordered `Dot < Open < Close`, which fixes the enumeration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DyckSymbol {
    Dot,
    Open,
    Close,
}

impl DyckSymbol {
    pub fn glyph(self) -> char {
        match self {
            DyckSymbol::Dot => '∘',
            DyckSymbol::Open => '⟨',
            DyckSymbol::Close => '⟩',
        }
    }

    fn from_char(ch: char) -> Option<Self> {
        match ch {
            '∘' | 'o' | '.' => Some(DyckSymbol::Dot),
            '⟨' | '<' => Some(DyckSymbol::Open),
            '⟩' | '>' => Some(DyckSymbol::Close),
            _ => None,
        }
    }
}

/// A concatenation of `∘` symbols and complete Dyck words. A `∘` never occurs
/// inside a bracket pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DispersedDyckWord {
    symbols: Vec<DyckSymbol>,
    open_count: usize,
}

impl DispersedDyckWord {
    pub fn new(symbols: Vec<DyckSymbol>) -> Result<Self, ColorError> {
        let mut depth = 0usize;
        for (idx, &s) in symbols.iter().enumerate() {
            match s {
                DyckSymbol::Dot if depth > 0 => {
                    return Err(ColorError::InvalidDyck(format!("∘ inside brackets at {idx}")))
                }
                DyckSymbol::Dot => {}
                DyckSymbol::Open => depth += 1,
                DyckSymbol::Close => {
                    depth = depth
                        .checked_sub(1)
                        .ok_or_else(|| ColorError::InvalidDyck(format!("unmatched ⟩ at {idx}")))?;
                }
            }
        }
        if depth != 0 {
            return Err(ColorError::InvalidDyck(format!("{depth} unclosed ⟨")));
        }
        let open_count = symbols.iter().filter(|&&s| s == DyckSymbol::Open).count();
        Ok(Self { symbols, open_count })
    }

    /// Accepts `∘⟨⟩` glyphs or the ASCII stand-ins `o<>`.
    pub fn parse(s: &str) -> Result<Self, ColorError> {
        let symbols = s
            .chars()
            .map(|ch| {
                DyckSymbol::from_char(ch)
                    .ok_or_else(|| ColorError::Parse(format!("not a Dyck symbol: {ch:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(symbols)
    }

    pub fn symbols(&self) -> &[DyckSymbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Number of `⟨` symbols, written `|w|`.
    pub fn open_count(&self) -> usize {
        self.open_count
    }
}

impl fmt::Display for DispersedDyckWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{}", s.glyph())?;
        }
        Ok(())
    }
}

/// Every dispersed Dyck word of length `len`, in lexicographic order.
pub fn enum_dispersed_dyck(len: usize) -> Vec<DispersedDyckWord> {
    let mut out = Vec::new();
    let mut buf = Vec::with_capacity(len);
    extend(len, 0, &mut buf, &mut out);
    out
}

fn extend(len: usize, depth: usize, buf: &mut Vec<DyckSymbol>, out: &mut Vec<DispersedDyckWord>) {
    let remaining = len - buf.len();
    if remaining == 0 {
        if depth == 0 {
            let open_count = buf.iter().filter(|&&s| s == DyckSymbol::Open).count();
            out.push(DispersedDyckWord { symbols: buf.clone(), open_count });
        }
        return;
    }
    if depth == 0 {
        buf.push(DyckSymbol::Dot);
        extend(len, 0, buf, out);
        buf.pop();
    }
    // an opened bracket must still be closable
    if depth + 1 < remaining {
        buf.push(DyckSymbol::Open);
        extend(len, depth + 1, buf, out);
        buf.pop();
    }
    if depth > 0 {
        buf.push(DyckSymbol::Close);
        extend(len, depth - 1, buf, out);
        buf.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(len: usize) -> Vec<DispersedDyckWord> {
        let alphabet = [DyckSymbol::Dot, DyckSymbol::Open, DyckSymbol::Close];
        let mut out = Vec::new();
        for code in 0..3usize.pow(len as u32) {
            let mut c = code;
            let mut symbols = vec![DyckSymbol::Dot; len];
            for slot in symbols.iter_mut().rev() {
                *slot = alphabet[c % 3];
                c /= 3;
            }
            if let Ok(w) = DispersedDyckWord::new(symbols) {
                out.push(w);
            }
        }
        out
    }

    #[test]
    fn small_lengths() {
        let words = |l| enum_dispersed_dyck(l).iter().map(|w| w.to_string()).collect::<Vec<_>>();
        assert_eq!(words(0), vec![""]);
        assert_eq!(words(1), vec!["∘"]);
        assert_eq!(words(2), vec!["∘∘", "⟨⟩"]);
        assert_eq!(enum_dispersed_dyck(4).len(), 6);
        let four = words(4);
        for w in ["∘∘∘∘", "⟨⟩∘∘", "∘⟨⟩∘", "∘∘⟨⟩", "⟨⟩⟨⟩", "⟨⟨⟩⟩"] {
            assert!(four.contains(&w.to_string()), "{w} missing");
        }
    }

    #[test]
    fn matches_brute_force_filter() {
        for len in 0..=8 {
            // the 3^L brute force is already in lexicographic order
            assert_eq!(enum_dispersed_dyck(len), brute_force(len), "L = {len}");
        }
    }

    #[test]
    fn rejects_dot_inside_brackets() {
        assert!(DispersedDyckWord::parse("<o>").is_err());
        assert!(DispersedDyckWord::parse("<<>").is_err());
        assert!(DispersedDyckWord::parse("><").is_err());
        let w = DispersedDyckWord::parse("o<<>>").unwrap();
        assert_eq!(w.open_count(), 2);
    }
}
