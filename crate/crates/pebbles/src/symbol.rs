use std::fmt;

/// Reserved endmarker character.
pub const ENDMARKER: char = '#';

/// An input or output letter, with optional bit-vector and matrix annotations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub base: char,
    pub bits: Option<Vec<bool>>,
    pub matrix: Option<Vec<Vec<bool>>>,
}

impl Symbol {
    pub fn plain(base: char) -> Self {
        Symbol { base, bits: None, matrix: None }
    }

    pub fn endmarker() -> Self {
        Symbol::plain(ENDMARKER)
    }

    pub fn with_bits(base: char, bits: Vec<bool>) -> Self {
        Symbol { base, bits: Some(bits), matrix: None }
    }

    pub fn marked(base: char) -> Self {
        Symbol::with_bits(base, vec![true])
    }

    /// The plain `#` the runner reads at position 0.
    pub fn is_endmarker(&self) -> bool {
        self.base == ENDMARKER && self.bits.is_none() && self.matrix.is_none()
    }

    /// Appends a mark bit, keeping existing annotations.
    pub fn push_bit(&self, bit: bool) -> Self {
        let mut s = self.clone();
        s.bits.get_or_insert_with(Vec::new).push(bit);
        s
    }

    pub fn with_matrix(&self, m: Vec<Vec<bool>>) -> Self {
        let mut s = self.clone();
        s.matrix = Some(m);
        s
    }
}

impl From<char> for Symbol {
    fn from(c: char) -> Self {
        Symbol::plain(c)
    }
}

fn bitstr(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

// `_a` for a single set mark, `a{01}` or `a{01;11/10}` otherwise.
impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.bits, &self.matrix) {
            (None, None) => write!(f, "{}", self.base),
            (Some(b), None) if b.len() == 1 && b[0] => write!(f, "_{}", self.base),
            (bits, matrix) => {
                write!(f, "{}{{", self.base)?;
                if let Some(b) = bits {
                    write!(f, "{}", bitstr(b))?;
                }
                if let Some(m) = matrix {
                    let rows: Vec<String> = m.iter().map(|r| bitstr(r)).collect();
                    write!(f, ";{}", rows.join("/"))?;
                }
                write!(f, "}}")
            }
        }
    }
}

/// Parses the text rendering produced by `Display`.
pub fn parse_symbol(s: &str) -> Option<Symbol> {
    let mut chars = s.chars();
    let first = chars.next()?;
    if first == '_' {
        let c = chars.next()?;
        return if chars.next().is_none() { Some(Symbol::marked(c)) } else { None };
    }
    let rest: String = chars.collect();
    if rest.is_empty() {
        return Some(Symbol::plain(first));
    }
    let body = rest.strip_prefix('{')?.strip_suffix('}')?;
    let (bits_part, mat_part) = match body.split_once(';') {
        Some((b, m)) => (b, Some(m)),
        None => (body, None),
    };
    let parse_bits = |t: &str| -> Option<Vec<bool>> {
        t.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect()
    };
    let bits = if bits_part.is_empty() && mat_part.is_some() { None } else { Some(parse_bits(bits_part)?) };
    let matrix = match mat_part {
        Some(m) => Some(m.split('/').map(parse_bits).collect::<Option<Vec<_>>>()?),
        None => None,
    };
    Some(Symbol { base: first, bits, matrix })
}

/// Renders a word with spaces between letters.
pub fn render_word(w: &[Symbol]) -> String {
    w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
}

/// Splits a plain string into plain letters.
pub fn word(s: &str) -> Vec<Symbol> {
    s.chars().map(Symbol::plain).collect()
}

/// Parses either a compact plain word (`abb`) or a space-separated rendering (`_a b`).
pub fn parse_word(s: &str) -> Option<Vec<Symbol>> {
    let s = s.trim();
    if s.contains(char::is_whitespace) {
        s.split_whitespace().map(parse_symbol).collect()
    } else if s.contains(['_', '{']) {
        parse_symbol(s).map(|x| vec![x])
    } else {
        Some(word(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_roundtrip() {
        let syms = vec![
            Symbol::plain('a'),
            Symbol::marked('b'),
            Symbol::with_bits('#', vec![false, true]),
            Symbol::with_bits('a', vec![true]).with_matrix(vec![vec![true]]),
            Symbol::with_bits('c', vec![true, true]),
        ];
        for s in syms {
            assert_eq!(parse_symbol(&s.to_string()), Some(s));
        }
    }

    #[test]
    fn parse_words() {
        assert_eq!(parse_word("ab"), Some(word("ab")));
        assert_eq!(parse_word("_a b"), Some(vec![Symbol::marked('a'), Symbol::plain('b')]));
        assert_eq!(parse_word(""), Some(vec![]));
    }
}
