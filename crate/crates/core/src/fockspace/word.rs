use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};

/// A letter of the doubled alphabet: generator `i` or its barred copy `ī`.
///
/// Ordering puts every plain letter before every barred one, matching the codes
/// `0..d` for plain letters and `d..2d` for barred ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    barred: bool,
    index: u8,
}

impl Letter {
    /// Plain generator `i` (1-based).
    pub fn plain(i: usize) -> Self {
        assert!((1..=255).contains(&i), "generator index {i} out of range");
        Self { barred: false, index: (i - 1) as u8 }
    }

    /// Barred generator `ī` (1-based).
    pub fn barred(i: usize) -> Self {
        Self { barred: true, ..Self::plain(i) }
    }

    /// 1-based generator index.
    pub fn generator(self) -> usize {
        self.index as usize + 1
    }

    pub fn is_barred(self) -> bool {
        self.barred
    }

    /// Toggles the bar.
    pub fn bar(self) -> Self {
        Self { barred: !self.barred, index: self.index }
    }

    /// Code in `0..2d`.
    pub fn code(self, d: usize) -> usize {
        self.index as usize + if self.barred { d } else { 0 }
    }

    pub fn from_code(code: usize, d: usize) -> Self {
        debug_assert!(code < 2 * d);
        if code < d {
            Self::plain(code + 1)
        } else {
            Self::barred(code - d + 1)
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.barred {
            write!(f, "{}\u{0305}", self.generator())
        } else {
            write!(f, "{}", self.generator())
        }
    }
}

/// A finite word over the doubled alphabet; the empty word is the vacuum.
///
/// Words are ordered by length first and lexicographically within a length.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        Self(letters)
    }

    /// A word of plain letters from 1-based generator indices.
    pub fn plain(indices: &[usize]) -> Self {
        Self(indices.iter().map(|&i| Letter::plain(i)).collect())
    }

    /// A word of barred letters from 1-based generator indices.
    pub fn barred(indices: &[usize]) -> Self {
        Self(indices.iter().map(|&i| Letter::barred(i)).collect())
    }

    /// `letter^n`.
    pub fn repeat(letter: Letter, n: usize) -> Self {
        Self(vec![letter; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    /// Only unbarred letters.
    pub fn is_plain(&self) -> bool {
        self.0.iter().all(|l| !l.is_barred())
    }

    /// The reversed word `w* = w_n ⋯ w_1`.
    pub fn star(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    /// Every letter with its bar toggled.
    pub fn bar(&self) -> Self {
        Self(self.0.iter().map(|l| l.bar()).collect())
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self(v)
    }

    /// `w_1 ⋯ w_k`.
    pub fn prefix(&self, k: usize) -> Self {
        Self(self.0[..k].to_vec())
    }

    /// `w_{k+1} ⋯ w_n`.
    pub fn suffix(&self, k: usize) -> Self {
        Self(self.0[k..].to_vec())
    }

    pub fn prepend(&self, letter: Letter) -> Self {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.push(letter);
        v.extend_from_slice(&self.0);
        Self(v)
    }

    /// The word with position `j` (0-based) removed.
    pub fn remove(&self, j: usize) -> Self {
        let mut v = self.0.clone();
        v.remove(j);
        Self(v)
    }

    /// Letter counts by code, used to group words into orbits of the symmetric group.
    pub fn content(&self, d: usize) -> Vec<u8> {
        let mut c = vec![0u8; 2 * d];
        for l in &self.0 {
            c[l.code(d)] += 1;
        }
        c
    }

    pub fn max_generator(&self) -> usize {
        self.0.iter().map(|l| l.generator()).max().unwrap_or(0)
    }

    /// Parses whitespace-separated letters: `2` is a plain letter, `2'` or `~2` a barred one.
    pub fn parse(s: &str) -> Result<Self> {
        let mut out = Vec::new();
        for tok in s.split_whitespace() {
            let (barred, digits) = if let Some(rest) = tok.strip_prefix('~') {
                (true, rest)
            } else if let Some(rest) = tok.strip_suffix('\'') {
                (true, rest)
            } else {
                (false, tok)
            };
            let i: usize = digits
                .parse()
                .map_err(|_| argument(format!("cannot parse letter '{tok}'")))?;
            if i == 0 || i > 255 {
                return Err(argument(format!("generator index in '{tok}' out of range")));
            }
            out.push(if barred { Letter::barred(i) } else { Letter::plain(i) });
        }
        Ok(Self(out))
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Self(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "Ω");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_round_trip() {
        for d in 1..4 {
            for code in 0..2 * d {
                assert_eq!(Letter::from_code(code, d).code(d), code);
            }
        }
        assert!(Letter::plain(2) < Letter::barred(1));
    }

    #[test]
    fn order_is_length_then_lex() {
        let mut ws = vec![
            Word::plain(&[2]),
            Word::plain(&[1, 1]),
            Word::empty(),
            Word::barred(&[1]),
            Word::plain(&[1]),
        ];
        ws.sort();
        assert_eq!(
            ws,
            vec![
                Word::empty(),
                Word::plain(&[1]),
                Word::plain(&[2]),
                Word::barred(&[1]),
                Word::plain(&[1, 1]),
            ]
        );
    }

    #[test]
    fn star_and_bar() {
        let w = Word::new(vec![Letter::plain(1), Letter::barred(2), Letter::plain(3)]);
        assert_eq!(w.star().star(), w);
        assert_eq!(w.bar().bar(), w);
        assert_eq!(w.star().letters()[0], Letter::plain(3));
        assert!(Word::plain(&[1, 2]).is_plain());
        assert!(!Word::plain(&[1, 2]).bar().is_plain());
    }

    #[test]
    fn parse_and_display() {
        let w = Word::parse("1 ~2 3'").unwrap();
        assert_eq!(w, Word::new(vec![Letter::plain(1), Letter::barred(2), Letter::barred(3)]));
        assert_eq!(Word::parse("").unwrap(), Word::empty());
        assert!(Word::parse("0").is_err());
        assert!(Word::parse("x").is_err());
        assert_eq!(Word::empty().to_string(), "Ω");
        assert_eq!(Word::plain(&[1, 2]).to_string(), "1 2");
    }
}
