//! Words in the standard generators `a1, b1, a2, b2` of the genus-two
//! surface group. Upper-case letters denote inverses, so `[a1,b1]` is written
//! `a1 b1 A1 B1`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Letter(u8);

const NAMES: [&str; 8] = ["a1", "A1", "b1", "B1", "a2", "A2", "b2", "B2"];

impl Letter {
    pub const A1: Letter = Letter(0);
    pub const B1: Letter = Letter(2);
    pub const A2: Letter = Letter(4);
    pub const B2: Letter = Letter(6);

    pub const ALL: [Letter; 8] = [
        Letter(0),
        Letter(1),
        Letter(2),
        Letter(3),
        Letter(4),
        Letter(5),
        Letter(6),
        Letter(7),
    ];

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn inv(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    pub fn name(self) -> &'static str {
        NAMES[self.index()]
    }

    pub fn parse(s: &str) -> Option<Letter> {
        NAMES.iter().position(|n| *n == s).map(|i| Letter(i as u8))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Letter>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown generator `{0}` (expected one of a1 b1 a2 b2, upper case for inverses)")]
pub struct WordParseError(pub String);

impl Word {
    pub fn parse(s: &str) -> Result<Word, WordParseError> {
        let mut out = Vec::new();
        for tok in s.split_whitespace() {
            out.push(Letter::parse(tok).ok_or_else(|| WordParseError(tok.into()))?);
        }
        Ok(Word(out).reduced())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn concat(&self, o: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&o.0);
        Word(v).reduced()
    }

    pub fn pow(&self, n: usize) -> Word {
        let mut v = Vec::with_capacity(self.len() * n);
        for _ in 0..n {
            v.extend_from_slice(&self.0);
        }
        Word(v).reduced()
    }

    pub fn reduced(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn cyclically_reduced(&self) -> Word {
        let w = self.reduced().0;
        let (mut i, mut j) = (0, w.len());
        while j > i + 1 && w[i] == w[j - 1].inv() {
            i += 1;
            j -= 1;
        }
        Word(w[i..j].to_vec())
    }

    /// Lexicographically least cyclic rotation of the cyclic reduction; equal
    /// for conjugate words.
    pub fn canonical_cyclic(&self) -> Word {
        let w = self.cyclically_reduced().0;
        let n = w.len();
        if n == 0 {
            return Word(w);
        }
        let best = (0..n)
            .min_by(|&a, &b| {
                (0..n)
                    .map(|k| w[(a + k) % n])
                    .cmp((0..n).map(|k| w[(b + k) % n]))
            })
            .unwrap_or(0);
        Word((0..n).map(|k| w[(best + k) % n]).collect())
    }

    /// Whether `self` and `o` represent the same free homotopy class of
    /// unoriented curves.
    pub fn same_unoriented_class(&self, o: &Word) -> bool {
        let a = self.canonical_cyclic();
        a == o.canonical_cyclic() || a == o.inverse().canonical_cyclic()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(l.name())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn parse_and_print_round_trip() {
        let w = Word::parse("a1 b1 A1 B1").unwrap();
        assert_eq!(w.to_string(), "a1 b1 A1 B1");
        assert!(Word::parse("a3").is_err());
    }

    #[test]
    fn reduction() {
        let w = Word::parse("a1 b1 B1 a2").unwrap();
        assert_eq!(w.to_string(), "a1 a2");
        let c = Word::parse("b2 a1 b1 B2").unwrap().cyclically_reduced();
        assert_eq!(c.to_string(), "a1 b1");
    }

    #[test]
    fn canonical_cyclic_detects_conjugates() {
        let w = Word::parse("a1 b1 A1 B1").unwrap();
        let r = Word::parse("A1 B1 a1 b1").unwrap();
        assert_eq!(w.canonical_cyclic(), r.canonical_cyclic());
        assert!(w.same_unoriented_class(&w.inverse()));
        assert!(!w.same_unoriented_class(&Word::parse("a1").unwrap()));
    }
}
