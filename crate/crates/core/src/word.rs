//! Words over the generators `x_i`, `x_i^-1`, `E_i`.

use crate::error::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    X(usize),
    XInv(usize),
    E(usize),
}

impl Letter {
    pub fn index(self) -> usize {
        match self {
            Letter::X(i) | Letter::XInv(i) | Letter::E(i) => i,
        }
    }

    /// Same letter kind on another generator index.
    pub fn reindex(self, to: usize) -> Letter {
        match self {
            Letter::X(_) => Letter::X(to),
            Letter::XInv(_) => Letter::XInv(to),
            Letter::E(_) => Letter::E(to),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::X(i) => write!(f, "x{i}"),
            Letter::XInv(i) => write!(f, "x{i}^-1"),
            Letter::E(i) => write!(f, "E{i}"),
        }
    }
}

impl FromStr for Letter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("bad letter {s:?}"));
        let (kind, rest) = s.split_at(1.min(s.len()));
        let (num, inv) = match rest.strip_suffix("^-1") {
            Some(n) => (n, true),
            None => (rest, false),
        };
        let idx: usize = num.parse().map_err(|_| bad())?;
        match (kind, inv) {
            ("x" | "X" | "s" | "S", false) => Ok(Letter::X(idx)),
            ("x" | "X" | "s" | "S", true) => Ok(Letter::XInv(idx)),
            ("E" | "e", false) => Ok(Letter::E(idx)),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
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

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Formal inverse of a word in `x` letters. `E` letters have no inverse.
    pub fn inverse(&self) -> Option<Word> {
        self.0
            .iter()
            .rev()
            .map(|l| match *l {
                Letter::X(i) => Some(Letter::XInv(i)),
                Letter::XInv(i) => Some(Letter::X(i)),
                Letter::E(_) => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Word)
    }

    /// Relabel generator indices, `map[i]` being the new index of `i`.
    pub fn relabel(&self, map: &[usize]) -> Word {
        Word(self.0.iter().map(|l| l.reindex(map[l.index()])).collect())
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.iter().map(|l| l.index()).max()
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `[xy⋯]_len`: starts with `x`.
    Left,
    /// `[⋯xy]_len`: ends with `x y`.
    Right,
}

/// Alternating word of length `len` in `x` and `y`.
pub fn alternating_word<T: Clone>(x: T, y: T, len: usize, side: Side) -> Vec<T> {
    match side {
        Side::Left => (0..len)
            .map(|k| if k % 2 == 0 { x.clone() } else { y.clone() })
            .collect(),
        Side::Right => (0..len)
            .map(|k| if (len - k) % 2 == 1 { y.clone() } else { x.clone() })
            .collect(),
    }
}

/// `[x_a x_b ⋯]_len` as a word in positive generators.
pub fn alt_x(a: usize, b: usize, len: usize, side: Side) -> Word {
    Word(alternating_word(Letter::X(a), Letter::X(b), len, side))
}
