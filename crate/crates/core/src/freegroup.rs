//! Exact arithmetic in the free group on `a_1..a_n, b_1..b_m`.
//!
//! Words are always kept in reduced form. The text format is a sequence of
//! space-separated tokens such as `a1`, `b2^-1`; the identity renders as `e`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("malformed token `{0}`")]
    BadToken(String),
    #[error("letter {letter} is out of range for signature (m={m}, n={n})")]
    OutOfRange { letter: Letter, m: usize, n: usize },
    #[error("signature requires n >= 1 and m >= 1, got m={m}, n={n}")]
    BadSignature { m: usize, n: usize },
    #[error("the homomorphism onto F_2 needs at least two b-generators, got m={0}")]
    TooFewB(usize),
}

/// Number of generators in each family: `n` letters `a_i`, `m` letters `b_j`.
///
/// Constructed in the `(m, n)` order used throughout the literature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub n: usize,
    pub m: usize,
}

impl Signature {
    pub fn new(m: usize, n: usize) -> Result<Self, WordError> {
        if n == 0 || m == 0 || n > u16::MAX as usize || m > u16::MAX as usize {
            return Err(WordError::BadSignature { m, n });
        }
        Ok(Signature { n, m })
    }

    /// Total number of free generators, `m + n`.
    pub fn rank(&self) -> usize {
        self.n + self.m
    }

    pub fn family_size(&self, family: Family) -> usize {
        match family {
            Family::A => self.n,
            Family::B => self.m,
            Family::C => 2,
        }
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter.index >= 1
            && match letter.family {
                Family::A => letter.index as usize <= self.n,
                Family::B => letter.index as usize <= self.m,
                Family::C => false,
            }
    }

    pub fn check(&self, letter: Letter) -> Result<(), WordError> {
        if self.contains(letter) {
            Ok(())
        } else {
            Err(WordError::OutOfRange { letter, m: self.m, n: self.n })
        }
    }

    pub fn check_word(&self, word: &Word) -> Result<(), WordError> {
        word.letters().iter().try_for_each(|&l| self.check(l))
    }

    /// The positive generators `a_1..a_n, b_1..b_m` in canonical order.
    pub fn positive_letters(&self) -> Vec<Letter> {
        (1..=self.n)
            .map(Letter::a)
            .chain((1..=self.m).map(Letter::b))
            .collect()
    }

    /// All generators and their inverses in canonical order
    /// (family, index, `+` before `-`).
    pub fn letters(&self) -> Vec<Letter> {
        self.positive_letters()
            .into_iter()
            .flat_map(|l| [l, l.inverse()])
            .collect()
    }
}

/// Generator family. `C` is reserved for the two generators of the target
/// free group of [`f2_image`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
}

impl Family {
    pub fn other(self) -> Family {
        match self {
            Family::A => Family::B,
            Family::B => Family::A,
            Family::C => Family::C,
        }
    }
}

/// A generator or inverse generator. Field order gives the canonical
/// ordering: family, then index, then `+` before `-`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub family: Family,
    pub index: u16,
    pub inverse: bool,
}

impl Letter {
    pub fn new(family: Family, index: usize, inverse: bool) -> Self {
        Letter { family, index: index as u16, inverse }
    }

    pub fn a(index: usize) -> Self {
        Letter::new(Family::A, index, false)
    }

    pub fn b(index: usize) -> Self {
        Letter::new(Family::B, index, false)
    }

    pub fn c(index: usize) -> Self {
        Letter::new(Family::C, index, false)
    }

    pub fn inverse(self) -> Self {
        Letter { inverse: !self.inverse, ..self }
    }

    pub fn is_positive(self) -> bool {
        !self.inverse
    }

    pub fn positive(self) -> Self {
        Letter { inverse: false, ..self }
    }

    pub fn idx(self) -> usize {
        self.index as usize
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.family {
            Family::A => 'a',
            Family::B => 'b',
            Family::C => 'c',
        };
        write!(f, "{c}{}", self.index)?;
        if self.inverse {
            f.write_str("^-1")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Letter {
    type Err = WordError;

    fn from_str(token: &str) -> Result<Self, Self::Err> {
        let bad = || WordError::BadToken(token.to_string());
        let (body, inverse) = match token.strip_suffix("^-1") {
            Some(body) => (body, true),
            None => (token, false),
        };
        let mut chars = body.chars();
        let family = match chars.next() {
            Some('a') => Family::A,
            Some('b') => Family::B,
            Some('c') => Family::C,
            _ => return Err(bad()),
        };
        let digits = chars.as_str();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
            return Err(bad());
        }
        let index: u16 = digits.parse().map_err(|_| bad())?;
        Ok(Letter { family, index, inverse })
    }
}

/// A reduced word. The empty word is the group identity.
///
/// Ordering is by length first, then lexicographic in the canonical letter
/// order; this is the enumeration order of [`ball`].
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(seq: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in seq {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Builds a word from letters that are already known to be reduced.
    /// Returns `None` if some adjacent pair cancels.
    pub fn from_reduced(letters: Vec<Letter>) -> Option<Self> {
        if letters.windows(2).any(|w| w[0] == w[1].inverse()) {
            None
        } else {
            Some(Word(letters))
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut left = self.0.len();
        let mut right = 0;
        while left > 0 && right < other.0.len() && self.0[left - 1] == other.0[right].inverse() {
            left -= 1;
            right += 1;
        }
        let mut out = Vec::with_capacity(left + other.0.len() - right);
        out.extend_from_slice(&self.0[..left]);
        out.extend_from_slice(&other.0[right..]);
        Word(out)
    }

    /// Right multiplication by a single letter.
    pub fn mul_letter(&self, l: Letter) -> Word {
        if self.0.last() == Some(&l.inverse()) {
            Word(self.0[..self.0.len() - 1].to_vec())
        } else {
            let mut out = Vec::with_capacity(self.0.len() + 1);
            out.extend_from_slice(&self.0);
            out.push(l);
            Word(out)
        }
    }

    /// Prefix of the given length.
    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }

    /// The word with its last letter removed, i.e. the parent in the Cayley tree.
    pub fn parent(&self) -> Option<Word> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.prefix(self.0.len() - 1))
        }
    }

    /// Whether this word is a power `c^k` (`k != 0`) of a single generator;
    /// returns the generator and the signed exponent.
    pub fn as_generator_power(&self) -> Option<(Letter, i64)> {
        let first = self.first()?;
        if self.0.iter().all(|&l| l == first) {
            let k = self.0.len() as i64;
            Some((first.positive(), if first.inverse { -k } else { k }))
        } else {
            None
        }
    }

    pub fn parse(text: &str, sig: &Signature) -> Result<Word, WordError> {
        let w: Word = text.parse()?;
        sig.check_word(&w)?;
        Ok(w)
    }
}

impl FromStr for Word {
    type Err = WordError;

    /// Parses the text format and reduces the result. Letters are not checked
    /// against any signature; see [`Word::parse`].
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let trimmed = text.trim();
        if trimmed == "e" || trimmed.is_empty() {
            return Ok(Word::identity());
        }
        let letters = trimmed
            .split_whitespace()
            .map(Letter::from_str)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Word::reduce(letters))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
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
            return f.write_str("e");
        }
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for Letter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Reduces a letter sequence after checking every letter against `sig`.
pub fn reduce(seq: &[Letter], sig: &Signature) -> Result<Word, WordError> {
    seq.iter().try_for_each(|&l| sig.check(l))?;
    Ok(Word::reduce(seq.iter().copied()))
}

pub fn multiply(g: &Word, h: &Word) -> Word {
    g.mul(h)
}

pub fn invert(g: &Word) -> Word {
    g.inverse()
}

/// All reduced words of length at most `radius`, in ball order.
pub fn ball(sig: &Signature, radius: usize) -> Vec<Word> {
    let letters = sig.letters();
    let mut out = vec![Word::identity()];
    let mut frontier = vec![Word::identity()];
    for _ in 0..radius {
        let mut next = Vec::with_capacity(frontier.len() * (letters.len() - 1).max(1));
        for w in &frontier {
            for &l in &letters {
                if w.last() != Some(l.inverse()) {
                    let mut v = w.0.clone();
                    v.push(l);
                    next.push(Word(v));
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Closed-form size of the radius-`radius` ball: `1 + sum_k 2r (2r-1)^(k-1)`
/// with `r = m + n`.
pub fn ball_size(sig: &Signature, radius: usize) -> u128 {
    let deg = 2 * sig.rank() as u128;
    let mut total = 1u128;
    let mut sphere = deg;
    for _ in 0..radius {
        total += sphere;
        sphere *= deg - 1;
    }
    total
}

/// The homomorphism onto the free group on `c1, c2` sending every `a_i` and
/// every `b_j` with `j >= 3` to the identity, `b_1 -> c1` and `b_2 -> c2`.
pub fn f2_image(g: &Word, sig: &Signature) -> Result<Word, WordError> {
    if sig.m < 2 {
        return Err(WordError::TooFewB(sig.m));
    }
    sig.check_word(g)?;
    Ok(Word::reduce(g.letters().iter().filter_map(|&l| {
        (l.family == Family::B && l.index <= 2).then_some(Letter { family: Family::C, ..l })
    })))
}
