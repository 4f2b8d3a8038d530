//! Words in the free semigroup on `n <= 9` generators and the graded basis
//! of the truncated Fock space.
//!
//! A word is stored as its sequence of generator indices (`1..=9`); the empty
//! word is the identity `g_0`. The canonical string form writes each letter as
//! a decimal digit, so `"121"` is `g_1 g_2 g_1` and `""` is `g_0`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_GENERATORS: usize = 9;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(i: usize) -> Self {
        debug_assert!((1..=MAX_GENERATORS).contains(&i));
        Word(vec![i as u8])
    }

    /// Builds a word from generator indices, each in `1..=9`.
    pub fn from_letters<I: IntoIterator<Item = usize>>(letters: I) -> Result<Self> {
        let mut out = Vec::new();
        for l in letters {
            if !(1..=MAX_GENERATORS).contains(&l) {
                return Err(Error::InvalidWord(format!("letter {l}")));
            }
            out.push(l as u8);
        }
        Ok(Word(out))
    }

    pub fn letters(&self) -> impl ExactSizeIterator<Item = usize> + DoubleEndedIterator + '_ {
        self.0.iter().map(|&l| l as usize)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks that every letter lies in `1..=n`.
    pub fn check(&self, n: usize) -> Result<()> {
        match self.0.iter().find(|&&l| l as usize > n || l == 0) {
            Some(&l) => Err(Error::InvalidWord(format!(
                "{self} has letter {l} outside 1..={n}"
            ))),
            None => Ok(()),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// `g_i` followed by this word.
    pub fn prepend(&self, i: usize) -> Word {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.push(i as u8);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    /// This word followed by `g_i`.
    pub fn append(&self, i: usize) -> Word {
        let mut v = self.0.clone();
        v.push(i as u8);
        Word(v)
    }

    pub fn reverse(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    /// `sigma` with `self = sigma * gamma` and `sigma` nonempty.
    pub fn right_quotient(&self, gamma: &Word) -> Option<Word> {
        if self.len() > gamma.len() && self.0.ends_with(&gamma.0) {
            Some(Word(self.0[..self.len() - gamma.len()].to_vec()))
        } else {
            None
        }
    }

    /// `sigma` with `self = gamma * sigma` and `sigma` nonempty.
    pub fn left_quotient(&self, gamma: &Word) -> Option<Word> {
        if self.len() > gamma.len() && self.0.starts_with(&gamma.0) {
            Some(Word(self.0[gamma.len()..].to_vec()))
        } else {
            None
        }
    }

    /// Is `gamma` a proper right factor of this word?
    pub fn right_divisible_by(&self, gamma: &Word) -> bool {
        self.len() > gamma.len() && self.0.ends_with(&gamma.0)
    }

    pub fn left_divisible_by(&self, gamma: &Word) -> bool {
        self.len() > gamma.len() && self.0.starts_with(&gamma.0)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "g0")
        } else {
            write!(f, "w{self}")
        }
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c.to_digit(10) {
                Some(d) if d >= 1 => Ok(d as u8),
                _ => Err(Error::InvalidWord(s.to_string())),
            })
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

/// All words of length at most `max_deg` in graded-lexicographic order.
#[derive(Clone, Debug)]
pub struct GradedBasis {
    n: usize,
    max_deg: usize,
    words: Vec<Word>,
    /// `offsets[k]` is the position of the first word of length `k`.
    offsets: Vec<usize>,
}

/// `sum_{k <= m} n^k`.
pub fn basis_size(n: usize, m: usize) -> usize {
    (0..=m).map(|k| n.pow(k as u32)).sum()
}

impl GradedBasis {
    pub fn enumerate(n: usize, max_deg: usize) -> Result<Self> {
        if !(1..=MAX_GENERATORS).contains(&n) {
            return Err(Error::GeneratorCount(n));
        }
        let size = basis_size(n, max_deg);
        let mut words = Vec::with_capacity(size);
        let mut offsets = Vec::with_capacity(max_deg + 2);
        words.push(Word::empty());
        offsets.push(0);
        let mut level_start = 0;
        for _ in 1..=max_deg {
            let level_end = words.len();
            offsets.push(level_end);
            for idx in level_start..level_end {
                for i in 1..=n {
                    let w = words[idx].append(i);
                    words.push(w);
                }
            }
            level_start = level_end;
        }
        offsets.push(words.len());
        debug_assert_eq!(words.len(), size);
        Ok(GradedBasis { n, max_deg, words, offsets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_deg(&self) -> usize {
        self.max_deg
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn word_at(&self, i: usize) -> &Word {
        &self.words[i]
    }

    /// Index range of the words of length exactly `k`.
    pub fn level(&self, k: usize) -> std::ops::Range<usize> {
        self.offsets[k]..self.offsets[k + 1]
    }

    /// Number of words of length at most `k`.
    pub fn dim_upto(&self, k: usize) -> usize {
        self.offsets[k.min(self.max_deg) + 1]
    }

    /// Position of `w`, computed arithmetically (base-`n` digits within its level).
    pub fn index_of(&self, w: &Word) -> Option<usize> {
        if w.len() > self.max_deg {
            return None;
        }
        let mut pos = 0usize;
        for l in w.letters() {
            if l == 0 || l > self.n {
                return None;
            }
            pos = pos * self.n + (l - 1);
        }
        Some(self.offsets[w.len()] + pos)
    }

    pub fn degree_of(&self, i: usize) -> usize {
        self.words[i].len()
    }

    /// Position of word `i` inside its level.
    fn level_pos(&self, i: usize) -> usize {
        i - self.offsets[self.degree_of(i)]
    }

    /// Index of the concatenation `word_at(a) * word_at(b)`, if it fits.
    pub fn concat_index(&self, a: usize, b: usize) -> Option<usize> {
        let (ka, kb) = (self.degree_of(a), self.degree_of(b));
        if ka + kb > self.max_deg {
            return None;
        }
        let shift = self.n.pow(kb as u32);
        Some(self.offsets[ka + kb] + self.level_pos(a) * shift + self.level_pos(b))
    }

    /// Index of `word_at(a) * g_i`.
    pub fn append_index(&self, a: usize, i: usize) -> Option<usize> {
        let k = self.degree_of(a);
        (k < self.max_deg).then(|| self.offsets[k + 1] + self.level_pos(a) * self.n + (i - 1))
    }

    /// Index of `g_i * word_at(a)`.
    pub fn prepend_index(&self, a: usize, i: usize) -> Option<usize> {
        let k = self.degree_of(a);
        (k < self.max_deg)
            .then(|| self.offsets[k + 1] + (i - 1) * self.n.pow(k as u32) + self.level_pos(a))
    }
}
