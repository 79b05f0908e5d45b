//! Paths in a quiver packed into a single `u128`.
//!
//! Layout: bits 0..5 hold the length, bits 5..9 the source vertex, and
//! letter `i` occupies bits `9 + 4i .. 13 + 4i`. That leaves room for 29
//! letters over an alphabet of at most 16 arrows.

use std::fmt;

/// Maximum number of letters a [`Word`] can hold.
pub const MAX_LEN: usize = 29;

const LEN_BITS: u32 = 5;
const SRC_SHIFT: u32 = 5;
const LETTER_SHIFT: u32 = 9;

/// A path, stored as its source vertex plus a sequence of arrow indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(u128);

impl Word {
    /// The trivial path at `vertex`.
    pub fn empty(vertex: usize) -> Word {
        debug_assert!(vertex < 16);
        Word((vertex as u128) << SRC_SHIFT)
    }

    /// Builds a word from a source vertex and letters. No composability check.
    pub fn from_letters(source: usize, letters: &[usize]) -> Word {
        let mut w = Word::empty(source);
        for &a in letters {
            w = w.push(a);
        }
        w
    }

    pub fn len(self) -> usize {
        (self.0 & ((1 << LEN_BITS) - 1)) as usize
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }

    pub fn source(self) -> usize {
        ((self.0 >> SRC_SHIFT) & 0xf) as usize
    }

    pub fn letter(self, i: usize) -> usize {
        debug_assert!(i < self.len());
        ((self.0 >> (LETTER_SHIFT + 4 * i as u32)) & 0xf) as usize
    }

    pub fn last(self) -> Option<usize> {
        let n = self.len();
        (n > 0).then(|| self.letter(n - 1))
    }

    pub fn letters(self) -> impl Iterator<Item = usize> {
        (0..self.len()).map(move |i| self.letter(i))
    }

    /// Appends a letter.
    pub fn push(self, a: usize) -> Word {
        let n = self.len();
        assert!(n < MAX_LEN, "word too long");
        debug_assert!(a < 16);
        Word(((self.0 >> LEN_BITS) << LEN_BITS | (n as u128 + 1)) | ((a as u128) << (LETTER_SHIFT + 4 * n as u32)))
    }

    /// The word without its last letter.
    pub fn prefix(self) -> Word {
        let n = self.len();
        assert!(n > 0);
        let keep = LETTER_SHIFT + 4 * (n as u32 - 1);
        let mask = (1u128 << keep) - 1;
        Word(((self.0 & mask) >> LEN_BITS) << LEN_BITS | (n as u128 - 1))
    }

    /// The word without its first letter; `new_source` is the target of that letter.
    pub fn suffix(self, new_source: usize) -> Word {
        let n = self.len();
        assert!(n > 0);
        let letters = self.0 >> (LETTER_SHIFT + 4);
        Word(letters << LETTER_SHIFT | (new_source as u128) << SRC_SHIFT | (n as u128 - 1))
    }

    /// Packed letters of the window `[pos, pos + len)` together with its length.
    /// Equal keys mean equal letter sequences.
    pub fn window_key(self, pos: usize, len: usize) -> u128 {
        let bits = (self.0 >> (LETTER_SHIFT + 4 * pos as u32)) & mask_letters(len);
        bits << LEN_BITS | len as u128
    }

    /// Key of the whole letter sequence, see [`Word::window_key`].
    pub fn letters_key(self) -> u128 {
        self.window_key(0, self.len())
    }

    /// Replaces the window `[pos, pos + len)` by the letters encoded in `key`.
    pub fn replace_window(self, pos: usize, key: u128) -> Word {
        let len = (key & ((1 << LEN_BITS) - 1)) as usize;
        let shift = LETTER_SHIFT + 4 * pos as u32;
        let m = mask_letters(len) << shift;
        let bits = (key >> LEN_BITS) << shift;
        Word((self.0 & !m) | bits)
    }

    /// Concatenation. The caller is responsible for composability.
    pub fn concat(self, other: Word) -> Word {
        let mut w = self;
        for a in other.letters() {
            w = w.push(a);
        }
        w
    }

    /// Raw packed value, stable across runs.
    pub fn raw(self) -> u128 {
        self.0
    }

    /// Lexicographic comparison of equal-length words with letters ranked by `rank`.
    pub fn cmp_by_rank(self, other: Word, rank: &[u8]) -> std::cmp::Ordering {
        for (a, b) in self.letters().zip(other.letters()) {
            let c = rank[a].cmp(&rank[b]);
            if c.is_ne() {
                return c;
            }
        }
        self.len().cmp(&other.len())
    }
}

fn mask_letters(len: usize) -> u128 {
    if len >= 30 {
        u128::MAX
    } else {
        (1u128 << (4 * len as u32)) - 1
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(e{}", self.source())?;
        for a in self.letters() {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_prefix_suffix() {
        let w = Word::from_letters(2, &[3, 1, 4, 1, 5]);
        assert_eq!(w.len(), 5);
        assert_eq!(w.letters().collect::<Vec<_>>(), vec![3, 1, 4, 1, 5]);
        assert_eq!(w.prefix(), Word::from_letters(2, &[3, 1, 4, 1]));
        assert_eq!(w.suffix(7), Word::from_letters(7, &[1, 4, 1, 5]));
        assert_eq!(w.last(), Some(5));
    }

    #[test]
    fn windows() {
        let w = Word::from_letters(0, &[1, 2, 3, 4]);
        let k = Word::from_letters(0, &[9, 9]).letters_key();
        assert_eq!(w.window_key(1, 2), Word::from_letters(5, &[2, 3]).letters_key());
        assert_eq!(w.replace_window(1, k), Word::from_letters(0, &[1, 9, 9, 4]));
    }

    #[test]
    fn longest_word() {
        let letters: Vec<usize> = (0..MAX_LEN).map(|i| 15 - i % 16).collect();
        let w = Word::from_letters(15, &letters);
        assert_eq!(w.letters().collect::<Vec<_>>(), letters);
        assert_eq!(w.source(), 15);
        assert_eq!(w.prefix().len(), MAX_LEN - 1);
    }
}
