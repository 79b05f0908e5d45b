//! The local algebra `R(E_n) = K<x,y> / (x^2, y^3, (x+y)^(n-3))`.

use crate::forest::{self, BuildOptions, Forest, ForestStats, IntVec};
use crate::poly::{Coeff, Element};
use crate::quiver::{local, DynkinType};
use crate::word::Word;
use std::sync::Arc;

/// Basis and multiplication table of `R(E_n)`.
///
/// Basis words are ordered by length, then by the order in which they were
/// chosen (lexicographic with `x < y`). Ids `0, 1, 2` are `1, x, y`; the
/// deformation coefficient `theta[i]` belongs to id `i + 2`.
#[derive(Clone, Debug)]
pub struct LocalBasis {
    pub dynkin: DynkinType,
    pub forest: Forest,
    table: Vec<Arc<IntVec>>,
}

pub const X: usize = 0;
pub const Y: usize = 1;

impl LocalBasis {
    pub fn new(t: DynkinType) -> LocalBasis {
        let q = local(t);
        let forest = forest::build(&q, &BuildOptions { rank: vec![0, 1], keep_records: false });
        let n = forest.basis.len();
        let mut table = Vec::with_capacity(n * n);
        for &a in &forest.basis {
            for &b in &forest.basis {
                table.push(Arc::new(forest.present(a.concat(b))));
            }
        }
        LocalBasis { dynkin: t, forest, table }
    }

    pub fn len(&self) -> usize {
        self.forest.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forest.basis.is_empty()
    }

    pub fn word(&self, id: u32) -> Word {
        self.forest.basis[id as usize]
    }

    pub fn id(&self, w: Word) -> Option<u32> {
        self.forest.basis_index.get(&w).copied()
    }

    /// Basis word as a string over `x`, `y` (`1` for the unit).
    pub fn name(&self, id: u32) -> String {
        self.forest.quiver.word_compact(self.word(id))
    }

    pub fn names(&self) -> Vec<String> {
        (0..self.len() as u32).map(|i| self.name(i)).collect()
    }

    /// Parses a word over `x`, `y`; `1` is the empty word.
    pub fn parse(&self, s: &str) -> Result<Word, crate::Error> {
        let mut w = Word::empty(0);
        if s == "1" {
            return Ok(w);
        }
        for c in s.chars() {
            w = w.push(match c {
                'x' => X,
                'y' => Y,
                _ => return Err(crate::Error::Parse(format!("`{s}` is not a word in x, y"))),
            });
        }
        Ok(w)
    }

    /// Expansion of an arbitrary word in the basis; empty means zero.
    pub fn present_word(&self, w: Word) -> IntVec {
        self.forest.present(w)
    }

    pub fn product(&self, a: u32, b: u32) -> Arc<IntVec> {
        self.table[a as usize * self.len() + b as usize].clone()
    }

    pub fn multiply<C: Coeff>(&self, a: &Element<C>, b: &Element<C>) -> Element<C> {
        C::mul_elements(a, b, &|i, j| Some(self.product(i, j)))
    }

    /// Number of basis words of each length.
    pub fn dims_by_length(&self) -> Vec<usize> {
        let mut d = Vec::new();
        for w in &self.forest.basis {
            if d.len() <= w.len() {
                d.resize(w.len() + 1, 0);
            }
            d[w.len()] += 1;
        }
        d
    }

    pub fn stats(&self) -> ForestStats {
        self.forest.stats()
    }

    /// Number of deformation coefficients, `|B| - 3`.
    pub fn num_thetas(&self) -> usize {
        self.len() - 3
    }

    pub fn theta_id(&self, i: usize) -> u32 {
        assert!(i >= 1 && i <= self.num_thetas());
        (i + 2) as u32
    }
}
