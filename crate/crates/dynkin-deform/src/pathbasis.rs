//! Basis of the preprojective algebra `P(E_n)` and its multiplication.

use crate::forest::{self, BuildOptions, Forest, ForestStats, IntVec};
use crate::poly::{Coeff, Element};
use crate::quiver::{preprojective, strategy_rank, ChooseStrategy, DynkinType};
use crate::word::Word;
use crate::Error;
use rayon::prelude::*;
use std::sync::Arc;

/// Basis paths of `P(E_n)` ordered by (length, source, target, slot), with
/// a full table of products of basis paths.
#[derive(Clone, Debug)]
pub struct PathBasis {
    pub dynkin: DynkinType,
    pub strategy: ChooseStrategy,
    pub forest: Forest,
    table: Vec<Option<Arc<IntVec>>>,
    targets: Vec<usize>,
}

impl PathBasis {
    /// Builds the forest. E8 needs `large_memory`: its forest has about
    /// 10^8 nodes and takes a few GB at peak.
    pub fn compute(t: DynkinType, strategy: ChooseStrategy, large_memory: bool) -> Result<PathBasis, Error> {
        if t == DynkinType::E8 && !large_memory {
            return Err(Error::LargeMemoryRequired);
        }
        let q = preprojective(t);
        let rank = strategy_rank(Some(t), strategy, q.arrows.len());
        let forest = forest::build(&q, &BuildOptions { rank, keep_records: t != DynkinType::E8 });
        Ok(Self::from_forest(t, strategy, forest))
    }

    fn from_forest(t: DynkinType, strategy: ChooseStrategy, forest: Forest) -> PathBasis {
        let n = forest.basis.len();
        let targets: Vec<usize> = forest.basis.iter().map(|&w| forest.quiver.word_target(w)).collect();
        let table: Vec<Option<Arc<IntVec>>> = (0..n)
            .into_par_iter()
            .flat_map_iter(|a| {
                let forest = &forest;
                let targets = &targets;
                (0..n).map(move |b| {
                    let wb = forest.basis[b];
                    if targets[a] != wb.source() {
                        return None;
                    }
                    let mut cur: IntVec = vec![(a as u32, 1)];
                    for l in wb.letters() {
                        cur = forest.right_mul_vec(&cur, l);
                        if cur.is_empty() {
                            break;
                        }
                    }
                    Some(Arc::new(cur))
                })
            })
            .collect();
        PathBasis { dynkin: t, strategy, forest, table, targets }
    }

    pub fn len(&self) -> usize {
        self.forest.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forest.basis.is_empty()
    }

    pub fn n(&self) -> usize {
        self.dynkin.n()
    }

    pub fn word(&self, id: u32) -> Word {
        self.forest.basis[id as usize]
    }

    pub fn id(&self, w: Word) -> Option<u32> {
        self.forest.basis_index.get(&w).copied()
    }

    pub fn source(&self, id: u32) -> usize {
        self.word(id).source()
    }

    pub fn target(&self, id: u32) -> usize {
        self.targets[id as usize]
    }

    pub fn length(&self, id: u32) -> usize {
        self.word(id).len()
    }

    /// Arrow names separated by spaces.
    pub fn name(&self, id: u32) -> String {
        self.forest.quiver.word_name(self.word(id))
    }

    /// Basis id of the trivial path at `v`.
    pub fn vertex_id(&self, v: usize) -> u32 {
        self.id(Word::empty(v)).expect("trivial paths are basis elements")
    }

    /// Basis id of the arrow `k` as a path of length one.
    pub fn arrow_id(&self, k: usize) -> u32 {
        self.id(self.forest.quiver.word_from_arrows(&[k])).expect("arrows are basis elements")
    }

    /// Basis paths from `s` to `t`, in basis order.
    pub fn paths(&self, s: usize, t: usize) -> Vec<u32> {
        (0..self.len() as u32).filter(|&b| self.source(b) == s && self.target(b) == t).collect()
    }

    /// Basis paths from `s` to `t` of length at least `p`.
    pub fn rad_paths(&self, p: usize, s: usize, t: usize) -> Vec<u32> {
        self.paths(s, t).into_iter().filter(|&b| self.length(b) >= p).collect()
    }

    /// `dim e_i rad^p e_j`.
    pub fn rad_dims(&self, p: usize, i: usize, j: usize) -> usize {
        self.rad_paths(p, i, j).len()
    }

    /// Matrix of `dim e_i P e_j`.
    pub fn dims_matrix(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut m = vec![vec![0; n]; n];
        for b in 0..self.len() as u32 {
            m[self.source(b)][self.target(b)] += 1;
        }
        m
    }

    pub fn stats(&self) -> ForestStats {
        self.forest.stats()
    }

    /// `basis[a] · basis[b]`; empty when zero or not composable.
    pub fn product(&self, a: u32, b: u32) -> Arc<IntVec> {
        match &self.table[a as usize * self.len() + b as usize] {
            Some(v) => v.clone(),
            None => Arc::new(Vec::new()),
        }
    }

    pub fn composable(&self, a: u32, b: u32) -> bool {
        self.target(a) == self.source(b)
    }

    /// Expansion of an arbitrary path; empty means zero.
    pub fn present(&self, w: Word) -> IntVec {
        self.forest.present(w)
    }

    pub fn multiply<C: Coeff>(&self, a: &Element<C>, b: &Element<C>) -> Element<C> {
        C::mul_elements(a, b, &|i, j| self.table[i as usize * self.len() + j as usize].clone())
    }

    /// Parses arrow names separated by spaces into a basis element (expanding if needed).
    pub fn parse_path(&self, s: &str) -> Result<Word, Error> {
        self.forest.quiver.parse_word(s)
    }
}
