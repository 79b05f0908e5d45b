//! Level-by-level presentation forests for graded quotients of path algebras.
//!
//! Every word of length `i` whose length-`i - 1` prefix is nonzero becomes a
//! node. A node is either zero, or gets a coefficient vector over the basis
//! paths of the same length, source and target. Nodes are resolved by placing
//! a relation at some position of the word; when nothing more can be
//! resolved a new basis element is chosen. The same engine serves the local
//! algebra (one vertex, loops `x`, `y`) and the preprojective algebras.

use crate::quiver::BoundQuiver;
use crate::word::Word;
use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use smallvec::SmallVec;
use std::collections::VecDeque;

/// Integer coefficient vector, `(basis id, coefficient)` sorted by id.
pub type IntVec = Vec<(u32, i64)>;

type SlotVec = SmallVec<[(u32, i64); 3]>;

/// How a node got its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum How {
    /// Chosen as a basis element.
    Basis,
    /// Zero because the word without its first letter is zero.
    SuffixZero,
    /// Term `term` of relation `rel` placed at letter offset `pos`.
    Relation { rel: u16, term: u16, pos: u8 },
}

/// A resolved node, kept only when the forest is built with records.
#[derive(Clone, Debug)]
pub struct Record {
    pub value: IntVec,
    pub how: How,
}

/// Counts for one level of the forest.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LevelStats {
    pub length: usize,
    pub nodes: u64,
    pub nonzero: u64,
    pub basis: u64,
}

/// Summary counts of a whole forest.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ForestStats {
    pub basis_size: usize,
    /// Number of levels holding nonzero words, the roots included.
    pub depth: usize,
    /// Root count plus every generated child.
    pub total_nodes: u64,
    /// Nonzero words of positive length.
    pub non_leaf_non_root: u64,
}

/// Options for [`build`].
#[derive(Clone, Debug)]
pub struct BuildOptions {
    /// Letter ranks for the lexicographic order used by `choose()`.
    pub rank: Vec<u8>,
    /// Keep a [`Record`] for every node (needed by deformed arithmetic).
    pub keep_records: bool,
}

/// A completed forest: basis, right multiplication table and statistics.
#[derive(Clone, Debug)]
pub struct Forest {
    pub quiver: BoundQuiver,
    /// Basis words sorted by (length, source, target, slot).
    pub basis: Vec<Word>,
    pub basis_index: FxHashMap<Word, u32>,
    /// `right[b * arrows + a]` is the expansion of `basis[b] · a` (empty when zero or not composable).
    pub right: Vec<IntVec>,
    pub levels: Vec<LevelStats>,
    pub records: Option<FxHashMap<Word, Record>>,
}

#[derive(Clone, Debug)]
enum State {
    Open,
    Zero,
    Value(SlotVec),
}

struct RelIndex {
    lengths: Vec<usize>,
    by_key: FxHashMap<u128, Vec<(u16, u16)>>,
    term_keys: Vec<Vec<(u128, i64)>>,
}

impl RelIndex {
    fn new(q: &BoundQuiver) -> RelIndex {
        let mut by_key: FxHashMap<u128, Vec<(u16, u16)>> = FxHashMap::default();
        let mut lengths = Vec::new();
        let mut term_keys = Vec::new();
        for (r, rel) in q.relations.iter().enumerate() {
            if !lengths.contains(&rel.len()) {
                lengths.push(rel.len());
            }
            let mut keys = Vec::new();
            for (j, &(w, c)) in rel.terms.iter().enumerate() {
                assert!(c == 1 || c == -1, "relation coefficients must be ±1");
                by_key.entry(w.letters_key()).or_default().push((r as u16, j as u16));
                keys.push((w.letters_key(), c));
            }
            term_keys.push(keys);
        }
        lengths.sort_unstable();
        RelIndex { lengths, by_key, term_keys }
    }
}

/// One (length, source, target) slice of a level.
struct Slice {
    source: usize,
    target: usize,
    words: Vec<Word>,
}

struct SliceOut {
    source: usize,
    target: usize,
    words: Vec<Word>,
    states: Vec<State>,
    hows: Vec<How>,
    basis: Vec<Word>,
}

fn add_scaled(acc: &mut SlotVec, v: &SlotVec, c: i64) {
    for &(s, x) in v {
        let y = x.checked_mul(c).expect("coefficient overflow");
        match acc.iter_mut().find(|(t, _)| *t == s) {
            Some(e) => e.1 = e.1.checked_add(y).expect("coefficient overflow"),
            None => acc.push((s, y)),
        }
    }
    acc.retain(|e| e.1 != 0);
}

fn resolve_slice(slice: Slice, idx: &RelIndex, rank: &[u8], q: &BoundQuiver, prev_nonzero: &FxHashSet<Word>) -> SliceOut {
    let Slice { source, target, mut words } = slice;
    words.sort_by(|a, b| a.cmp_by_rank(*b, rank));
    let pos_of: FxHashMap<Word, u32> = words.iter().enumerate().map(|(i, &w)| (w, i as u32)).collect();
    let n = words.len();
    let mut states = vec![State::Open; n];
    let mut hows = vec![How::Basis; n];
    let mut open = n;
    for (i, &w) in words.iter().enumerate() {
        let rest = w.suffix(q.target(w.letter(0)));
        if !rest.is_empty() && !prev_nonzero.contains(&rest) {
            states[i] = State::Zero;
            hows[i] = How::SuffixZero;
            open -= 1;
        }
    }
    let len = words.first().map_or(0, |w| w.len());

    // Placement neighbours: words sharing a relation placement.
    let neighbours = |w: Word, out: &mut Vec<u32>| {
        out.clear();
        for &l in &idx.lengths {
            if l > len {
                continue;
            }
            for pos in 0..=len - l {
                if let Some(list) = idx.by_key.get(&w.window_key(pos, l)) {
                    for &(r, j) in list {
                        for (t, &(k, _)) in idx.term_keys[r as usize].iter().enumerate() {
                            if t != j as usize {
                                if let Some(&p) = pos_of.get(&w.replace_window(pos, k)) {
                                    out.push(p);
                                }
                            }
                        }
                    }
                }
            }
        }
    };

    let try_resolve = |i: usize, states: &Vec<State>| -> Option<(SlotVec, How)> {
        let w = words[i];
        for &l in &idx.lengths {
            if l > len {
                continue;
            }
            for pos in 0..=len - l {
                let Some(list) = idx.by_key.get(&w.window_key(pos, l)) else { continue };
                'placement: for &(r, j) in list {
                    let mut acc = SlotVec::new();
                    let terms = &idx.term_keys[r as usize];
                    for (t, &(k, c)) in terms.iter().enumerate() {
                        if t == j as usize {
                            continue;
                        }
                        match pos_of.get(&w.replace_window(pos, k)) {
                            None => {}
                            Some(&p) => match &states[p as usize] {
                                State::Open => continue 'placement,
                                State::Zero => {}
                                State::Value(v) => add_scaled(&mut acc, v, c),
                            },
                        }
                    }
                    // c_j u + Σ c_t u_t = 0 with c_j = ±1.
                    let cj = terms[j as usize].1;
                    for e in acc.iter_mut() {
                        e.1 *= -cj;
                    }
                    acc.sort_unstable();
                    return Some((acc, How::Relation { rel: r, term: j, pos: pos as u8 }));
                }
            }
        }
        None
    };

    let mut queue: VecDeque<u32> = (0..n as u32).filter(|&i| matches!(states[i as usize], State::Open)).collect();
    let mut queued = vec![false; n];
    for &i in &queue {
        queued[i as usize] = true;
    }
    let mut basis = Vec::new();
    let mut nb = Vec::new();
    let mut cursor = 0usize;
    while open > 0 {
        while let Some(i) = queue.pop_front() {
            let i = i as usize;
            queued[i] = false;
            if !matches!(states[i], State::Open) {
                continue;
            }
            if let Some((v, how)) = try_resolve(i, &states) {
                states[i] = if v.is_empty() { State::Zero } else { State::Value(v) };
                hows[i] = how;
                open -= 1;
                neighbours(words[i], &mut nb);
                for &p in &nb {
                    if matches!(states[p as usize], State::Open) && !queued[p as usize] {
                        queued[p as usize] = true;
                        queue.push_back(p);
                    }
                }
            }
        }
        if open == 0 {
            break;
        }
        // choose(): least open word in rank order.
        while !matches!(states[cursor], State::Open) {
            cursor += 1;
        }
        let slot = basis.len() as u32;
        basis.push(words[cursor]);
        states[cursor] = State::Value(SmallVec::from_slice(&[(slot, 1)]));
        hows[cursor] = How::Basis;
        open -= 1;
        neighbours(words[cursor], &mut nb);
        for &p in &nb {
            if matches!(states[p as usize], State::Open) && !queued[p as usize] {
                queued[p as usize] = true;
                queue.push_back(p);
            }
        }
    }
    SliceOut { source, target, words, states, hows, basis }
}

/// Runs the level-by-level construction to completion.
pub fn build(q: &BoundQuiver, opts: &BuildOptions) -> Forest {
    let idx = RelIndex::new(q);
    let na = q.arrows.len();
    let mut levels = Vec::new();
    let mut records: Option<FxHashMap<Word, Record>> = opts.keep_records.then(FxHashMap::default);
    // Slice-local data, converted to global ids at the end.
    let mut basis_slices: Vec<((usize, usize, usize), Vec<Word>)> = Vec::new();
    let mut local_records: Vec<(Word, SlotVec, How)> = Vec::new();
    let mut right_local: Vec<(Word, usize, Word, SlotVec)> = Vec::new();

    let roots: Vec<Word> = (0..q.num_vertices).map(Word::empty).collect();
    for &r in &roots {
        basis_slices.push(((0, r.source(), r.source()), vec![r]));
        if opts.keep_records {
            local_records.push((r, SmallVec::from_slice(&[(0, 1)]), How::Basis));
        }
    }
    levels.push(LevelStats { length: 0, nodes: roots.len() as u64, nonzero: roots.len() as u64, basis: roots.len() as u64 });
    let mut prev_nonzero: Vec<Word> = roots.clone();
    let mut prev_set: FxHashSet<Word> = roots.iter().copied().collect();
    let mut prev_basis: FxHashSet<Word> = roots.iter().copied().collect();

    let mut len = 0;
    while !prev_nonzero.is_empty() {
        len += 1;
        let mut slices: FxHashMap<(usize, usize), Slice> = FxHashMap::default();
        for &p in &prev_nonzero {
            let t = q.word_target(p);
            for a in 0..na {
                if q.source(a) != t {
                    continue;
                }
                let c = p.push(a);
                let key = (c.source(), q.target(a));
                let s = slices.entry(key).or_insert_with(|| Slice { source: key.0, target: key.1, words: Vec::new() });
                s.words.push(c);
            }
        }
        let mut slices: Vec<Slice> = slices.into_values().collect();
        slices.sort_by_key(|s| (s.source, s.target));
        let outs: Vec<SliceOut> = slices.into_par_iter().map(|s| resolve_slice(s, &idx, &opts.rank, q, &prev_set)).collect();

        let mut stats = LevelStats { length: len, ..Default::default() };
        let mut next_nonzero = Vec::new();
        let mut next_basis = FxHashSet::default();
        for out in outs {
            stats.nodes += out.words.len() as u64;
            stats.basis += out.basis.len() as u64;
            for (i, &w) in out.words.iter().enumerate() {
                let parent = w.prefix();
                if let State::Value(v) = &out.states[i] {
                    stats.nonzero += 1;
                    next_nonzero.push(w);
                    if prev_basis.contains(&parent) {
                        right_local.push((parent, w.last().unwrap(), w, v.clone()));
                    }
                }
                if opts.keep_records {
                    let v = match &out.states[i] {
                        State::Value(v) => v.clone(),
                        _ => SlotVec::new(),
                    };
                    local_records.push((w, v, out.hows[i]));
                }
            }
            for &b in &out.basis {
                next_basis.insert(b);
            }
            if !out.basis.is_empty() {
                basis_slices.push(((len, out.source, out.target), out.basis));
            }
        }
        levels.push(stats);
        prev_set = next_nonzero.iter().copied().collect();
        prev_nonzero = next_nonzero;
        prev_basis = next_basis;
    }
    // The last level processed contains no nonzero node.
    basis_slices.sort_by_key(|(k, _)| *k);
    let mut basis = Vec::new();
    let mut offset: FxHashMap<(usize, usize, usize), u32> = FxHashMap::default();
    for (k, words) in &basis_slices {
        offset.insert(*k, basis.len() as u32);
        basis.extend(words.iter().copied());
    }
    let basis_index: FxHashMap<Word, u32> = basis.iter().enumerate().map(|(i, &w)| (w, i as u32)).collect();
    let to_global = |w: Word, v: &SlotVec| -> IntVec {
        if v.is_empty() {
            return Vec::new();
        }
        let off = offset[&(w.len(), w.source(), q.word_target(w))];
        let mut g: IntVec = v.iter().map(|&(s, c)| (off + s, c)).collect();
        g.sort_unstable();
        g
    };
    let mut right = vec![Vec::new(); basis.len() * na];
    for (parent, a, child, v) in &right_local {
        right[basis_index[parent] as usize * na + a] = to_global(*child, v);
    }
    if let Some(rec) = records.as_mut() {
        rec.reserve(local_records.len());
        for (w, v, how) in &local_records {
            rec.insert(*w, Record { value: to_global(*w, v), how: *how });
        }
    }
    Forest { quiver: q.clone(), basis, basis_index, right, levels, records }
}

impl Forest {
    pub fn stats(&self) -> ForestStats {
        let depth = self.levels.iter().filter(|l| l.nonzero > 0).count();
        ForestStats {
            basis_size: self.basis.len(),
            depth,
            total_nodes: self.levels.iter().map(|l| l.nodes).sum(),
            non_leaf_non_root: self.levels.iter().skip(1).map(|l| l.nonzero).sum(),
        }
    }

    pub fn num_arrows(&self) -> usize {
        self.quiver.arrows.len()
    }

    /// Expansion of `basis[b] · a`.
    pub fn right_mul(&self, b: u32, a: usize) -> &IntVec {
        &self.right[b as usize * self.num_arrows() + a]
    }

    /// Expansion of an arbitrary path in the basis (empty when zero).
    pub fn present(&self, w: Word) -> IntVec {
        let mut cur: IntVec = vec![(self.basis_index[&Word::empty(w.source())], 1)];
        for a in w.letters() {
            cur = self.right_mul_vec(&cur, a);
            if cur.is_empty() {
                break;
            }
        }
        cur
    }

    /// Right multiplication of an integer vector by an arrow.
    pub fn right_mul_vec(&self, v: &IntVec, a: usize) -> IntVec {
        let mut acc: FxHashMap<u32, i64> = FxHashMap::default();
        for &(b, c) in v {
            for &(d, e) in self.right_mul(b, a) {
                *acc.entry(d).or_insert(0) += c * e;
            }
        }
        let mut out: IntVec = acc.into_iter().filter(|e| e.1 != 0).collect();
        out.sort_unstable();
        out
    }
}
