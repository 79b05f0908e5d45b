//! Doubled Dynkin quivers of type E and their mesh relations.
//!
//! Vertices are `0..n`. Arrow `a_i` runs along the Dynkin edge with index
//! `i`; its reverse `ā_i` gets index `n + i - 1`. Vertex 3 is the branch
//! vertex.

use crate::word::Word;
use std::fmt;
use std::str::FromStr;

/// The exceptional (branch) vertex.
pub const EXCEPTIONAL: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DynkinType {
    E6,
    E7,
    E8,
}

impl DynkinType {
    pub const ALL: [DynkinType; 3] = [DynkinType::E6, DynkinType::E7, DynkinType::E8];

    /// Number of vertices.
    pub fn n(self) -> usize {
        match self {
            DynkinType::E6 => 6,
            DynkinType::E7 => 7,
            DynkinType::E8 => 8,
        }
    }

    /// Length of the longest nonzero path in the preprojective algebra.
    pub fn max_path_len(self) -> usize {
        match self {
            DynkinType::E6 => 10,
            DynkinType::E7 => 16,
            DynkinType::E8 => 28,
        }
    }

    /// Exponent `n - 3` of the local relation `(x + y)^(n-3) = 0`.
    pub fn local_exponent(self) -> usize {
        self.n() - 3
    }
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{}", self.n())
    }
}

impl FromStr for DynkinType {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "e6" | "6" => Ok(DynkinType::E6),
            "e7" | "7" => Ok(DynkinType::E7),
            "e8" | "8" => Ok(DynkinType::E8),
            _ => Err(crate::Error::Parse(format!("unknown Dynkin type `{s}`"))),
        }
    }
}

/// How `choose()` picks the next basis element among unresolved words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ChooseStrategy {
    /// Least word in the lexicographic order of the preferred alphabet
    /// (arrows near the branch vertex first).
    #[default]
    Sorted,
    /// First unresolved word in breadth-first discovery order, arrows in
    /// index order.
    FirstFound,
}

impl FromStr for ChooseStrategy {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sorted" => Ok(ChooseStrategy::Sorted),
            "first-found" | "first_found" | "firstfound" => Ok(ChooseStrategy::FirstFound),
            _ => Err(crate::Error::Parse(format!("unknown strategy `{s}`"))),
        }
    }
}

impl fmt::Display for ChooseStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChooseStrategy::Sorted => "sorted",
            ChooseStrategy::FirstFound => "first-found",
        })
    }
}

/// A homogeneous relation `Σ c_i p_i (+ deformation) = 0`.
#[derive(Clone, Debug)]
pub struct Relation {
    pub terms: Vec<(Word, i64)>,
    /// Vertex the relation lives at (source = target for mesh relations).
    pub vertex: usize,
    /// Set on the relation that receives the `f(ā_0a_0, ā_2a_2)` term.
    pub deformed: bool,
}

impl Relation {
    pub fn len(&self) -> usize {
        self.terms[0].0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// A finite quiver with homogeneous relations whose coefficients are ±1.
#[derive(Clone, Debug)]
pub struct BoundQuiver {
    pub num_vertices: usize,
    /// `(source, target)` per arrow.
    pub arrows: Vec<(usize, usize)>,
    pub arrow_names: Vec<String>,
    pub relations: Vec<Relation>,
}

impl BoundQuiver {
    pub fn source(&self, a: usize) -> usize {
        self.arrows[a].0
    }

    pub fn target(&self, a: usize) -> usize {
        self.arrows[a].1
    }

    /// Target vertex of a word (its source if empty).
    pub fn word_target(&self, w: Word) -> usize {
        w.last().map_or(w.source(), |a| self.target(a))
    }

    pub fn word_from_arrows(&self, letters: &[usize]) -> Word {
        assert!(!letters.is_empty());
        let w = Word::from_letters(self.source(letters[0]), letters);
        debug_assert!(self.is_path(w));
        w
    }

    pub fn is_path(&self, w: Word) -> bool {
        let mut v = w.source();
        for a in w.letters() {
            if a >= self.arrows.len() || self.source(a) != v {
                return false;
            }
            v = self.target(a);
        }
        true
    }

    /// Renders a word as arrow names separated by spaces (`e3` for trivial paths).
    pub fn word_name(&self, w: Word) -> String {
        if w.is_empty() {
            return format!("e{}", w.source());
        }
        w.letters().map(|a| self.arrow_names[a].as_str()).collect::<Vec<_>>().join(" ")
    }

    /// Renders a word with no separators, for single-letter alphabets.
    pub fn word_compact(&self, w: Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.letters().map(|a| self.arrow_names[a].as_str()).collect()
    }

    /// Parses space separated arrow names.
    pub fn parse_word(&self, s: &str) -> Result<Word, crate::Error> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let a = self
                .arrow_names
                .iter()
                .position(|n| n == tok)
                .ok_or_else(|| crate::Error::Parse(format!("unknown arrow `{tok}`")))?;
            letters.push(a);
        }
        if letters.is_empty() {
            return Err(crate::Error::Parse("empty path".into()));
        }
        let w = Word::from_letters(self.source(letters[0]), &letters);
        if !self.is_path(w) {
            return Err(crate::Error::Parse(format!("`{s}` is not a path")));
        }
        Ok(w)
    }
}

/// Index of `a_i`.
pub fn arrow(i: usize) -> usize {
    i
}

/// Index of `ā_i` in type E_n.
pub fn arrow_bar(n: usize, i: usize) -> usize {
    n + i - 1
}

/// The reverse arrow.
pub fn reverse(n: usize, k: usize) -> usize {
    if k < n - 1 {
        k + n - 1
    } else {
        k - (n - 1)
    }
}

/// `(bar, i)` such that arrow `k` is `a_i` or `ā_i`.
pub fn arrow_family(n: usize, k: usize) -> (bool, usize) {
    if k < n - 1 {
        (false, k)
    } else {
        (true, k - (n - 1))
    }
}

/// Endpoints of `a_i`.
fn edge(i: usize) -> (usize, usize) {
    match i {
        0 => (0, 3),
        1 => (1, 2),
        2 => (2, 3),
        _ => (i, i + 1),
    }
}

/// The doubled quiver of type `t` with the relations of the preprojective
/// algebra, one per vertex. The relation at vertex 3 is flagged as deformed.
pub fn preprojective(t: DynkinType) -> BoundQuiver {
    let n = t.n();
    let mut arrows = Vec::with_capacity(2 * (n - 1));
    let mut names = Vec::with_capacity(2 * (n - 1));
    for i in 0..n - 1 {
        arrows.push(edge(i));
        names.push(format!("a{i}"));
    }
    for i in 0..n - 1 {
        let (s, t) = edge(i);
        arrows.push((t, s));
        names.push(format!("ā{i}"));
    }
    let b = |i| arrow_bar(n, i);
    let w = |l: &[usize]| Word::from_letters(arrows[l[0]].0, l);
    let rel = |vertex, terms: Vec<Word>| Relation {
        terms: terms.into_iter().map(|p| (p, 1)).collect(),
        vertex,
        deformed: vertex == EXCEPTIONAL,
    };
    let mut relations = vec![
        rel(0, vec![w(&[0, b(0)])]),
        rel(1, vec![w(&[1, b(1)])]),
        rel(2, vec![w(&[b(1), 1]), w(&[2, b(2)])]),
        rel(3, vec![w(&[b(0), 0]), w(&[b(2), 2]), w(&[3, b(3)])]),
    ];
    for i in 3..=n - 3 {
        relations.push(rel(i + 1, vec![w(&[b(i), i]), w(&[i + 1, b(i + 1)])]));
    }
    relations.push(rel(n - 1, vec![w(&[b(n - 2), n - 2])]));
    BoundQuiver { num_vertices: n, arrows, arrow_names: names, relations }
}

/// One vertex with loops `x` (index 0) and `y` (index 1) and the relations
/// `x^2`, `y^3` and `(x + y)^(n-3)`.
pub fn local(t: DynkinType) -> BoundQuiver {
    let k = t.local_exponent();
    let mut power = Vec::with_capacity(1 << k);
    for bits in 0..(1usize << k) {
        let letters: Vec<usize> = (0..k).map(|i| (bits >> (k - 1 - i)) & 1).collect();
        power.push((Word::from_letters(0, &letters), 1));
    }
    let relations = vec![
        Relation { terms: vec![(Word::from_letters(0, &[0, 0]), 1)], vertex: 0, deformed: false },
        Relation { terms: vec![(Word::from_letters(0, &[1, 1, 1]), 1)], vertex: 0, deformed: false },
        Relation { terms: power, vertex: 0, deformed: false },
    ];
    BoundQuiver {
        num_vertices: 1,
        arrows: vec![(0, 0), (0, 0)],
        arrow_names: vec!["x".into(), "y".into()],
        relations,
    }
}

/// Rank of each arrow in the preferred alphabet
/// `a0, ā0, a2, ā2, ā3, a3, a1, ā1, ā4, a4, …, ā(n-2), a(n-2)`.
pub fn sorted_rank(n: usize) -> Vec<u8> {
    let b = |i| arrow_bar(n, i);
    let mut order = vec![0, b(0), 2, b(2), b(3), 3, 1, b(1)];
    for i in 4..=n - 2 {
        order.push(b(i));
        order.push(i);
    }
    let mut rank = vec![0u8; 2 * (n - 1)];
    for (r, &a) in order.iter().enumerate() {
        rank[a] = r as u8;
    }
    rank
}

/// Letter ranks used by `choose()` for a quiver with `num_arrows` arrows.
pub fn strategy_rank(t: Option<DynkinType>, strategy: ChooseStrategy, num_arrows: usize) -> Vec<u8> {
    match (t, strategy) {
        (Some(t), ChooseStrategy::Sorted) => sorted_rank(t.n()),
        _ => (0..num_arrows as u8).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arrow_counts_and_endpoints() {
        for t in DynkinType::ALL {
            let q = preprojective(t);
            let n = t.n();
            assert_eq!(q.arrows.len(), 2 * (n - 1));
            assert_eq!(q.relations.len(), n);
            for k in 0..q.arrows.len() {
                let r = reverse(n, k);
                assert_eq!(q.source(k), q.target(r));
                assert_eq!(reverse(n, r), k);
            }
            let deg = |v| q.arrows.iter().filter(|&&(s, _)| s == v).count();
            assert_eq!((0..n).filter(|&v| deg(v) == 3).collect::<Vec<_>>(), vec![EXCEPTIONAL]);
        }
        let q8 = preprojective(DynkinType::E8);
        assert_eq!(q8.arrows[arrow_bar(8, 0)], (3, 0));
        let q7 = preprojective(DynkinType::E7);
        assert_eq!(q7.arrows[3], (3, 4));
    }

    #[test]
    fn relations_are_homogeneous() {
        for t in DynkinType::ALL {
            let q = preprojective(t);
            for r in &q.relations {
                for &(p, c) in &r.terms {
                    assert!(q.is_path(p));
                    assert_eq!(p.len(), 2);
                    assert_eq!(p.source(), r.vertex);
                    assert_eq!(q.word_target(p), r.vertex);
                    assert_eq!(c.abs(), 1);
                }
            }
            let names: Vec<String> = q.relations[3].terms.iter().map(|&(p, _)| q.word_name(p)).collect();
            assert_eq!(names, vec!["ā0 a0", "ā2 a2", "a3 ā3"]);
            assert!(q.relations[3].deformed);
            assert_eq!(q.relations.iter().filter(|r| r.deformed).count(), 1);
        }
    }

    #[test]
    fn name_round_trip() {
        let q = preprojective(DynkinType::E7);
        for k in 0..q.arrows.len() {
            let w = q.word_from_arrows(&[k]);
            assert_eq!(q.parse_word(&q.word_name(w)).unwrap(), w);
        }
    }

    #[test]
    fn sorted_alphabet() {
        let r = sorted_rank(7);
        let mut by_rank: Vec<usize> = (0..12).collect();
        by_rank.sort_by_key(|&a| r[a]);
        let q = preprojective(DynkinType::E7);
        let names: Vec<&str> = by_rank.iter().map(|&a| q.arrow_names[a].as_str()).collect();
        assert_eq!(names, vec!["a0", "ā0", "a2", "ā2", "ā3", "a3", "a1", "ā1", "ā4", "a4", "ā5", "a5"]);
    }
}
