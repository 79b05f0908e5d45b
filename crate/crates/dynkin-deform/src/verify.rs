//! Independent checks: brute-force dimensions by linear algebra, numeric
//! and symbolic verification of solutions, and inversion of homomorphisms.

use crate::deform::{free_thetas, relation_images, ArrowMap, EquationSystem, HomomorphismForm, SolutionAssignment};
use crate::localbasis::{LocalBasis, X, Y};
use crate::pathbasis::PathBasis;
use crate::poly::{int, ratio, Element, Poly, Scalar, SubstitutionSet, Var};
use crate::quiver::{arrow, arrow_bar, preprojective, BoundQuiver, DynkinType, EXCEPTIONAL};
use crate::word::Word;
use crate::Error;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;

// ------------------------------------------------------------ linear algebra

/// Rank of a set of sparse rational vectors.
fn rank(rows: Vec<BTreeMap<usize, Scalar>>) -> usize {
    // Reduced rows keyed by pivot column.
    let mut pivots: BTreeMap<usize, BTreeMap<usize, Scalar>> = BTreeMap::new();
    for mut r in rows {
        while let Some(col) = r.keys().next().copied() {
            match pivots.get(&col) {
                Some(p) => {
                    let factor = r[&col].clone() / p[&col].clone();
                    for (&c, v) in p {
                        let e = r.entry(c).or_insert_with(Scalar::zero);
                        *e -= &factor * v;
                        if e.is_zero() {
                            r.remove(&c);
                        }
                    }
                }
                None => {
                    pivots.insert(col, r);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// Words over `{x, y}` of length `len` avoiding `xx` and `yyy`.
fn reduced_words(len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &out {
            for a in [X, Y] {
                let mut v = w.clone();
                v.push(a);
                if !has_monomial_relation(&v) {
                    next.push(v);
                }
            }
        }
        out = next;
    }
    out
}

fn has_monomial_relation(w: &[usize]) -> bool {
    w.windows(2).any(|p| p == [X, X]) || w.windows(3).any(|p| p == [Y, Y, Y])
}

/// Dimensions per length of `K<x,y> / (x^2, y^3, (x+y)^(n-3))`, by exact
/// elimination on each homogeneous component.
///
/// Words containing `xx` or `yyy` span the monomial part of the ideal, so
/// the computation runs on the remaining words; the ideal component of
/// length `L` is then spanned by the reduced expansions of `u (x+y)^k v`.
pub fn brute_force_local_dims(t: DynkinType, up_to_length: usize) -> Vec<usize> {
    let k = t.local_exponent();
    let mut dims = Vec::new();
    for len in 0..=up_to_length {
        let words = reduced_words(len);
        let index: FxHashMap<Vec<usize>, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let mut rows = Vec::new();
        if len >= k {
            for ul in 0..=len - k {
                for u in reduced_words(ul) {
                    for v in reduced_words(len - k - ul) {
                        let mut row: BTreeMap<usize, Scalar> = BTreeMap::new();
                        for mask in 0..(1u32 << k) {
                            let mut w = u.clone();
                            w.extend((0..k).map(|i| if mask >> i & 1 == 0 { X } else { Y }));
                            w.extend(v.iter().copied());
                            if let Some(&col) = index.get(&w) {
                                *row.entry(col).or_insert_with(Scalar::zero) += Scalar::one();
                            }
                        }
                        if !row.is_empty() {
                            rows.push(row);
                        }
                    }
                }
            }
        }
        dims.push(words.len() - rank(rows));
    }
    while dims.len() > 1 && *dims.last().unwrap() == 0 {
        dims.pop();
    }
    dims
}

/// Paths of a quiver of a given length from `s`, as arrow sequences.
fn paths_from(q: &BoundQuiver, s: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![(s, Vec::new())];
    for _ in 0..len {
        let mut next = Vec::new();
        for (v, p) in &out {
            for a in 0..q.arrows.len() {
                if q.source(a) == *v {
                    let mut np = p.clone();
                    np.push(a);
                    next.push((q.target(a), np));
                }
            }
        }
        out = next;
    }
    out.into_iter().map(|(_, p)| p).collect()
}

/// Matrix of `dim e_i P(E6) e_j` from the free path algebra by exact
/// elimination, truncated at path length 10. Restricted to E6.
pub fn brute_force_path_dims(t: DynkinType) -> Result<Vec<Vec<usize>>, Error> {
    if t != DynkinType::E6 {
        return Err(Error::Invalid("oracle restricted to E6".into()));
    }
    let q = preprojective(t);
    let n = q.num_vertices;
    let maxlen = t.max_path_len();
    let mut m = vec![vec![0usize; n]; n];
    for (s, row_of_s) in m.iter_mut().enumerate() {
        for len in 0..=maxlen + 1 {
            let paths = paths_from(&q, s, len);
            let mut by_target: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
            for p in paths {
                let tgt = p.last().map_or(s, |&a| q.target(a));
                by_target.entry(tgt).or_default().push(p);
            }
            for (tgt, ps) in by_target {
                let index: FxHashMap<&[usize], usize> = ps.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
                let mut rows = Vec::new();
                for p in &ps {
                    // Every placement u ρ v where ρ starts at position pos.
                    for pos in 0..len.saturating_sub(1) {
                        let v = q.source(p[pos]);
                        let rel = q.relations.iter().find(|r| r.vertex == v).expect("one relation per vertex");
                        // Each placement u ρ v is generated once, from u t_0 v.
                        if rel.terms.first().map(|(w, _)| (w.letter(0), w.letter(1))) != Some((p[pos], p[pos + 1])) {
                            continue;
                        }
                        let mut row: BTreeMap<usize, Scalar> = BTreeMap::new();
                        for &(w, c) in &rel.terms {
                            let mut r = p.clone();
                            r[pos] = w.letter(0);
                            r[pos + 1] = w.letter(1);
                            let col = index[r.as_slice()];
                            *row.entry(col).or_insert_with(Scalar::zero) += int(c);
                        }
                        row.retain(|_, c| !c.is_zero());
                        if !row.is_empty() {
                            rows.push(row);
                        }
                    }
                }
                let d = ps.len() - rank(rows);
                if len > maxlen && d > 0 {
                    return Err(Error::Invalid(format!("paths of length {len} survive")));
                }
                row_of_s[tgt] += d;
            }
        }
    }
    Ok(m)
}

// ------------------------------------------------------------ deformations

/// Coefficients `theta[1..]` of an admissible deformation.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericDeformation {
    pub values: Vec<Scalar>,
}

impl NumericDeformation {
    pub fn get(&self, i: usize) -> &Scalar {
        &self.values[i - 1]
    }

    pub fn lookup(&self, v: Var) -> Option<Scalar> {
        v.as_theta().and_then(|i| self.values.get(i.wrapping_sub(1))).cloned()
    }
}

/// Completes free theta values to a full admissible assignment using the
/// substitutions. `free_values` must cover exactly the free thetas.
pub fn make_numeric_deformation(lb: &LocalBasis, subst: &SubstitutionSet, free_values: &BTreeMap<usize, Scalar>) -> Result<NumericDeformation, Error> {
    let free = free_thetas(lb, subst);
    for &i in &free {
        if !free_values.contains_key(&i) {
            return Err(Error::MissingVariable(format!("theta[{i}]")));
        }
    }
    if let Some(&i) = free_values.keys().find(|i| !free.contains(i)) {
        return Err(Error::Invalid(format!("theta[{i}] is not free")));
    }
    let mut values = vec![Scalar::zero(); lb.num_thetas()];
    for (&i, v) in free_values {
        values[i - 1] = v.clone();
    }
    for (target, rhs) in subst.iter() {
        let v = rhs.evaluate(&|u| u.as_theta().and_then(|i| free_values.get(&i).cloned()))?;
        values[target.as_theta().expect("theta target") - 1] = v;
    }
    Ok(NumericDeformation { values })
}

/// Draws a rational with numerator in [-99, 99] and denominator in {1, 2, 4}.
pub fn sample_rational(rng: &mut impl Rng) -> Scalar {
    let n: i64 = rng.gen_range(-99..=99);
    let d = [1i64, 2, 4][rng.gen_range(0..3)];
    ratio(n, d)
}

/// Random values for the free thetas.
pub fn sample_free_values(lb: &LocalBasis, subst: &SubstitutionSet, rng: &mut impl Rng) -> BTreeMap<usize, Scalar> {
    free_thetas(lb, subst).into_iter().map(|i| (i, sample_rational(rng))).collect()
}

/// The rng used for sample `index` under `seed`; samples are independent.
pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index as u64);
    r
}

// ------------------------------------------------------------ solutions

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    Symbolic,
    Numeric { samples: usize, seed: u64 },
}

/// A nonzero residual.
#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub vertex: usize,
    /// Position of the equation within its vertex.
    pub equation: usize,
    /// Name of the basis path the equation belongs to.
    pub path: String,
    /// Sample index; `None` in symbolic mode.
    pub sample: Option<usize>,
    pub residual: String,
}

/// Outcome of [`verify_solution`].
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub equations: usize,
    pub samples: usize,
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            if self.samples == 0 {
                return write!(f, "OK: {}-equation system satisfied symbolically", self.equations);
            }
            return write!(f, "OK: {}-equation system satisfied at {} samples", self.equations, self.samples);
        }
        writeln!(f, "FAILED: {} nonzero residuals", self.failures.len())?;
        for x in &self.failures {
            let sample = x.sample.map_or("symbolic".to_string(), |s| format!("sample {s}"));
            writeln!(f, "  vertex {} equation {} [{}] {}: {}", x.vertex, x.equation, x.path, sample, x.residual)?;
        }
        Ok(())
    }
}

fn check_coverage(system: &EquationSystem, sol: &SolutionAssignment) -> Result<(), Error> {
    for v in &system.vertices {
        for (_, p) in &v.equations {
            for var in p.vars() {
                if let Some(s) = var.as_alpha() {
                    if sol.get(s).is_none() {
                        return Err(Error::MissingVariable(var.to_string()));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Checks that `sol`, together with `subst`, solves every equation.
///
/// Numeric mode draws random free thetas and evaluates exactly; any nonzero
/// residual is a definitive failure.
pub fn verify_solution(
    pb: &PathBasis,
    lb: &LocalBasis,
    system: &EquationSystem,
    sol: &SolutionAssignment,
    subst: &SubstitutionSet,
    mode: VerifyMode,
) -> Result<VerifyReport, Error> {
    check_coverage(system, sol)?;
    let equations = system.num_equations();
    let flat: Vec<(usize, usize, u32, &Poly)> = system
        .vertices
        .iter()
        .flat_map(|v| v.equations.iter().enumerate().map(move |(i, (b, p))| (v.vertex, i, *b, p)))
        .collect();
    match mode {
        VerifyMode::Symbolic => {
            let failures = flat
                .par_iter()
                .filter_map(|&(vertex, equation, b, p)| {
                    let r = p.substitute(&|v| v.as_alpha().and_then(|s| sol.get(s).cloned())).apply_substitutions(subst);
                    (!r.is_zero()).then(|| Failure { vertex, equation, path: pb.name(b), sample: None, residual: r.to_string() })
                })
                .collect();
            Ok(VerifyReport { equations, samples: 0, failures })
        }
        VerifyMode::Numeric { samples, seed } => {
            let per_sample: Vec<Result<Vec<Failure>, Error>> = (0..samples)
                .into_par_iter()
                .map(|s| {
                    let mut rng = sample_rng(seed, s);
                    let theta = make_numeric_deformation(lb, subst, &sample_free_values(lb, subst, &mut rng))?;
                    let alpha: BTreeMap<(usize, usize), Scalar> = sol
                        .values
                        .iter()
                        .map(|(&slot, p)| p.evaluate(&|v| theta.lookup(v)).map(|x| (slot, x)))
                        .collect::<Result<_, _>>()?;
                    let value = |v: Var| match v.as_alpha() {
                        Some(s) => alpha.get(&s).cloned(),
                        None => theta.lookup(v),
                    };
                    let mut out = Vec::new();
                    for &(vertex, equation, b, p) in &flat {
                        let r = p.evaluate(&value)?;
                        if !r.is_zero() {
                            out.push(Failure { vertex, equation, path: pb.name(b), sample: Some(s), residual: r.to_string() });
                        }
                    }
                    Ok(out)
                })
                .collect();
            let mut failures = Vec::new();
            for r in per_sample {
                failures.extend(r?);
            }
            Ok(VerifyReport { equations, samples, failures })
        }
    }
}

/// Outcome of perturbing one solution formula by `+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mutation {
    pub slot: (usize, usize),
    pub detected: bool,
}

/// Perturbs `count` randomly chosen formulas of `sol`, one at a time, and
/// checks that numeric verification rejects each perturbed solution.
pub fn mutation_check(
    pb: &PathBasis,
    lb: &LocalBasis,
    system: &EquationSystem,
    sol: &SolutionAssignment,
    subst: &SubstitutionSet,
    count: usize,
    seed: u64,
) -> Result<Vec<Mutation>, Error> {
    let mut slots: Vec<(usize, usize)> = sol.values.keys().copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rand::seq::SliceRandom::shuffle(slots.as_mut_slice(), &mut rng);
    slots.truncate(count);
    let mut out = Vec::new();
    for slot in slots {
        let mut m = sol.clone();
        let p = m.values.get_mut(&slot).expect("chosen from keys");
        *p = p.add(&Poly::one());
        let r = verify_solution(pb, lb, system, &m, subst, VerifyMode::Numeric { samples: 2, seed })?;
        out.push(Mutation { slot, detected: !r.ok() });
    }
    Ok(out)
}

// ------------------------------------------------------------ homomorphisms

/// Arrow images with rational coefficients for a solution at a deformation.
pub fn instantiate_homomorphism(pb: &PathBasis, form: &HomomorphismForm, sol: &SolutionAssignment, f: &NumericDeformation) -> Result<ArrowMap<Scalar>, Error> {
    let mut values: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
    for s in form.all_slots() {
        let v = match form.pins.get(s) {
            Some(c) => c.clone(),
            None => match sol.get(s) {
                Some(p) => p.evaluate(&|v| f.lookup(v))?,
                None => return Err(Error::MissingVariable(Var::alpha(s.0, s.1).to_string())),
            },
        };
        values.insert(s, v);
    }
    Ok(ArrowMap::from_form(pb, form, &|s| values[&s].clone()))
}

/// Images of all relations of `P^f` under `phi`; zero for a homomorphism.
pub fn relation_defects(pb: &PathBasis, lb: &LocalBasis, phi: &ArrowMap<Scalar>, f: &NumericDeformation) -> Result<Vec<Element<Scalar>>, Error> {
    let w: Vec<Element<Scalar>> = (0..phi.images.len()).map(|k| phi.correction(pb, k)).collect();
    relation_images(pb, lb, &w, &f.values)
}

/// Applies arrow images to elements of `P`, memoizing basis paths.
struct Apply<'a> {
    pb: &'a PathBasis,
    images: &'a [Element<Scalar>],
    memo: RefCell<FxHashMap<Word, Element<Scalar>>>,
}

impl Apply<'_> {
    fn word(&self, w: Word) -> Element<Scalar> {
        if let Some(v) = self.memo.borrow().get(&w) {
            return v.clone();
        }
        let v = if w.is_empty() {
            Element::basis(self.pb.vertex_id(w.source()), int(1))
        } else {
            let p = self.word(w.prefix());
            self.pb.multiply(&p, &self.images[w.last().unwrap()])
        };
        self.memo.borrow_mut().insert(w, v.clone());
        v
    }

    fn element(&self, e: &Element<Scalar>) -> Element<Scalar> {
        let mut out = Element::zero();
        for (&b, c) in &e.parts {
            out = out.add(&self.word(self.pb.word(b)).scale(c));
        }
        out
    }
}

/// `phi(e)` for an element of `P` written in basis paths.
pub fn apply_map(pb: &PathBasis, phi: &ArrowMap<Scalar>, e: &Element<Scalar>) -> Element<Scalar> {
    Apply { pb, images: &phi.images, memo: RefCell::new(FxHashMap::default()) }.element(e)
}

fn degree_part(pb: &PathBasis, e: &Element<Scalar>, d: usize) -> Element<Scalar> {
    let mut out = Element::zero();
    for (&b, c) in &e.parts {
        if pb.length(b) == d {
            out.add_term(b, c);
        }
    }
    out
}

/// Builds `psi` with `phi(psi(a_k)) = a_k` degree by degree: at stage `t`
/// the degree-`t` part of the defect `phi(psi(a_k)) - a_k` is subtracted.
pub fn invert_homomorphism(pb: &PathBasis, phi: &ArrowMap<Scalar>) -> Result<ArrowMap<Scalar>, Error> {
    let apply = Apply { pb, images: &phi.images, memo: RefCell::new(FxHashMap::default()) };
    let m = pb.dynkin.max_path_len();
    let mut images = Vec::with_capacity(phi.images.len());
    for k in 0..phi.images.len() {
        let ak = Element::basis(pb.arrow_id(k), int(1));
        let mut psi = ak.clone();
        for t in 1..=m + 1 {
            let defect = apply.element(&psi).add(&ak.scale_int(-1));
            if let Some((&b, _)) = defect.parts.iter().find(|(&b, _)| pb.length(b) < t) {
                return Err(Error::Invalid(format!(
                    "arrow {}: stage {t} defect has a term of degree {}",
                    pb.forest.quiver.arrow_names[k],
                    pb.length(b)
                )));
            }
            if defect.is_zero() {
                break;
            }
            psi = psi.add(&degree_part(pb, &defect, t).scale_int(-1));
        }
        images.push(psi);
    }
    Ok(ArrowMap { images })
}

// ------------------------------------------------------------ the deformed algebra

/// Normal forms in `P^f(E_n)` over the basis paths of `P(E_n)`.
///
/// The forest records how each word was resolved in `P`. Replaying a
/// relation placement in `P^f` adds `u f(ā0 a0, ā2 a2) v` whenever the
/// deformed relation was used; everything else is the same rewriting.
pub struct DeformedAlgebra<'a> {
    pb: &'a PathBasis,
    /// `f(ā0 a0, ā2 a2)` as words at the exceptional vertex.
    f_words: Vec<(Word, Scalar)>,
    memo: RefCell<FxHashMap<(Word, usize), Element<Scalar>>>,
    max_len: usize,
}

impl<'a> DeformedAlgebra<'a> {
    pub fn new(pb: &'a PathBasis, lb: &LocalBasis, f: &NumericDeformation) -> Result<DeformedAlgebra<'a>, Error> {
        if pb.forest.records.is_none() {
            return Err(Error::Invalid("deformed arithmetic needs forest records".into()));
        }
        let n = pb.n();
        let q = &pb.forest.quiver;
        let mut f_words = Vec::new();
        for (i, c) in f.values.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut w = Word::empty(EXCEPTIONAL);
            for l in lb.word(lb.theta_id(i + 1)).letters() {
                let pair = if l == X { [arrow_bar(n, 0), arrow(0)] } else { [arrow_bar(n, 2), arrow(2)] };
                for a in pair {
                    w = w.push(a);
                }
            }
            debug_assert!(q.is_path(w));
            f_words.push((w, c.clone()));
        }
        Ok(DeformedAlgebra { pb, f_words, memo: RefCell::new(FxHashMap::default()), max_len: pb.dynkin.max_path_len() })
    }

    /// Normal form of a path.
    pub fn word(&self, w: Word) -> Element<Scalar> {
        self.truncated(w, self.max_len)
    }

    /// Normal form with terms longer than `bound` dropped.
    ///
    /// Resolving through the deformed relation can lead back to the same
    /// word by way of longer words; the bound then shrinks by at least two,
    /// which makes the recursion finite.
    fn truncated(&self, w: Word, bound: usize) -> Element<Scalar> {
        if w.len() > bound {
            return Element::zero();
        }
        if let Some(id) = self.pb.id(w) {
            return Element::basis(id, int(1));
        }
        if let Some(v) = self.memo.borrow().get(&(w, bound)) {
            return v.clone();
        }
        let v = self.resolve(w, bound);
        self.memo.borrow_mut().insert((w, bound), v.clone());
        v
    }

    fn resolve(&self, w: Word, bound: usize) -> Element<Scalar> {
        use crate::forest::How;
        let q = &self.pb.forest.quiver;
        let records = self.pb.forest.records.as_ref().expect("checked in new");
        match records.get(&w).map(|r| r.how) {
            // The prefix is zero in P: multiply its normal form in P^f.
            None => {
                let p = self.truncated(w.prefix(), bound - 1);
                self.right_letter(&p, w.last().unwrap(), bound)
            }
            Some(How::Basis) => unreachable!("basis words return early"),
            Some(How::SuffixZero) => {
                let first = w.letter(0);
                let s = self.truncated(w.suffix(q.target(first)), bound - 1);
                let mut out = Element::zero();
                for (&b, c) in &s.parts {
                    let word = Word::from_letters(w.source(), &[first]).concat(self.pb.word(b));
                    out = out.add(&self.truncated(word, bound).scale(c));
                }
                out
            }
            Some(How::Relation { rel, term, pos }) => {
                let rel = &q.relations[rel as usize];
                let pos = pos as usize;
                let cj = rel.terms[term as usize].1;
                let letters: Vec<usize> = w.letters().collect();
                let l = rel.terms[term as usize].0.len();
                let u = Word::from_letters(w.source(), &letters[..pos]);
                let v_letters = &letters[pos + l..];
                let place = |mid: Word| {
                    let mut x = u.concat(mid);
                    for &a in v_letters {
                        x = x.push(a);
                    }
                    x
                };
                let mut out = Element::zero();
                for (t, &(tw, c)) in rel.terms.iter().enumerate() {
                    if t != term as usize {
                        out = out.add(&self.truncated(place(tw), bound).scale_int(c));
                    }
                }
                if rel.deformed {
                    for (fw, c) in &self.f_words {
                        if u.len() + fw.len() + v_letters.len() <= bound {
                            out = out.add(&self.truncated(place(*fw), bound).scale(c));
                        }
                    }
                }
                out.scale_int(-cj)
            }
        }
    }

    fn right_letter(&self, e: &Element<Scalar>, a: usize, bound: usize) -> Element<Scalar> {
        let mut out = Element::zero();
        for (&b, c) in &e.parts {
            out = out.add(&self.truncated(self.pb.word(b).push(a), bound).scale(c));
        }
        out
    }

    /// Product in `P^f`.
    pub fn multiply(&self, x: &Element<Scalar>, y: &Element<Scalar>) -> Element<Scalar> {
        let mut out = Element::zero();
        for (&b1, c1) in &x.parts {
            for (&b2, c2) in &y.parts {
                let (w1, w2) = (self.pb.word(b1), self.pb.word(b2));
                if self.pb.target(b1) != w2.source() || w1.len() + w2.len() > self.max_len {
                    continue;
                }
                out = out.add(&self.word(w1.concat(w2)).scale(&(c1 * c2)));
            }
        }
        out
    }

    /// `psi(e)` computed in `P^f`, for `e` in `P`.
    pub fn apply(&self, psi: &ArrowMap<Scalar>, e: &Element<Scalar>) -> Element<Scalar> {
        let mut memo: FxHashMap<Word, Element<Scalar>> = FxHashMap::default();
        let mut out = Element::zero();
        for (&b, c) in &e.parts {
            let v = self.apply_word(psi, &mut memo, self.pb.word(b));
            out = out.add(&v.scale(c));
        }
        out
    }

    fn apply_word(&self, psi: &ArrowMap<Scalar>, memo: &mut FxHashMap<Word, Element<Scalar>>, w: Word) -> Element<Scalar> {
        if let Some(v) = memo.get(&w) {
            return v.clone();
        }
        let v = if w.is_empty() {
            Element::basis(self.pb.vertex_id(w.source()), int(1))
        } else {
            let p = self.apply_word(psi, memo, w.prefix());
            self.multiply(&p, &psi.images[w.last().unwrap()])
        };
        memo.insert(w, v.clone());
        v
    }
}

/// Result of checking both compositions on arrows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundTrip {
    /// Arrows where `phi(psi(a)) != a` in `P`.
    pub phi_psi_failures: Vec<usize>,
    /// Arrows where `psi(phi(a)) != a` in `P^f`.
    pub psi_phi_failures: Vec<usize>,
}

impl RoundTrip {
    pub fn ok(&self) -> bool {
        self.phi_psi_failures.is_empty() && self.psi_phi_failures.is_empty()
    }
}

pub fn check_round_trip(pb: &PathBasis, lb: &LocalBasis, f: &NumericDeformation, phi: &ArrowMap<Scalar>, psi: &ArrowMap<Scalar>) -> Result<RoundTrip, Error> {
    with_deep_stack(|| round_trip(pb, lb, f, phi, psi))
}

/// Normal forms recurse through chains of relation placements; runs `f`
/// on a thread whose stack is large enough for E7.
fn with_deep_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| std::thread::Builder::new().stack_size(1 << 28).spawn_scoped(s, f).expect("spawn").join().expect("worker panicked"))
}

fn round_trip(pb: &PathBasis, lb: &LocalBasis, f: &NumericDeformation, phi: &ArrowMap<Scalar>, psi: &ArrowMap<Scalar>) -> Result<RoundTrip, Error> {
    let pf = DeformedAlgebra::new(pb, lb, f)?;
    let mut rt = RoundTrip { phi_psi_failures: Vec::new(), psi_phi_failures: Vec::new() };
    for k in 0..phi.images.len() {
        let ak = Element::basis(pb.arrow_id(k), int(1));
        if apply_map(pb, phi, &psi.images[k]) != ak {
            rt.phi_psi_failures.push(k);
        }
        if pf.apply(psi, &phi.images[k]) != ak {
            rt.psi_phi_failures.push(k);
        }
    }
    Ok(rt)
}

/// Relations of `P^f` evaluated by the normal form; all zero when the
/// rewriting is consistent.
pub fn deformed_relations_vanish(pb: &PathBasis, lb: &LocalBasis, f: &NumericDeformation) -> Result<bool, Error> {
    with_deep_stack(|| relations_vanish(pb, lb, f))
}

fn relations_vanish(pb: &PathBasis, lb: &LocalBasis, f: &NumericDeformation) -> Result<bool, Error> {
    let pf = DeformedAlgebra::new(pb, lb, f)?;
    let q = &pb.forest.quiver;
    let n = pb.n();
    for rel in &q.relations {
        let mut sum: Element<Scalar> = Element::zero();
        for &(w, c) in &rel.terms {
            sum = sum.add(&pf.word(w).scale_int(c));
        }
        if rel.deformed {
            let x = pf.word(q.word_from_arrows(&[arrow_bar(n, 0), arrow(0)]));
            let y = pf.word(q.word_from_arrows(&[arrow_bar(n, 2), arrow(2)]));
            let e3 = Element::basis(pb.vertex_id(EXCEPTIONAL), int(1));
            for (i, c) in f.values.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut v = e3.clone();
                for l in lb.word(lb.theta_id(i + 1)).letters() {
                    v = pf.multiply(&v, if l == X { &x } else { &y });
                }
                sum = sum.add(&v.scale(c));
            }
        }
        if !sum.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}
