//! General homomorphisms `P^f(E_n) -> P(E_n)` and the equations that make
//! them well defined.
//!
//! A homomorphism sends each arrow `a_k` to `a_k + w_k`, where `w_k` is a
//! combination of the basis paths `s(a_k) -> t(a_k)` of length at least two.
//! The coefficient of the `j`-th such path (counting from 1) is the variable
//! `alpha[k][j]`, unless the slot is pinned to a constant.

use crate::deform::Deformation;
use crate::localbasis::{LocalBasis, X};
use crate::pathbasis::PathBasis;
use crate::poly::{parse_poly, parse_var, Coeff, Element, Poly, Scalar, SubstitutionSet, Var};
use crate::quiver::{arrow, arrow_bar, ChooseStrategy, DynkinType, EXCEPTIONAL};
use crate::word::Word;
use crate::Error;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use std::collections::BTreeMap;
use std::fmt;

/// Slot `(arrow, j)` with `j` counted from 1.
pub type Slot = (usize, usize);

/// Parses lines `alpha[k][j] = <rhs>`, skipping blank lines and `#` comments.
fn parse_assignments<T>(text: &str, rhs: impl Fn(&str) -> Result<T, Error>) -> Result<BTreeMap<Slot, T>, Error> {
    let mut out = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let ctx = |e: Error| Error::Parse(format!("line {}: {e}", no + 1));
        let (lhs, r) = line.split_once('=').ok_or_else(|| Error::Parse(format!("line {}: missing '='", no + 1)))?;
        let slot = parse_var(lhs.trim())
            .map_err(ctx)?
            .as_alpha()
            .ok_or_else(|| Error::Parse(format!("line {}: left side must be alpha[k][j]", no + 1)))?;
        if slot.1 == 0 {
            return Err(Error::Parse(format!("line {}: slots count from 1", no + 1)));
        }
        let value = rhs(r.trim()).map_err(ctx)?;
        if out.insert(slot, value).is_some() {
            return Err(Error::Parse(format!("line {}: alpha[{}][{}] assigned twice", no + 1, slot.0, slot.1)));
        }
    }
    Ok(out)
}

/// Slots fixed to constants.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PinSet {
    pub pins: BTreeMap<Slot, Scalar>,
}

impl PinSet {
    pub fn new() -> PinSet {
        PinSet::default()
    }

    pub fn insert(&mut self, slot: Slot, value: Scalar) {
        self.pins.insert(slot, value);
    }

    pub fn get(&self, slot: Slot) -> Option<&Scalar> {
        self.pins.get(&slot)
    }

    pub fn len(&self) -> usize {
        self.pins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pins.is_empty()
    }

    /// Parses `alpha[k][j] = <rational>` lines.
    pub fn parse(text: &str) -> Result<PinSet, Error> {
        let pins = parse_assignments(text, |r| {
            parse_poly(r)?.as_constant().ok_or_else(|| Error::Parse(format!("pin value must be a constant: {r}")))
        })?;
        Ok(PinSet { pins })
    }
}

impl fmt::Display for PinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (&(k, j), v) in &self.pins {
            writeln!(f, "{} = {}", Var::alpha(k, j), v)?;
        }
        Ok(())
    }
}

/// Values of the slots as polynomials in the thetas.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolutionAssignment {
    pub values: BTreeMap<Slot, Poly>,
}

impl SolutionAssignment {
    /// Parses `alpha[k][j] = <polynomial in theta[i]>` lines.
    pub fn parse(text: &str) -> Result<SolutionAssignment, Error> {
        let values = parse_assignments(text, |r| {
            let p = parse_poly(r)?;
            if p.vars().iter().any(|v| v.as_alpha().is_some()) {
                return Err(Error::Parse(format!("solution values may only mention thetas: {r}")));
            }
            Ok(p)
        })?;
        Ok(SolutionAssignment { values })
    }

    pub fn get(&self, slot: Slot) -> Option<&Poly> {
        self.values.get(&slot)
    }
}

impl fmt::Display for SolutionAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (&(k, j), v) in &self.values {
            writeln!(f, "{} = {}", Var::alpha(k, j), v)?;
        }
        Ok(())
    }
}

/// Correction paths of every arrow together with the pins.
#[derive(Clone, Debug)]
pub struct HomomorphismForm {
    pub dynkin: DynkinType,
    pub strategy: ChooseStrategy,
    /// `slots[k][j - 1]` is the basis id of the path carrying `alpha[k][j]`.
    pub slots: Vec<Vec<u32>>,
    pub pins: PinSet,
}

impl HomomorphismForm {
    /// Every arrow gets the basis paths with its endpoints of length at least two.
    pub fn new(pb: &PathBasis, pins: PinSet) -> Result<HomomorphismForm, Error> {
        let q = &pb.forest.quiver;
        let slots: Vec<Vec<u32>> = q.arrows.iter().map(|&(s, t)| pb.rad_paths(2, s, t)).collect();
        for &(k, j) in pins.pins.keys() {
            if k >= slots.len() || j > slots[k].len() {
                return Err(Error::Invalid(format!("pinned slot alpha[{k}][{j}] does not exist")));
            }
        }
        Ok(HomomorphismForm { dynkin: pb.dynkin, strategy: pb.strategy, slots, pins })
    }

    pub fn num_arrows(&self) -> usize {
        self.slots.len()
    }

    pub fn slot_count(&self, k: usize) -> usize {
        self.slots[k].len()
    }

    /// All slots in (arrow, j) order.
    pub fn all_slots(&self) -> Vec<Slot> {
        (0..self.num_arrows()).flat_map(|k| (1..=self.slot_count(k)).map(move |j| (k, j))).collect()
    }

    /// Slots that are not pinned.
    pub fn variables(&self) -> Vec<Slot> {
        self.all_slots().into_iter().filter(|&s| self.pins.get(s).is_none()).collect()
    }

    /// The symbolic coefficient of a slot: its pin, or `alpha[k][j]`.
    pub fn coefficient(&self, slot: Slot) -> Poly {
        match self.pins.get(slot) {
            Some(c) => Poly::constant(c.clone()),
            None => Poly::alpha(slot.0, slot.1),
        }
    }

    /// `w_k` with the given slot coefficients.
    pub fn correction<C: Coeff>(&self, k: usize, coeff: &dyn Fn(Slot) -> C) -> Element<C> {
        let mut e = Element::zero();
        for (j, &b) in self.slots[k].iter().enumerate() {
            e.add_term(b, &coeff((k, j + 1)));
        }
        e
    }
}

/// Arrow images `a_k + w_k` over a coefficient ring.
#[derive(Clone, Debug, PartialEq)]
pub struct ArrowMap<C> {
    pub images: Vec<Element<C>>,
}

impl<C: Coeff> ArrowMap<C> {
    /// `a_k ↦ a_k + w_k` for the coefficients given by `coeff`.
    pub fn from_form(pb: &PathBasis, form: &HomomorphismForm, coeff: &dyn Fn(Slot) -> C) -> ArrowMap<C> {
        let images = (0..form.num_arrows())
            .map(|k| {
                let mut e = form.correction(k, coeff);
                e.add_term(pb.arrow_id(k), &C::unit());
                e
            })
            .collect();
        ArrowMap { images }
    }

    pub fn identity(pb: &PathBasis) -> ArrowMap<C> {
        let arrows = pb.forest.quiver.arrows.len();
        ArrowMap { images: (0..arrows).map(|k| Element::basis(pb.arrow_id(k), C::unit())).collect() }
    }

    /// The correction `image - a_k`.
    pub fn correction(&self, pb: &PathBasis, k: usize) -> Element<C> {
        let mut e = self.images[k].clone();
        e.add_term(pb.arrow_id(k), &C::unit().scale_int(-1));
        e
    }
}

/// `δ(k1, k2) = w_{k1} a_{k2} + a_{k1} w_{k2} + w_{k1} w_{k2}`.
pub fn delta<C: Coeff>(pb: &PathBasis, w: &[Element<C>], k1: usize, k2: usize) -> Result<Element<C>, Error> {
    let q = &pb.forest.quiver;
    if q.target(k1) != q.source(k2) {
        return Err(Error::Invalid(format!("arrows {} and {} do not compose", q.arrow_names[k1], q.arrow_names[k2])));
    }
    let a1 = Element::basis(pb.arrow_id(k1), C::unit());
    let a2 = Element::basis(pb.arrow_id(k2), C::unit());
    let mut d = pb.multiply(&w[k1], &a2);
    d = d.add(&pb.multiply(&a1, &w[k2]));
    d = d.add(&pb.multiply(&w[k1], &w[k2]));
    Ok(d)
}

/// Symbolic `δ(k1, k2)` for a form.
pub fn compute_delta(pb: &PathBasis, form: &HomomorphismForm, k1: usize, k2: usize) -> Result<Element<Poly>, Error> {
    let w: Vec<Element<Poly>> = (0..form.num_arrows()).map(|k| form.correction(k, &|s| form.coefficient(s))).collect();
    delta(pb, &w, k1, k2)
}

/// `f(X, Y)` for loops `X`, `Y` at the exceptional vertex: every basis word
/// of `R(E_n)` in `f` is evaluated letter by letter.
pub fn evaluate_f<C: Coeff>(pb: &PathBasis, lb: &LocalBasis, f: &[C], x: &Element<C>, y: &Element<C>) -> Element<C> {
    let mut memo: FxHashMap<Word, Element<C>> = FxHashMap::default();
    memo.insert(Word::empty(0), Element::basis(pb.vertex_id(EXCEPTIONAL), C::unit()));
    let mut out = Element::zero();
    for (i, c) in f.iter().enumerate() {
        if c.is_nil() {
            continue;
        }
        let w = lb.word(lb.theta_id(i + 1));
        let v = word_value(pb, &mut memo, w, x, y);
        out = out.add(&v.scale(c));
    }
    out
}

fn word_value<C: Coeff>(pb: &PathBasis, memo: &mut FxHashMap<Word, Element<C>>, w: Word, x: &Element<C>, y: &Element<C>) -> Element<C> {
    if let Some(v) = memo.get(&w) {
        return v.clone();
    }
    let p = word_value(pb, memo, w.prefix(), x, y);
    let letter = if w.last() == Some(X) { x } else { y };
    let v = pb.multiply(&p, letter);
    memo.insert(w, v.clone());
    v
}

/// For each vertex, the image of its relation under `a_k ↦ a_k + w_k`,
/// with `f` entering the relation at the exceptional vertex. All entries
/// vanish exactly when the map is a homomorphism `P^f -> P`.
pub fn relation_images<C: Coeff>(pb: &PathBasis, lb: &LocalBasis, w: &[Element<C>], f: &[C]) -> Result<Vec<Element<C>>, Error> {
    let q = &pb.forest.quiver;
    let n = pb.n();
    let mut by_vertex: Vec<Option<usize>> = vec![None; q.num_vertices];
    for (r, rel) in q.relations.iter().enumerate() {
        by_vertex[rel.vertex] = Some(r);
    }
    (0..q.num_vertices)
        .into_par_iter()
        .map(|v| {
            let Some(r) = by_vertex[v] else { return Ok(Element::zero()) };
            let rel = &q.relations[r];
            let mut sum = Element::zero();
            for &(t, c) in &rel.terms {
                sum = sum.add(&delta(pb, w, t.letter(0), t.letter(1))?.scale_int(c));
            }
            if rel.deformed {
                // The relation of P^f carries f(ā0 a0, ā2 a2); under the map both
                // loops pick up their δ defects.
                let loop_of = |k1: usize, k2: usize| -> Result<Element<C>, Error> {
                    let path = Element::from_ints(&pb.present(q.word_from_arrows(&[k1, k2])), &C::unit());
                    Ok(delta(pb, w, k1, k2)?.add(&path))
                };
                let x = loop_of(arrow_bar(n, 0), arrow(0))?;
                let y = loop_of(arrow_bar(n, 2), arrow(2))?;
                sum = sum.add(&evaluate_f(pb, lb, f, &x, &y));
            }
            Ok(sum)
        })
        .collect()
}

/// Scalar equations of one vertex: one coefficient per rad³ basis loop.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexEquations {
    pub vertex: usize,
    /// `(basis path id, polynomial)`; zero polynomials are kept.
    pub equations: Vec<(u32, Poly)>,
}

/// Equations for the slots of a form making it a homomorphism `P^f -> P`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquationSystem {
    pub dynkin: DynkinType,
    pub strategy: ChooseStrategy,
    pub pins: usize,
    pub substituted: bool,
    pub vertices: Vec<VertexEquations>,
}

impl EquationSystem {
    pub fn num_equations(&self) -> usize {
        self.vertices.iter().map(|v| v.equations.len()).sum()
    }

    pub fn num_nontrivial(&self) -> usize {
        self.vertices.iter().flat_map(|v| &v.equations).filter(|(_, p)| !p.is_zero()).count()
    }

    /// Total monomial count per vertex.
    pub fn coefficient_counts(&self) -> Vec<usize> {
        self.vertices.iter().map(|v| v.equations.iter().map(|(_, p)| p.num_terms()).sum()).collect()
    }
}

/// Builds the equation system of a form for a deformation `f`. With `subst`
/// the admissibility substitutions are applied to every equation.
pub fn build_equation_system(
    pb: &PathBasis,
    lb: &LocalBasis,
    form: &HomomorphismForm,
    f: &Deformation,
    subst: Option<&SubstitutionSet>,
) -> Result<EquationSystem, Error> {
    let w: Vec<Element<Poly>> = (0..form.num_arrows()).map(|k| form.correction(k, &|s| form.coefficient(s))).collect();
    let images = relation_images(pb, lb, &w, &f.coeffs)?;
    let mut vertices = Vec::with_capacity(images.len());
    for (v, img) in images.into_iter().enumerate() {
        let tags = pb.rad_paths(3, v, v);
        if let Some((&b, _)) = img.parts.iter().find(|(b, _)| !tags.contains(b)) {
            return Err(Error::Invalid(format!("relation image at vertex {v} has a term outside rad^3: {}", pb.name(b))));
        }
        let equations = tags
            .into_par_iter()
            .map(|b| {
                let p = img.get(b);
                let p = match subst {
                    Some(s) => p.apply_substitutions(s),
                    None => p,
                };
                (b, p)
            })
            .collect();
        vertices.push(VertexEquations { vertex: v, equations });
    }
    Ok(EquationSystem { dynkin: pb.dynkin, strategy: pb.strategy, pins: form.pins.len(), substituted: subst.is_some(), vertices })
}

/// Per-vertex monomial counts of the unpinned, unsubstituted system.
pub fn coefficient_counts(pb: &PathBasis, lb: &LocalBasis) -> Result<Vec<usize>, Error> {
    let form = HomomorphismForm::new(pb, PinSet::new())?;
    let sys = build_equation_system(pb, lb, &form, &Deformation::symbolic(lb), None)?;
    Ok(sys.coefficient_counts())
}
