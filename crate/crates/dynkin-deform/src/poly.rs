//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Variables are `theta[i]` (coefficients of a deformation) and
//! `alpha[k][j]` (coefficients of a homomorphism). Monomials are ordered by
//! total degree, then lexicographically on the sorted variable sequence, so
//! `theta[1] < theta[2]` and `theta[1]^2 < theta[1]*theta[3] < theta[3]^2`.

use crate::Error;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rustc_hash::FxHashMap;
use smallvec::SmallVec;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Exact rational scalar.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

const ALPHA_FLAG: u32 = 0x8000_0000;

/// A variable: `theta[i]` or `alpha[k][j]`. Thetas sort before alphas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u32);

impl Var {
    pub fn theta(i: usize) -> Var {
        assert!(i < ALPHA_FLAG as usize);
        Var(i as u32)
    }

    pub fn alpha(k: usize, j: usize) -> Var {
        assert!(k < 0x8000 && j < 0x1_0000);
        Var(ALPHA_FLAG | (k as u32) << 16 | j as u32)
    }

    pub fn as_theta(self) -> Option<usize> {
        (self.0 & ALPHA_FLAG == 0).then_some(self.0 as usize)
    }

    pub fn as_alpha(self) -> Option<(usize, usize)> {
        (self.0 & ALPHA_FLAG != 0).then_some((((self.0 >> 16) & 0x7fff) as usize, (self.0 & 0xffff) as usize))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_alpha() {
            Some((k, j)) => write!(f, "alpha[{k}][{j}]"),
            None => write!(f, "theta[{}]", self.0),
        }
    }
}

/// Power product of variables, `(var, exponent)` sorted by variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub SmallVec<[(Var, u32); 4]>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(SmallVec::new())
    }

    pub fn var(v: Var) -> Monomial {
        Monomial(SmallVec::from_slice(&[(v, 1)]))
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|e| e.1).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0.iter().find(|e| e.0 == v).map_or(0, |e| e.1)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// The monomial with `v` removed.
    pub fn without(&self, v: Var) -> Monomial {
        Monomial(self.0.iter().copied().filter(|e| e.0 != v).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self.degree().cmp(&other.degree());
        if d.is_ne() {
            return d;
        }
        // Lexicographic comparison of the expanded variable sequences.
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        let (mut ra, mut rb) = (a.first().map_or(0, |e| e.1), b.first().map_or(0, |e| e.1));
        while i < a.len() && j < b.len() {
            let c = a[i].0.cmp(&b[j].0);
            if c.is_ne() {
                return c;
            }
            let m = ra.min(rb);
            ra -= m;
            rb -= m;
            if ra == 0 {
                i += 1;
                ra = a.get(i).map_or(0, |e| e.1);
            }
            if rb == 0 {
                j += 1;
                rb = b.get(j).map_or(0, |e| e.1);
            }
        }
        (a.len() - i).cmp(&(b.len() - j))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, &(v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A polynomial in canonical form: sorted terms, no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<(Monomial, Scalar)>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(Monomial::one(), c)] }
        }
    }

    pub fn var(v: Var) -> Poly {
        Poly { terms: vec![(Monomial::var(v), Scalar::one())] }
    }

    pub fn theta(i: usize) -> Poly {
        Poly::var(Var::theta(i))
    }

    pub fn alpha(k: usize, j: usize) -> Poly {
        Poly::var(Var::alpha(k, j))
    }

    /// Builds a polynomial from arbitrary terms, merging and sorting.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Poly {
        let mut acc = PolyAcc::default();
        for (m, c) in terms {
            acc.add_term(m, c);
        }
        acc.finish()
    }

    pub fn terms(&self) -> &[(Monomial, Scalar)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, Scalar)> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Constant value, if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.as_slice() {
            [] => Some(Scalar::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    /// Sorted list of variables that occur.
    pub fn vars(&self) -> Vec<Var> {
        let mut v: Vec<Var> = self.terms.iter().flat_map(|(m, _)| m.0.iter().map(|e| e.0)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn mentions(&self, v: Var) -> bool {
        self.terms.iter().any(|(m, _)| m.exponent(v) > 0)
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect() }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Poly { terms: out }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut acc = PolyAcc::default();
        acc.add_product(self, other, &Scalar::one());
        acc.finish()
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut r = Poly::one();
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Exact evaluation; `value` must know every variable.
    pub fn evaluate(&self, value: &dyn Fn(Var) -> Option<Scalar>) -> Result<Scalar, Error> {
        let mut cache: FxHashMap<Var, Scalar> = FxHashMap::default();
        let mut total = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in &m.0 {
                let x = match cache.get(&v) {
                    Some(x) => x.clone(),
                    None => {
                        let x = value(v).ok_or_else(|| Error::MissingVariable(v.to_string()))?;
                        cache.insert(v, x.clone());
                        x
                    }
                };
                t *= num_traits::pow(x, e as usize);
            }
            total += t;
        }
        Ok(total)
    }

    /// Replaces every variable for which `map` has an entry.
    pub fn substitute(&self, map: &dyn Fn(Var) -> Option<Poly>) -> Poly {
        let mut powers: FxHashMap<(Var, u32), Poly> = FxHashMap::default();
        let mut images: FxHashMap<Var, Option<Poly>> = FxHashMap::default();
        let mut acc = PolyAcc::default();
        for (m, c) in &self.terms {
            let mut kept = Monomial::one();
            let mut factor = Poly::one();
            for &(v, e) in &m.0 {
                let img = images.entry(v).or_insert_with(|| map(v)).clone();
                match img {
                    None => kept = kept.mul(&Monomial(SmallVec::from_slice(&[(v, e)]))),
                    Some(p) => {
                        let pe = powers.entry((v, e)).or_insert_with(|| p.pow(e)).clone();
                        factor = factor.mul(&pe);
                    }
                }
            }
            for (fm, fc) in factor.terms {
                acc.add_term(fm.mul(&kept), fc * c);
            }
        }
        acc.finish()
    }

    /// Partial evaluation at constants.
    pub fn substitute_constants(&self, map: &dyn Fn(Var) -> Option<Scalar>) -> Poly {
        self.substitute(&|v| map(v).map(Poly::constant))
    }

    pub fn apply_substitutions(&self, s: &SubstitutionSet) -> Poly {
        if s.is_empty() || !self.vars().iter().any(|v| s.get(*v).is_some()) {
            return self.clone();
        }
        self.substitute(&|v| s.get(v).cloned())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

/// Hash-based accumulator for sums of many terms.
#[derive(Default, Clone, Debug)]
pub struct PolyAcc {
    map: FxHashMap<Monomial, Scalar>,
}

impl PolyAcc {
    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.map.get_mut(&m) {
            Some(x) => *x += c,
            None => {
                self.map.insert(m, c);
            }
        }
    }

    pub fn add_poly(&mut self, p: &Poly, scale: &Scalar) {
        for (m, c) in &p.terms {
            self.add_term(m.clone(), c * scale);
        }
    }

    /// Adds `scale · p · q`.
    pub fn add_product(&mut self, p: &Poly, q: &Poly, scale: &Scalar) {
        for (m1, c1) in &p.terms {
            let c1s = c1 * scale;
            for (m2, c2) in &q.terms {
                self.add_term(m1.mul(m2), &c1s * c2);
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.map.values().all(|c| c.is_zero())
    }

    pub fn finish(self) -> Poly {
        let mut terms: Vec<(Monomial, Scalar)> = self.map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Poly { terms }
    }
}

/// A triangular family `target = rhs`; no rhs mentions any target.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubstitutionSet {
    subs: Vec<(Var, Poly)>,
}

impl SubstitutionSet {
    pub fn new() -> SubstitutionSet {
        SubstitutionSet::default()
    }

    pub fn is_empty(&self) -> bool {
        self.subs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.subs.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Var, Poly)> {
        self.subs.iter()
    }

    pub fn get(&self, v: Var) -> Option<&Poly> {
        self.subs.iter().find(|s| s.0 == v).map(|s| &s.1)
    }

    pub fn targets(&self) -> Vec<Var> {
        self.subs.iter().map(|s| s.0).collect()
    }

    /// Adds `target = rhs`, rewriting earlier right-hand sides so the set
    /// stays triangular. `rhs` must not mention existing targets or `target`.
    pub fn push(&mut self, target: Var, rhs: Poly) -> Result<(), Error> {
        if rhs.mentions(target) || self.subs.iter().any(|(t, _)| rhs.mentions(*t) || *t == target) {
            return Err(Error::NotTriangular(target.to_string()));
        }
        for (_, r) in self.subs.iter_mut() {
            if r.mentions(target) {
                *r = r.substitute(&|v| (v == target).then(|| rhs.clone()));
            }
        }
        self.subs.push((target, rhs));
        Ok(())
    }

    pub fn is_triangular(&self) -> bool {
        self.subs.iter().all(|(_, r)| self.subs.iter().all(|(t, _)| !r.mentions(*t)))
    }
}

/// Coefficient ring of algebra elements.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn nil() -> Self;
    fn unit() -> Self;
    fn is_nil(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn scale_int(&self, c: i64) -> Self;
    /// Product of two elements through a structure table.
    fn mul_elements(a: &Element<Self>, b: &Element<Self>, table: &ProductTable<'_>) -> Element<Self> {
        a.mul_with(b, table)
    }
}

impl Coeff for Scalar {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        int(1)
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn scale_int(&self, c: i64) -> Self {
        self * int(c)
    }
}

impl Coeff for Poly {
    fn nil() -> Self {
        Poly::zero()
    }
    fn unit() -> Self {
        Poly::one()
    }
    fn is_nil(&self) -> bool {
        Poly::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        Poly::add(self, other)
    }
    fn times(&self, other: &Self) -> Self {
        Poly::mul(self, other)
    }
    fn scale_int(&self, c: i64) -> Self {
        self.scale(&int(c))
    }
    fn mul_elements(a: &Element<Self>, b: &Element<Self>, table: &ProductTable<'_>) -> Element<Self> {
        a.mul_poly_with(b, table)
    }
}

/// Element of an algebra with a fixed basis: sparse map basis id → coefficient.
/// Structure constants: the product of two basis ids, or `None` when it is zero.
pub type ProductTable<'a> = dyn Fn(u32, u32) -> Option<std::sync::Arc<Vec<(u32, i64)>>> + 'a;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Element<C> {
    pub parts: BTreeMap<u32, C>,
}

impl<C: Coeff> Element<C> {
    pub fn zero() -> Self {
        Element { parts: BTreeMap::new() }
    }

    pub fn basis(b: u32, c: C) -> Self {
        let mut e = Self::zero();
        e.add_term(b, &c);
        e
    }

    pub fn from_ints(v: &[(u32, i64)], one: &C) -> Self {
        let mut e = Self::zero();
        for &(b, c) in v {
            e.add_term(b, &one.scale_int(c));
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn get(&self, b: u32) -> C {
        self.parts.get(&b).cloned().unwrap_or_else(C::nil)
    }

    pub fn add_term(&mut self, b: u32, c: &C) {
        if c.is_nil() {
            return;
        }
        let sum = match self.parts.get(&b) {
            Some(x) => x.plus(c),
            None => c.clone(),
        };
        if sum.is_nil() {
            self.parts.remove(&b);
        } else {
            self.parts.insert(b, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (&b, c) in &other.parts {
            r.add_term(b, c);
        }
        r
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let mut r = Self::zero();
        for (&b, c) in &self.parts {
            r.add_term(b, &c.scale_int(k));
        }
        r
    }

    pub fn scale(&self, k: &C) -> Self {
        let mut r = Self::zero();
        for (&b, c) in &self.parts {
            r.add_term(b, &c.times(k));
        }
        r
    }

    /// Product through a structure table giving `b1 · b2` on basis ids.
    pub fn mul_with(&self, other: &Self, table: &ProductTable<'_>) -> Self {
        let mut r = Self::zero();
        for (&b1, c1) in &self.parts {
            for (&b2, c2) in &other.parts {
                let Some(prod) = table(b1, b2) else { continue };
                if prod.is_empty() {
                    continue;
                }
                let c = c1.times(c2);
                for &(b, k) in prod.iter() {
                    r.add_term(b, &c.scale_int(k));
                }
            }
        }
        r
    }
}

impl Element<Poly> {
    /// Product with hash accumulation per basis id; faster for large polynomials.
    pub fn mul_poly_with(&self, other: &Self, table: &ProductTable<'_>) -> Self {
        let mut acc: BTreeMap<u32, PolyAcc> = BTreeMap::new();
        for (&b1, c1) in &self.parts {
            for (&b2, c2) in &other.parts {
                let Some(prod) = table(b1, b2) else { continue };
                if prod.is_empty() {
                    continue;
                }
                let c = c1.times(c2);
                for &(b, k) in prod.iter() {
                    acc.entry(b).or_default().add_poly(&c, &int(k));
                }
            }
        }
        let mut r = Self::zero();
        for (b, a) in acc {
            let p = a.finish();
            if !p.is_zero() {
                r.parts.insert(b, p);
            }
        }
        r
    }

    pub fn map_coeffs(&self, f: &dyn Fn(&Poly) -> Poly) -> Self {
        let mut r = Self::zero();
        for (&b, c) in &self.parts {
            r.add_term(b, &f(c));
        }
        r
    }

    pub fn num_terms(&self) -> usize {
        self.parts.values().map(|p| p.num_terms()).sum()
    }
}

// ---------------------------------------------------------------- parsing

/// Parses the canonical text form, e.g. `3/2*theta[8] - alpha[0][1]^2`.
/// Accepts `+ - * / ^`, parentheses, integers and the two variable kinds;
/// division only by constants.
pub fn parse_poly(s: &str) -> Result<Poly, Error> {
    let mut p = Parser { s: s.as_bytes(), i: 0 };
    let r = p.expr()?;
    p.ws();
    if p.i != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(r)
}

/// Parses a variable name such as `alpha[3][12]`.
pub fn parse_var(s: &str) -> Result<Var, Error> {
    let mut p = Parser { s: s.trim().as_bytes(), i: 0 };
    let v = p.var()?;
    if p.i != p.s.len() {
        return Err(p.err("trailing input after variable"));
    }
    Ok(v)
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        let at = String::from_utf8_lossy(&self.s[self.i.min(self.s.len())..]);
        let at: String = at.chars().take(24).collect();
        Error::Parse(format!("{what} at offset {} near `{at}`", self.i))
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Poly, Error> {
        let mut acc = PolyAcc::default();
        let first = self.term()?;
        acc.add_poly(&first, &Scalar::one());
        loop {
            if self.eat(b'+') {
                acc.add_poly(&self.term()?, &Scalar::one());
            } else if self.eat(b'-') {
                acc.add_poly(&self.term()?, &-Scalar::one());
            } else {
                return Ok(acc.finish());
            }
        }
    }

    fn term(&mut self) -> Result<Poly, Error> {
        let mut r = self.unary()?;
        loop {
            if self.eat(b'*') {
                r = r.mul(&self.unary()?);
            } else if self.eat(b'/') {
                let d = self.unary()?;
                let d = d.as_constant().filter(|c| !c.is_zero()).ok_or_else(|| self.err("division by a non-constant or zero"))?;
                r = r.scale(&d.recip());
            } else {
                return Ok(r);
            }
        }
    }

    fn unary(&mut self) -> Result<Poly, Error> {
        if self.eat(b'-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat(b'+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.uint()?;
            let e = u32::try_from(e).map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn uint(&mut self) -> Result<u64, Error> {
        self.ws();
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        if start == self.i {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.s[start..self.i]).unwrap().parse().map_err(|_| self.err("number too large"))
    }

    fn var(&mut self) -> Result<Var, Error> {
        self.ws();
        let rest = &self.s[self.i..];
        if rest.starts_with(b"theta") {
            self.i += 5;
            let i = self.index()?;
            Ok(Var::theta(i))
        } else if rest.starts_with(b"alpha") {
            self.i += 5;
            let k = self.index()?;
            let j = self.index()?;
            if k >= 0x8000 || j >= 0x1_0000 {
                return Err(self.err("alpha index out of range"));
            }
            Ok(Var::alpha(k, j))
        } else {
            Err(self.err("expected a variable"))
        }
    }

    fn index(&mut self) -> Result<usize, Error> {
        if !self.eat(b'[') {
            return Err(self.err("expected `[`"));
        }
        let v = self.uint()?;
        if !self.eat(b']') {
            return Err(self.err("expected `]`"));
        }
        usize::try_from(v).ok().filter(|&v| v < 0x8000_0000).ok_or_else(|| self.err("index out of range"))
    }

    fn atom(&mut self) -> Result<Poly, Error> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let r = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(r)
            }
            Some(c) if c.is_ascii_digit() => {
                self.ws();
                let start = self.i;
                while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                    self.i += 1;
                }
                let n: BigInt = std::str::from_utf8(&self.s[start..self.i]).unwrap().parse().unwrap();
                Ok(Poly::constant(Scalar::from_integer(n)))
            }
            Some(b't') | Some(b'a') => Ok(Poly::var(self.var()?)),
            _ => Err(self.err("unexpected input")),
        }
    }
}

/// Parses a rational such as `-3/4` or `5`.
pub fn parse_scalar(s: &str) -> Result<Scalar, Error> {
    let p = parse_poly(s)?;
    p.as_constant().ok_or_else(|| Error::Parse(format!("`{s}` is not a constant")))
}

/// Small integers print without the rational machinery.
pub fn scalar_to_i64(c: &Scalar) -> Option<i64> {
    c.is_integer().then(|| c.to_integer().to_i64()).flatten()
}
