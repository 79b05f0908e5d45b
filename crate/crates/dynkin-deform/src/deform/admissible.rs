//! Admissibility of a deformation `f = Σ theta[i] b_i` of `R(E_n)` and the
//! triangular substitutions equivalent to it.

use crate::localbasis::{LocalBasis, X, Y};
use crate::quiver::DynkinType;
use crate::poly::{int, Element, Poly, Scalar, SubstitutionSet, Var};
use crate::Error;
use num_traits::{One, Signed};

/// Coefficients of `f` on the basis words of length at least two.
/// `coeffs[i - 1]` belongs to `theta[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Deformation {
    pub coeffs: Vec<Poly>,
}

impl Deformation {
    /// Every coefficient is its own variable `theta[i]`.
    pub fn symbolic(lb: &LocalBasis) -> Deformation {
        Deformation { coeffs: (1..=lb.num_thetas()).map(Poly::theta).collect() }
    }

    pub fn zero(lb: &LocalBasis) -> Deformation {
        Deformation { coeffs: vec![Poly::zero(); lb.num_thetas()] }
    }

    /// Numeric coefficients.
    pub fn numeric(values: &[Scalar]) -> Deformation {
        Deformation { coeffs: values.iter().cloned().map(Poly::constant).collect() }
    }

    /// `f` as an element of `R(E_n)`.
    pub fn element(&self, lb: &LocalBasis) -> Element<Poly> {
        let mut e = Element::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            e.add_term(lb.theta_id(i + 1), c);
        }
        e
    }
}

/// `(x + y + f)^(n-3)` expanded in the basis of `R(E_n)`.
pub fn admissibility_power(lb: &LocalBasis, f: &Deformation) -> Element<Poly> {
    let mut s = f.element(lb);
    s.add_term(lb.id(crate::word::Word::from_letters(0, &[X])).unwrap(), &Poly::one());
    s.add_term(lb.id(crate::word::Word::from_letters(0, &[Y])).unwrap(), &Poly::one());
    let mut p = s.clone();
    for _ in 1..lb.dynkin.local_exponent() {
        p = p.mul_poly_with(&s, &|a, b| Some(lb.product(a, b)));
    }
    p
}

/// One admissibility equation: the coefficient of basis word `tag` must vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibilityEquation {
    pub tag: u32,
    pub poly: Poly,
}

/// The nontrivial coefficients of `(x + y + f)^(n-3)`, ordered by basis word.
#[derive(Clone, Debug)]
pub struct AdmissibilitySystem {
    pub equations: Vec<AdmissibilityEquation>,
}

impl AdmissibilitySystem {
    pub fn max_terms(&self) -> usize {
        self.equations.iter().map(|e| e.poly.num_terms()).max().unwrap_or(0)
    }
}

pub fn admissibility_equations(lb: &LocalBasis) -> AdmissibilitySystem {
    let p = admissibility_power(lb, &Deformation::symbolic(lb));
    // Basis ids are ordered by word length, then slot.
    let equations = p.parts.into_iter().map(|(tag, poly)| AdmissibilityEquation { tag, poly }).collect();
    AdmissibilitySystem { equations }
}

/// Length of the basis word carrying `theta[i]`.
fn theta_len(lb: &LocalBasis, v: Var) -> usize {
    lb.word(lb.theta_id(v.as_theta().expect("theta variable"))).len()
}

/// How a pivot is picked among the eligible variables of one equation.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum PivotOrder {
    /// Highest index within the best tier.
    #[default]
    Highest,
    /// The reference target sequence of the type (see [`reference_targets`]).
    Reference,
    /// Explicit theta indices, one per nontrivial equation.
    Prescribed(Vec<usize>),
}

/// The conventional target sequence: θ2, θ6, θ11 for E7 and a fixed
/// sequence of ten for E8. Every entry is an eligible pivot.
pub fn reference_targets(t: DynkinType) -> Vec<usize> {
    match t {
        DynkinType::E6 => vec![2, 6],
        DynkinType::E7 => vec![2, 6, 11],
        DynkinType::E8 => vec![2, 6, 12, 17, 18, 19, 28, 36, 40, 45],
    }
}

/// Eligible pivots of an equation, grouped by tier. Among variables
/// occurring as pure powers, only those of maximal word length count. A
/// pivot occurs linearly with coefficient ±1 (first tier) or ±2 (second
/// tier), and in no other monomial.
pub fn pivot_candidates(lb: &LocalBasis, eq: &Poly) -> [Vec<(Var, Scalar)>; 2] {
    let mut tiers: [Vec<(Var, Scalar)>; 2] = [Vec::new(), Vec::new()];
    let pure: Vec<(Var, u32, &Scalar)> = eq
        .terms()
        .iter()
        .filter(|(m, _)| m.0.len() == 1)
        .map(|(m, c)| (m.0[0].0, m.0[0].1, c))
        .collect();
    let Some(max_len) = pure.iter().map(|&(v, _, _)| theta_len(lb, v)).max() else {
        return tiers;
    };
    let occurrences = |v: Var| eq.terms().iter().filter(|(m, _)| m.exponent(v) > 0).count();
    for &(v, e, c) in &pure {
        if e != 1 || theta_len(lb, v) != max_len || occurrences(v) != 1 {
            continue;
        }
        if c.abs() == int(1) {
            tiers[0].push((v, c.clone()));
        } else if c.abs() == int(2) {
            tiers[1].push((v, c.clone()));
        }
    }
    tiers
}

fn pivot(lb: &LocalBasis, eq: &Poly, want: Option<usize>) -> Result<(Var, Scalar), String> {
    let tiers = pivot_candidates(lb, eq);
    let Some(tier) = tiers.iter().find(|t| !t.is_empty()) else {
        return Err("no pivot with coefficient ±1 or ±2".into());
    };
    match want {
        None => Ok(tier.iter().max_by_key(|(v, _)| *v).cloned().unwrap()),
        Some(i) => tier
            .iter()
            .find(|(v, _)| *v == Var::theta(i))
            .cloned()
            .ok_or_else(|| format!("theta[{i}] is not an eligible pivot")),
    }
}

/// Triangular substitutions equivalent to the admissibility equations.
pub fn extract_substitutions(lb: &LocalBasis, sys: &AdmissibilitySystem) -> Result<SubstitutionSet, Error> {
    extract_substitutions_with(lb, sys, &PivotOrder::Reference)
}

pub fn extract_substitutions_with(lb: &LocalBasis, sys: &AdmissibilitySystem, order: &PivotOrder) -> Result<SubstitutionSet, Error> {
    let wanted = match order {
        PivotOrder::Highest => None,
        PivotOrder::Reference => Some(reference_targets(lb.dynkin)),
        PivotOrder::Prescribed(v) => Some(v.clone()),
    };
    let mut subst = SubstitutionSet::new();
    for eq in &sys.equations {
        let e = eq.poly.apply_substitutions(&subst);
        if e.is_zero() {
            continue;
        }
        let want = match &wanted {
            None => None,
            Some(w) => Some(
                *w.get(subst.len())
                    .ok_or_else(|| Error::NoPivot(format!("{}: target sequence exhausted", lb.name(eq.tag))))?,
            ),
        };
        let (v, c) = pivot(lb, &e, want).map_err(|m| Error::NoPivot(format!("{}: {m}", lb.name(eq.tag))))?;
        // c v + rest = 0  =>  v = -rest / c
        let rest = e.sub(&Poly::var(v).scale(&c));
        let rhs = rest.scale(&(-Scalar::one() / c));
        subst.push(v, rhs)?;
    }
    if let Some(w) = wanted {
        if w.len() != subst.len() {
            return Err(Error::NoPivot(format!("{} targets given, {} equations need one", w.len(), subst.len())));
        }
    }
    Ok(subst)
}

/// Free deformation coefficients: those not eliminated by `subst`.
pub fn free_thetas(lb: &LocalBasis, subst: &SubstitutionSet) -> Vec<usize> {
    (1..=lb.num_thetas()).filter(|&i| subst.get(Var::theta(i)).is_none()).collect()
}
