use dynkin_deform::deform::*;
use dynkin_deform::poly::*;
use dynkin_deform::quiver::*;
use dynkin_deform::verify::*;
use dynkin_deform::word::Word;
use dynkin_deform::*;
use std::collections::BTreeMap;
use std::sync::OnceLock;

use DynkinType::{E6, E7, E8};

fn pb(t: DynkinType) -> &'static PathBasis {
    static E6P: OnceLock<PathBasis> = OnceLock::new();
    static E7P: OnceLock<PathBasis> = OnceLock::new();
    match t {
        E6 => E6P.get_or_init(|| PathBasis::compute(E6, ChooseStrategy::Sorted, false).unwrap()),
        E7 => E7P.get_or_init(|| PathBasis::compute(E7, ChooseStrategy::Sorted, false).unwrap()),
        E8 => panic!("E8 path basis is not built in these tests"),
    }
}

fn p(s: &str) -> Poly {
    parse_poly(s).unwrap()
}

fn local_element(lb: &LocalBasis, word: &str, c: Poly) -> Element<Poly> {
    Element::basis(lb.id(lb.parse(word).unwrap()).unwrap(), c)
}

fn names(lb: &LocalBasis, v: &[(u32, i64)]) -> Vec<(String, i64)> {
    v.iter().map(|&(b, c)| (lb.name(b), c)).collect()
}

// quiver

#[test]
fn quiver_shapes() {
    let q = preprojective(E6);
    assert_eq!((q.num_vertices, q.arrows.len()), (6, 10));
    let q8 = preprojective(E8);
    assert_eq!(q8.arrows[arrow_bar(8, 0)], (3, 0));
    let q7 = preprojective(E7);
    assert_eq!(q7.arrows[arrow(3)], (3, 4));
    for t in [E6, E7, E8] {
        let q = preprojective(t);
        for k in 0..q.arrows.len() {
            let (s, e) = q.arrows[k];
            assert_eq!(q.arrows[reverse(t.n(), k)], (e, s));
        }
        let degree = |v: usize| q.arrows.iter().filter(|a| a.0 == v).count();
        assert_eq!((0..t.n()).filter(|&v| degree(v) == 3).collect::<Vec<_>>(), vec![EXCEPTIONAL]);
    }
}

#[test]
fn relation_lists() {
    assert_eq!(preprojective(E6).relations.len(), 6);
    let q = preprojective(E7);
    let r = q.relations.iter().find(|r| r.vertex == 3).unwrap();
    let terms: Vec<(String, i64)> = r.terms.iter().map(|&(w, c)| (q.word_name(w), c)).collect();
    assert_eq!(terms, [("ā0 a0".to_string(), 1), ("ā2 a2".into(), 1), ("a3 ā3".into(), 1)]);
    assert!(r.deformed);
    assert_eq!(q.relations.iter().filter(|r| r.deformed).count(), 1);
}

// poly

#[test]
fn addition_examples() {
    let a = p("2*theta[1]*alpha[0][1] - theta[4]");
    assert_eq!(a.add(&Poly::zero()), a);
    assert!(p("3*theta[1]").add(&p("-3*theta[1]")).is_zero());
    let lb = LocalBasis::new(E6);
    let sum = local_element(&lb, "xy", Poly::theta(1)).add(&local_element(&lb, "yx", Poly::theta(1)));
    assert_eq!(sum.parts.len(), 2);
}

#[test]
fn tagged_multiplication_examples() {
    let lb = LocalBasis::new(E6);
    let x = local_element(&lb, "x", Poly::one());
    let y = local_element(&lb, "y", Poly::one());
    assert!(lb.multiply(&local_element(&lb, "x", Poly::theta(1)), &x).is_zero());
    assert_eq!(lb.multiply(&x, &y), local_element(&lb, "xy", Poly::one()));
    let got = lb.multiply(&y, &local_element(&lb, "yx", Poly::one()));
    let want = ["xyx", "xyy", "yxy"].iter().fold(Element::zero(), |acc: Element<Poly>, w| acc.add(&local_element(&lb, w, p("-1"))));
    assert_eq!(got, want);
}

#[test]
fn substitution_examples() {
    let mut s = SubstitutionSet::new();
    s.push(Var::theta(2), p("2*theta[3] - theta[1]")).unwrap();
    let untouched = p("theta[1]*theta[3] + alpha[0][1]");
    assert_eq!(untouched.apply_substitutions(&s), untouched);
    assert_eq!(p("theta[2]").apply_substitutions(&s), p("2*theta[3] - theta[1]"));
    // Oracle: the square expanded by hand.
    assert_eq!(p("theta[2]^2").apply_substitutions(&s), p("4*theta[3]^2 - 4*theta[1]*theta[3] + theta[1]^2"));
}

#[test]
fn evaluation_examples() {
    let at = |q: &Poly, vals: &[(usize, Scalar)]| {
        let m: BTreeMap<usize, Scalar> = vals.iter().cloned().collect();
        q.evaluate(&|v| v.as_theta().and_then(|i| m.get(&i).cloned())).unwrap()
    };
    assert_eq!(at(&Poly::zero(), &[]), int(0));
    assert_eq!(at(&p("theta[1] + theta[2] - 2*theta[3]"), &[(1, int(1)), (2, int(3)), (3, int(2))]), int(0));
    assert_eq!(at(&p("theta[1]*theta[3]"), &[(1, ratio(1, 2)), (3, int(4))]), int(2));
    assert!(matches!(p("theta[9]").evaluate(&|_| None), Err(Error::MissingVariable(_))));
}

#[test]
fn scalars_are_normalized() {
    let c = ratio(6, -4);
    assert_eq!((c.numer().to_string(), c.denom().to_string()), ("-3".into(), "2".into()));
}

// localbasis

#[test]
fn local_basis_examples() {
    let lb = LocalBasis::new(E6);
    assert_eq!(lb.names(), ["1", "x", "y", "xy", "yx", "yy", "xyx", "xyy", "yxy", "xyxy", "yxyy", "xyxyy"]);
    assert_eq!(lb.num_thetas(), lb.len() - 3);
    for (t, size, depth, nodes, inner) in [(E6, 12, 6, 43, 20), (E7, 24, 9, 103, 50), (E8, 60, 15, 537, 267)] {
        let s = LocalBasis::new(t).stats();
        assert_eq!((s.basis_size, s.depth, s.total_nodes, s.non_leaf_non_root), (size, depth, nodes, inner));
    }
}

#[test]
fn local_presentations() {
    let lb = LocalBasis::new(E6);
    assert!(lb.present_word(lb.parse("xx").unwrap()).is_empty());
    assert_eq!(names(&lb, &lb.present_word(lb.parse("yyx").unwrap())), [("xyx".to_string(), -1), ("xyy".into(), -1), ("yxy".into(), -1)]);
    let xy = lb.parse("xy").unwrap();
    assert_eq!(lb.present_word(xy), vec![(lb.id(xy).unwrap(), 1)]);
}

#[test]
fn local_relation_power_vanishes() {
    for t in [E6, E7, E8] {
        let lb = LocalBasis::new(t);
        let s = Element::basis(1, int(1)).add(&Element::basis(2, int(1)));
        let mut acc = Element::basis(0, int(1));
        for _ in 0..t.local_exponent() {
            acc = lb.multiply(&acc, &s);
        }
        assert!(acc.is_zero(), "{t}");
    }
}

#[test]
fn local_presentations_stay_in_degree() {
    for t in [E6, E7, E8] {
        let lb = LocalBasis::new(t);
        for a in 0..lb.len() as u32 {
            for b in 0..lb.len() as u32 {
                let len = lb.word(a).len() + lb.word(b).len();
                assert!(lb.product(a, b).iter().all(|&(c, _)| lb.word(c).len() == len));
            }
        }
    }
}

#[test]
fn brute_force_local_examples() {
    let d = brute_force_local_dims(E6, 12);
    assert_eq!(d.iter().sum::<usize>(), 12);
    assert_eq!(d[3], 3);
    assert_eq!(brute_force_local_dims(E7, 20).iter().sum::<usize>(), 24);
}

// pathbasis

#[test]
fn path_basis_examples() {
    let s6 = pb(E6).stats();
    assert_eq!((s6.basis_size, s6.depth, s6.non_leaf_non_root, s6.total_nodes), (156, 11, 1551, 3395));
    let s7 = pb(E7).stats();
    assert_eq!((s7.basis_size, s7.non_leaf_non_root), (399, 48887));
    assert_eq!(pb(E6).dims_matrix()[3][3], 12);
    let m7 = pb(E7).dims_matrix();
    assert_eq!((m7[0][3], m7[3][3]), (12, 24));
}

#[test]
fn path_basis_is_graded_and_counted() {
    for t in [E6, E7] {
        let pb = pb(t);
        let m = pb.dims_matrix();
        assert_eq!(m.iter().flatten().sum::<usize>(), pb.len());
        for a in 0..pb.len() as u32 {
            for b in 0..pb.len() as u32 {
                let len = pb.length(a) + pb.length(b);
                assert!(pb.product(a, b).iter().all(|&(c, _)| pb.length(c) == len));
            }
        }
    }
}

#[test]
fn rad_dims_examples() {
    let pb7 = pb(E7);
    let q = &pb7.forest.quiver;
    let per_arrow: Vec<usize> = [0usize, 1, 2, 3, 4, 5].iter().flat_map(|&i| [arrow(i), arrow_bar(7, i)]).map(|k| pb7.rad_dims(2, q.source(k), q.target(k))).collect();
    assert_eq!(per_arrow, [11, 11, 5, 5, 15, 15, 17, 17, 9, 9, 3, 3]);
    for t in [E6, E7] {
        let pb = pb(t);
        let m = t.max_path_len();
        for i in 0..t.n() {
            for j in 0..t.n() {
                assert_eq!(pb.rad_dims(m + 1, i, j), 0);
            }
        }
    }
}

#[test]
fn path_multiplication_examples() {
    let pb = pb(E7);
    let q = &pb.forest.quiver;
    let a = |k| Element::basis(pb.arrow_id(k), int(1));
    assert!(pb.multiply(&a(arrow(0)), &a(arrow_bar(7, 0))).is_zero());
    let mesh = [(0, true), (2, true), (3, false)]
        .iter()
        .map(|&(i, bar_first)| if bar_first { pb.multiply(&a(arrow_bar(7, i)), &a(arrow(i))) } else { pb.multiply(&a(arrow(i)), &a(arrow_bar(7, i))) })
        .fold(Element::zero(), |acc: Element<Scalar>, e| acc.add(&e));
    assert!(mesh.is_zero());
    for b in 0..pb.len() as u32 {
        let e = Element::basis(pb.vertex_id(q.arrows.len().min(pb.source(b))), int(1));
        assert_eq!(pb.multiply(&e, &Element::basis(b, int(1))), Element::basis(b, int(1)));
    }
}

#[test]
fn brute_force_path_examples() {
    let m = brute_force_path_dims(E6).unwrap();
    assert_eq!(m[3][3], 12);
    assert_eq!(m.iter().flatten().sum::<usize>(), 156);
}

// deform

#[test]
fn admissibility_examples() {
    for t in [E6, E7, E8] {
        let lb = LocalBasis::new(t);
        assert!(admissibility_power(&lb, &Deformation::zero(&lb)).is_zero());
    }
    let lb = LocalBasis::new(E7);
    let power = admissibility_power(&lb, &Deformation::symbolic(&lb));
    assert_eq!(power.get(lb.id(lb.parse("yxyxy").unwrap()).unwrap()), p("theta[2] - 2*theta[3] + theta[1]"));
    let lb6 = LocalBasis::new(E6);
    let nontrivial = admissibility_power(&lb6, &Deformation::symbolic(&lb6)).parts.values().filter(|c| !c.is_zero()).count();
    assert_eq!(nontrivial, 2);
    for (t, n, max) in [(E6, 2, 7), (E7, 6, 28), (E8, 30, 1333)] {
        let sys = admissibility_equations(&LocalBasis::new(t));
        assert_eq!((sys.equations.len(), sys.max_terms()), (n, max));
    }
}

#[test]
fn substitution_extraction_examples() {
    let lb = LocalBasis::new(E7);
    let s = extract_substitutions(&lb, &admissibility_equations(&lb)).unwrap();
    assert_eq!(s.get(Var::theta(2)), Some(&p("2*theta[3] - theta[1]")));
    assert_eq!(s.get(Var::theta(6)), Some(&p("-3*theta[1]^2 + 6*theta[1]*theta[3] - 3*theta[3]^2 - 3*theta[4] + 2*theta[5] + 2*theta[7]")));
    assert!(s.get(Var::theta(11)).unwrap().to_string().contains("3/2*theta[10]"));
    let lb8 = LocalBasis::new(E8);
    let s8 = extract_substitutions(&lb8, &admissibility_equations(&lb8)).unwrap();
    assert_eq!(s8.targets(), [2, 6, 12, 17, 18, 19, 28, 36, 40, 45].map(Var::theta));
    let lb6 = LocalBasis::new(E6);
    assert_eq!(extract_substitutions(&lb6, &admissibility_equations(&lb6)).unwrap().len(), 2);
}

#[test]
fn pivot_orders() {
    let lb = LocalBasis::new(E7);
    let sys = admissibility_equations(&lb);
    // The highest eligible pivot is a different but equally sound choice.
    let high = extract_substitutions_with(&lb, &sys, &PivotOrder::Highest).unwrap();
    for e in &sys.equations {
        assert!(e.poly.apply_substitutions(&high).is_zero());
    }
    assert!(extract_substitutions_with(&lb, &sys, &PivotOrder::Prescribed(vec![2, 6])).is_err());
    assert!(extract_substitutions_with(&lb, &sys, &PivotOrder::Prescribed(vec![2, 6, 1])).is_err());
    let reference = extract_substitutions_with(&lb, &sys, &PivotOrder::Prescribed(vec![2, 6, 11])).unwrap();
    assert_eq!(reference, extract_substitutions(&lb, &sys).unwrap());
}

#[test]
fn homomorphism_form_examples() {
    let pb7 = pb(E7);
    let form = HomomorphismForm::new(pb7, PinSet::new()).unwrap();
    let counts: Vec<usize> = [0usize, 1, 2, 3, 4, 5].iter().flat_map(|&i| [arrow(i), arrow_bar(7, i)]).map(|k| form.slot_count(k)).collect();
    assert_eq!(counts, [11, 11, 5, 5, 15, 15, 17, 17, 9, 9, 3, 3]);
    let first: Vec<String> = form.slots[0][..3].iter().map(|&b| pb7.name(b)).collect();
    assert_eq!(first, ["a0 ā2 a2", "a0 ā2 a2 ā0 a0", "a0 ā2 a2 ā2 a2"]);
    let pins = PinSet::parse("alpha[0][1] = 2").unwrap();
    let pinned = HomomorphismForm::new(pb7, pins).unwrap();
    assert_eq!(pinned.coefficient((0, 1)), Poly::constant(int(2)));
    assert_eq!(pinned.coefficient((0, 2)), Poly::alpha(0, 2));
    assert!(HomomorphismForm::new(pb7, PinSet::parse("alpha[0][12] = 0").unwrap()).is_err());
}

fn all_zero_pins(pb: &PathBasis) -> PinSet {
    let form = HomomorphismForm::new(pb, PinSet::new()).unwrap();
    let mut pins = PinSet::new();
    for s in form.all_slots() {
        pins.insert(s, int(0));
    }
    pins
}

#[test]
fn delta_examples() {
    let pb6 = pb(E6);
    let zero = HomomorphismForm::new(pb6, all_zero_pins(pb6)).unwrap();
    assert!(compute_delta(pb6, &zero, arrow_bar(6, 0), arrow(0)).unwrap().is_zero());

    // A single free slot on p in w_{k1}: δ = α · (p a_{k2}).
    let (k1, k2) = (arrow_bar(6, 0), arrow(0));
    let mut pins = all_zero_pins(pb6);
    pins.pins.remove(&(k1, 1));
    let single = HomomorphismForm::new(pb6, pins).unwrap();
    let d = compute_delta(pb6, &single, k1, k2).unwrap();
    let path = Element::basis(single.slots[k1][0], Poly::alpha(k1, 1));
    assert_eq!(d, pb6.multiply(&path, &Element::basis(pb6.arrow_id(k2), Poly::one())));

    // Against (ā0 + w)(a0 + w) - ā0 a0 multiplied out directly.
    let form = HomomorphismForm::new(pb6, PinSet::new()).unwrap();
    let image = |k| {
        let mut e = form.correction(k, &|s| form.coefficient(s));
        e.add_term(pb6.arrow_id(k), &Poly::one());
        e
    };
    let product = pb6.multiply(&image(k1), &image(k2));
    let base = Element::from_ints(&pb6.present(pb6.forest.quiver.word_from_arrows(&[k1, k2])), &Poly::one());
    assert_eq!(compute_delta(pb6, &form, k1, k2).unwrap(), product.add(&base.scale_int(-1)));
    assert!(compute_delta(pb6, &form, arrow(0), arrow(1)).is_err());
}

#[test]
fn equation_system_examples() {
    let pb7 = pb(E7);
    let lb = LocalBasis::new(E7);
    let pins = PinSet::parse(include_str!("../data/e7_zero_set.pins")).unwrap();
    let form = HomomorphismForm::new(pb7, pins).unwrap();
    let sys = build_equation_system(pb7, &lb, &form, &Deformation::symbolic(&lb), None).unwrap();
    let listed_first = p("-alpha[9][2] - alpha[3][1] + alpha[0][1] + theta[1]");
    assert!(sys.vertices.iter().flat_map(|v| v.equations.iter()).any(|(_, q)| *q == listed_first || *q == listed_first.neg()));
    for v in &sys.vertices {
        assert_eq!(v.equations.len(), pb7.rad_dims(3, v.vertex, v.vertex));
    }
    assert_eq!((sys.num_equations(), sys.num_nontrivial()), (61, 54));

    let subst = extract_substitutions(&lb, &admissibility_equations(&lb)).unwrap();
    let reduced = build_equation_system(pb7, &lb, &form, &Deformation::symbolic(&lb), Some(&subst)).unwrap();
    for v in &reduced.vertices {
        for (_, q) in &v.equations {
            assert!(subst.targets().iter().all(|t| !q.mentions(*t)));
        }
    }

    let zero = HomomorphismForm::new(pb7, all_zero_pins(pb7)).unwrap();
    let trivial = build_equation_system(pb7, &lb, &zero, &Deformation::zero(&lb), None).unwrap();
    assert_eq!(trivial.num_nontrivial(), 0);
}

// verify

#[test]
fn numeric_deformation_examples() {
    let lb = LocalBasis::new(E7);
    let subst = extract_substitutions(&lb, &admissibility_equations(&lb)).unwrap();
    let zeros: BTreeMap<usize, Scalar> = free_thetas(&lb, &subst).into_iter().map(|i| (i, int(0))).collect();
    let f = make_numeric_deformation(&lb, &subst, &zeros).unwrap();
    assert!(f.values.iter().all(|c| *c == int(0)));
    let mut vals = zeros.clone();
    vals.insert(1, int(1));
    vals.insert(3, int(1));
    assert_eq!(*make_numeric_deformation(&lb, &subst, &vals).unwrap().get(2), int(1));
}

#[test]
fn trivial_solution_verifies() {
    let pb7 = pb(E7);
    let lb = LocalBasis::new(E7);
    let zero = HomomorphismForm::new(pb7, all_zero_pins(pb7)).unwrap();
    let sys = build_equation_system(pb7, &lb, &zero, &Deformation::zero(&lb), None).unwrap();
    let subst = extract_substitutions(&lb, &admissibility_equations(&lb)).unwrap();
    let r = verify_solution(pb7, &lb, &sys, &SolutionAssignment::default(), &subst, VerifyMode::Numeric { samples: 3, seed: 1 }).unwrap();
    assert!(r.ok());
}

#[test]
fn instantiated_corrections_lie_in_rad2() {
    let pb7 = pb(E7);
    let lb = LocalBasis::new(E7);
    let form = HomomorphismForm::new(pb7, PinSet::parse(include_str!("../data/e7_zero_set.pins")).unwrap()).unwrap();
    let sol = SolutionAssignment::parse(include_str!("../data/e7_solution.sol")).unwrap();
    let subst = extract_substitutions(&lb, &admissibility_equations(&lb)).unwrap();
    let mut rng = sample_rng(2, 0);
    let f = make_numeric_deformation(&lb, &subst, &sample_free_values(&lb, &subst, &mut rng)).unwrap();
    let phi = instantiate_homomorphism(pb7, &form, &sol, &f).unwrap();
    for k in 0..phi.images.len() {
        assert!(phi.correction(pb7, k).parts.keys().all(|&b| pb7.length(b) >= 2));
    }
    assert!(relation_defects(pb7, &lb, &phi, &f).unwrap().iter().all(|e| e.is_zero()));
}

#[test]
fn words_name_round_trip() {
    let q = preprojective(E7);
    let w = q.parse_word("a0 ā2 a2 ā0").unwrap();
    assert_eq!(w, Word::from_letters(0, &[arrow(0), arrow_bar(7, 2), arrow(2), arrow_bar(7, 0)]));
    assert_eq!(q.word_name(w), "a0 ā2 a2 ā0");
}
