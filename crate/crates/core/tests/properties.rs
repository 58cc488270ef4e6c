//! Property tests. Complex fixtures are drawn from a seeded generator so
//! that failures are reproducible from the reported seed.

mod common;

use hodgejet::connection::curvature;
use hodgejet::constraints::{
    constraint_test_with, germ_quotient_dimension, hilbert_count, in_gl_orbit, ConstraintVariety,
};
use hodgejet::correspondence::{alpha, beta, compute_xi, matrix_jet_inverse, tau_germ, MatrixJet};
use hodgejet::ideal::{normal_form, Ideal};
use hodgejet::jets::{compose_poly, prolong, Jet, RationalMap};
use hodgejet::linalg::QMatrix;
use hodgejet::poly::{vars, ExactPoly, MonomialOrder, Vars};
use hodgejet::ratfunc::ExactRatFunc;
use hodgejet::rational::{int, Rational};
use hodgejet::series::{basis, TruncatedSeries};
use hodgejet::{AlgebraicData, Chart};
use num::{One, Zero};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::*;

fn xyz() -> Vars {
    vars(["x", "y", "z"])
}

fn poly_strategy() -> impl Strategy<Value = ExactPoly> {
    prop::collection::vec(((0u32..3, 0u32..3, 0u32..2), -6i64..=6, 1i64..=4), 0..5).prop_map(|terms| {
        let v = xyz();
        ExactPoly::from_terms(
            &v,
            terms
                .into_iter()
                .map(|((a, b, c), n, d)| (vec![a, b, c], Rational::new(n.into(), d.into()))),
        )
    })
}

fn nonzero_poly() -> impl Strategy<Value = ExactPoly> {
    poly_strategy().prop_filter("nonzero", |p| !p.is_zero())
}

fn flat_fixture(rng: &mut StdRng, m: usize, n: usize) -> AlgebraicData {
    if n == 1 {
        random_line_data(rng, m)
    } else {
        random_gauge_data(rng, m, n)
    }
}

fn regular_point(rng: &mut StdRng, data: &AlgebraicData) -> Vec<Rational> {
    loop {
        let s = random_point(rng, data.dim());
        if regular_at(data, &s) {
            return s;
        }
    }
}

/// Random polynomial connection on the plane; generically not flat.
fn random_polynomial_data(rng: &mut StdRng, m: usize) -> AlgebraicData {
    let v = vars(["z1", "z2"]);
    let conn = (0..m)
        .map(|_| {
            (0..m)
                .map(|_| (0..2).map(|_| ExactRatFunc::from_poly(random_poly(rng, &v, 1, 2))).collect())
                .collect()
        })
        .collect();
    AlgebraicData::on_affine(&v, conn).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(a in poly_strategy(), b in poly_strategy(), c in poly_strategy()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn leibniz(a in poly_strategy(), b in poly_strategy(), i in 0usize..3) {
        let lhs = (&a * &b).diff_at(i);
        let rhs = &(&a * &b.diff_at(i)) + &(&b * &a.diff_at(i));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn ratfunc_field_laws(a in poly_strategy(), b in nonzero_poly(), c in poly_strategy(), d in nonzero_poly()) {
        let f = ExactRatFunc::new(a, b).unwrap();
        let g = ExactRatFunc::new(c, d).unwrap();
        // Normalizing an already normalized function changes nothing.
        prop_assert_eq!(&ExactRatFunc::new(f.num().clone(), f.den().clone()).unwrap(), &f);
        prop_assert_eq!(&f * &g, &g * &f);
        prop_assert_eq!(&(&f + &g) - &g, f.clone());
        if !g.is_zero() {
            prop_assert_eq!(&f.checked_div(&g).unwrap() * &g, f.clone());
        }
        prop_assert_eq!((&f * &g).diff_at(0), &(&f.diff_at(0) * &g) + &(&f * &g.diff_at(0)));
    }

    #[test]
    fn membership_soundness(g1 in nonzero_poly(), g2 in nonzero_poly(), c1 in poly_strategy(), c2 in poly_strategy()) {
        let v = xyz();
        let ideal = Ideal::new(&v, [g1.clone(), g2.clone()]).unwrap();
        let f = &(&c1 * &g1) + &(&c2 * &g2);
        for order in [MonomialOrder::grevlex(), MonomialOrder::lex()] {
            prop_assert!(normal_form(&f, &ideal.groebner(&order)).unwrap().is_zero());
        }
    }

    #[test]
    fn buchberger_ignores_generator_order(g1 in nonzero_poly(), g2 in nonzero_poly(), g3 in nonzero_poly()) {
        let v = xyz();
        let a = Ideal::new(&v, [g1.clone(), g2.clone(), g3.clone()]).unwrap();
        let b = Ideal::new(&v, [g3, g1, g2]).unwrap();
        let order = MonomialOrder::grevlex();
        prop_assert_eq!(a.groebner(&order).basis().to_vec(), b.groebner(&order).basis().to_vec());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn elimination_vanishes_on_curve(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let x = vars(["x"]);
        let p = random_poly(&mut rng, &x, 3, 3);
        let q = random_poly(&mut rng, &x, 3, 3);
        let v = xyz();
        let y = ExactPoly::var(&v, "y").unwrap();
        let z = ExactPoly::var(&v, "z").unwrap();
        let ideal = Ideal::new(&v, [&y - &p.embed(&v).unwrap(), &z - &q.embed(&v).unwrap()]).unwrap();
        let image = ideal.eliminate(&["x"]).unwrap();
        for _ in 0..4 {
            let a = small_rational(&mut rng);
            let pt = [p.eval(std::slice::from_ref(&a)), q.eval(&[a])];
            for g in image.generators() {
                prop_assert!(g.eval(&pt).is_zero());
            }
        }
    }

    #[test]
    fn truncation_commutes_with_composition(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let chart = Chart::affine(&vars(["x1", "x2"]));
        let f = random_poly(&mut rng, chart.coords(), 3, 4);
        let (d, r) = (rng.gen_range(1..=2), rng.gen_range(2..=4));
        let s = random_point(&mut rng, 2);
        let sigma = random_jet(&mut rng, &chart, &s, d, r);
        let full = compose_poly(&f, &sigma).unwrap();
        for r2 in 0..=r {
            prop_assert_eq!(full.truncate(r2).unwrap(), compose_poly(&f, &sigma.project(r2).unwrap()).unwrap());
        }
    }

    #[test]
    fn relations_survive_prolongation(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let line = Chart::affine(&vars(["t"]));
        let xy = vars(["x", "y"]);
        let circle = Chart::new(&xy, Ideal::parse(&xy, &["x^2 + y^2 - 1"]).unwrap(), vec![]).unwrap();
        let t = line.coords();
        let param = RationalMap::new(
            &line,
            &circle,
            vec![
                ExactRatFunc::parse(t, "(1 - t^2)/(1 + t^2)").unwrap(),
                ExactRatFunc::parse(t, "2*t/(1 + t^2)").unwrap(),
            ],
        )
        .unwrap();
        let (d, r) = (rng.gen_range(1..=2), rng.gen_range(1..=4));
        let t0 = small_rational(&mut rng);
        let sigma = random_jet(&mut rng, &line, &[t0], d, r);
        let on_circle = prolong(&param, d, r).apply(&sigma).unwrap();
        let rel = &circle.relations().generators()[0];
        prop_assert!(compose_poly(rel, &on_circle).unwrap().is_zero());
    }

    #[test]
    fn prolong_is_functorial(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = Chart::affine(&vars(["u1", "u2"]));
        let b = Chart::affine(&vars(["v"]));
        let c = Chart::affine(&vars(["w1", "w2"]));
        let comps = |rng: &mut StdRng, src: &Chart, k: usize| -> Vec<ExactRatFunc> {
            (0..k)
                .map(|_| {
                    let num = random_poly(rng, src.coords(), 2, 3);
                    let den = &ExactPoly::constant(src.coords(), int(2)) + &random_poly(rng, src.coords(), 2, 1);
                    ExactRatFunc::new(num, den).unwrap_or_else(|_| ExactRatFunc::zero(src.coords()))
                })
                .collect()
        };
        let h = RationalMap::new(&a, &b, comps(&mut rng, &a, 1)).unwrap();
        let g = RationalMap::new(&b, &c, comps(&mut rng, &b, 2)).unwrap();
        let (d, r) = (rng.gen_range(1..=2), rng.gen_range(1..=3));
        let s = random_point(&mut rng, 2);
        let sigma = random_jet(&mut rng, &a, &s, d, r);
        let Ok(inner) = prolong(&h, d, r).apply(&sigma) else { return Ok(()) };
        let Ok(two) = prolong(&g, d, r).apply(&inner) else { return Ok(()) };
        let one = prolong(&g.after(&h).unwrap(), d, r).apply(&sigma).unwrap();
        prop_assert_eq!(one, two);
    }

    #[test]
    fn inverse_is_two_sided(seed in any::<u64>(), d in 1usize..=2, r in 0usize..=4, m in 1usize..=3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let j = random_matrix_jet(&mut rng, d, r, m);
        let inv = matrix_jet_inverse(&j).unwrap();
        let id = MatrixJet::identity(d, r, m);
        prop_assert_eq!(j.mul(&inv).unwrap(), id.clone());
        prop_assert_eq!(inv.mul(&j).unwrap(), id);
    }

    #[test]
    fn beta_matches_oracle(seed in any::<u64>(), m in 1usize..=2, n in 1usize..=2, d in 1usize..=2, r in 0usize..=4) {
        let mut rng = StdRng::seed_from_u64(seed);
        let data = flat_fixture(&mut rng, m, n);
        let s = regular_point(&mut rng, &data);
        let sigma = random_jet(&mut rng, data.chart(), &s, d, r);
        let m0 = random_invertible(&mut rng, m);
        let b = beta(&data, &sigma, &m0).unwrap();
        prop_assert_eq!(b.constant_term(), m0.clone());
        prop_assert!(matches_oracle(&b, &oracle_beta(&data, &sigma, &m0)));
    }

    #[test]
    fn beta_alpha_equivariance(seed in any::<u64>(), m in 1usize..=2, n in 1usize..=2, r in 0usize..=3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let data = if n == 2 && rng.gen_bool(0.5) { random_polynomial_data(&mut rng, m) } else { flat_fixture(&mut rng, m, n) };
        let s = regular_point(&mut rng, &data);
        let sigma = random_jet(&mut rng, data.chart(), &s, 1, r);
        let m0 = random_invertible(&mut rng, m);
        let g = random_invertible(&mut rng, m);
        let mg = &m0 * &g;
        prop_assert_eq!(beta(&data, &sigma, &mg).unwrap(), beta(&data, &sigma, &m0).unwrap().mul_const_right(&g).unwrap());
        prop_assert_eq!(
            alpha(&data, &sigma, &mg).unwrap(),
            alpha(&data, &sigma, &m0).unwrap().mul_const_left(&g.inverse().unwrap()).unwrap()
        );
    }

    #[test]
    fn xi_symmetry_iff_flat(seed in any::<u64>(), m in 1usize..=2, flat in any::<bool>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let data = if flat { random_gauge_data(&mut rng, m, 2) } else { random_polynomial_data(&mut rng, m) };
        let is_flat = curvature(&data).is_zero();
        if flat {
            prop_assert!(is_flat);
        }
        prop_assert_eq!(compute_xi(&data, 2).is_symmetric(&data), is_flat);
    }

    #[test]
    fn tau_is_a_unital_ring_map(seed in any::<u64>(), m in 1usize..=2, n in 1usize..=2, r in 1usize..=3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let data = flat_fixture(&mut rng, m, n);
        let s = regular_point(&mut rng, &data);
        let m0 = random_invertible(&mut rng, m);
        let tau = tau_germ(&data, &s, &m0, r).unwrap();
        let one = TruncatedSeries::constant(m * m, r, Rational::one());
        prop_assert_eq!(tau.apply(&one).unwrap(), TruncatedSeries::constant(n, r, Rational::one()));
        let len = basis(m * m, r).len();
        let mut germ = || TruncatedSeries::from_coeffs(m * m, r, (0..len).map(|_| small_rational(&mut rng)).collect()).unwrap();
        let (a, b) = (germ(), germ());
        prop_assert_eq!(tau.apply(&(&a * &b)).unwrap(), &tau.apply(&a).unwrap() * &tau.apply(&b).unwrap());
    }

    #[test]
    fn tau_columns_agree_with_beta(seed in any::<u64>(), m in 1usize..=2, n in 1usize..=2, r in 1usize..=3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let data = flat_fixture(&mut rng, m, n);
        let s = regular_point(&mut rng, &data);
        let m0 = random_invertible(&mut rng, m);
        let tau = tau_germ(&data, &s, &m0, r).unwrap();
        let l = rng.gen_range(0..n);
        let mut dir = vec![Rational::zero(); n];
        dir[l] = Rational::one();
        let b = beta(&data, &Jet::line(data.chart(), &s, &dir, r).unwrap(), &m0).unwrap();
        for v in 0..m * m {
            let mut e = vec![0; m * m];
            e[v] = 1;
            let col = tau.column(&e).unwrap();
            for q in 1..=r as u32 {
                let mut w = vec![0; n];
                w[l] = q;
                prop_assert_eq!(col.coeff(&w), b.entry(v / m, v % m).coeff(&[q]));
            }
        }
    }

    #[test]
    fn smooth_hypersurface_germs(seed in any::<u64>(), n in 2usize..=3, r in 0usize..=4) {
        let mut rng = StdRng::seed_from_u64(seed);
        let v = vars((1..=n).map(|i| format!("z{i}")));
        let s = random_point(&mut rng, n);
        let f = random_poly(&mut rng, &v, 3, 4);
        let f = &f - &ExactPoly::constant(&v, f.eval(&s));
        prop_assume!((0..n).any(|i| !f.diff_at(i).eval(&s).is_zero()));
        let z = Ideal::new(&v, [f]).unwrap();
        prop_assert_eq!(germ_quotient_dimension(&z, &s, r).unwrap() as u64, hilbert_count(r, n - 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn constraint_test_ignores_initial_matrix(seed in any::<u64>(), n in 1usize..=2, r in 1usize..=2) {
        let mut rng = StdRng::seed_from_u64(seed);
        let data = flat_fixture(&mut rng, 2, n);
        let s = regular_point(&mut rng, &data);
        let sigma = random_jet(&mut rng, data.chart(), &s, 1, r);
        let w = ConstraintVariety::lower_left_zero();
        let reference = constraint_test_with(&sigma, &data, &w, &QMatrix::identity(2)).unwrap().result;
        for _ in 0..3 {
            let m0 = random_invertible(&mut rng, 2);
            prop_assert_eq!(constraint_test_with(&sigma, &data, &w, &m0).unwrap().result, reference);
        }
    }

    #[test]
    fn constraint_failure_persists_to_higher_order(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = StdRng::seed_from_u64(seed);
        let data = flat_fixture(&mut rng, 2, n);
        let s = regular_point(&mut rng, &data);
        let sigma = random_jet(&mut rng, data.chart(), &s, 1, 2);
        let m0 = random_invertible(&mut rng, 2);
        for w in [ConstraintVariety::lower_left_zero(), ConstraintVariety::parse(2, &["a_1_2"]).unwrap()] {
            let low = constraint_test_with(&sigma.project(1).unwrap(), &data, &w, &m0).unwrap().result;
            let high = constraint_test_with(&sigma, &data, &w, &m0).unwrap().result;
            prop_assert!(low || !high);
        }
    }

    #[test]
    fn orbit_test_is_parabolic_invariant(seed in any::<u64>(), r in 0usize..=2) {
        let mut rng = StdRng::seed_from_u64(seed);
        let j = random_matrix_jet(&mut rng, 1, r, 2);
        let w = ConstraintVariety::lower_left_zero();
        prop_assert!(w.is_right_invariant(&[1, 2]).unwrap());
        let mut u = random_invertible(&mut rng, 2);
        u[(1, 0)] = Rational::zero();
        prop_assume!(!u.det().unwrap().is_zero());
        prop_assert_eq!(
            in_gl_orbit(&j, &w).unwrap().result,
            in_gl_orbit(&j.mul_const_right(&u).unwrap(), &w).unwrap().result
        );
    }
}
