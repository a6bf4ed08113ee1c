use involute::classify::{classify_walk, nu_m, params_from_mu_nu, Classification};
use involute::continuum::{
    invariant_inner, lh_apply, lp_apply_fn, ContinuousWalk, PolyFunction,
};
use involute::exactnum::{binom, binom_i, int, mbinom, rat, sign};
use involute::matrix::Matrix;
use involute::poly::Poly;
use involute::spectral::{eigenvalues_closed_form, lambda_closed_form};
use involute::transform::{
    binomial_transform, is_binomial_transform, is_stochastic, pascal, pl_matrix, LambdaSeq,
};
use involute::walk::{
    detailed_balance, invariant_closed_form, kolmogorov, stationary, transition_matrix, two_step,
    WalkMatrix,
};
use involute::weights::{domain_limit, norm, norm_direct, WeightSpec};
use involute::Rational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn small_rational(max_den: i64) -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1..=max_den).prop_map(|(p, q)| rat(p, q))
}

/// Parameters `> -1` with small denominators.
fn gamma_param() -> impl Strategy<Value = Rational> {
    (-3i64..=24, 1i64..=4).prop_map(|(p, q)| rat(p, q)).prop_filter("a > -1", |r| *r > int(-1))
}

fn family() -> impl Strategy<Value = WeightSpec> {
    prop_oneof![
        (gamma_param(), gamma_param()).prop_map(|(a, b)| WeightSpec::gamma_ab(a, b).unwrap()),
        (1i64..=12, 1i64..=4).prop_map(|(p, q)| WeightSpec::gamma_c(rat(p, q)).unwrap()),
        (5i64..=30, 5i64..=30)
            .prop_map(|(p, q)| WeightSpec::delta_ab(rat(p, 4), rat(q, 4)).unwrap()),
    ]
}

fn family_with_n(max_n: usize) -> impl Strategy<Value = (WeightSpec, usize)> {
    (family(), 2..=max_n).prop_filter("outside the domain", |(s, n)| domain_limit(s).admits(*n))
}

fn lambda_seq(max_n: usize) -> impl Strategy<Value = LambdaSeq> {
    prop::collection::vec(small_rational(9), 1..max_n)
        .prop_map(|tail| LambdaSeq::new(std::iter::once(int(1)).chain(tail).collect()))
}

/// `lambda` non-increasing in `[0, 1]` with `lambda_0 = 1`.
fn monotone_lambda(max_n: usize) -> impl Strategy<Value = LambdaSeq> {
    prop::collection::vec(0i64..=12, 1..max_n).prop_map(|mut steps| {
        steps.sort_unstable_by(|a, b| b.cmp(a));
        LambdaSeq::new(std::iter::once(int(1)).chain(steps.iter().map(|&k| rat(k, 12))).collect())
    })
}

fn signed_spectrum(lambda: &[Rational]) -> Poly {
    let roots: Vec<Rational> = lambda.iter().enumerate().map(|(d, l)| sign(d) * l).collect();
    Poly::from_roots(&roots)
}

proptest! {
    #[test]
    fn pascal_rule(r in 1i64..=30, d in 1u64..=30) {
        prop_assume!(d as i64 <= r);
        prop_assert_eq!(binom_i(r, d), binom_i(r - 1, d - 1) + binom_i(r - 1, d));
    }

    #[test]
    fn upper_negation(a in small_rational(6), y in 0u64..=10) {
        let lhs = binom(&(int(y as i64) - &a), y);
        prop_assert_eq!(lhs, sign(y as usize) * binom(&(&a - int(1)), y));
    }

    #[test]
    fn multiset_hockey_stick(x in 1i64..=12, c in 0u64..=6) {
        let lhs: Rational = (0..=x).map(|y| mbinom(&int(y + 1), c)).sum();
        prop_assert_eq!(lhs, mbinom(&int(x + 1), c + 1));
    }

    #[test]
    fn pascal_inverse(n in 1usize..=32) {
        let b = pascal(n);
        prop_assert_eq!(&b.forward * &b.inverse, Matrix::identity(n));
    }

    #[test]
    fn pascal_conjugates_reflection(n in 1usize..=12) {
        let b = pascal(n);
        let c = &(&b.inverse * &Matrix::anti_diagonal(n)) * &b.forward;
        for x in 0..n {
            for y in 0..n {
                let expect = sign(x) * binom_i((n - 1 - x) as i64, (n - 1 - y) as u64);
                prop_assert_eq!(&c[(x, y)], &expect);
            }
        }
    }

    #[test]
    fn transform_recurrence(lambda in lambda_seq(10)) {
        let h = binomial_transform(&lambda);
        let n = lambda.len();
        let l = lambda.values();
        for x in 0..n.saturating_sub(1) {
            prop_assert_eq!(&h[(x + 1, x)], &(int(x as i64 + 1) * (&l[x] - &l[x + 1])));
            for y in 0..=x {
                let lhs = &h[(x + 1, y)] / binom_i(x as i64 + 1, y as u64);
                let rhs = &h[(x, y)] / binom_i(x as i64, y as u64)
                    - &h[(x + 1, y + 1)] / binom_i(x as i64 + 1, y as u64 + 1);
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn transform_is_recognized(lambda in lambda_seq(10)) {
        prop_assert!(is_binomial_transform(&binomial_transform(&lambda)));
    }

    #[test]
    fn stochastic_criterion_matches_direct_check(lambda in monotone_lambda(8)) {
        let p = pl_matrix(&lambda);
        let direct = (0..p.rows()).all(|x| {
            p.row(x).iter().all(|v| !v.is_negative()) && p.row(x).iter().sum::<Rational>() == int(1)
        });
        let report = is_stochastic(&lambda);
        prop_assert_eq!(report.stochastic, direct);
        if report.sums.iter().all(|s| s.is_positive()) {
            let n = p.rows();
            for x in 0..n {
                for z in 0..n {
                    prop_assert_eq!(p[(x, z)].is_positive(), x + z + 1 >= n);
                }
            }
            prop_assert!(lambda.values().windows(2).all(|w| w[0] > w[1]));
        }
    }

    #[test]
    fn norms_agree((spec, n) in family_with_n(12)) {
        for x in 0..n {
            prop_assert_eq!(norm(&spec, x).unwrap(), norm_direct(&spec, x).unwrap());
        }
    }

    #[test]
    fn family_walks_are_anti_triangular_and_stochastic((spec, n) in family_with_n(10)) {
        let w = transition_matrix(&spec, n).unwrap();
        for x in 0..n {
            prop_assert_eq!(w.p().row(x).iter().sum::<Rational>(), int(1));
            for z in 0..n - 1 - x {
                prop_assert!(w.p()[(x, z)].is_zero());
            }
        }
    }

    #[test]
    fn family_is_binomial_transform_of_its_eigenvalues((spec, n) in family_with_n(10)) {
        let w = transition_matrix(&spec, n).unwrap();
        let lambda = LambdaSeq::new(lambda_closed_form(&spec, n).unwrap());
        prop_assert_eq!(w.h(), &binomial_transform(&lambda));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn stationary_is_closed_form((spec, n) in family_with_n(12)) {
        let w = transition_matrix(&spec, n).unwrap();
        let pi = stationary(w.p()).unwrap();
        prop_assert_eq!(&pi, &invariant_closed_form(&spec, n).unwrap());
        prop_assert!(detailed_balance(w.p(), &pi));
    }

    #[test]
    fn charpoly_is_signed_spectrum((spec, n) in family_with_n(9)) {
        let w = transition_matrix(&spec, n).unwrap();
        let lambda = lambda_closed_form(&spec, n).unwrap();
        prop_assert_eq!(w.p().charpoly(), signed_spectrum(&lambda));
        let signed = eigenvalues_closed_form(&spec, n).unwrap();
        prop_assert_eq!(Poly::from_roots(&signed), w.p().charpoly());
    }

    #[test]
    fn two_step_squares_spectrum((spec, n) in family_with_n(8)) {
        let w = transition_matrix(&spec, n).unwrap();
        let squares: Vec<Rational> =
            lambda_closed_form(&spec, n).unwrap().iter().map(|l| l * l).collect();
        prop_assert_eq!(two_step(&w).charpoly(), Poly::from_roots(&squares));
        prop_assert_eq!(two_step(&w), w.p() * w.p());
    }

    #[test]
    fn balance_iff_cycle_criterion(lambda in monotone_lambda(6)) {
        prop_assume!(is_stochastic(&lambda).stochastic);
        let w = WalkMatrix::from_transition(pl_matrix(&lambda)).unwrap();
        prop_assume!(w.ergodicity().ergodic);
        let pi = w.stationary().unwrap();
        prop_assert_eq!(w.detailed_balance(&pi), kolmogorov(&w).unwrap());
    }

    #[test]
    fn classification_inverts_closed_forms((spec, n) in family_with_n(8)) {
        prop_assume!(n >= 3);
        let lambda = LambdaSeq::new(lambda_closed_form(&spec, n).unwrap());
        let class = classify_walk(&lambda).unwrap();
        prop_assert!(class.is_classified(), "{} -> {}", lambda, class);
        let back = class.weight_spec().unwrap();
        prop_assert_eq!(lambda_closed_form(&back, n).unwrap(), lambda.values().to_vec());
        if let WeightSpec::GammaAB { .. } | WeightSpec::GammaC { .. } = spec {
            prop_assert_eq!(back, spec);
        }
    }

    #[test]
    fn params_reproduce_mu_nu(mu in 1i64..=19, nu in 0i64..=399, n in 3usize..=10) {
        let (mu, nu) = (rat(mu, 20), rat(nu, 400));
        prop_assume!(nu < mu);
        let class = params_from_mu_nu(&mu, &nu, n).unwrap();
        if let Some(spec) = class.weight_spec() {
            let l = lambda_closed_form(&spec, n).unwrap();
            prop_assert_eq!(&l[1], &mu);
            prop_assert_eq!(&l[2], &nu);
        } else {
            let unclassified = matches!(class, Classification::NotClassified { .. });
            prop_assert!(unclassified);
        }
    }

    #[test]
    fn ladder_increases_towards_mu_squared(k in 11i64..=19, m in 2usize..=20) {
        let mu = rat(k, 20);
        let (lo, hi) = (nu_m(&mu, m), nu_m(&mu, m + 1));
        prop_assert!(lo < hi);
        prop_assert!(hi < &mu * &mu);
    }
}

fn poly_coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3i32..=3, 1..=4).prop_map(|v| v.into_iter().map(f64::from).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lh_scales_monomials(a in 0u32..=2, b in 0u32..=2, d in 0usize..=6, x in 0.05f64..=1.0) {
        let mut c = vec![0.0; d + 1];
        c[d] = 1.0;
        let f = PolyFunction::Monomial(c);
        let lambda = involute::exactnum::to_f64(
            &lambda_closed_form(&WeightSpec::gamma_ab(int(a as i64), int(b as i64)).unwrap(), d + 1)
                .unwrap()[d],
        );
        let got = lh_apply(ContinuousWalk::Kappa { a, b }, &f, x).unwrap();
        prop_assert!((got - lambda * x.powi(d as i32)).abs() < 1e-9);
    }

    #[test]
    fn operator_is_self_adjoint(f in poly_coeffs(), g in poly_coeffs(), trig in any::<bool>()) {
        let walk = if trig { ContinuousWalk::Trig } else { ContinuousWalk::Kappa { a: 1, b: 1 } };
        let (f, g) = (PolyFunction::Monomial(f), PolyFunction::Monomial(g));
        let lf = |x: f64| lp_apply_fn(walk, |y| f.eval(y), x).unwrap();
        let lg = |x: f64| lp_apply_fn(walk, |y| g.eval(y), x).unwrap();
        let left = invariant_inner(walk, |x| f.eval(x), lg).unwrap();
        let right = invariant_inner(walk, lf, |x| g.eval(x)).unwrap();
        prop_assert!((left - right).abs() < 1e-8, "{left} vs {right}");
    }
}

#[test]
fn identity_walk_is_reflection() {
    let lambda = LambdaSeq::new(vec![Rational::one(); 5]);
    assert_eq!(pl_matrix(&lambda), Matrix::anti_diagonal(5));
}
