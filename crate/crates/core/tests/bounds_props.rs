mod common;

use common::*;
use num_complex::Complex64;
use orthobound::*;
use proptest::prelude::*;
use rand::Rng;

fn opts() -> BoundOptions<f64> {
    BoundOptions::default()
}

fn chain_holds(r: &BoundReport<f64>) -> bool {
    let slack = 1e-9 * r.scale;
    r.left_value <= r.refined_bound + slack && r.refined_bound <= r.outer_bound + slack
}

/// Direct Σ x_k conj(y_k) without the library.
fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn condition_identity_and_form_agreement(seed in any::<u64>(), stretch in 0.0f64..3.0) {
        let mut r = rng(seed);
        let (dim, size, mode) = shape(&mut r);
        let fam = family(&mut r, dim, size, mode);
        let b = boxed(&mut r, size, mode);
        let center = fam.combination(&b.midpoints()).unwrap();
        let dir = vector(&mut r, dim, mode);
        let x = center.affine(1.0, &dir, stretch * b.radius() / dir.norm()).unwrap();
        let re = check_re_form(&x, &fam, &b, 1e-9).unwrap();
        let nf = check_norm_form(&x, &fam, &b, 1e-9).unwrap();
        let residual = re.re_form_value + re.norm_form_lhs.powi(2) - re.norm_form_rhs.powi(2);
        prop_assert!(residual.abs() <= 1e-10 * re.scale * (1.0 + stretch * stretch));
        if !re.ambiguous {
            prop_assert_eq!(re.satisfied, nf.satisfied);
        }
    }

    #[test]
    fn singleton_condition_is_scalar_form(seed in any::<u64>(), complex in any::<bool>()) {
        let mut r = rng(seed);
        let mode = mode_of(complex);
        let dim = r.random_range(1..=6);
        let fam = family(&mut r, dim, 1, mode);
        let b = boxed(&mut r, 1, mode);
        let x = vector(&mut r, dim, mode);
        let e = fam.members()[0].coords();
        let (lo, hi) = (b.lower()[0], b.upper()[0]);
        let a: Vec<_> = e.iter().zip(x.coords()).map(|(ek, xk)| hi * ek - xk).collect();
        let c: Vec<_> = e.iter().zip(x.coords()).map(|(ek, xk)| xk - lo * ek).collect();
        let oracle = dot(&a, &c).re;
        let rep = check_re_form(&x, &fam, &b, 1e-9).unwrap();
        prop_assert!((rep.re_form_value - oracle).abs() <= 1e-12 * (1.0 + oracle.abs() + x.norm_sqr()));
    }

    #[test]
    fn chains_hold_on_feasible_inputs(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (dim, size, mode) = shape(&mut r);
        let fam = family(&mut r, dim, size, mode);
        let bx = boxed(&mut r, size, mode);
        let by = boxed(&mut r, size, mode);
        let x = feasible(&mut r, &fam, &bx);
        let y = feasible(&mut r, &fam, &by);
        let reports = [
            bessel_counterpart_b1(&x, &fam, &bx, &opts()).unwrap(),
            bessel_counterpart_b2(&x, &fam, &bx, &opts()).unwrap(),
            compare_b1_b2(&x, &fam, &bx, &opts()).unwrap().report,
            gruess_v1(&x, &y, &fam, &bx, &by, &opts()).unwrap(),
            gruess_v2(&x, &y, &fam, &bx, &by, &opts()).unwrap(),
            lemma21_bound(&x, &fam, &bx.midpoints(), bx.radius(), &opts()).unwrap(),
        ];
        for rep in &reports {
            prop_assert!(rep.chain_ok && chain_holds(rep), "{:?}", rep);
            prop_assert!(rep.hypotheses_satisfied);
        }
    }

    #[test]
    fn companion_chains_hold(seed in any::<u64>(), lambda in 0.05f64..0.95) {
        let mut r = rng(seed);
        let (dim, size, mode) = shape(&mut r);
        let fam = family(&mut r, dim, size, mode);
        let b = boxed(&mut r, size, mode);
        let w = MixWeight::new(lambda).unwrap();
        let z = feasible(&mut r, &fam, &b);
        let y = vector(&mut r, dim, mode);
        let x = z.affine(1.0 / lambda, &y, -(1.0 - lambda) / lambda).unwrap();
        let rep = companion_bound(&x, &y, &fam, &b, w, &opts()).unwrap();
        prop_assert!(rep.chain_ok && chain_holds(&rep), "{:?}", rep);

        let minus = feasible(&mut r, &fam, &b);
        let xa = z.affine(0.5 / lambda, &minus, 0.5 / lambda).unwrap();
        let ya = z.affine(0.5 / (1.0 - lambda), &minus, -0.5 / (1.0 - lambda)).unwrap();
        let abs = companion_abs(&xa, &ya, &fam, &b, w, &opts()).unwrap();
        prop_assert!(abs.chain_ok && chain_holds(&abs), "{:?}", abs);
    }

    #[test]
    fn b2_agrees_with_lemma_at_box_center(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (dim, size, mode) = shape(&mut r);
        let fam = family(&mut r, dim, size, mode);
        let b = boxed(&mut r, size, mode);
        let x = feasible(&mut r, &fam, &b);
        let b2 = bessel_counterpart_b2(&x, &fam, &b, &opts()).unwrap();
        let l = lemma21_bound(&x, &fam, &b.midpoints(), b.radius(), &opts()).unwrap();
        let tol = 1e-12 * b2.scale;
        prop_assert!((b2.left_value - l.left_value).abs() <= tol);
        prop_assert!((b2.refined_bound - l.refined_bound).abs() <= tol);
        prop_assert!((b2.outer_bound - l.outer_bound).abs() <= tol);
    }

    #[test]
    fn gruess_v2_with_y_equal_x_is_b2(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (dim, size, mode) = shape(&mut r);
        let fam = family(&mut r, dim, size, mode);
        let b = boxed(&mut r, size, mode);
        let x = feasible(&mut r, &fam, &b);
        let g = gruess_v2(&x, &x, &fam, &b, &b, &opts()).unwrap();
        let b2 = bessel_counterpart_b2(&x, &fam, &b, &opts()).unwrap();
        let tol = 1e-12 * b2.scale;
        prop_assert!((g.left_value - b2.left_value).abs() <= tol);
        prop_assert!((g.refined_bound - b2.refined_bound).abs() <= tol);
        prop_assert!((g.outer_bound - b2.outer_bound).abs() <= tol);
    }

    #[test]
    fn companion_at_half_with_y_equal_x_is_b2(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (dim, size, mode) = shape(&mut r);
        let fam = family(&mut r, dim, size, mode);
        let b = boxed(&mut r, size, mode);
        let x = feasible(&mut r, &fam, &b);
        let c = companion_bound(&x, &x, &fam, &b, MixWeight::half(), &opts()).unwrap();
        let b2 = bessel_counterpart_b2(&x, &fam, &b, &opts()).unwrap();
        let tol = 1e-12 * b2.scale;
        prop_assert!((c.left_value - b2.left_value).abs() <= tol);
        prop_assert!((c.refined_bound - b2.refined_bound).abs() <= tol);
        prop_assert!((c.outer_bound - b2.outer_bound).abs() <= tol);
    }

    #[test]
    fn bounds_scale_quadratically(seed in any::<u64>(), t in 0.01f64..100.0) {
        let mut r = rng(seed);
        let (dim, size, mode) = shape(&mut r);
        let fam = family(&mut r, dim, size, mode);
        let b = boxed(&mut r, size, mode);
        let x = feasible(&mut r, &fam, &b);
        let base = bessel_counterpart_b1(&x, &fam, &b, &opts()).unwrap();
        let scaled = bessel_counterpart_b1(&x.affine(t, &x, 0.0).unwrap(), &fam, &b.scaled(t), &BoundOptions::forced()).unwrap();
        let t2 = t * t;
        let tol = 1e-10 * base.scale * t2;
        prop_assert!((scaled.left_value - t2 * base.left_value).abs() <= tol);
        prop_assert!((scaled.refined_bound - t2 * base.refined_bound).abs() <= tol);
        prop_assert!((scaled.outer_bound - t2 * base.outer_bound).abs() <= tol);
    }

    #[test]
    fn bessel_difference_has_direct_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (dim, size, mode) = shape(&mut r);
        let fam = family(&mut r, dim, size, mode);
        let x = vector(&mut r, dim, mode);
        let direct = dot(x.coords(), x.coords()).re
            - fam.members().iter().map(|e| dot(x.coords(), e.coords()).norm_sqr()).sum::<f64>();
        let got = bessel_difference(&x, &fam).unwrap();
        prop_assert!((got - direct).abs() <= 1e-12 * x.norm_sqr().max(1.0));
    }

    #[test]
    fn aczel_holds_on_admissible_tuples(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let a_terms: Vec<f64> = (0..n).map(|_| r.random_range(0.01..2.0)).collect();
        let b_terms: Vec<f64> = (0..n).map(|_| r.random_range(0.01..2.0)).collect();
        let na = a_terms.iter().map(|v| v * v).sum::<f64>().sqrt();
        let nb = b_terms.iter().map(|v| v * v).sum::<f64>().sqrt();
        let a = na * r.random_range(1.0..3.0);
        let b = nb * r.random_range(1.0..3.0);
        let out = aczel_check(a, b, &a_terms, &b_terms, 1e-12).unwrap();
        prop_assert!(out.holds, "{:?}", out);
    }
}

#[test]
fn aczel_equality_in_proportional_case() {
    let a_terms = [0.3, 0.4, 1.2];
    let k = 2.5;
    let b_terms: Vec<f64> = a_terms.iter().map(|v| v * k).collect();
    let out = aczel_check(2.0, 2.0 * k, &a_terms, &b_terms, 1e-12).unwrap();
    assert!(out.holds);
    assert!((out.lhs - out.rhs).abs() <= 1e-12 * out.rhs.max(1.0));
}

#[test]
fn remark_values_and_switch() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let fam =
        OrthonormalFamily::new(vec![Vector::from_real(&[s, s]).unwrap()], None, 1e-10).unwrap();
    let b = BoxBounds::from_real(&[-1.0], &[1.0]).unwrap();
    let eval = |k: f64| {
        let x = Vector::from_real(&[k * s, k * s]).unwrap();
        compare_b1_b2(&x, &fam, &b, &opts()).unwrap()
    };
    for k in [0.1, 0.25, 0.5, 0.7, 0.9, 1.0] {
        let c = eval(k);
        assert!((c.b1 - k * k).abs() <= 1e-12);
        assert!((c.b2 - (1.0 - k * k)).abs() <= 1e-12);
    }
    assert_eq!(eval(0.5).tighter, Tighter::B1);
    assert_eq!(eval(0.9).tighter, Tighter::B2);
    let (mut lo, mut hi) = (0.5, 0.9);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if eval(mid).b1 < eval(mid).b2 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!((lo - s).abs() <= 1e-9);
}

#[test]
fn hypothesis_failures_name_the_vector() {
    let fam = OrthonormalFamily::<f64>::canonical(2, &[0], Mode::Real).unwrap();
    let b = BoxBounds::from_real(&[0.0], &[1.0]).unwrap();
    let inside = Vector::from_real(&[0.5, 0.0]).unwrap();
    let outside = Vector::from_real(&[3.0, 0.0]).unwrap();
    match gruess_v2(&inside, &outside, &fam, &b, &b, &opts()) {
        Err(Error::Hypothesis { which, excess }) => {
            assert_eq!(which, "y");
            assert!(excess > 0.0);
        }
        other => panic!("{other:?}"),
    }
    let forced = gruess_v2(&inside, &outside, &fam, &b, &b, &BoundOptions::forced()).unwrap();
    assert!(forced.forced && !forced.hypotheses_satisfied);
}
