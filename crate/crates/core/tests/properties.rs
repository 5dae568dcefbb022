use crscl::oracle::{exact_reciprocal_scale, special_values, ulp_distance, Reference};
use crscl::*;
use proptest::prelude::*;

fn normal_or_special() -> impl Strategy<Value = f32> {
    prop_oneof![
        4 => any::<u32>().prop_map(f32::from_bits).prop_filter("normal", |v| v.is_normal()),
        1 => proptest::sample::select(special_values::<f32>().to_vec())
            .prop_filter("no subnormal", |v| !v.is_subnormal()),
    ]
}

fn moderate() -> impl Strategy<Value = f32> {
    (any::<bool>(), -10i32..=10, 0u64..(1 << 23))
        .prop_map(|(neg, e, frac)| f32::compose(neg, e, frac))
}

/// Both parts normal with exponents at most 20 apart, so `1/a` has normal parts.
fn balanced() -> impl Strategy<Value = Complex<f32>> {
    (
        any::<[bool; 2]>(),
        -120i32..=120,
        -20i32..=20,
        0u64..(1 << 23),
        0u64..(1 << 23),
    )
        .prop_map(|(neg, e, d, f, g)| {
            Complex::new(
                f32::compose(neg[0], e, f),
                f32::compose(neg[1], (e + d).clamp(-126, 127), g),
            )
        })
}

/// Subnormals and the smallest normals.
fn tiny() -> impl Strategy<Value = f32> {
    (any::<bool>(), 1u32..0x0090_0000).prop_map(|(neg, bits)| {
        let v = f32::from_bits(bits);
        if neg {
            -v
        } else {
            v
        }
    })
}

fn any_f32() -> impl Strategy<Value = f32> {
    any::<u32>().prop_map(f32::from_bits)
}

fn step_values<T: Real>(p: &ScalePlan<T>) -> Vec<Complex<T>> {
    p.steps().iter().map(ScaleStep::value).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4096))]

    #[test]
    fn classification_is_total(re in any_f32(), im in any_f32()) {
        let a = Complex::new(re, im);
        let plan = reciprocal_plan(a);
        prop_assert!(CaseTag::ALL.contains(&plan.case));
        prop_assert!((1..=2).contains(&plan.steps().len()));
        prop_assert!(plan.division_count <= 4);
        let expected_full = re != 0.0 && im != 0.0;
        prop_assert_eq!(plan.case.is_full(), expected_full);
        if expected_full && !a.is_finite() {
            prop_assert_eq!(plan.case, CaseTag::FullInfOperand);
        }
    }

    #[test]
    fn conjugate_symmetry(re in any_f32(), im in any_f32()) {
        let a = Complex::new(re, im);
        prop_assume!(a.is_finite() && re != 0.0 && im != 0.0);
        let p = reciprocal_plan(a);
        let q = reciprocal_plan(a.conj());
        prop_assert_eq!(p.case, q.case);
        for (s, t) in step_values(&p).into_iter().zip(step_values(&q)) {
            prop_assert!(s.conj() == t || (s.is_nan() && t.is_nan()), "{:?} vs {:?}", s, t);
        }
    }

    #[test]
    fn nan_factors_only_from_nan_or_double_infinity(re in normal_or_special(), im in normal_or_special()) {
        let a = Complex::new(re, im);
        let plan = reciprocal_plan(a);
        let has_nan = step_values(&plan).iter().any(|v| v.is_nan());
        let expected = re.is_nan() || im.is_nan() || (re.is_infinite() && im.is_infinite());
        prop_assert_eq!(has_nan, expected, "{:?} -> {:?}", a, plan);
    }

    #[test]
    fn infinite_factors_only_for_zero(re in normal_or_special(), im in normal_or_special()) {
        let a = Complex::new(re, im);
        let plan = reciprocal_plan(a);
        let has_inf = step_values(&plan).iter().any(|v| v.is_infinite());
        prop_assert_eq!(has_inf, a.is_zero(), "{:?} -> {:?}", a, plan);
    }

    #[test]
    fn nan_outputs_follow_operands(
        re in normal_or_special(), im in normal_or_special(),
        xr in moderate(), xi in moderate(),
    ) {
        let a = Complex::new(re, im);
        let x = Complex::new(xr, xi);
        if a.is_finite() && !a.is_zero() {
            // products stay below |x/a|, so only a finite quotient is meaningful
            let q = f32::exact_quotient(x, a).modulus();
            prop_assume!(q < f32::MAX as f64 / 4.0);
        }
        let mut v = [x];
        crscl(&mut StridedVector::contiguous(&mut v), a, &mut NoFlops);
        let expected = re.is_nan() || im.is_nan() || (re.is_infinite() && im.is_infinite());
        prop_assert_eq!(v[0].is_nan(), expected, "{:?} / {:?} = {:?}", x, a, v[0]);
    }

    #[test]
    fn plan_product_matches_reciprocal(a in balanced()) {
        let exact = f32::exact_quotient(Complex::one(), a);
        let (er, ei) = exact.part_magnitudes();
        let normal = |m: f64| m >= f32::SFMIN as f64 && m <= f32::MAX as f64;
        prop_assume!(normal(er) && normal(ei));
        let plan = reciprocal_plan(a);
        // the real steps are powers of two, so the product is exact in binary64
        let mut prod = (1.0f64, 0.0f64);
        for s in plan.steps() {
            let v = s.value();
            let (cr, ci) = (v.re as f64, v.im as f64);
            prod = (prod.0 * cr - prod.1 * ci, prod.0 * ci + prod.1 * cr);
        }
        let (xr, xi) = (exact.re.hi(), exact.im.hi());
        let tol = 4.0 * f32::EPSILON as f64;
        prop_assert!(((prod.0 - xr) / xr).abs() <= tol, "re {:?} {:?}", a, plan);
        prop_assert!(((prod.1 - xi) / xi).abs() <= tol, "im {:?} {:?}", a, plan);
        let m = (prod.0.hypot(prod.1) - xr.hypot(xi)).abs() / xr.hypot(xi);
        prop_assert!(m <= tol);
    }

    #[test]
    fn reciprocal_agrees_with_smith(a in balanced()) {
        let exact = f32::exact_quotient(Complex::one(), a);
        let (er, ei) = exact.part_magnitudes();
        let normal = |m: f64| m == 0.0 || (m >= f32::SFMIN as f64 && m <= f32::MAX as f64);
        prop_assume!(normal(er) && normal(ei));
        prop_assume!(!reciprocal_plan(a).underflow);
        let mut v = [Complex::one()];
        crscl(&mut StridedVector::contiguous(&mut v), a, &mut NoFlops);
        let s = complex_div(Complex::one(), a, Division::Smith, &mut NoFlops);
        // each side is within 4 roundings of 1/a in each part
        prop_assert!(ulp_distance(v[0].re, s.re).unwrap() <= 8, "{:?}: {:?} vs {:?}", a, v[0], s);
        prop_assert!(ulp_distance(v[0].im, s.im).unwrap() <= 8, "{:?}: {:?} vs {:?}", a, v[0], s);
    }

    #[test]
    fn oracle_inverts_exact_products(
        m in proptest::array::uniform4(-255i32..=255),
        e1 in -40i32..=40, e2 in -40i32..=40,
    ) {
        // 8-bit significands keep x*a exact
        let x = Complex::new(m[0] as f32 * f32::pow2(e1), m[1] as f32 * f32::pow2(e1));
        let a = Complex::new(m[2] as f32 * f32::pow2(e2), m[3] as f32 * f32::pow2(e2));
        prop_assume!(!a.is_zero());
        let z = x * a;
        prop_assert_eq!(exact_reciprocal_scale(z, a), x);
        let x64 = Complex::new(x.re as f64, x.im as f64);
        let a64 = Complex::new(a.re as f64, a.im as f64);
        prop_assert_eq!(exact_reciprocal_scale(x64 * a64, a64), x64);
    }

    #[test]
    fn crscl_within_bound_in_binary64(
        ar in -500i32..=500, ai in -500i32..=500, fr in 0u64..(1 << 52), fi in 0u64..(1 << 52),
        xr in -20i32..=20, xi in -20i32..=20, gr in 0u64..(1 << 52), gi in 0u64..(1 << 52),
        signs in any::<u8>(),
    ) {
        let s = |k: u8| signs & (1 << k) != 0;
        let a = Complex::new(f64::compose(s(0), ar, fr), f64::compose(s(1), ai, fi));
        let top = ar.max(ai);
        let x = Complex::new(
            f64::compose(s(2), (top + xr).clamp(-1022, 1023), gr),
            f64::compose(s(3), (top + xi).clamp(-1022, 1023), gi),
        );
        let exact = f64::exact_quotient(x, a);
        let m = exact.modulus();
        prop_assume!((2.0 * f64::SFMIN..=f64::MAX / 2.0).contains(&m));
        let plan = reciprocal_plan(a);
        prop_assume!(!plan.underflow);
        let mut v = [x];
        crscl(&mut StridedVector::contiguous(&mut v), a, &mut NoFlops);
        let err = oracle::relative_error(v[0], &exact).unwrap();
        let bound = 2f64.sqrt() * gamma(6, &fp_env(Precision::Binary64)).unwrap();
        prop_assert!(err <= bound, "{:?} / {:?}: {:e}", x, a, err);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 4096, max_global_rejects: 1 << 16, ..ProptestConfig::default() })]

    #[test]
    fn tiny_denominator_bounds(re in tiny(), im in tiny()) {
        let a = Complex::new(re, im);
        let (ur, ui) = compute_uv(a);
        prop_assume!(ur.abs() < f32::SFMIN);
        let s = f32::SFMIN as f64;
        let slack = 1.0 + 8.0 * f32::UNIT_ROUNDOFF as f64;
        let (ar, ai) = (re as f64, im as f64);
        prop_assert!(ar * ar + ai * ai <= s * s * slack);
        prop_assert!((ui as f64).abs() <= s * s / ai.abs() * slack);
    }
}

#[test]
fn stride_sentinels_survive_every_case() {
    let sentinel = Complex::new(f32::from_bits(0x7fc0_1234), f32::from_bits(0x7fc0_4321));
    for a in [
        Complex::new(4.0f32, 0.0),
        Complex::new(0.0, f32::pow2(-140)),
        Complex::new(3.0, 4.0),
        Complex::new(f32::pow2(-140), f32::pow2(-141)),
        Complex::new(f32::INFINITY, 1.0),
        Complex::new(f32::pow2(127), f32::pow2(127)),
        Complex::new(f32::pow2(126), f32::pow2(126)),
    ] {
        let mut buf = vec![sentinel; 40];
        for k in 0..10 {
            buf[3 + 4 * k] = Complex::new(1.0, 2.0);
        }
        let mut v = StridedVector::new(&mut buf, 3, 4, 10).unwrap();
        crscl(&mut v, a, &mut NoFlops);
        for (i, z) in buf.iter().enumerate() {
            if i < 3 || (i - 3) % 4 != 0 {
                assert!(z.bits_eq(sentinel), "{a:?}: index {i}");
            }
        }
    }
}
