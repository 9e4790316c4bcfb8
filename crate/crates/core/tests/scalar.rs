use mpkrylov::scalar::eft::{two_prod, two_sum};
use mpkrylov::{Complex, ComplexDd, Dd, MultiFloat, Qd, Td};
use mpkrylov_testkit::exact::{rel_error, value};
use proptest::prelude::*;

/// Values with a full significand of `53·N` bits and no gaps between
/// components, the class for which decimal round trips are guaranteed.
fn gapless<const N: usize>() -> impl Strategy<Value = MultiFloat<N>> {
    (-60i32..60, prop::collection::vec(-(1i64 << 52)..(1i64 << 52), N)).prop_map(|(e, m)| {
        let mut c = [0.0; N];
        for (k, ck) in c.iter_mut().enumerate() {
            let lead = if k == 0 { (1i64 << 52) | m[0].abs() } else { m[k] };
            let sign = if k == 0 && m[0] < 0 { -1.0 } else { 1.0 };
            *ck = sign * lead as f64 * 2f64.powi(e - 52 - 53 * k as i32);
        }
        MultiFloat::from_components(c)
    })
}

fn dd() -> impl Strategy<Value = Dd> {
    gapless::<2>()
}

fn qd() -> impl Strategy<Value = Qd> {
    gapless::<4>()
}

proptest! {
    #[test]
    fn two_sum_recovers_rounding_error(a in -1e300f64..1e300, b in -1e300f64..1e300) {
        let (s, e) = two_sum(a, b);
        prop_assert_eq!(s, a + b);
        // the error is representable and below half an ulp of s
        prop_assert!(e.abs() <= mpkrylov::scalar::eft::ulp(s) / 2.0);
    }

    #[test]
    fn two_prod_recovers_rounding_error(a in -1e100f64..1e100, b in -1e100f64..1e100) {
        let (p, e) = two_prod(a, b);
        prop_assert_eq!(p, a * b);
        prop_assert!(e.abs() <= mpkrylov::scalar::eft::ulp(p) / 2.0);
    }

    #[test]
    fn results_stay_canonical(a in qd(), b in qd()) {
        for r in [a + b, a - b, a * b, a / b, a.abs().sqrt()] {
            prop_assert!(r.is_canonical(), "{:?}", r);
        }
    }

    #[test]
    fn add_and_mul_commute(a in dd(), b in dd()) {
        prop_assert_eq!(a + b, b + a);
        prop_assert_eq!(a * b, b * a);
    }

    #[test]
    fn decimal_round_trip_dd(a in dd()) {
        let s = a.to_string();
        prop_assert_eq!(s.parse::<Dd>().unwrap(), a, "{}", s);
    }

    #[test]
    fn decimal_round_trip_qd(a in qd()) {
        let s = a.to_string();
        prop_assert_eq!(s.parse::<Qd>().unwrap(), a, "{}", s);
    }

    #[test]
    fn conversion_between_formats_is_exact_when_widening(a in dd()) {
        let wide: Qd = a.convert();
        prop_assert_eq!(value(wide), value(a));
        let back: Dd = wide.convert();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn complex_division_inverts_multiplication(
        re in -1e3f64..1e3, im in -1e3f64..1e3, wr in 0.5f64..10.0, wi in -10.0f64..10.0
    ) {
        let z = ComplexDd::new(Dd::from(re), Dd::from(im));
        let w = ComplexDd::new(Dd::from(wr), Dd::from(wi));
        let back = (z * w) / w;
        let err = (back - z).abs().to_f64();
        prop_assert!(err <= 1e-28 * (z.abs().to_f64() + 1.0), "{err:e}");
    }
}

#[test]
fn sqrt2_accuracy_per_format() {
    fn check<const N: usize>(bound: f64) {
        let s = MultiFloat::<N>::from_f64(2.0).sqrt();
        let two = value(MultiFloat::<N>::from_f64(2.0));
        let err = rel_error(&(value(s) * value(s)), &two) / 2.0;
        assert!(err <= bound, "{N}: {err:e}");
    }
    check::<2>(2f64.powi(-104));
    check::<3>(2f64.powi(-156));
    check::<4>(2f64.powi(-208));
}

#[test]
fn exact_results_are_exact() {
    assert_eq!(Td::from_f64(25.0).sqrt(), Td::from_f64(5.0));
    let x = Qd::from_components([1.0, 1e-20, 1e-40, 1e-60]);
    assert_eq!(x / x, Qd::from_f64(1.0));
    let z = Complex::new(Dd::from_f64(3.0), Dd::from_f64(4.0));
    assert_eq!(z.abs(), Dd::from_f64(5.0));
}

#[test]
fn parsed_literal_lands_on_the_format_grid() {
    let x = 9.166731346822225e-49;
    let s = Qd::from_f64(x).to_string();
    assert_eq!(s.parse::<Qd>().unwrap(), Qd::from_f64(x), "{s}");
}
