use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tracklab_noebeling::certify::{certify_path, refute_segment, segment_violations};
use tracklab_noebeling::geom::{parse_path, write_path, PLPath3, Point3};
use tracklab_noebeling::qsqrt2::{dyadic_between, qr, QSqrt2, Q};
use tracklab_noebeling::sample::{random_certified_path, random_segment, SegmentKind};

const KINDS: [SegmentKind; 4] = [
    SegmentKind::Planted,
    SegmentKind::Generic,
    SegmentKind::Constant,
    SegmentKind::Proportional,
];

#[test]
fn certifier_finds_everything_the_sampler_finds() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut refuted = 0;
    let mut certified = 0;
    for k in 0..800 {
        let (a, b) = random_segment(&mut rng, KINDS[k % 4], 1000);
        let path = PLPath3::uniform(vec![a.clone(), b.clone()]).unwrap();
        let cert = certify_path(&path);
        if let Some(t) = refute_segment(&a, &b, 1000) {
            refuted += 1;
            assert!(!cert.certified, "sampler found t={t} on a certified segment {a} -> {b}");
            let hit = a.lerp(&b, &QSqrt2::rational(t));
            assert!(hit.rational_count() >= 2);
        }
        if cert.certified {
            certified += 1;
        } else {
            // the witness is a genuine point of the segment with two
            // rational coordinates
            let w = cert.witness.expect("rejection carries a witness");
            assert!(!w.local.is_negative() && w.local <= QSqrt2::one());
            assert_eq!(a.lerp(&b, &w.local), w.point);
            assert!(w.point.coord(w.coords.0).is_rational());
            assert!(w.point.coord(w.coords.1).is_rational());
        }
    }
    assert!(refuted >= 200, "only {refuted} refutations");
    assert!(certified >= 100, "only {certified} certified");
}

#[test]
fn generated_paths_survive_the_sampler() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10 {
        let p = random_certified_path(&mut rng, 6, 0.05, 0.95);
        for k in 0..p.segment_count() {
            let (a, b) = p.segment(k);
            assert!(segment_violations(a, b).is_empty());
            assert_eq!(refute_segment(a, b, 2000), None);
        }
    }
}

#[test]
fn path_files_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let p = random_certified_path(&mut rng, 4, 0.1, 0.9);
    let text = write_path(&p);
    assert_eq!(parse_path(&text).unwrap(), p);
    assert!(parse_path("tracklab-path v1\nvertex nonsense\n").is_err());
}

fn arb_q() -> impl Strategy<Value = Q> {
    (-500i64..500, 1i64..60).prop_map(|(n, d)| qr(n, d))
}

fn arb_x() -> impl Strategy<Value = QSqrt2> {
    (arb_q(), arb_q()).prop_map(|(a, b)| QSqrt2::new(a, b))
}

proptest! {
    #[test]
    fn field_operations_are_consistent(x in arb_x(), y in arb_x()) {
        prop_assert_eq!(&(&x + &y) - &y, x.clone());
        if !y.is_zero() {
            prop_assert_eq!(&(&x * &y) / &y, x.clone());
        }
        // ordering agrees with floating point away from ties
        let (fx, fy) = (x.to_f64(), y.to_f64());
        if (fx - fy).abs() > 1e-9 {
            prop_assert_eq!(x < y, fx < fy);
        }
        prop_assert_eq!(x.is_rational(), x.conjugate() == x);
    }

    #[test]
    fn floor_brackets_the_value(x in arb_x()) {
        let f = QSqrt2::rational(Q::from_integer(x.floor()));
        prop_assert!(f <= x);
        prop_assert!(x < &f + &QSqrt2::one());
    }

    #[test]
    fn dyadic_between_is_strictly_inside(x in arb_x(), y in arb_x()) {
        prop_assume!(x != y);
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        let d = QSqrt2::rational(dyadic_between(&lo, &hi));
        prop_assert!(lo < d && d < hi);
    }

    #[test]
    fn display_round_trips(x in arb_x()) {
        let s = x.to_string();
        prop_assert_eq!(s.parse::<QSqrt2>().unwrap(), x);
    }

    #[test]
    fn certification_is_reversal_invariant(
        a in [arb_x(), arb_x(), arb_x()],
        b in [arb_x(), arb_x(), arb_x()],
    ) {
        let (a, b) = (Point3(a), Point3(b));
        let fwd = certify_path(&PLPath3::uniform(vec![a.clone(), b.clone()]).unwrap()).certified;
        let back = certify_path(&PLPath3::uniform(vec![b, a]).unwrap()).certified;
        prop_assert_eq!(fwd, back);
    }

    #[test]
    fn rational_end_points_with_two_rational_coordinates_are_rejected(
        x in arb_q(), y in arb_q(), z in arb_x(), b in [arb_x(), arb_x(), arb_x()],
    ) {
        let a = Point3::new(QSqrt2::rational(x), QSqrt2::rational(y), z);
        let cert = certify_path(&PLPath3::uniform(vec![a, Point3(b)]).unwrap());
        prop_assert!(!cert.certified);
    }
}
